use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use psl_cli::{cmd_check, cmd_replay, CliError};

#[derive(Parser)]
#[command(
    name = "psl",
    version,
    about = "Search for proofs with strategy programs and replay the scripts they emit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a proof and print its script.
    Prove {
        #[arg(long)]
        theory: PathBuf,
        /// Goal label; repeat to prove several goals together. Defaults to
        /// every goal of the theory.
        #[arg(long = "goal")]
        goals: Vec<String>,
        /// Strategy name or expression.
        #[arg(long, default_value = "Try_Hard")]
        strategy: String,
        #[arg(long = "strategy-file")]
        strategy_files: Vec<PathBuf>,
        /// Wall-clock limit in seconds; 0 disables it.
        #[arg(long, default_value_t = 60)]
        timeout: u64,
        #[arg(long, default_value_t = 30)]
        max_depth: usize,
        #[arg(long, default_value_t = 1)]
        deepening_step: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 1024)]
        variant_cap: usize,
        /// Also write the script to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long)]
        no_prelude: bool,
        #[arg(short, long)]
        verbose: bool,
    },
    /// Replay a script without search.
    Replay {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long = "goal")]
        goals: Vec<String>,
        #[arg(long)]
        script: PathBuf,
    },
    /// Parse theory and strategy files.
    Check { paths: Vec<PathBuf> },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

#[cfg(feature = "engine")]
#[allow(clippy::too_many_arguments)]
fn prove(
    theory: PathBuf,
    goals: Vec<String>,
    strategy: String,
    strategy_files: Vec<PathBuf>,
    timeout: u64,
    max_depth: usize,
    deepening_step: usize,
    threads: usize,
    variant_cap: usize,
    emit: Option<PathBuf>,
    no_prelude: bool,
    verbose: bool,
) -> ExitCode {
    use std::time::Duration;
    let cfg = psl_cli::RunConfig {
        theory,
        goals,
        strategy,
        strategy_files,
        timeout: (timeout > 0).then(|| Duration::from_secs(timeout)),
        max_depth,
        deepening_step,
        threads,
        variant_cap,
        emit,
        no_prelude,
        verbose,
    };
    let out = match psl_cli::cmd_prove(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    if let Some(script) = &out.script {
        print!("{script}");
    }
    let r = &out.report;
    match (&r.status[..], &r.reason) {
        ("proved", _) => {}
        (_, Some(reason)) if reason == "incomplete" => {
            eprintln!("incomplete: open goals {}", r.remaining_goals.join(", "))
        }
        (_, reason) => eprintln!("no proof found: {}", reason.as_deref().unwrap_or("unknown")),
    }
    for c in &r.counterexamples {
        eprintln!("counterexample for {} ({}): {}", c.goal, c.tool, c.assignment);
    }
    if cfg.verbose {
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
        if let Some(state) = &out.final_state {
            eprint!("final state:\n{}", psl_cli::render_state(state));
        }
    }
    eprintln!("{}", r.to_json());
    ExitCode::from(out.code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        #[cfg(feature = "engine")]
        Command::Prove {
            theory,
            goals,
            strategy,
            strategy_files,
            timeout,
            max_depth,
            deepening_step,
            threads,
            variant_cap,
            emit,
            no_prelude,
            verbose,
        } => prove(
            theory,
            goals,
            strategy,
            strategy_files,
            timeout,
            max_depth,
            deepening_step,
            threads,
            variant_cap,
            emit,
            no_prelude,
            verbose,
        ),
        #[cfg(not(feature = "engine"))]
        Command::Prove { .. } => fail(CliError::Usage(
            "this build has no search engine; only `replay` and `check` are available".into(),
        )),
        Command::Replay { theory, goals, script } => match cmd_replay(&theory, &goals, &script) {
            Ok(out) => {
                if out.code == psl_cli::EXIT_OK {
                    print!("{}", out.message);
                } else {
                    eprintln!("replay failed: {}", out.message);
                }
                ExitCode::from(out.code as u8)
            }
            Err(e) => fail(e),
        },
        Command::Check { paths } => {
            let out = cmd_check(&paths);
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for e in &out.errors {
                eprintln!("error: {e}");
            }
            ExitCode::from(out.code as u8)
        }
    }
}
