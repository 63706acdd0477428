use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn psl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psl")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[cfg(feature = "engine")]
fn report(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("report line");
    serde_json::from_str(line).unwrap()
}

#[cfg(feature = "engine")]
#[test]
fn proving_prints_the_script_and_a_report() {
    let thy = data("add_zero.thy");
    let out = psl(&["prove", "--theory", path(&thy), "--goal", "add_zero"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        fs::read_to_string(data("add_zero.script")).unwrap()
    );
    let r = report(&out);
    assert_eq!(r["status"], "proved");
    assert_eq!(r["strategy"], "Try_Hard");
    assert!(r["atom_calls"].as_u64().unwrap() > 0);
}

#[cfg(feature = "engine")]
#[test]
fn false_goal_reports_a_counterexample() {
    let thy = data("add_zero.thy");
    let out = psl(&[
        "prove",
        "--theory",
        path(&thy),
        "--goal",
        "add_false",
        "--strategy",
        "Thens [Quickcheck, Auto_Solve]",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let r = report(&out);
    assert_eq!(r["status"], "no_proof");
    assert_eq!(r["reason"], "exhausted");
    assert_eq!(r["counterexamples"][0]["assignment"], "x = Zero, y = Suc Zero");
}

#[cfg(feature = "engine")]
#[test]
fn emitted_script_replays() {
    let script = scratch("three_goals.script");
    let thy = data("three_goals.thy");
    let out = psl(&[
        "prove",
        "--theory",
        path(&thy),
        "--strategy",
        "RepeatN (Ors [Hammer, Thens [Quickcheck, Defer]])",
        "--emit",
        path(&script),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["reason"], "incomplete");
    let replayed = psl(&["replay", "--theory", path(&thy), "--script", path(&script)]);
    assert_eq!(replayed.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&replayed.stdout).starts_with("replayed 3 steps (0 back)\n"));
}

#[test]
fn usage_errors_exit_with_two() {
    let thy = data("add_zero.thy");
    let unknown = psl(&["prove", "--theory", path(&thy), "--strategy", "No_Such_Strategy"]);
    assert_eq!(unknown.status.code(), Some(2));
    let no_goals = psl(&["prove", "--theory", path(&thy), "--goal", "nope"]);
    assert_eq!(no_goals.status.code(), Some(2));
    let missing = psl(&[
        "replay",
        "--theory",
        path(&data("missing.thy")),
        "--script",
        path(&data("add_zero.script")),
    ]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(psl(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn replay_on_the_wrong_goal_fails() {
    let thy = data("add_zero.thy");
    let script = data("add_zero.script");
    let out = psl(&[
        "replay",
        "--theory",
        path(&thy),
        "--goal",
        "add_false",
        "--script",
        path(&script),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let unknown_goal = psl(&[
        "replay",
        "--theory",
        path(&thy),
        "--goal",
        "nope",
        "--script",
        path(&script),
    ]);
    assert_eq!(unknown_goal.status.code(), Some(1));
}

#[test]
fn check_classifies_files() {
    let empty = scratch("empty.thy");
    fs::write(&empty, "").unwrap();
    let out = psl(&["check", path(&empty)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));

    let bad = scratch("bad.thy");
    fs::write(&bad, "goal g: add x =\n").unwrap();
    assert_eq!(psl(&["check", path(&bad)]).status.code(), Some(2));

    let strategies = scratch("mine.psl");
    fs::write(&strategies, "strategy Mine = Thens [Auto_Solve, IsSolved]\n").unwrap();
    let ok = psl(&["check", path(&strategies), path(&data("rev_append.thy"))]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
}
