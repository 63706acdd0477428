//! Strategy language: surface syntax, parser, and desugaring into the
//! binary core language interpreted by the engine.

mod desugar;
mod parse;

use std::fmt;

use thiserror::Error;

pub use desugar::{desugar, Combinator, CoreStrategy};
pub use parse::{parse_strategy_expr, parse_strategy_file, parse_strategy_file_with};

/// Standard strategy library, ending in `Try_Hard`.
pub const PRELUDE: &str = include_str!("../../prelude.psl");

/// Default tactics, usable directly or as the kind of a `Dynamic` atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DefaultTactic {
    Simp,
    Clarsimp,
    Fastforce,
    Auto,
    Induct,
    Rule,
    Erule,
    Cases,
    Coinduction,
    Blast,
    InductTac,
    CaseTac,
}

impl DefaultTactic {
    pub const ALL: [DefaultTactic; 12] = [
        DefaultTactic::Simp,
        DefaultTactic::Clarsimp,
        DefaultTactic::Fastforce,
        DefaultTactic::Auto,
        DefaultTactic::Induct,
        DefaultTactic::Rule,
        DefaultTactic::Erule,
        DefaultTactic::Cases,
        DefaultTactic::Coinduction,
        DefaultTactic::Blast,
        DefaultTactic::InductTac,
        DefaultTactic::CaseTac,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DefaultTactic::Simp => "Simp",
            DefaultTactic::Clarsimp => "Clarsimp",
            DefaultTactic::Fastforce => "Fastforce",
            DefaultTactic::Auto => "Auto",
            DefaultTactic::Induct => "Induct",
            DefaultTactic::Rule => "Rule",
            DefaultTactic::Erule => "Erule",
            DefaultTactic::Cases => "Cases",
            DefaultTactic::Coinduction => "Coinduction",
            DefaultTactic::Blast => "Blast",
            DefaultTactic::InductTac => "InductTac",
            DefaultTactic::CaseTac => "CaseTac",
        }
    }

    pub fn from_name(s: &str) -> Option<DefaultTactic> {
        Self::ALL.into_iter().find(|d| d.name() == s)
    }
}

/// Atomic strategies: everything the backend evaluates directly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Default(DefaultTactic),
    Dynamic(DefaultTactic),
    IsSolved,
    Defer,
    IntroClasses,
    Transfer,
    Normalization,
    Skip,
    Fail,
    Subgoal,
    User(String),
    Hammer,
    Nitpick,
    Quickcheck,
}

const SPECIAL: [(&str, Atom); 11] = [
    ("IsSolved", Atom::IsSolved),
    ("Defer", Atom::Defer),
    ("IntroClasses", Atom::IntroClasses),
    ("Transfer", Atom::Transfer),
    ("Normalization", Atom::Normalization),
    ("Skip", Atom::Skip),
    ("Fail", Atom::Fail),
    ("Subgoal", Atom::Subgoal),
    ("Hammer", Atom::Hammer),
    ("Nitpick", Atom::Nitpick),
    ("Quickcheck", Atom::Quickcheck),
];

impl Atom {
    /// Atom written as a bare keyword, if `s` is one.
    pub fn keyword(s: &str) -> Option<Atom> {
        if let Some(d) = DefaultTactic::from_name(s) {
            return Some(Atom::Default(d));
        }
        SPECIAL.iter().find(|(k, _)| *k == s).map(|(_, a)| a.clone())
    }

    pub fn is_reserved(s: &str) -> bool {
        Atom::keyword(s).is_some() || COMPOUND_KEYWORDS.contains(&s) || s == "User" || s == "Dynamic"
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Default(d) => write!(f, "{}", d.name()),
            Atom::Dynamic(d) => write!(f, "Dynamic ({})", d.name()),
            Atom::User(name) => write!(f, "User \"{name}\""),
            other => {
                let (k, _) = SPECIAL
                    .iter()
                    .find(|(_, a)| a == other)
                    .expect("every special atom has a keyword");
                write!(f, "{k}")
            }
        }
    }
}

const COMPOUND_KEYWORDS: [&str; 10] = [
    "Thens", "Ors", "Alts", "POrs", "PAlts", "PThenOne", "PThenAll", "Repeat", "RepeatN", "Cut",
];

/// List combinators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ListOp {
    Thens,
    Ors,
    Alts,
    POrs,
    PAlts,
}

impl ListOp {
    pub fn name(self) -> &'static str {
        match self {
            ListOp::Thens => "Thens",
            ListOp::Ors => "Ors",
            ListOp::Alts => "Alts",
            ListOp::POrs => "POrs",
            ListOp::PAlts => "PAlts",
        }
    }
}

/// Surface strategy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Atom(Atom),
    /// Reference to an earlier definition.
    Named(String),
    List(ListOp, Vec<Strategy>),
    Repeat(Box<Strategy>),
    RepeatN(Box<Strategy>),
    PThenOne(Box<Strategy>, Box<Strategy>),
    PThenAll(Box<Strategy>, Box<Strategy>),
    Cut(usize, Box<Strategy>),
}

impl Strategy {
    pub fn thens(items: Vec<Strategy>) -> Strategy {
        Strategy::List(ListOp::Thens, items)
    }

    pub fn ors(items: Vec<Strategy>) -> Strategy {
        Strategy::List(ListOp::Ors, items)
    }

    pub fn alts(items: Vec<Strategy>) -> Strategy {
        Strategy::List(ListOp::Alts, items)
    }

    pub fn atom(a: Atom) -> Strategy {
        Strategy::Atom(a)
    }

    pub fn size(&self) -> usize {
        1 + match self {
            Strategy::Atom(_) | Strategy::Named(_) => 0,
            Strategy::List(_, items) => items.iter().map(Strategy::size).sum(),
            Strategy::Repeat(s) | Strategy::RepeatN(s) | Strategy::Cut(_, s) => s.size(),
            Strategy::PThenOne(a, b) | Strategy::PThenAll(a, b) => a.size() + b.size(),
        }
    }
}

/// Renders parseable text.
pub fn render_strategy(s: &Strategy) -> String {
    s.to_string()
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, items: &[&Strategy]| {
            write!(f, "{name} [")?;
            for (i, s) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, "]")
        };
        match self {
            Strategy::Atom(a) => write!(f, "{a}"),
            Strategy::Named(n) => write!(f, "{n}"),
            Strategy::List(op, items) => list(f, op.name(), &items.iter().collect::<Vec<_>>()),
            Strategy::Repeat(s) => write!(f, "Repeat ({s})"),
            Strategy::RepeatN(s) => write!(f, "RepeatN ({s})"),
            Strategy::PThenOne(a, b) => list(f, "PThenOne", &[a, b]),
            Strategy::PThenAll(a, b) => list(f, "PThenAll", &[a, b]),
            Strategy::Cut(n, s) => write!(f, "Cut {n} ({s})"),
        }
    }
}

/// Ordered named definitions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrategyFile {
    pub defs: Vec<(String, Strategy)>,
}

impl StrategyFile {
    pub fn get(&self, name: &str) -> Option<&Strategy> {
        self.defs.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(|(n, _)| n.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

impl fmt::Display for StrategyFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, s) in &self.defs {
            writeln!(f, "strategy {n} = {s}")?;
        }
        Ok(())
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: strategy `{name}` is already defined")]
    Duplicate { name: String, line: usize, col: usize },
    #[error("line {line}, column {col}: unresolved strategy `{name}`")]
    Unresolved { name: String, line: usize, col: usize },
    #[error("line {line}, column {col}: {combinator} takes exactly two sub-strategies, found {found}")]
    Arity {
        combinator: String,
        found: usize,
        line: usize,
        col: usize,
    },
    #[error("unresolved strategy `{0}`")]
    UnknownName(String),
    #[error("no user tactic named `{0}` is registered")]
    UnknownUserTactic(String),
}
