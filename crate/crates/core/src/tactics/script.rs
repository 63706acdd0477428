//! Replayable tactic steps and their script syntax.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::Name;

/// A deterministic tactic invocation as it appears in a proof script.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ScriptTactic {
    Auto {
        simp_add: Vec<Name>,
    },
    Simp {
        add: Vec<Name>,
    },
    Clarsimp {
        add: Vec<Name>,
    },
    Fastforce {
        simp_add: Vec<Name>,
        intro: Vec<Name>,
    },
    Blast,
    Assumption,
    Rule(Name),
    Erule(Name),
    Induct {
        vars: Vec<Name>,
        arbitrary: Vec<Name>,
        rule: Option<Name>,
    },
    Cases {
        var: Name,
        rule: Option<Name>,
    },
    Defer,
    Subgoal,
    /// Closes a focus opened by `subgoal`.
    Done,
    User(Name),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("cannot parse script step `{text}`: {msg}")]
pub struct ScriptParseError {
    pub text: String,
    pub msg: String,
}

const KEYWORDS: [&str; 14] = [
    "auto",
    "simp",
    "clarsimp",
    "fastforce",
    "blast",
    "assumption",
    "rule",
    "erule",
    "induct",
    "cases",
    "defer",
    "subgoal",
    "done",
    "apply",
];

fn names(f: &mut fmt::Formatter<'_>, xs: &[Name]) -> fmt::Result {
    for x in xs {
        write!(f, " {x}")?;
    }
    Ok(())
}

impl fmt::Display for ScriptTactic {
    /// Tactic text without the `apply` keyword.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScriptTactic::Auto { simp_add } => {
                write!(f, "auto")?;
                if !simp_add.is_empty() {
                    write!(f, " simp add:")?;
                    names(f, simp_add)?;
                }
                Ok(())
            }
            ScriptTactic::Simp { add } | ScriptTactic::Clarsimp { add } => {
                write!(
                    f,
                    "{}",
                    if matches!(self, ScriptTactic::Simp { .. }) {
                        "simp"
                    } else {
                        "clarsimp"
                    }
                )?;
                if !add.is_empty() {
                    write!(f, " add:")?;
                    names(f, add)?;
                }
                Ok(())
            }
            ScriptTactic::Fastforce { simp_add, intro } => {
                write!(f, "fastforce")?;
                if !simp_add.is_empty() {
                    write!(f, " simp add:")?;
                    names(f, simp_add)?;
                }
                if !intro.is_empty() {
                    write!(f, " intro:")?;
                    names(f, intro)?;
                }
                Ok(())
            }
            ScriptTactic::Blast => write!(f, "blast"),
            ScriptTactic::Assumption => write!(f, "assumption"),
            ScriptTactic::Rule(l) => write!(f, "rule {l}"),
            ScriptTactic::Erule(l) => write!(f, "erule {l}"),
            ScriptTactic::Induct { vars, arbitrary, rule } => {
                write!(f, "induct")?;
                names(f, vars)?;
                if !arbitrary.is_empty() {
                    write!(f, " arbitrary:")?;
                    names(f, arbitrary)?;
                }
                if let Some(r) = rule {
                    write!(f, " rule: {r}")?;
                }
                Ok(())
            }
            ScriptTactic::Cases { var, rule } => {
                write!(f, "cases {var}")?;
                if let Some(r) = rule {
                    write!(f, " rule: {r}")?;
                }
                Ok(())
            }
            ScriptTactic::Defer => write!(f, "defer"),
            ScriptTactic::Subgoal => write!(f, "subgoal"),
            ScriptTactic::Done => write!(f, "done"),
            ScriptTactic::User(n) => write!(f, "{n}"),
        }
    }
}

impl ScriptTactic {
    /// One script line: `defer`, `apply auto`, `apply (simp add: l)`.
    pub fn to_line(&self) -> String {
        match self {
            ScriptTactic::Defer | ScriptTactic::Subgoal | ScriptTactic::Done => self.to_string(),
            _ => {
                let text = self.to_string();
                if text.contains(' ') {
                    format!("apply ({text})")
                } else {
                    format!("apply {text}")
                }
            }
        }
    }

    /// Parses a script line produced by [`to_line`](Self::to_line).
    pub fn parse_line(line: &str) -> Result<ScriptTactic, ScriptParseError> {
        let line = line.trim();
        let err = |msg: &str| ScriptParseError {
            text: line.to_string(),
            msg: msg.to_string(),
        };
        match line {
            "defer" => return Ok(ScriptTactic::Defer),
            "subgoal" => return Ok(ScriptTactic::Subgoal),
            "done" => return Ok(ScriptTactic::Done),
            _ => {}
        }
        let rest = line
            .strip_prefix("apply")
            .ok_or_else(|| err("expected `apply`"))?
            .trim();
        let body = match rest.strip_prefix('(') {
            Some(inner) => inner.strip_suffix(')').ok_or_else(|| err("missing `)`"))?,
            None if rest.contains(' ') => return Err(err("multi-word tactics must be parenthesized")),
            None => rest,
        };
        Self::parse_text(body).map_err(|msg| err(&msg))
    }

    /// Parses tactic text without `apply`.
    pub fn parse_text(text: &str) -> Result<ScriptTactic, String> {
        let words: Vec<&str> = text.split_whitespace().collect();
        let Some((&head, args)) = words.split_first() else {
            return Err("empty tactic".into());
        };
        let sections = sections(args)?;
        let only = |allowed: &[&str]| -> Result<(), String> {
            match sections.iter().find(|(k, _)| !allowed.contains(k)) {
                Some((k, _)) => Err(format!("`{head}` does not accept `{k}`")),
                None => Ok(()),
            }
        };
        let get = |k: &str| -> Vec<Name> {
            sections
                .iter()
                .find(|(s, _)| *s == k)
                .map(|(_, v)| v.iter().map(|x| Name::from(*x)).collect())
                .unwrap_or_default()
        };
        let single = |k: &str| -> Result<Option<Name>, String> {
            let v = get(k);
            match v.len() {
                0 if sections.iter().any(|(s, _)| *s == k) => Err(format!("`{k}` needs a name")),
                0 => Ok(None),
                1 => Ok(Some(v[0].clone())),
                _ => Err(format!("`{k}` takes one name")),
            }
        };
        Ok(match head {
            "auto" => {
                only(&["simp add:"])?;
                ScriptTactic::Auto {
                    simp_add: get("simp add:"),
                }
            }
            "simp" | "clarsimp" => {
                only(&["add:"])?;
                let add = get("add:");
                if head == "simp" {
                    ScriptTactic::Simp { add }
                } else {
                    ScriptTactic::Clarsimp { add }
                }
            }
            "fastforce" => {
                only(&["simp add:", "intro:"])?;
                ScriptTactic::Fastforce {
                    simp_add: get("simp add:"),
                    intro: get("intro:"),
                }
            }
            "blast" | "assumption" | "defer" | "subgoal" | "done" if args.is_empty() => match head {
                "blast" => ScriptTactic::Blast,
                "assumption" => ScriptTactic::Assumption,
                "defer" => ScriptTactic::Defer,
                "subgoal" => ScriptTactic::Subgoal,
                _ => ScriptTactic::Done,
            },
            "rule" | "erule" => {
                only(&[""])?;
                let l = single("")?.ok_or_else(|| format!("`{head}` needs a rule name"))?;
                if head == "rule" {
                    ScriptTactic::Rule(l)
                } else {
                    ScriptTactic::Erule(l)
                }
            }
            "induct" => {
                only(&["", "arbitrary:", "rule:"])?;
                let vars = get("");
                if vars.is_empty() {
                    return Err("`induct` needs at least one variable".into());
                }
                ScriptTactic::Induct {
                    vars,
                    arbitrary: get("arbitrary:"),
                    rule: single("rule:")?,
                }
            }
            "cases" => {
                only(&["", "rule:"])?;
                ScriptTactic::Cases {
                    var: single("")?.ok_or("`cases` needs a variable")?,
                    rule: single("rule:")?,
                }
            }
            user if args.is_empty() && !KEYWORDS.contains(&user) && is_identifier(user) => {
                ScriptTactic::User(Arc::from(user))
            }
            _ => return Err(format!("unknown tactic `{head}`")),
        })
    }
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || c == '_' || c == '.' || c == '\'')
}

/// Splits `x y arbitrary: z rule: r` into keyed sections; the leading
/// section has key `""`.
fn sections<'a>(args: &[&'a str]) -> Result<Vec<(&'static str, Vec<&'a str>)>, String> {
    let mut out: Vec<(&'static str, Vec<&'a str>)> = vec![("", Vec::new())];
    let mut i = 0;
    while i < args.len() {
        let key = match args[i] {
            "simp" if args.get(i + 1) == Some(&"add:") => {
                i += 1;
                Some("simp add:")
            }
            "add:" => Some("add:"),
            "intro:" => Some("intro:"),
            "arbitrary:" => Some("arbitrary:"),
            "rule:" => Some("rule:"),
            _ => None,
        };
        match key {
            Some(k) => {
                if out.iter().any(|(s, _)| *s == k) {
                    return Err(format!("`{k}` given twice"));
                }
                out.push((k, Vec::new()));
            }
            None if is_identifier(args[i]) => out.last_mut().expect("non-empty").1.push(args[i]),
            None => return Err(format!("unexpected `{}`", args[i])),
        }
        i += 1;
    }
    if out[0].1.is_empty() {
        out.remove(0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::from(s)
    }

    #[test]
    fn lines_round_trip() {
        let cases = vec![
            (ScriptTactic::Auto { simp_add: vec![] }, "apply auto"),
            (
                ScriptTactic::Simp {
                    add: vec![n("add_zero"), n("add_suc")],
                },
                "apply (simp add: add_zero add_suc)",
            ),
            (ScriptTactic::Clarsimp { add: vec![] }, "apply clarsimp"),
            (
                ScriptTactic::Fastforce {
                    simp_add: vec![n("a")],
                    intro: vec![n("b")],
                },
                "apply (fastforce simp add: a intro: b)",
            ),
            (
                ScriptTactic::Auto { simp_add: vec![n("a")] },
                "apply (auto simp add: a)",
            ),
            (ScriptTactic::Blast, "apply blast"),
            (ScriptTactic::Assumption, "apply assumption"),
            (ScriptTactic::Rule(n("conjI")), "apply (rule conjI)"),
            (ScriptTactic::Erule(n("conjE")), "apply (erule conjE)"),
            (
                ScriptTactic::Induct {
                    vars: vec![n("xs"), n("zs")],
                    arbitrary: vec![n("ys")],
                    rule: Some(n("r")),
                },
                "apply (induct xs zs arbitrary: ys rule: r)",
            ),
            (
                ScriptTactic::Cases {
                    var: n("x"),
                    rule: None,
                },
                "apply (cases x)",
            ),
            (ScriptTactic::Defer, "defer"),
            (ScriptTactic::Subgoal, "subgoal"),
            (ScriptTactic::Done, "done"),
            (ScriptTactic::User(n("my_tac")), "apply my_tac"),
        ];
        for (tac, line) in cases {
            assert_eq!(tac.to_line(), line);
            assert_eq!(ScriptTactic::parse_line(line).unwrap(), tac);
        }
    }

    #[test]
    fn malformed_lines() {
        for bad in [
            "apply",
            "apply simp add: x",
            "apply (induct)",
            "apply (rule)",
            "apply (cases x y)",
            "oops",
            "apply (auto intro: x)",
        ] {
            assert!(ScriptTactic::parse_line(bad).is_err(), "{bad}");
        }
    }
}
