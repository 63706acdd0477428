use std::fmt;

use super::{Atom, ListOp, Strategy, StrategyError, StrategyFile};

/// Non-monadic combinators handled outside the core algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Combinator {
    Cut(usize),
    POrs,
    PAlts,
    PThenOne,
    PThenAll,
}

/// Binary core language.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoreStrategy {
    Atom(Atom),
    Skip,
    Fail,
    Then(Box<CoreStrategy>, Box<CoreStrategy>),
    Alt(Box<CoreStrategy>, Box<CoreStrategy>),
    Or(Box<CoreStrategy>, Box<CoreStrategy>),
    Rep(Box<CoreStrategy>),
    RepN(Box<CoreStrategy>),
    Comb(Combinator, Vec<CoreStrategy>),
}

impl CoreStrategy {
    pub fn then(a: CoreStrategy, b: CoreStrategy) -> CoreStrategy {
        CoreStrategy::Then(Box::new(a), Box::new(b))
    }

    pub fn alt(a: CoreStrategy, b: CoreStrategy) -> CoreStrategy {
        CoreStrategy::Alt(Box::new(a), Box::new(b))
    }

    pub fn or(a: CoreStrategy, b: CoreStrategy) -> CoreStrategy {
        CoreStrategy::Or(Box::new(a), Box::new(b))
    }

    pub fn size(&self) -> usize {
        1 + match self {
            CoreStrategy::Atom(_) | CoreStrategy::Skip | CoreStrategy::Fail => 0,
            CoreStrategy::Then(a, b) | CoreStrategy::Alt(a, b) | CoreStrategy::Or(a, b) => a.size() + b.size(),
            CoreStrategy::Rep(a) | CoreStrategy::RepN(a) => a.size(),
            CoreStrategy::Comb(_, xs) => xs.iter().map(CoreStrategy::size).sum(),
        }
    }
}

impl fmt::Display for CoreStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreStrategy::Atom(a) => write!(f, "{a}"),
            CoreStrategy::Skip => write!(f, "skip"),
            CoreStrategy::Fail => write!(f, "fail"),
            CoreStrategy::Then(a, b) => write!(f, "then({a}, {b})"),
            CoreStrategy::Alt(a, b) => write!(f, "alt({a}, {b})"),
            CoreStrategy::Or(a, b) => write!(f, "or({a}, {b})"),
            CoreStrategy::Rep(a) => write!(f, "rep({a})"),
            CoreStrategy::RepN(a) => write!(f, "repn({a})"),
            CoreStrategy::Comb(c, xs) => {
                write!(f, "{c:?}(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn right_nest(items: Vec<CoreStrategy>, mk: fn(CoreStrategy, CoreStrategy) -> CoreStrategy) -> CoreStrategy {
    let mut it = items.into_iter().rev();
    let last = it.next().expect("combinator lists are non-empty");
    it.fold(last, |acc, x| mk(x, acc))
}

/// Expands names and rewrites n-ary combinators into right-nested binary
/// form. `user_tactic` says whether a `User` name is registered.
pub fn desugar(
    s: &Strategy,
    env: &StrategyFile,
    user_tactic: &dyn Fn(&str) -> bool,
) -> Result<CoreStrategy, StrategyError> {
    let go = |x: &Strategy| desugar(x, env, user_tactic);
    Ok(match s {
        Strategy::Atom(Atom::User(name)) if !user_tactic(name) => {
            return Err(StrategyError::UnknownUserTactic(name.clone()))
        }
        Strategy::Atom(a) => CoreStrategy::Atom(a.clone()),
        Strategy::Named(n) => {
            let body = env.get(n).ok_or_else(|| StrategyError::UnknownName(n.clone()))?;
            go(body)?
        }
        Strategy::List(op, items) => {
            if items.is_empty() {
                return Err(StrategyError::UnknownName(format!("{} []", op.name())));
            }
            let xs = items.iter().map(go).collect::<Result<Vec<_>, _>>()?;
            match op {
                ListOp::Thens => right_nest(xs, CoreStrategy::then),
                ListOp::Ors => right_nest(xs, CoreStrategy::or),
                ListOp::Alts => right_nest(xs, CoreStrategy::alt),
                ListOp::POrs if xs.len() == 1 => xs.into_iter().next().expect("one item"),
                ListOp::PAlts if xs.len() == 1 => xs.into_iter().next().expect("one item"),
                ListOp::POrs => CoreStrategy::Comb(Combinator::POrs, xs),
                ListOp::PAlts => CoreStrategy::Comb(Combinator::PAlts, xs),
            }
        }
        Strategy::Repeat(x) => CoreStrategy::Rep(Box::new(go(x)?)),
        Strategy::RepeatN(x) => CoreStrategy::RepN(Box::new(go(x)?)),
        Strategy::PThenOne(a, b) => CoreStrategy::Comb(Combinator::PThenOne, vec![go(a)?, go(b)?]),
        Strategy::PThenAll(a, b) => CoreStrategy::Comb(Combinator::PThenAll, vec![go(a)?, go(b)?]),
        Strategy::Cut(n, x) => CoreStrategy::Comb(Combinator::Cut(*n), vec![go(x)?]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy_lang::{parse_strategy_expr, parse_strategy_file, DefaultTactic};

    fn atom(d: DefaultTactic) -> CoreStrategy {
        CoreStrategy::Atom(Atom::Default(d))
    }

    fn ds(text: &str) -> CoreStrategy {
        let s = parse_strategy_expr(text, &StrategyFile::default()).unwrap();
        desugar(&s, &StrategyFile::default(), &|n| n == "assumption").unwrap()
    }

    fn no_nary(c: &CoreStrategy) -> bool {
        match c {
            CoreStrategy::Then(a, b) | CoreStrategy::Alt(a, b) | CoreStrategy::Or(a, b) => no_nary(a) && no_nary(b),
            CoreStrategy::Rep(a) | CoreStrategy::RepN(a) => no_nary(a),
            CoreStrategy::Comb(_, xs) => xs.iter().all(no_nary),
            _ => true,
        }
    }

    #[test]
    fn right_nesting() {
        use DefaultTactic::*;
        assert_eq!(
            ds("Ors [Simp, Auto, Blast]"),
            CoreStrategy::or(atom(Simp), CoreStrategy::or(atom(Auto), atom(Blast)))
        );
        assert_eq!(ds("Thens [Simp]"), atom(Simp));
        assert_eq!(
            ds("Repeat (Ors [Simp, Auto])"),
            CoreStrategy::Rep(Box::new(CoreStrategy::or(atom(Simp), atom(Auto))))
        );
    }

    #[test]
    fn names_expand_and_users_are_checked() {
        let env = parse_strategy_file("strategy A = Thens [Auto, IsSolved]\nstrategy B = Ors [A, Simp]").unwrap();
        let b = desugar(env.get("B").unwrap(), &env, &|_| false).unwrap();
        assert!(no_nary(&b));
        assert_eq!(b.size(), 5);
        let u = parse_strategy_expr("User \"nope\"", &env).unwrap();
        assert_eq!(
            desugar(&u, &env, &|n| n == "assumption"),
            Err(StrategyError::UnknownUserTactic("nope".into()))
        );
        assert!(matches!(ds("User \"assumption\""), CoreStrategy::Atom(Atom::User(_))));
    }

    #[test]
    fn size_is_linear() {
        let items = vec!["Auto"; 50].join(", ");
        let c = ds(&format!("Thens [{items}]"));
        assert_eq!(c.size(), 99);
        assert!(no_nary(&c));
    }
}
