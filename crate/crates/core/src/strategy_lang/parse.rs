use super::{Atom, DefaultTactic, ListOp, Strategy, StrategyError, StrategyFile};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    Str(String),
    Sym(char),
    Eof,
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

fn syntax<T>(p: Pos, msg: impl Into<String>) -> Result<T, StrategyError> {
    Err(StrategyError::Syntax {
        line: p.line,
        col: p.col,
        msg: msg.into(),
    })
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, StrategyError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!();
        } else if c == '(' && chars.get(i + 1) == Some(&'*') {
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&')')) {
                bump!();
            }
            if i >= chars.len() {
                return syntax(pos, "unterminated comment");
            }
            bump!();
            bump!();
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let digits: String = chars[start..i].iter().collect();
            match digits.parse() {
                Ok(n) => out.push((Tok::Int(n), pos)),
                Err(_) => return syntax(pos, "integer out of range"),
            }
        } else if c == '"' {
            bump!();
            let start = i;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                bump!();
            }
            if i >= chars.len() || chars[i] != '"' {
                return syntax(pos, "unterminated string");
            }
            let s: String = chars[start..i].iter().collect();
            bump!();
            out.push((Tok::Str(s), pos));
        } else if "[](),=".contains(c) {
            bump!();
            out.push((Tok::Sym(c), pos));
        } else {
            return syntax(pos, format!("unexpected character `{c}`"));
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser<'e> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    base: &'e StrategyFile,
    defs: Vec<(String, Strategy)>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), StrategyError> {
        match self.next() {
            (Tok::Sym(d), _) if d == c => Ok(()),
            (_, p) => syntax(p, format!("expected `{c}`")),
        }
    }

    fn defined(&self, name: &str) -> bool {
        self.base.get(name).is_some() || self.defs.iter().any(|(n, _)| n == name)
    }

    fn file(&mut self) -> Result<(), StrategyError> {
        loop {
            match self.next() {
                (Tok::Eof, _) => return Ok(()),
                (Tok::Ident(kw), _) if kw == "strategy" => {
                    let (name, p) = match self.next() {
                        (Tok::Ident(n), p) => (n, p),
                        (_, p) => return syntax(p, "expected a strategy name"),
                    };
                    if Atom::is_reserved(&name) || name == "strategy" {
                        return syntax(p, format!("`{name}` is a reserved word"));
                    }
                    if self.defined(&name) {
                        return Err(StrategyError::Duplicate {
                            name,
                            line: p.line,
                            col: p.col,
                        });
                    }
                    self.expect('=')?;
                    let body = self.expr()?;
                    self.defs.push((name, body));
                }
                (_, p) => return syntax(p, "expected `strategy`"),
            }
        }
    }

    fn list(&mut self) -> Result<Vec<Strategy>, StrategyError> {
        self.expect('[')?;
        let mut items = vec![self.expr()?];
        loop {
            match self.next() {
                (Tok::Sym(','), _) => items.push(self.expr()?),
                (Tok::Sym(']'), _) => return Ok(items),
                (_, p) => return syntax(p, "expected `,` or `]`"),
            }
        }
    }

    fn paren(&mut self) -> Result<Strategy, StrategyError> {
        self.expect('(')?;
        let s = self.expr()?;
        self.expect(')')?;
        Ok(s)
    }

    fn expr(&mut self) -> Result<Strategy, StrategyError> {
        let (tok, p) = self.next();
        let word = match tok {
            Tok::Ident(w) => w,
            Tok::Sym('(') => {
                let s = self.expr()?;
                self.expect(')')?;
                return Ok(s);
            }
            _ => return syntax(p, "expected a strategy"),
        };
        let list_op = match word.as_str() {
            "Thens" => Some(ListOp::Thens),
            "Ors" => Some(ListOp::Ors),
            "Alts" => Some(ListOp::Alts),
            "POrs" => Some(ListOp::POrs),
            "PAlts" => Some(ListOp::PAlts),
            _ => None,
        };
        if let Some(op) = list_op {
            return Ok(Strategy::List(op, self.list()?));
        }
        Ok(match word.as_str() {
            "PThenOne" | "PThenAll" => {
                let mut items = self.list()?;
                if items.len() != 2 {
                    return Err(StrategyError::Arity {
                        combinator: word,
                        found: items.len(),
                        line: p.line,
                        col: p.col,
                    });
                }
                let b = Box::new(items.pop().expect("two items"));
                let a = Box::new(items.pop().expect("two items"));
                if word == "PThenOne" {
                    Strategy::PThenOne(a, b)
                } else {
                    Strategy::PThenAll(a, b)
                }
            }
            "Repeat" => Strategy::Repeat(Box::new(self.paren()?)),
            "RepeatN" => Strategy::RepeatN(Box::new(self.paren()?)),
            "Cut" => {
                let n = match self.next() {
                    (Tok::Int(n), _) if n >= 1 => n,
                    (_, q) => return syntax(q, "Cut expects a positive integer"),
                };
                let body = if *self.peek() == Tok::Sym('(') {
                    self.paren()?
                } else {
                    self.expr()?
                };
                Strategy::Cut(n, Box::new(body))
            }
            "Dynamic" => {
                self.expect('(')?;
                let kind = match self.next() {
                    (Tok::Ident(k), q) => DefaultTactic::from_name(&k)
                        .map_or_else(|| syntax(q, format!("`{k}` is not a default tactic")), Ok)?,
                    (_, q) => return syntax(q, "expected a default tactic"),
                };
                self.expect(')')?;
                Strategy::Atom(Atom::Dynamic(kind))
            }
            "User" => match self.next() {
                (Tok::Str(s), _) => Strategy::Atom(Atom::User(s)),
                (_, q) => return syntax(q, "User expects a quoted tactic name"),
            },
            _ => match Atom::keyword(&word) {
                Some(a) => Strategy::Atom(a),
                None if self.defined(&word) => Strategy::Named(word),
                None => {
                    return Err(StrategyError::Unresolved {
                        name: word,
                        line: p.line,
                        col: p.col,
                    })
                }
            },
        })
    }
}

/// Parses `strategy Name = expr` definitions. Names may refer to earlier
/// definitions in the same text or in `base`; the result holds only the
/// new definitions.
pub fn parse_strategy_file_with(text: &str, base: &StrategyFile) -> Result<StrategyFile, StrategyError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        base,
        defs: Vec::new(),
    };
    p.file()?;
    Ok(StrategyFile { defs: p.defs })
}

pub fn parse_strategy_file(text: &str) -> Result<StrategyFile, StrategyError> {
    parse_strategy_file_with(text, &StrategyFile::default())
}

/// Parses a single strategy expression whose names resolve in `env`.
pub fn parse_strategy_expr(text: &str, env: &StrategyFile) -> Result<Strategy, StrategyError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        base: env,
        defs: Vec::new(),
    };
    let s = p.expr()?;
    match p.next() {
        (Tok::Eof, _) => Ok(s),
        (_, q) => syntax(q, "unexpected input after the strategy"),
    }
}
