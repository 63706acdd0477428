//! Parser for line-oriented theory files.
//!
//! ```text
//! datatype nat = Zero | Suc nat
//! fun add Zero y = y
//! fun add (Suc x) y = Suc (add x y)
//! pred even nat
//! lemma [simp] add_zero: add x Zero = x
//! goal add_comm: add x y = add y x
//! ```
//!
//! Formulas use `~`, `&`, `|`, `-->` (tightest first) over equations and
//! predicate atoms; a declaration's hypotheses are separated by `==>`.
//! Variable types are inferred.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use super::term::{Formula, Name, Term, Var};
use super::{Attr, Context, CtorSig, Datatype, Equation, Function, Goal, KernelError, Lemma, ProofState};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    fn err<T>(self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

const KEYWORDS: [&str; 5] = ["datatype", "fun", "pred", "lemma", "goal"];
const SYMBOLS: [&str; 12] = ["==>", "-->", "(", ")", "[", "]", ",", ":", "=", "|", "&", "~"];

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize| {
        if chars[*i] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col);
        } else if c == '(' && chars.get(i + 1) == Some(&'*') {
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&')')) {
                bump(&mut i, &mut line, &mut col);
            }
            if i >= chars.len() {
                return pos.err("unterminated comment");
            }
            bump(&mut i, &mut line, &mut col);
            bump(&mut i, &mut line, &mut col);
        } else if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                bump(&mut i, &mut line, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            };
            out.push((tok, pos));
        } else {
            let rest: String = chars[i..(i + 3).min(chars.len())].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    for _ in 0..s.len() {
                        bump(&mut i, &mut line, &mut col);
                    }
                    out.push((Tok::Sym(s), pos));
                }
                None => return pos.err(format!("unexpected character `{c}`")),
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BinOp {
    Eq,
    And,
    Or,
    Implies,
}

/// Untyped expression; identifiers are applications with no arguments.
#[derive(Clone, Debug)]
enum Raw {
    App {
        head: String,
        args: Vec<Raw>,
        pos: Pos,
    },
    Bin {
        op: BinOp,
        lhs: Box<Raw>,
        rhs: Box<Raw>,
        pos: Pos,
    },
    Not(Box<Raw>, Pos),
}

impl Raw {
    fn pos(&self) -> Pos {
        match self {
            Raw::App { pos, .. } | Raw::Bin { pos, .. } | Raw::Not(_, pos) => *pos,
        }
    }
}

enum Decl {
    Datatype {
        name: String,
        ctors: Vec<(String, Vec<String>, Pos)>,
        pos: Pos,
    },
    Fun {
        eq: Raw,
        pos: Pos,
    },
    Pred {
        name: String,
        types: Vec<String>,
        pos: Pos,
    },
    Lemma {
        attrs: Vec<Attr>,
        label: String,
        parts: Vec<Raw>,
        pos: Pos,
    },
    Goal {
        label: String,
        parts: Vec<Raw>,
        pos: Pos,
    },
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.pos().err(format!("expected `{sym}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.next() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (_, p) => p.err(format!("expected {what}")),
        }
    }

    fn decls(&mut self) -> Result<Vec<Decl>, ParseError> {
        let mut out = Vec::new();
        loop {
            let (tok, pos) = self.next();
            let decl = match tok {
                Tok::Eof => return Ok(out),
                Tok::Kw("datatype") => self.datatype(pos)?,
                Tok::Kw("fun") => Decl::Fun { eq: self.expr()?, pos },
                Tok::Kw("pred") => {
                    let (name, _) = self.ident("predicate name")?;
                    let mut types = Vec::new();
                    while let Tok::Ident(t) = self.peek().clone() {
                        self.next();
                        types.push(t);
                    }
                    Decl::Pred { name, types, pos }
                }
                Tok::Kw("lemma") => {
                    let mut attrs = Vec::new();
                    if self.eat("[") {
                        loop {
                            let (a, p) = self.ident("attribute")?;
                            match Attr::parse(&a) {
                                Some(attr) => attrs.push(attr),
                                None => return p.err(format!("unknown attribute `{a}`")),
                            }
                            if !self.eat(",") {
                                break;
                            }
                        }
                        self.expect("]")?;
                    }
                    let (label, _) = self.ident("lemma label")?;
                    self.expect(":")?;
                    Decl::Lemma {
                        attrs,
                        label,
                        parts: self.statement()?,
                        pos,
                    }
                }
                Tok::Kw("goal") => {
                    let (label, _) = self.ident("goal label")?;
                    self.expect(":")?;
                    Decl::Goal {
                        label,
                        parts: self.statement()?,
                        pos,
                    }
                }
                _ => return pos.err("expected a declaration (datatype, fun, pred, lemma or goal)"),
            };
            out.push(decl);
        }
    }

    fn datatype(&mut self, pos: Pos) -> Result<Decl, ParseError> {
        let (name, _) = self.ident("datatype name")?;
        self.expect("=")?;
        let mut ctors = Vec::new();
        loop {
            let (c, p) = self.ident("constructor name")?;
            let mut args = Vec::new();
            while let Tok::Ident(t) = self.peek().clone() {
                self.next();
                args.push(t);
            }
            ctors.push((c, args, p));
            if !self.eat("|") {
                break;
            }
        }
        Ok(Decl::Datatype { name, ctors, pos })
    }

    fn statement(&mut self) -> Result<Vec<Raw>, ParseError> {
        let mut parts = vec![self.expr()?];
        while self.eat("==>") {
            parts.push(self.expr()?);
        }
        Ok(parts)
    }

    fn expr(&mut self) -> Result<Raw, ParseError> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> Result<Raw, ParseError> {
        const LEVELS: [(&str, BinOp); 3] = [("-->", BinOp::Implies), ("|", BinOp::Or), ("&", BinOp::And)];
        if level == LEVELS.len() {
            return self.negation();
        }
        let lhs = self.binary(level + 1)?;
        let (sym, op) = LEVELS[level];
        let pos = self.pos();
        if self.eat(sym) {
            let rhs = self.binary(level)?;
            return Ok(Raw::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            });
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<Raw, ParseError> {
        let pos = self.pos();
        if self.eat("~") {
            return Ok(Raw::Not(Box::new(self.negation()?), pos));
        }
        let lhs = self.application()?;
        let pos = self.pos();
        if self.eat("=") {
            let rhs = self.application()?;
            return Ok(Raw::Bin {
                op: BinOp::Eq,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            });
        }
        Ok(lhs)
    }

    fn application(&mut self) -> Result<Raw, ParseError> {
        match self.peek().clone() {
            Tok::Ident(head) => {
                let pos = self.pos();
                self.next();
                let mut args = Vec::new();
                while matches!(self.peek(), Tok::Ident(_) | Tok::Sym("(")) {
                    args.push(self.atom()?);
                }
                Ok(Raw::App { head, args, pos })
            }
            Tok::Sym("(") => self.atom(),
            _ => self.pos().err("expected an expression"),
        }
    }

    fn atom(&mut self) -> Result<Raw, ParseError> {
        match self.next() {
            (Tok::Ident(head), pos) => Ok(Raw::App {
                head,
                args: Vec::new(),
                pos,
            }),
            (Tok::Sym("("), _) => {
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            (_, pos) => pos.err("expected an identifier or `(`"),
        }
    }
}

/// Union-find over type slots, each optionally bound to a datatype name.
#[derive(Default)]
struct Types {
    parent: Vec<usize>,
    bound: Vec<Option<Name>>,
}

impl Types {
    fn fresh(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.bound.push(None);
        self.parent.len() - 1
    }

    fn concrete(&mut self, ty: &Name) -> usize {
        let s = self.fresh();
        self.bound[s] = Some(ty.clone());
        s
    }

    fn find(&mut self, mut s: usize) -> usize {
        while self.parent[s] != s {
            self.parent[s] = self.parent[self.parent[s]];
            s = self.parent[s];
        }
        s
    }

    fn unify(&mut self, a: usize, b: usize, pos: Pos) -> Result<(), ParseError> {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return Ok(());
        }
        match (self.bound[a].clone(), self.bound[b].clone()) {
            (Some(x), Some(y)) if x != y => pos.err(format!("type mismatch: `{x}` versus `{y}`")),
            (x, y) => {
                self.parent[a] = b;
                self.bound[b] = x.or(y);
                Ok(())
            }
        }
    }

    fn resolve(&mut self, s: usize) -> Option<Name> {
        let r = self.find(s);
        self.bound[r].clone()
    }
}

/// Type inference and resolution of raw expressions against a context.
struct Typer<'c> {
    ctx: &'c Context,
    types: Types,
    /// Function signatures as type slots (arguments, result).
    sigs: BTreeMap<String, (Vec<usize>, usize)>,
    vars: BTreeMap<String, usize>,
    motives: BTreeMap<(String, usize), usize>,
}

impl<'c> Typer<'c> {
    fn new(ctx: &'c Context) -> Self {
        let mut t = Typer {
            ctx,
            types: Types::default(),
            sigs: BTreeMap::new(),
            vars: BTreeMap::new(),
            motives: BTreeMap::new(),
        };
        for f in &ctx.functions {
            let args = f.arg_types.iter().map(|a| t.types.concrete(a)).collect();
            let res = t.types.concrete(&f.result);
            t.sigs.insert(f.name.to_string(), (args, res));
        }
        t
    }

    fn reset_locals(&mut self) {
        self.vars.clear();
        self.motives.clear();
    }

    fn term(&mut self, raw: &Raw) -> Result<usize, ParseError> {
        let Raw::App { head, args, pos } = raw else {
            return raw.pos().err("expected a term, found a formula");
        };
        if let Some((dt, sig)) = self.ctx.ctor(head) {
            if sig.args.len() != args.len() {
                return pos.err(format!(
                    "constructor `{head}` expects {} argument(s), found {}",
                    sig.args.len(),
                    args.len()
                ));
            }
            let (arg_tys, dt_name) = (sig.args.clone(), dt.name.clone());
            for (a, ty) in args.iter().zip(&arg_tys) {
                let s = self.term(a)?;
                let c = self.types.concrete(ty);
                self.types.unify(s, c, a.pos())?;
            }
            return Ok(self.types.concrete(&dt_name));
        }
        if let Some((arg_slots, res)) = self.sigs.get(head).cloned() {
            if arg_slots.len() != args.len() {
                return pos.err(format!(
                    "function `{head}` expects {} argument(s), found {}",
                    arg_slots.len(),
                    args.len()
                ));
            }
            for (a, slot) in args.iter().zip(arg_slots) {
                let s = self.term(a)?;
                self.types.unify(s, slot, a.pos())?;
            }
            return Ok(res);
        }
        if !args.is_empty() {
            return pos.err(format!("unknown function `{head}`"));
        }
        if head == "True" || head == "False" || self.ctx.is_pred(head) {
            return pos.err(format!("`{head}` is not a term"));
        }
        if let Some(s) = self.vars.get(head) {
            return Ok(*s);
        }
        let s = self.types.fresh();
        self.vars.insert(head.clone(), s);
        Ok(s)
    }

    fn formula(&mut self, raw: &Raw) -> Result<(), ParseError> {
        match raw {
            Raw::Bin {
                op: BinOp::Eq,
                lhs,
                rhs,
                pos,
            } => {
                let (a, b) = (self.term(lhs)?, self.term(rhs)?);
                self.types.unify(a, b, *pos)
            }
            Raw::Bin { lhs, rhs, .. } => {
                self.formula(lhs)?;
                self.formula(rhs)
            }
            Raw::Not(a, _) => self.formula(a),
            Raw::App { head, args, pos } => {
                if (head == "True" || head == "False") && args.is_empty() {
                    return Ok(());
                }
                if self.ctx.ctor(head).is_some() || self.sigs.contains_key(head) {
                    return pos.err(format!("`{head}` is a term, expected a formula"));
                }
                if let Some(tys) = self.ctx.preds.get(head.as_str()).cloned() {
                    if tys.len() != args.len() {
                        return pos.err(format!(
                            "predicate `{head}` expects {} argument(s), found {}",
                            tys.len(),
                            args.len()
                        ));
                    }
                    for (a, ty) in args.iter().zip(&tys) {
                        let s = self.term(a)?;
                        let c = self.types.concrete(ty);
                        self.types.unify(s, c, a.pos())?;
                    }
                    return Ok(());
                }
                for (i, a) in args.iter().enumerate() {
                    let s = self.term(a)?;
                    let slot = match self.motives.get(&(head.clone(), i)) {
                        Some(slot) => *slot,
                        None => {
                            let slot = self.types.fresh();
                            self.motives.insert((head.clone(), i), slot);
                            slot
                        }
                    };
                    self.types.unify(s, slot, a.pos())?;
                }
                Ok(())
            }
        }
    }

    fn var_type(&mut self, name: &str, pos: Pos) -> Result<Name, ParseError> {
        let slot = self.vars[name];
        match self.types.resolve(slot) {
            Some(t) => Ok(t),
            None => pos.err(format!("cannot infer the type of variable `{name}`")),
        }
    }

    fn build_term(&mut self, raw: &Raw) -> Result<Term, ParseError> {
        let Raw::App { head, args, pos } = raw else {
            return raw.pos().err("expected a term");
        };
        let built = args.iter().map(|a| self.build_term(a)).collect::<Result<Vec<_>, _>>()?;
        if self.ctx.ctor(head).is_some() {
            Ok(Term::Ctor(Arc::from(head.as_str()), built))
        } else if self.sigs.contains_key(head) {
            Ok(Term::App(Arc::from(head.as_str()), built))
        } else {
            let ty = self.var_type(head, *pos)?;
            Ok(Term::Var(Var {
                name: Arc::from(head.as_str()),
                ty,
            }))
        }
    }

    fn build_formula(&mut self, raw: &Raw) -> Result<Formula, ParseError> {
        Ok(match raw {
            Raw::Bin { op, lhs, rhs, .. } => match op {
                BinOp::Eq => Formula::eq(self.build_term(lhs)?, self.build_term(rhs)?),
                BinOp::And => Formula::and(self.build_formula(lhs)?, self.build_formula(rhs)?),
                BinOp::Or => Formula::or(self.build_formula(lhs)?, self.build_formula(rhs)?),
                BinOp::Implies => Formula::implies(self.build_formula(lhs)?, self.build_formula(rhs)?),
            },
            Raw::Not(a, _) => Formula::negate(self.build_formula(a)?),
            Raw::App { head, args, .. } => match head.as_str() {
                "True" if args.is_empty() => Formula::True,
                "False" if args.is_empty() => Formula::False,
                _ => Formula::Atom(
                    Arc::from(head.as_str()),
                    args.iter().map(|a| self.build_term(a)).collect::<Result<_, _>>()?,
                ),
            },
        })
    }

    /// Infers and builds a `H1 ==> ... ==> C` statement.
    fn statement(&mut self, parts: &[Raw]) -> Result<(Vec<Formula>, Formula), ParseError> {
        self.reset_locals();
        for p in parts {
            self.formula(p)?;
        }
        let mut fs = parts
            .iter()
            .map(|p| self.build_formula(p))
            .collect::<Result<Vec<_>, _>>()?;
        let concl = fs.pop().expect("statements have at least one part");
        Ok((fs, concl))
    }
}

/// A parsed theory: the proof context and the goals in declaration order.
#[derive(Clone, Debug)]
pub struct Theory {
    pub context: Context,
    pub goals: Vec<Goal>,
    /// For each goal, the number of lemmas declared before it.
    lemmas_before: Vec<usize>,
}

impl Theory {
    pub fn goal(&self, label: &str) -> Option<&Goal> {
        self.goals.iter().find(|g| &*g.label == label)
    }

    /// Goal (or lemma statement) named `label` together with the number of
    /// lemmas that may be used to prove it.
    fn obligation(&self, label: &str) -> Option<(Goal, usize)> {
        if let Some(i) = self.goals.iter().position(|g| &*g.label == label) {
            return Some((self.goals[i].clone(), self.lemmas_before[i]));
        }
        let i = self.context.lemmas.iter().position(|l| &*l.label == label)?;
        let l = &self.context.lemmas[i];
        Some((Goal::new(label, l.hyps.clone(), l.concl.clone()), i))
    }

    /// Proof state over the named goals, whose lemma bank only holds lemmas
    /// declared before the earliest of them.
    pub fn proof_state(&self, labels: &[&str]) -> Result<ProofState, KernelError> {
        if labels.is_empty() {
            return Err(KernelError::NoGoals);
        }
        let mut goals = Vec::new();
        let mut visible = usize::MAX;
        for l in labels {
            let (g, n) = self
                .obligation(l)
                .ok_or_else(|| KernelError::UnknownLemma(l.to_string()))?;
            goals.push(g);
            visible = visible.min(n);
        }
        let mut ctx = self.context.clone();
        ctx.lemmas.truncate(visible);
        Ok(ProofState::new(Arc::new(ctx), goals))
    }
}

fn check_fresh(seen: &mut BTreeSet<String>, name: &str, pos: Pos) -> Result<(), ParseError> {
    if !seen.insert(name.to_string()) {
        return pos.err(format!("`{name}` is already declared"));
    }
    Ok(())
}

pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    let decls = Parser {
        toks: lex(text)?,
        at: 0,
    }
    .decls()?;
    let mut ctx = Context::default();
    let mut constants = BTreeSet::new();

    // Datatypes, predicates and function arities first.
    let mut fun_order: Vec<String> = Vec::new();
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    for d in &decls {
        match d {
            Decl::Datatype { name, ctors, pos } => {
                if ctx.datatype(name).is_some() {
                    return pos.err(format!("datatype `{name}` is already declared"));
                }
                let mut sigs = Vec::new();
                for (c, args, p) in ctors {
                    check_fresh(&mut constants, c, *p)?;
                    for a in args {
                        if a != name && ctx.datatype(a).is_none() {
                            return p.err(format!("unknown type `{a}`"));
                        }
                    }
                    sigs.push(CtorSig {
                        name: Arc::from(c.as_str()),
                        args: args.iter().map(|a| Arc::from(a.as_str())).collect(),
                    });
                }
                ctx.datatypes.push(Datatype {
                    name: Arc::from(name.as_str()),
                    ctors: sigs,
                });
            }
            Decl::Pred { name, types, pos } => {
                check_fresh(&mut constants, name, *pos)?;
                for t in types {
                    if ctx.datatype(t).is_none() {
                        return pos.err(format!("unknown type `{t}`"));
                    }
                }
                ctx.preds.insert(
                    Arc::from(name.as_str()),
                    types.iter().map(|t| Arc::from(t.as_str())).collect(),
                );
            }
            Decl::Fun { eq, pos } => {
                let Raw::Bin { op: BinOp::Eq, lhs, .. } = eq else {
                    return pos.err("expected an equation `f pats = rhs`");
                };
                let Raw::App { head, args, pos: hp } = &**lhs else {
                    return lhs.pos().err("left-hand side must be a function application");
                };
                match arities.get(head) {
                    Some(n) if *n != args.len() => {
                        return hp.err(format!(
                            "function `{head}` expects {n} argument(s), found {}",
                            args.len()
                        ))
                    }
                    Some(_) => {}
                    None => {
                        check_fresh(&mut constants, head, *hp)?;
                        arities.insert(head.clone(), args.len());
                        fun_order.push(head.clone());
                    }
                }
            }
            _ => {}
        }
    }

    // Function equations: infer signatures jointly.
    let mut typer = Typer::new(&ctx);
    for f in &fun_order {
        let args = (0..arities[f]).map(|_| typer.types.fresh()).collect();
        let res = typer.types.fresh();
        typer.sigs.insert(f.clone(), (args, res));
    }
    let mut fun_eqs: Vec<(String, Term, Term, Pos)> = Vec::new();
    let fun_decls: Vec<(&Raw, Pos)> = decls
        .iter()
        .filter_map(|d| match d {
            Decl::Fun { eq, pos } => Some((eq, *pos)),
            _ => None,
        })
        .collect();
    let mut locals = Vec::new();
    for (eq, _) in &fun_decls {
        typer.reset_locals();
        typer.formula(eq)?;
        locals.push(typer.vars.clone());
    }
    for ((eq, pos), vars) in fun_decls.iter().zip(locals) {
        typer.vars = vars;
        let Raw::Bin { lhs, rhs, .. } = eq else { unreachable!() };
        let (l, r) = (typer.build_term(lhs)?, typer.build_term(rhs)?);
        if l.args().iter().any(has_app) {
            return pos.err("patterns may only contain constructors and variables");
        }
        let mut lvars = Vec::new();
        l.collect_vars(&mut lvars);
        let mut rvars = Vec::new();
        r.collect_vars(&mut rvars);
        if let Some(v) = rvars.iter().find(|v| !lvars.contains(v)) {
            return pos.err(format!("variable `{}` does not occur on the left-hand side", v.name));
        }
        let Term::App(f, _) = &l else { unreachable!() };
        fun_eqs.push((f.to_string(), l, r, *pos));
    }
    let mut functions = Vec::new();
    for f in &fun_order {
        let (arg_slots, res) = typer.sigs[f].clone();
        let pos = fun_eqs.iter().find(|e| &e.0 == f).map(|e| e.3).unwrap_or_default();
        let mut arg_types = Vec::new();
        for s in arg_slots {
            match typer.types.resolve(s) {
                Some(t) => arg_types.push(t),
                None => return pos.err(format!("cannot infer the argument types of `{f}`")),
            }
        }
        let Some(result) = typer.types.resolve(res) else {
            return pos.err(format!("cannot infer the result type of `{f}`"));
        };
        let equations = fun_eqs
            .iter()
            .filter(|e| &e.0 == f)
            .enumerate()
            .map(|(i, e)| Equation {
                label: Arc::from(format!("{f}.{}", i + 1)),
                lhs: e.1.clone(),
                rhs: e.2.clone(),
            })
            .collect();
        functions.push(Function {
            name: Arc::from(f.as_str()),
            arg_types,
            result,
            equations,
        });
    }
    ctx.functions = functions;

    // Lemmas and goals in order.
    let mut labels = BTreeSet::new();
    let mut lemmas = Vec::new();
    let mut goals = Vec::new();
    let mut lemmas_before = Vec::new();
    {
        let mut typer = Typer::new(&ctx);
        for d in &decls {
            match d {
                Decl::Lemma {
                    attrs,
                    label,
                    parts,
                    pos,
                } => {
                    check_fresh(&mut labels, label, *pos)?;
                    let (hyps, concl) = typer.statement(parts)?;
                    lemmas.push(Lemma {
                        label: Arc::from(label.as_str()),
                        hyps,
                        concl,
                        attrs: attrs.iter().copied().collect(),
                    });
                }
                Decl::Goal { label, parts, pos } => {
                    check_fresh(&mut labels, label, *pos)?;
                    let (hyps, concl) = typer.statement(parts)?;
                    goals.push(Goal::new(label, hyps, concl));
                    lemmas_before.push(lemmas.len());
                }
                _ => {}
            }
        }
    }
    ctx.lemmas = lemmas;
    Ok(Theory {
        context: ctx,
        goals,
        lemmas_before,
    })
}

fn has_app(t: &Term) -> bool {
    match t {
        Term::App(..) => true,
        _ => t.args().iter().any(has_app),
    }
}

/// Parses a single formula statement (`H1 ==> ... ==> C`) against a context.
pub fn parse_goal(ctx: &Context, label: &str, text: &str) -> Result<Goal, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let parts = p.statement()?;
    if *p.peek() != Tok::Eof {
        return p.pos().err("unexpected input after the statement");
    }
    let (hyps, concl) = Typer::new(ctx).statement(&parts)?;
    Ok(Goal::new(label, hyps, concl))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
datatype nat = Zero | Suc nat
datatype list = Nil | Cons nat list
fun add Zero y = y
fun add (Suc x) y = Suc (add x y)
lemma [simp] add_zero: add x Zero = x
goal add_comm: add x y = add y x
";

    #[test]
    fn sample_theory() {
        let th = parse_theory(SAMPLE).unwrap();
        assert_eq!(th.context.datatypes.len(), 2);
        assert_eq!(th.context.functions.len(), 1);
        assert_eq!(th.context.lemmas.len(), 1);
        assert_eq!(th.goals.len(), 1);
        let add = &th.context.functions[0];
        assert_eq!(add.arg_types, vec![Name::from("nat"), Name::from("nat")]);
        assert_eq!(&*add.equations[1].label, "add.2");
        assert!(th.context.lemmas[0].has(Attr::Simp));
        assert_eq!(th.goals[0].to_string(), "add_comm: add x y = add y x");
    }

    #[test]
    fn duplicate_lemma_label() {
        let text = format!("{SAMPLE}\nlemma add_zero: add Zero x = x\n");
        let e = parse_theory(&text).unwrap_err();
        assert_eq!(e.line, 9);
        assert!(e.msg.contains("already declared"));
    }

    #[test]
    fn constructor_arity_mismatch() {
        let e = parse_theory("datatype nat = Zero | Suc nat\nfun f (Suc x y) = x\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 8));
        assert!(e.msg.contains("expects 1"));
    }

    #[test]
    fn formulas_and_propositions() {
        let th = parse_theory("goal fig: w & x ==> y & z ==> z").unwrap();
        let g = &th.goals[0];
        assert_eq!(g.hyps.len(), 2);
        assert_eq!(g.to_string(), "fig: w & x ==> y & z ==> z");
        let th = parse_theory("datatype nat = Zero | Suc nat\ngoal n: ~ Suc x = Zero | x = Zero --> True").unwrap();
        assert_eq!(th.goals[0].concl.to_string(), "~ Suc x = Zero | x = Zero --> True");
    }

    #[test]
    fn comments_are_skipped() {
        let th = parse_theory("(* numbers *)\ndatatype nat = Zero (* base *) | Suc nat").unwrap();
        assert_eq!(th.context.datatypes[0].ctors.len(), 2);
    }

    #[test]
    fn untyped_variable_is_an_error() {
        let e = parse_theory("datatype nat = Zero | Suc nat\ngoal g: x = x").unwrap_err();
        assert!(e.msg.contains("cannot infer"));
    }

    #[test]
    fn lemma_visibility_follows_declaration_order() {
        let text = "
datatype nat = Zero | Suc nat
fun add Zero y = y
fun add (Suc x) y = Suc (add x y)
lemma a: add x Zero = x
goal g: add Zero x = x
lemma b: add x (Suc y) = Suc (add x y)
";
        let th = parse_theory(text).unwrap();
        let s = th.proof_state(&["g"]).unwrap();
        assert_eq!(s.context().lemmas.len(), 1);
        let s = th.proof_state(&["b"]).unwrap();
        assert_eq!(s.context().lemmas.len(), 1);
        assert!(th.proof_state(&["nope"]).is_err());
    }
}
