//! Peano arithmetic formulas: syntax, bounded evaluation in ℕ, and
//! flattening into the five equation forms
//! `x = 0`, `x = y`, `x = s y`, `x = y + z`, `x = y * z`.
//!
//! ```text
//! A x <= 3. E y <= 4. y = s x
//! E x. x * x = 4 & !(x = 0)
//! ```
//!
//! Numerals `0, 1, 2, …` abbreviate `s … s 0`; `s` is the successor and is
//! not a variable name.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PaTerm {
    Var(String),
    Zero,
    Succ(Box<PaTerm>),
    Add(Box<PaTerm>, Box<PaTerm>),
    Mul(Box<PaTerm>, Box<PaTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PaFormula {
    Eq(PaTerm, PaTerm),
    Not(Box<PaFormula>),
    And(Box<PaFormula>, Box<PaFormula>),
    Or(Box<PaFormula>, Box<PaFormula>),
    Implies(Box<PaFormula>, Box<PaFormula>),
    /// `∀x ≤ t. φ` when a bound is given.
    Forall(String, Option<PaTerm>, Box<PaFormula>),
    Exists(String, Option<PaTerm>, Box<PaFormula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PaError {
    #[error("at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable `{0}` has no value")]
    Unbound(String),
}

impl PaTerm {
    pub fn var(x: &str) -> PaTerm {
        PaTerm::Var(x.to_string())
    }

    pub fn numeral(n: u64) -> PaTerm {
        (0..n).fold(PaTerm::Zero, |t, _| PaTerm::Succ(Box::new(t)))
    }

    pub fn succ(self) -> PaTerm {
        PaTerm::Succ(Box::new(self))
    }

    pub fn add(self, o: PaTerm) -> PaTerm {
        PaTerm::Add(Box::new(self), Box::new(o))
    }

    pub fn mul(self, o: PaTerm) -> PaTerm {
        PaTerm::Mul(Box::new(self), Box::new(o))
    }

    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            PaTerm::Var(x) => {
                out.insert(x.clone());
            }
            PaTerm::Zero => {}
            PaTerm::Succ(a) => a.vars(out),
            PaTerm::Add(a, b) | PaTerm::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    fn as_numeral(&self) -> Option<u64> {
        match self {
            PaTerm::Zero => Some(0),
            PaTerm::Succ(a) => a.as_numeral().map(|n| n + 1),
            _ => None,
        }
    }
}

impl PaFormula {
    pub fn eq(t: PaTerm, q: PaTerm) -> PaFormula {
        PaFormula::Eq(t, q)
    }

    pub fn not(self) -> PaFormula {
        PaFormula::Not(Box::new(self))
    }

    pub fn and(self, o: PaFormula) -> PaFormula {
        PaFormula::And(Box::new(self), Box::new(o))
    }

    pub fn or(self, o: PaFormula) -> PaFormula {
        PaFormula::Or(Box::new(self), Box::new(o))
    }

    pub fn implies(self, o: PaFormula) -> PaFormula {
        PaFormula::Implies(Box::new(self), Box::new(o))
    }

    pub fn forall(x: &str, body: PaFormula) -> PaFormula {
        PaFormula::Forall(x.to_string(), None, Box::new(body))
    }

    pub fn exists(x: &str, body: PaFormula) -> PaFormula {
        PaFormula::Exists(x.to_string(), None, Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    /// Every variable name, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            PaFormula::Eq(t, q) => {
                t.vars(&mut out);
                q.vars(&mut out);
            }
            PaFormula::Forall(x, b, _) | PaFormula::Exists(x, b, _) => {
                out.insert(x.clone());
                if let Some(b) = b {
                    b.vars(&mut out);
                }
            }
            _ => {}
        });
        out
    }

    fn walk(&self, f: &mut dyn FnMut(&PaFormula)) {
        f(self);
        match self {
            PaFormula::Eq(..) => {}
            PaFormula::Not(a) => a.walk(f),
            PaFormula::And(a, b) | PaFormula::Or(a, b) | PaFormula::Implies(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            PaFormula::Forall(_, _, b) | PaFormula::Exists(_, _, b) => b.walk(f),
        }
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let add = |t: &PaTerm, bound: &[String], out: &mut BTreeSet<String>| {
            let mut vs = BTreeSet::new();
            t.vars(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            PaFormula::Eq(t, q) => {
                add(t, bound, out);
                add(q, bound, out);
            }
            PaFormula::Not(a) => a.collect_free(bound, out),
            PaFormula::And(a, b) | PaFormula::Or(a, b) | PaFormula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            PaFormula::Forall(x, b, body) | PaFormula::Exists(x, b, body) => {
                if let Some(b) = b {
                    add(b, bound, out);
                }
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.walk(&mut |f| qf &= !matches!(f, PaFormula::Forall(..) | PaFormula::Exists(..)));
        qf
    }
}

pub type Env = BTreeMap<String, u64>;

pub fn eval_term(t: &PaTerm, env: &Env) -> Result<u64, PaError> {
    Ok(match t {
        PaTerm::Var(x) => *env.get(x).ok_or_else(|| PaError::Unbound(x.clone()))?,
        PaTerm::Zero => 0,
        PaTerm::Succ(a) => eval_term(a, env)? + 1,
        PaTerm::Add(a, b) => eval_term(a, env)? + eval_term(b, env)?,
        PaTerm::Mul(a, b) => eval_term(a, env)? * eval_term(b, env)?,
    })
}

/// Classical truth in ℕ with unbounded quantifiers ranging over
/// `0..=qbound` and bounded ones over `0..=bound`.
pub fn pa_eval(phi: &PaFormula, env: &Env, qbound: u64) -> Result<bool, PaError> {
    Ok(match phi {
        PaFormula::Eq(t, q) => eval_term(t, env)? == eval_term(q, env)?,
        PaFormula::Not(a) => !pa_eval(a, env, qbound)?,
        PaFormula::And(a, b) => pa_eval(a, env, qbound)? && pa_eval(b, env, qbound)?,
        PaFormula::Or(a, b) => pa_eval(a, env, qbound)? || pa_eval(b, env, qbound)?,
        PaFormula::Implies(a, b) => !pa_eval(a, env, qbound)? || pa_eval(b, env, qbound)?,
        PaFormula::Forall(x, b, body) | PaFormula::Exists(x, b, body) => {
            let top = match b {
                Some(t) => eval_term(t, env)?,
                None => qbound,
            };
            let universal = matches!(phi, PaFormula::Forall(..));
            let mut env = env.clone();
            for n in 0..=top {
                env.insert(x.clone(), n);
                if pa_eval(body, &env, qbound)? != universal {
                    return Ok(!universal);
                }
            }
            universal
        }
    })
}

/// One of the five equation forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Form {
    Zero(String),
    Same(String, String),
    Succ(String, String),
    Add(String, String, String),
    Mul(String, String, String),
}

impl Form {
    pub fn formula(&self) -> PaFormula {
        let v = PaTerm::var;
        match self {
            Form::Zero(x) => PaFormula::eq(v(x), PaTerm::Zero),
            Form::Same(x, y) => PaFormula::eq(v(x), v(y)),
            Form::Succ(x, y) => PaFormula::eq(v(x), v(y).succ()),
            Form::Add(x, y, z) => PaFormula::eq(v(x), v(y).add(v(z))),
            Form::Mul(x, y, z) => PaFormula::eq(v(x), v(y).mul(v(z))),
        }
    }

    /// Recognize a flat equation.
    pub fn of(phi: &PaFormula) -> Option<Form> {
        let PaFormula::Eq(PaTerm::Var(x), t) = phi else { return None };
        let var = |t: &PaTerm| match t {
            PaTerm::Var(y) => Some(y.clone()),
            _ => None,
        };
        Some(match t {
            PaTerm::Zero => Form::Zero(x.clone()),
            PaTerm::Var(y) => Form::Same(x.clone(), y.clone()),
            PaTerm::Succ(a) => Form::Succ(x.clone(), var(a)?),
            PaTerm::Add(a, b) => Form::Add(x.clone(), var(a)?, var(b)?),
            PaTerm::Mul(a, b) => Form::Mul(x.clone(), var(a)?, var(b)?),
        })
    }
}

/// Rewrite every equation into the five forms. Each compound subterm `t`
/// gets a variable `v` introduced as `∃v ≤ t. v = t' ∧ …`, where `t'` is a
/// form over the variables of `t`'s immediate subterms.
pub fn flatten(phi: &PaFormula) -> PaFormula {
    let mut used = phi.all_vars();
    flatten_in(phi, &mut used)
}

fn fresh_var(used: &mut BTreeSet<String>) -> String {
    let n = (1..).map(|i| format!("v{i}")).find(|n| !used.contains(n)).expect("unbounded");
    used.insert(n.clone());
    n
}

fn flatten_in(phi: &PaFormula, used: &mut BTreeSet<String>) -> PaFormula {
    match phi {
        PaFormula::Eq(t, q) => {
            let mut defs = Vec::new();
            let body = match (t, q) {
                (PaTerm::Var(x), q) => {
                    let q = shallow(q, &mut defs, used);
                    PaFormula::eq(PaTerm::var(x), q)
                }
                (t, PaTerm::Var(y)) => {
                    let t = shallow(t, &mut defs, used);
                    PaFormula::eq(PaTerm::var(y), t)
                }
                (t, q) => {
                    let x = name(t, &mut defs, used);
                    let q = shallow(q, &mut defs, used);
                    PaFormula::eq(PaTerm::var(&x), q)
                }
            };
            // subterm definitions outermost, so each is in scope of its users
            defs.into_iter().rev().fold(body, |acc, (v, t, def)| {
                PaFormula::Exists(v, Some(t), Box::new(def.and(acc)))
            })
        }
        PaFormula::Not(a) => flatten_in(a, used).not(),
        PaFormula::And(a, b) => flatten_in(a, used).and(flatten_in(b, used)),
        PaFormula::Or(a, b) => flatten_in(a, used).or(flatten_in(b, used)),
        PaFormula::Implies(a, b) => flatten_in(a, used).implies(flatten_in(b, used)),
        PaFormula::Forall(x, b, body) => PaFormula::Forall(x.clone(), b.clone(), Box::new(flatten_in(body, used))),
        PaFormula::Exists(x, b, body) => PaFormula::Exists(x.clone(), b.clone(), Box::new(flatten_in(body, used))),
    }
}

type Def = (String, PaTerm, PaFormula);

/// `t` with its immediate subterms replaced by variables.
fn shallow(t: &PaTerm, defs: &mut Vec<Def>, used: &mut BTreeSet<String>) -> PaTerm {
    match t {
        PaTerm::Var(_) | PaTerm::Zero => t.clone(),
        PaTerm::Succ(a) => PaTerm::var(&name(a, defs, used)).succ(),
        PaTerm::Add(a, b) => PaTerm::var(&name(a, defs, used)).add(PaTerm::var(&name(b, defs, used))),
        PaTerm::Mul(a, b) => PaTerm::var(&name(a, defs, used)).mul(PaTerm::var(&name(b, defs, used))),
    }
}

/// A variable standing for `t`, defining it if needed.
fn name(t: &PaTerm, defs: &mut Vec<Def>, used: &mut BTreeSet<String>) -> String {
    if let PaTerm::Var(x) = t {
        return x.clone();
    }
    let v = fresh_var(used);
    let body = shallow(t, defs, used);
    defs.push((v.clone(), t.clone(), PaFormula::eq(PaTerm::var(&v), body)));
    v
}

// ---------------------------------------------------------------------------
// Syntax.

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
}

const SYMBOLS: [&str; 14] = ["<=", "->", "!=", "(", ")", "=", "+", "*", "!", "&", "|", ".", ",", "~"];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PaError> {
    let mut out = Vec::new();
    let b = text.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse().map_err(|_| PaError::Syntax { pos: start, msg: "numeral too large".into() })?;
            out.push((start, Tok::Num(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if let Some(s) = SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            out.push((i, Tok::Sym(s)));
            i += s.len();
        } else {
            return Err(PaError::Syntax { pos: i, msg: format!("unexpected `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, PaError> {
        Err(PaError::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), PaError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`"))
        }
    }

    fn variable(&mut self) -> Result<String, PaError> {
        match self.peek().cloned() {
            Some(Tok::Ident(x)) if !["s", "A", "E"].contains(&x.as_str()) => {
                self.pos += 1;
                Ok(x)
            }
            _ => self.error("expected a variable"),
        }
    }

    fn formula(&mut self) -> Result<PaFormula, PaError> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            return Ok(lhs.implies(self.formula()?));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<PaFormula, PaError> {
        let mut f = self.conjunction()?;
        while self.eat("|") {
            f = f.or(self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<PaFormula, PaError> {
        let mut f = self.unary()?;
        while self.eat("&") {
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<PaFormula, PaError> {
        if self.eat("!") || self.eat("~") {
            return Ok(self.unary()?.not());
        }
        if let Some(Tok::Ident(q)) = self.peek() {
            if q == "A" || q == "E" {
                let universal = q == "A";
                self.pos += 1;
                let mut vars = vec![self.variable()?];
                while self.eat(",") {
                    vars.push(self.variable()?);
                }
                let bound = if self.eat("<=") { Some(self.term()?) } else { None };
                self.expect(".")?;
                let body = self.formula()?;
                return Ok(vars.into_iter().rev().fold(body, |b, x| {
                    if universal {
                        PaFormula::Forall(x, bound.clone(), Box::new(b))
                    } else {
                        PaFormula::Exists(x, bound.clone(), Box::new(b))
                    }
                }));
            }
        }
        // `(` opens either a formula or a term; try the formula first
        if self.peek() == Some(&Tok::Sym("(")) {
            let save = self.pos;
            self.pos += 1;
            if let Ok(f) = self.formula() {
                if self.eat(")") {
                    return Ok(f);
                }
            }
            self.pos = save;
        }
        let t = self.term()?;
        if self.eat("=") {
            return Ok(PaFormula::eq(t, self.term()?));
        }
        if self.eat("!=") {
            return Ok(PaFormula::eq(t, self.term()?).not());
        }
        self.error("expected `=` or `!=`")
    }

    fn term(&mut self) -> Result<PaTerm, PaError> {
        let mut t = self.product()?;
        while self.eat("+") {
            t = t.add(self.product()?);
        }
        Ok(t)
    }

    fn product(&mut self) -> Result<PaTerm, PaError> {
        let mut t = self.atom()?;
        while self.eat("*") {
            t = t.mul(self.atom()?);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<PaTerm, PaError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(PaTerm::numeral(n))
            }
            Some(Tok::Ident(x)) if x == "s" => {
                self.pos += 1;
                Ok(self.atom()?.succ())
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            _ => Ok(PaTerm::Var(self.variable()?)),
        }
    }
}

pub fn parse_pa(text: &str) -> Result<PaFormula, PaError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len() };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return p.error("unexpected input");
    }
    Ok(f)
}

pub fn parse_pa_term(text: &str) -> Result<PaTerm, PaError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len() };
    let t = p.term()?;
    if p.pos < p.toks.len() {
        return p.error("unexpected input");
    }
    Ok(t)
}

impl fmt::Display for PaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_numeral() {
            return write!(f, "{n}");
        }
        match self {
            PaTerm::Var(x) => write!(f, "{x}"),
            PaTerm::Zero => write!(f, "0"),
            PaTerm::Succ(a) => match **a {
                PaTerm::Add(..) | PaTerm::Mul(..) => write!(f, "s ({a})"),
                _ => write!(f, "s {a}"),
            },
            PaTerm::Add(a, b) => write!(f, "{a} + {}", Paren(b, |t| matches!(t, PaTerm::Add(..)))),
            PaTerm::Mul(a, b) => write!(
                f,
                "{} * {}",
                Paren(a, |t| matches!(t, PaTerm::Add(..))),
                Paren(b, |t| matches!(t, PaTerm::Add(..) | PaTerm::Mul(..)))
            ),
        }
    }
}

struct Paren<'a>(&'a PaTerm, fn(&PaTerm) -> bool);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if (self.1)(self.0) {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for PaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // every compound operand is parenthesised
        let op = |f: &mut fmt::Formatter<'_>, a: &PaFormula| match a {
            PaFormula::Eq(..) | PaFormula::Not(..) => write!(f, "{a}"),
            _ => write!(f, "({a})"),
        };
        match self {
            PaFormula::Eq(t, q) => write!(f, "{t} = {q}"),
            PaFormula::Not(a) => {
                write!(f, "!")?;
                op(f, a)
            }
            PaFormula::And(a, b) | PaFormula::Or(a, b) | PaFormula::Implies(a, b) => {
                let sym = match self {
                    PaFormula::And(..) => "&",
                    PaFormula::Or(..) => "|",
                    _ => "->",
                };
                op(f, a)?;
                write!(f, " {sym} ")?;
                op(f, b)
            }
            PaFormula::Forall(x, b, body) | PaFormula::Exists(x, b, body) => {
                let q = if matches!(self, PaFormula::Forall(..)) { "A" } else { "E" };
                write!(f, "{q} {x}")?;
                if let Some(b) = b {
                    write!(f, " <= {b}")?;
                }
                write!(f, ". {body}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, u64)]) -> Env {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn evaluates() {
        let e = Env::new();
        assert!(pa_eval(&parse_pa("2 + 2 = 4").unwrap(), &e, 0).unwrap());
        assert!(pa_eval(&parse_pa("A x <= 3. E y <= 4. y = s x").unwrap(), &e, 0).unwrap());
        assert!(!pa_eval(&parse_pa("A x. E y. y = s x").unwrap(), &e, 4).unwrap());
        assert!(pa_eval(&parse_pa("x * y = 6").unwrap(), &env(&[("x", 3), ("y", 2)]), 0).unwrap());
        assert_eq!(pa_eval(&parse_pa("x = 0").unwrap(), &e, 0), Err(PaError::Unbound("x".into())));
    }

    #[test]
    fn flattening_preserves_truth_and_shape() {
        let phi = parse_pa("3 * 2 = 6").unwrap();
        let flat = flatten(&phi);
        assert!(pa_eval(&flat, &Env::new(), 0).unwrap());
        // every equation is one of the five forms
        let mut ok = true;
        flat.walk(&mut |f| {
            if let PaFormula::Eq(..) = f {
                ok &= Form::of(f).is_some();
            }
        });
        assert!(ok, "{flat}");
        for text in ["x + s y = s (x + y)", "x * (y + 1) = x * y + x", "!(s x = 0)", "x = y -> s x = s y"] {
            let phi = parse_pa(text).unwrap();
            let flat = flatten(&phi);
            for x in 0..4 {
                for y in 0..4 {
                    let e = env(&[("x", x), ("y", y)]);
                    assert_eq!(pa_eval(&phi, &e, 0).unwrap(), pa_eval(&flat, &e, 0).unwrap(), "{text}");
                }
            }
        }
    }

    #[test]
    fn syntax_round_trip() {
        for text in ["A x. E y <= s x. y = s x", "x * (y + z) = x * y + x * z", "!(x = 0) | (x = 1 -> y = 2)", "(x + y) * z = 0"] {
            let phi = parse_pa(text).unwrap();
            assert_eq!(parse_pa(&phi.to_string()).unwrap(), phi, "{phi}");
        }
        assert!(parse_pa("x = ").is_err());
        assert!(parse_pa("s = 0").is_err());
    }
}
