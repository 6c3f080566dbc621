//! Text syntax for formulas.
//!
//! ```text
//! A x. E f^2. (f(x, x) = omega | !(x = omega)) -> x != omega
//! ```
//!
//! `->` is right-associative and binds weakest, then `|`, then `&`, then `!`.
//! A quantifier's body extends as far right as possible.

use thiserror::Error;

use super::formula::{Formula, Quantifier, Var};
use crate::structures::Term;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Caret,
    Eq,
    Neq,
    Not,
    And,
    Or,
    Arrow,
    // program syntax
    Assign,
    LeftArrow,
    Semi,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Slash,
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '~')
}

pub(crate) fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c == '#' {
            while it.peek().is_some_and(|&(_, d)| d != '\n') {
                it.next();
            }
            continue;
        }
        let two = text[i..].get(..2);
        let tok = match c {
            ';' => Tok::Semi,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '/' => Tok::Slash,
            ':' if two == Some(":=") => {
                it.next();
                Tok::Assign
            }
            '<' if two == Some("<-") => {
                it.next();
                Tok::LeftArrow
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '^' => Tok::Caret,
            '=' => Tok::Eq,
            '&' => Tok::And,
            '|' => Tok::Or,
            '!' if two == Some("!=") => {
                it.next();
                Tok::Neq
            }
            '!' => Tok::Not,
            '-' if two == Some("->") => {
                it.next();
                Tok::Arrow
            }
            c if is_ident_char(c) => {
                let mut end = i;
                while let Some(&(j, d)) = it.peek() {
                    if !is_ident_char(d) {
                        break;
                    }
                    end = j + d.len_utf8();
                    it.next();
                }
                out.push((i, Tok::Ident(text[i..end].to_string())));
                continue;
            }
            other => return Err(ParseError { pos: i, msg: format!("unexpected `{other}`") }),
        };
        it.next();
        out.push((i, tok));
    }
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    pub(crate) fn new(toks: Vec<(usize, Tok)>, end: usize) -> Parser {
        Parser { toks, pos: 0, end }
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError { pos: self.offset(), msg: msg.into() }
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            Ok(lhs.implies(self.formula()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Or) {
            f = f.or(self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.eat(&Tok::And) {
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn quantifier_ahead(&self) -> Option<Quantifier> {
        let q = match self.peek() {
            Some(Tok::Ident(k)) if k == "A" => Quantifier::Forall,
            Some(Tok::Ident(k)) if k == "E" => Quantifier::Exists,
            _ => return None,
        };
        match (self.peek_at(1), self.peek_at(2)) {
            (Some(Tok::Ident(_)), Some(Tok::Dot | Tok::Comma | Tok::Caret)) => Some(q),
            _ => None,
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Not) {
            return Ok(self.unary()?.not());
        }
        if let Some(q) = self.quantifier_ahead() {
            self.pos += 1;
            let mut vars = Vec::new();
            loop {
                let name = self.ident()?;
                let arity = if self.eat(&Tok::Caret) {
                    match self.peek() {
                        Some(Tok::Ident(s)) if s.bytes().all(|b| b.is_ascii_digit()) => {
                            let n = s.parse().map_err(|_| self.error("bad arity"))?;
                            self.pos += 1;
                            n
                        }
                        _ => return Err(self.error("expected arity")),
                    }
                } else {
                    0
                };
                vars.push(Var::new(name, arity));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::Dot, "`.` after quantified variables")?;
            let body = self.formula()?;
            return Ok(vars.into_iter().rev().fold(body, |b, v| Formula::Quant(q, v, Box::new(b))));
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(f);
        }
        let t = self.term()?;
        if self.eat(&Tok::Eq) {
            Ok(Formula::Eq(t, self.term()?))
        } else if self.eat(&Tok::Neq) {
            Ok(Formula::neq(t, self.term()?))
        } else {
            Err(self.error("expected `=` or `!=`"))
        }
    }

    pub(crate) fn term(&mut self) -> Result<Term, ParseError> {
        let name = self.ident()?;
        if name == "omega" {
            return Ok(Term::Omega);
        }
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen, "`)`")?;
        }
        Ok(Term::App(name, args))
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(lex(text)?, text.len());
    let f = p.formula()?;
    if !p.at_end() {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(lex(text)?, text.len());
    let t = p.term()?;
    if !p.at_end() {
        return Err(p.error("trailing input"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let f = parse_formula("a = b | c = d & e = f -> g = h -> x = y").unwrap();
        assert_eq!(f.to_string(), "a = b | c = d & e = f -> g = h -> x = y");
        match f {
            Formula::Implies(l, r) => {
                assert!(matches!(*l, Formula::Or(..)));
                assert!(matches!(*r, Formula::Implies(..)));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn quantifiers() {
        let f = parse_formula("A x, f^2. E y. f(x, y) != omega").unwrap();
        assert_eq!(f.to_string(), "A x. A f^2. E y. f(x,y) != omega");
        assert_eq!(f.free_vars().len(), 0);
        // `A` as an ordinary identifier
        let g = parse_formula("A = E").unwrap();
        assert_eq!(g.free_vars().len(), 2);
    }

    #[test]
    fn round_trips() {
        for s in [
            "(A x. x = omega) & y = y",
            "!(A x. x = omega) | y = y",
            "(a = b -> c = d) -> e = f",
            "a = b & (c = d | e = f)",
            "a = b & (c = d & e = f)",
            "A x. x = omega -> E y. y = x",
            "(E y. y = x) -> x = x",
            "!!(f(g(x),omega) = x~1)",
        ] {
            let f = parse_formula(s).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_formula(&printed).unwrap(), f, "{s} printed as {printed}");
        }
    }

    #[test]
    fn errors() {
        assert!(parse_formula("x =").is_err());
        assert!(parse_formula("x = y )").is_err());
        assert!(parse_formula("A x x = y").is_err());
        assert!(parse_formula("x $ y").is_err());
    }
}
