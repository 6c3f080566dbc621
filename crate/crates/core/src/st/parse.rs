use thiserror::Error;

use super::Program;
use crate::logic::library::Fresh;
use crate::logic::{lex, ParseError, Parser, Tok};
use crate::structures::{StructureError, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Arity(#[from] StructureError),
}

const KEYWORDS: [&str; 7] = ["if", "else", "do", "undef", "delete", "skip", "new"];

/// Parse a program whose guards are quantifier-free.
pub fn parse_program(text: &str) -> Result<Program, ProgramError> {
    parse_program_with(text, false)
}

/// With `fo_guards`, guards may be arbitrary first-order formulas.
pub fn parse_program_with(text: &str, fo_guards: bool) -> Result<Program, ProgramError> {
    let toks = lex(text)?;
    let mut fresh = Fresh::avoiding(toks.iter().filter_map(|(_, t)| match t {
        Tok::Ident(s) => Some(s.as_str()),
        _ => None,
    }));
    let memo = fresh.name("b");
    let mut st = ProgramParser { p: Parser::new(toks, text.len()), fo_guards, memo };
    let prog = st.sequence()?;
    if !st.p.at_end() {
        return Err(st.p.error("expected `;` or end of program").into());
    }
    prog.vocabulary()?;
    Ok(prog)
}

struct ProgramParser {
    p: Parser,
    fo_guards: bool,
    memo: String,
}

fn flatten(items: Vec<Program>) -> Program {
    let mut out = Vec::new();
    for p in items {
        match p {
            Program::Seq(ps) => out.extend(ps),
            p => out.push(p),
        }
    }
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        Program::Seq(out)
    }
}

impl ProgramParser {
    fn keyword(&self) -> Option<&str> {
        match self.p.peek() {
            Some(Tok::Ident(s)) => KEYWORDS.iter().find(|k| **k == s).copied(),
            _ => None,
        }
    }

    fn sequence(&mut self) -> Result<Program, ParseError> {
        let mut items = Vec::new();
        while !self.p.at_end() && self.p.peek() != Some(&Tok::RBrace) {
            let (stmt, block) = self.statement()?;
            items.push(stmt);
            // `;` separates statements; it may be left out after a block
            if !self.p.eat(&Tok::Semi) && !block {
                break;
            }
        }
        Ok(flatten(items))
    }

    fn block(&mut self) -> Result<Program, ParseError> {
        self.p.expect(&Tok::LBrace, "`{`")?;
        let body = self.sequence()?;
        self.p.expect(&Tok::RBrace, "`}`")?;
        Ok(body)
    }

    fn guard(&mut self) -> Result<crate::logic::Formula, ParseError> {
        self.p.expect(&Tok::LBracket, "`[`")?;
        let at = self.p.offset();
        let g = self.p.formula()?;
        if !g.is_quantifier_free() && !(self.fo_guards && g.is_first_order()) {
            return Err(ParseError { pos: at, msg: "guards must be quantifier-free".into() });
        }
        self.p.expect(&Tok::RBracket, "`]`")?;
        Ok(g)
    }

    /// A statement, and whether it ended with a block.
    fn statement(&mut self) -> Result<(Program, bool), ParseError> {
        match self.keyword() {
            Some("skip") => {
                self.p.ident()?;
                Ok((Program::skip(), false))
            }
            Some("if") => {
                self.p.ident()?;
                let g = self.guard()?;
                let then = self.block()?;
                if self.keyword() == Some("else") {
                    self.p.ident()?;
                }
                let other = if self.p.peek() == Some(&Tok::LBrace) { self.block()? } else { Program::skip() };
                Ok((Program::if_else(g, then, other), true))
            }
            Some("do") => {
                self.p.ident()?;
                let g = self.guard()?;
                Ok((Program::do_while(g, self.block()?), true))
            }
            Some("undef") => {
                self.p.ident()?;
                let (f, args) = self.point()?;
                Ok((Program::contraction(&f, args), false))
            }
            Some("delete") => {
                self.p.ident()?;
                let c = self.p.ident()?;
                Ok((Program::deletion(&c), false))
            }
            Some(k) => Err(self.p.error(format!("unexpected keyword `{k}`"))),
            None => {
                let (f, args) = self.point()?;
                if self.p.eat(&Tok::Not) {
                    if !args.is_empty() {
                        return Err(self.p.error("inception needs a token"));
                    }
                    return Ok((Program::inception(&f), false));
                }
                if self.p.eat(&Tok::LeftArrow) {
                    let q = self.p.term()?;
                    return Ok((Program::assignment(&f, args, q, &self.memo), false));
                }
                self.p.expect(&Tok::Assign, "`:=`, `<-` or `!`")?;
                if self.keyword() == Some("new") {
                    self.p.ident()?;
                    if !args.is_empty() {
                        return Err(self.p.error("inception needs a token"));
                    }
                    return Ok((Program::inception(&f), false));
                }
                let q = self.p.term()?;
                Ok((Program::extension(&f, args, q), false))
            }
        }
    }

    /// `f(t1, .., tk)` with standard argument terms.
    fn point(&mut self) -> Result<(String, Vec<Term>), ParseError> {
        let at = self.p.offset();
        match self.p.term()? {
            Term::App(f, args) if args.iter().all(Term::is_standard) => Ok((f, args)),
            Term::App(..) => Err(ParseError { pos: at, msg: "arguments of a revised point must be standard terms".into() }),
            Term::Omega => Err(ParseError { pos: at, msg: "`omega` cannot be revised".into() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::st::Revision;

    #[test]
    fn revisions() {
        let p = parse_program("f(x) := c ; undef f(x)").unwrap();
        let Program::Seq(items) = &p else { panic!("{p:?}") };
        assert!(matches!(items[0], Program::Revision(Revision::Extension { .. })));
        assert!(matches!(items[1], Program::Revision(Revision::Contraction { .. })));
        assert_eq!(parse_program("c!").unwrap(), parse_program("c := new").unwrap());
        assert_eq!(parse_program("delete c;").unwrap(), Program::deletion("c"));
    }

    #[test]
    fn control() {
        let p = parse_program("do [p = omega] { c! ; delete c }").unwrap();
        assert!(matches!(p, Program::Do(..)));
        let q = parse_program("if [x = y] { skip } else { x := y } ; c!").unwrap();
        assert_eq!(q.loop_count(), 0);
        assert_eq!(q.revision_count(), 2);
    }

    #[test]
    fn assignment_desugars() {
        let p = parse_program("f(t) <- q").unwrap();
        assert_eq!(p.revision_count(), 4);
        assert_eq!(p.to_string(), "b~1 := q;\nundef f(t);\nf(t) := b~1;\nundef b~1");
        // the memo token avoids program names
        let p = parse_program("b~1 := x; f(t) <- q").unwrap();
        assert!(p.to_string().contains("b~2"));
    }

    #[test]
    fn round_trip() {
        let text = "x := z; do [s(x) != omega & x != y] { if [a(x) = omega] { a(x) := x } { undef a(x) }; x <- s(x) }; delete x";
        let p = parse_program(text).unwrap();
        assert_eq!(parse_program(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_program("f(x) := c; f := c"), Err(ProgramError::Arity(_))));
        assert!(parse_program("do [A x. x = x] { skip }").is_err());
        assert!(parse_program_with("do [A x. x = x] { skip }", true).is_ok());
        assert!(parse_program("f(omega) := c").is_err());
        assert!(parse_program("x := y z := w").is_err());
        let e = parse_program("x := ").unwrap_err();
        assert_eq!(e.to_string(), "at byte 5: expected identifier");
    }
}
