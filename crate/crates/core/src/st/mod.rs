//! The ST structure-transformation language: revisions, sequencing,
//! branching and guarded iteration.
//!
//! ```text
//! # add the chain (z2, s2) on top of (z, s)
//! x := z;
//! do [s(x) != omega] { x <- s(x) };
//! ...
//! ```
//!
//! | syntax              | meaning                                      |
//! |---------------------|----------------------------------------------|
//! | `f(t1,..,tk) := q`  | extension (only at an undefined point)       |
//! | `c!`, `c := new`    | inception (fresh atom, only if `c` undefined) |
//! | `undef f(t1,..)`    | contraction                                  |
//! | `delete c`          | deletion of the atom denoted by `c`          |
//! | `f(t..) <- q`       | assignment, sugar for four revisions         |
//! | `if [G] {P} else {Q}` | branching (`else` may be omitted)          |
//! | `do [G] {P}`        | iteration while `G` holds                    |
//! | `skip`              | the empty program                            |

mod interp;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

pub(crate) use interp::guard;
pub use interp::{apply_revision, run, run_with, DeletionMode, LoopRecord, RunConfig, RunError, Step, Trace};
pub use parse::{parse_program, parse_program_with, ProgramError};

use crate::logic::Formula;
use crate::structures::{StructureError, Term, Vocabulary};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Revision {
    Extension { f: String, args: Vec<Term>, value: Term },
    Inception(String),
    Contraction { f: String, args: Vec<Term> },
    Deletion(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Program {
    Revision(Revision),
    /// Sequential composition; the empty sequence is `skip`.
    Seq(Vec<Program>),
    If(Formula, Box<Program>, Box<Program>),
    Do(Formula, Box<Program>),
}

impl Revision {
    /// Identifiers mentioned, with arities.
    fn identifiers(&self, out: &mut Vec<(String, usize)>) {
        match self {
            Revision::Extension { f, args, value } => {
                out.push((f.clone(), args.len()));
                args.iter().for_each(|t| t.identifiers(out));
                value.identifiers(out);
            }
            Revision::Contraction { f, args } => {
                out.push((f.clone(), args.len()));
                args.iter().for_each(|t| t.identifiers(out));
            }
            Revision::Inception(c) | Revision::Deletion(c) => out.push((c.clone(), 0)),
        }
    }
}

impl Program {
    pub fn skip() -> Program {
        Program::Seq(Vec::new())
    }

    pub fn seq(items: impl IntoIterator<Item = Program>) -> Program {
        Program::Seq(items.into_iter().collect())
    }

    pub fn extension(f: &str, args: Vec<Term>, value: Term) -> Program {
        Program::Revision(Revision::Extension { f: f.to_string(), args, value })
    }

    pub fn contraction(f: &str, args: Vec<Term>) -> Program {
        Program::Revision(Revision::Contraction { f: f.to_string(), args })
    }

    pub fn inception(c: &str) -> Program {
        Program::Revision(Revision::Inception(c.to_string()))
    }

    pub fn deletion(c: &str) -> Program {
        Program::Revision(Revision::Deletion(c.to_string()))
    }

    pub fn if_else(guard: Formula, then: Program, other: Program) -> Program {
        Program::If(guard, Box::new(then), Box::new(other))
    }

    pub fn do_while(guard: Formula, body: Program) -> Program {
        Program::Do(guard, Box::new(body))
    }

    /// `f(args) <- value`: memorize `value` in the token `b`, then
    /// contract and re-extend the point.
    pub fn assignment(f: &str, args: Vec<Term>, value: Term, b: &str) -> Program {
        Program::seq([
            Program::extension(b, vec![], value),
            Program::contraction(f, args.clone()),
            Program::extension(f, args, Term::var(b)),
            Program::contraction(b, vec![]),
        ])
    }

    /// Every identifier the program mentions, in order of first mention.
    pub fn vocabulary(&self) -> Result<Vocabulary, StructureError> {
        let mut ids = Vec::new();
        self.identifiers(&mut ids);
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut v = Vocabulary::new();
        for (n, k) in ids {
            match seen.get(&n) {
                Some(&e) if e != k => {
                    return Err(StructureError::ArityMismatch { name: n, expected: e, found: k });
                }
                Some(_) => {}
                None => {
                    seen.insert(n.clone(), k);
                    v.push(n, k)?;
                }
            }
        }
        Ok(v)
    }

    fn identifiers(&self, out: &mut Vec<(String, usize)>) {
        match self {
            Program::Revision(r) => r.identifiers(out),
            Program::Seq(ps) => ps.iter().for_each(|p| p.identifiers(out)),
            Program::If(g, p, q) => {
                out.extend(g.free_vars());
                p.identifiers(out);
                q.identifiers(out);
            }
            Program::Do(g, p) => {
                out.extend(g.free_vars());
                p.identifiers(out);
            }
        }
    }

    pub fn revision_count(&self) -> usize {
        match self {
            Program::Revision(_) => 1,
            Program::Seq(ps) => ps.iter().map(Program::revision_count).sum(),
            Program::If(_, p, q) => p.revision_count() + q.revision_count(),
            Program::Do(_, p) => p.revision_count(),
        }
    }

    pub fn loop_count(&self) -> usize {
        match self {
            Program::Revision(_) => 0,
            Program::Seq(ps) => ps.iter().map(Program::loop_count).sum(),
            Program::If(_, p, q) => p.loop_count() + q.loop_count(),
            Program::Do(_, p) => 1 + p.loop_count(),
        }
    }

    /// Nesting depth of `if`/`do`/`;` constructors; revisions and `skip`
    /// have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Program::Revision(_) => 0,
            Program::Seq(ps) if ps.is_empty() => 0,
            Program::Seq(ps) => 1 + ps.iter().map(Program::depth).max().unwrap_or(0),
            Program::If(_, p, q) => 1 + p.depth().max(q.depth()),
            Program::Do(_, p) => 1 + p.depth(),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        match self {
            Program::Revision(r) => write!(f, "{pad}{r}"),
            Program::Seq(ps) if ps.is_empty() => write!(f, "{pad}skip"),
            Program::Seq(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        writeln!(f, ";")?;
                    }
                    // nested sequences are flattened on re-parse anyway
                    p.write(f, indent)?;
                }
                Ok(())
            }
            Program::If(g, p, q) => {
                writeln!(f, "{pad}if [{g}] {{")?;
                p.write(f, indent + 1)?;
                writeln!(f, "\n{pad}}} else {{")?;
                q.write(f, indent + 1)?;
                write!(f, "\n{pad}}}")
            }
            Program::Do(g, p) => {
                writeln!(f, "{pad}do [{g}] {{")?;
                p.write(f, indent + 1)?;
                write!(f, "\n{pad}}}")
            }
        }
    }
}

fn write_point(f: &mut fmt::Formatter<'_>, name: &str, args: &[Term]) -> fmt::Result {
    write!(f, "{name}")?;
    if !args.is_empty() {
        write!(f, "(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Revision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Revision::Extension { f: name, args, value } => {
                write_point(f, name, args)?;
                write!(f, " := {value}")
            }
            Revision::Inception(c) => write!(f, "{c}!"),
            Revision::Contraction { f: name, args } => {
                write!(f, "undef ")?;
                write_point(f, name, args)
            }
            Revision::Deletion(c) => write!(f, "delete {c}"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}
