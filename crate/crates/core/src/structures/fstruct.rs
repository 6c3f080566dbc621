//! The `.fstruct` text format.
//!
//! ```text
//! # T(011)
//! fn e/0
//! fn 0/1
//! fn 1/1
//! e -> 0
//! 0 0 -> 1
//! 1 1 -> 2
//! 1 2 -> 3
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::{Atom, Structure, StructureError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FstructError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Structure { line: usize, source: StructureError },
}

pub fn parse_fstruct(text: &str) -> Result<Structure, FstructError> {
    let mut s = Structure::default();
    let mut pending = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |msg: &str| FstructError::Syntax { line, msg: msg.to_string() };
        if let Some(decl) = body.strip_prefix("fn ") {
            let (name, arity) = decl.trim().rsplit_once('/').ok_or_else(|| syntax("expected `fn NAME/ARITY`"))?;
            let arity: usize = arity.trim().parse().map_err(|_| syntax("bad arity"))?;
            s.declare(name.trim(), arity).map_err(|source| FstructError::Structure { line, source })?;
            continue;
        }
        let (lhs, rhs) = body.split_once("->").ok_or_else(|| syntax("expected `NAME args -> atom`"))?;
        let mut words = lhs.split_whitespace();
        let name = words.next().ok_or_else(|| syntax("missing identifier"))?.to_string();
        let args = words.map(parse_atom).collect::<Option<Vec<_>>>().ok_or_else(|| syntax("bad atom"))?;
        let out = parse_atom(rhs.trim()).ok_or_else(|| syntax("bad atom"))?;
        pending.push((line, name, args, out));
    }
    for (line, name, args, out) in pending {
        let f = s
            .function_mut(&name)
            .ok_or_else(|| FstructError::Structure { line, source: StructureError::UnknownIdentifier(name.clone()) })?;
        if f.arity() != args.len() {
            return Err(FstructError::Structure {
                line,
                source: StructureError::ArityMismatch { name, expected: f.arity(), found: args.len() },
            });
        }
        if f.get(&args).is_some_and(|v| v != out) {
            return Err(FstructError::Syntax { line, msg: format!("`{name}` given two values at one point") });
        }
        f.insert(args, out);
    }
    Ok(s)
}

fn parse_atom(w: &str) -> Option<Atom> {
    w.parse().ok().map(Atom)
}

/// Headers in vocabulary order, then each component's entries in
/// lexicographic order of their inputs.
pub fn print_fstruct(s: &Structure) -> String {
    let mut out = String::new();
    for (n, k) in s.vocabulary().iter() {
        let _ = writeln!(out, "fn {n}/{k}");
    }
    for (n, f) in s.components() {
        for (args, v) in f.entries() {
            out.push_str(n);
            for a in args {
                let _ = write!(out, " {a}");
            }
            let _ = writeln!(out, " -> {v}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::string_structure;

    #[test]
    fn round_trip() {
        let s = string_structure("011").unwrap();
        let text = print_fstruct(&s);
        assert_eq!(parse_fstruct(&text).unwrap(), s);
        assert_eq!(print_fstruct(&parse_fstruct(&text).unwrap()), text);
    }

    #[test]
    fn comments_and_nullary() {
        let s = parse_fstruct("# hi\nfn c/0\n  c -> 4  # token\n").unwrap();
        assert_eq!(s.token("c"), Some(Atom(4)));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_fstruct("f 1 -> 2"), Err(FstructError::Structure { .. })));
        assert!(matches!(parse_fstruct("fn f/1\nf 1 2 -> 2"), Err(FstructError::Structure { .. })));
        assert!(matches!(parse_fstruct("fn f/x"), Err(FstructError::Syntax { .. })));
        assert!(matches!(parse_fstruct("fn f/1\nf 1 -> 2\nf 1 -> 3"), Err(FstructError::Syntax { .. })));
    }
}
