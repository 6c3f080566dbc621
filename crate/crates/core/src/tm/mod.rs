//! Single-tape Turing transducers: a `.tm` text format, a direct simulator,
//! and a compiler to ST programs over string structures.
//!
//! ```text
//! # flip every bit
//! input 0 1
//! blank _
//! states s p
//! start s
//! print p
//! delta s 0 -> s 1 R
//! delta s 1 -> s 0 R
//! delta s _ -> p _ S
//! ```

mod compile;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use compile::{compile_parts, compile_tm, config_structure, decode_config, expected_output, input_structure, output_structure, CompiledTm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TmError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid machine: {0}")]
    Invalid(String),
    #[error("symbol `{0}` is not in the input alphabet")]
    BadInput(String),
    #[error("no halt within {0} steps")]
    Diverged(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    R,
    S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmSpec {
    pub input: Vec<String>,
    /// Tape symbols other than the blank, input symbols first.
    pub tape: Vec<String>,
    pub blank: String,
    pub states: Vec<String>,
    pub start: String,
    pub print: String,
    pub delta: BTreeMap<(String, String), (String, String, Move)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmConfig {
    pub state: String,
    pub tape: Vec<String>,
    /// At most `tape.len()`; the cell just past the end is blank.
    pub head: usize,
}

/// Names the compiled program uses for its own bookkeeping.
const RESERVED: [&str; 3] = ["e", "c", "r"];
const KEYWORDS: [&str; 10] = ["if", "else", "do", "undef", "delete", "skip", "new", "omega", "A", "E"];

impl TmSpec {
    /// Every tape symbol, blank last.
    pub fn gamma(&self) -> impl Iterator<Item = &str> + '_ {
        self.tape.iter().map(String::as_str).chain([self.blank.as_str()])
    }

    pub fn validate(&self) -> Result<(), TmError> {
        let bad = |m: String| Err(TmError::Invalid(m));
        let mut names = BTreeSet::new();
        for n in self.gamma().chain(self.states.iter().map(String::as_str)) {
            if RESERVED.contains(&n) || KEYWORDS.contains(&n) || n.contains('~') || n.is_empty() {
                return bad(format!("`{n}` is a reserved name"));
            }
            if !n.chars().all(crate::logic::is_ident_char) {
                return bad(format!("`{n}` is not an identifier"));
            }
            if !names.insert(n) {
                return bad(format!("`{n}` names two things"));
            }
        }
        for n in &self.input {
            if !self.tape.contains(n) {
                return bad(format!("input symbol `{n}` missing from the tape alphabet"));
            }
        }
        for q in [&self.start, &self.print] {
            if !self.states.contains(q) {
                return bad(format!("unknown state `{q}`"));
            }
        }
        for q in self.states.iter().filter(|q| **q != self.print) {
            for g in self.gamma() {
                match self.delta.get(&(q.clone(), g.to_string())) {
                    None => return bad(format!("no transition for ({q}, {g})")),
                    Some((q2, g2, _)) => {
                        if !self.states.contains(q2) || !self.gamma().any(|x| x == g2) {
                            return bad(format!("transition for ({q}, {g}) leaves the machine"));
                        }
                    }
                }
            }
        }
        if self.delta.keys().any(|(q, _)| *q == self.print) {
            return bad("the print state has transitions".into());
        }
        Ok(())
    }

    pub fn initial(&self, w: &[String]) -> Result<TmConfig, TmError> {
        if let Some(x) = w.iter().find(|x| !self.input.contains(x)) {
            return Err(TmError::BadInput(x.clone()));
        }
        Ok(TmConfig { state: self.start.clone(), tape: w.to_vec(), head: 0 })
    }

    /// One move; `None` in the print state.
    pub fn step(&self, c: &TmConfig) -> Option<TmConfig> {
        if c.state == self.print {
            return None;
        }
        let read = c.tape.get(c.head).unwrap_or(&self.blank);
        let (q, g, m) = &self.delta[&(c.state.clone(), read.clone())];
        let mut tape = c.tape.clone();
        if c.head == tape.len() {
            tape.push(g.clone());
        } else {
            tape[c.head] = g.clone();
        }
        let head = match m {
            Move::L => c.head.saturating_sub(1),
            Move::R => c.head + 1,
            Move::S => c.head,
        };
        Some(TmConfig { state: q.clone(), tape, head })
    }

    /// The tape from the left end up to the first blank.
    pub fn output(&self, c: &TmConfig) -> Vec<String> {
        c.tape.iter().take_while(|g| **g != self.blank).cloned().collect()
    }
}

/// Run `m` on `w` for at most `fuel` moves.
pub fn simulate_tm(m: &TmSpec, w: &[String], fuel: u64) -> Result<Vec<String>, TmError> {
    let mut c = m.initial(w)?;
    for _ in 0..fuel {
        match m.step(&c) {
            Some(next) => c = next,
            None => return Ok(m.output(&c)),
        }
    }
    if c.state == m.print {
        Ok(m.output(&c))
    } else {
        Err(TmError::Diverged(fuel))
    }
}

/// Split a word into one-character symbols.
pub fn symbols(w: &str) -> Vec<String> {
    w.chars().map(|c| c.to_string()).collect()
}

pub fn parse_tm(text: &str) -> Result<TmSpec, TmError> {
    let mut input = None;
    let mut blank = None;
    let mut states = None;
    let mut start = None;
    let mut print = None;
    let mut delta = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: &str| TmError::Syntax { line, msg: msg.to_string() };
        let words: Vec<&str> = raw.split('#').next().unwrap().split_whitespace().collect();
        let Some((&key, rest)) = words.split_first() else { continue };
        let list = || rest.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let one = || match rest {
            [x] => Ok(x.to_string()),
            _ => Err(err(&format!("`{key}` takes one name"))),
        };
        match key {
            "input" => input = Some(list()),
            "states" => states = Some(list()),
            "blank" => blank = Some(one()?),
            "start" => start = Some(one()?),
            "print" => print = Some(one()?),
            "delta" => {
                let [q, g, "->", q2, g2, m] = rest else {
                    return Err(err("expected `delta q g -> q' g' L|R|S`"));
                };
                let m = match *m {
                    "L" => Move::L,
                    "R" => Move::R,
                    "S" => Move::S,
                    _ => return Err(err("move must be L, R or S")),
                };
                if delta.insert((q.to_string(), g.to_string()), (q2.to_string(), g2.to_string(), m)).is_some() {
                    return Err(err("duplicate transition"));
                }
            }
            _ => return Err(err(&format!("unknown directive `{key}`"))),
        }
    }
    let missing = |what: &str| TmError::Syntax { line: 0, msg: format!("missing `{what}`") };
    let input = input.ok_or_else(|| missing("input"))?;
    let blank = blank.ok_or_else(|| missing("blank"))?;
    let mut tape = input.clone();
    for ((_, g), (_, g2, _)) in &delta {
        for x in [g, g2] {
            if *x != blank && !tape.contains(x) {
                tape.push(x.clone());
            }
        }
    }
    let spec = TmSpec {
        input,
        tape,
        blank,
        states: states.ok_or_else(|| missing("states"))?,
        start: start.ok_or_else(|| missing("start"))?,
        print: print.ok_or_else(|| missing("print"))?,
        delta,
    };
    spec.validate()?;
    Ok(spec)
}

impl fmt::Display for TmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input {}", self.input.join(" "))?;
        writeln!(f, "blank {}", self.blank)?;
        writeln!(f, "states {}", self.states.join(" "))?;
        writeln!(f, "start {}", self.start)?;
        writeln!(f, "print {}", self.print)?;
        for ((q, g), (q2, g2, m)) in &self.delta {
            writeln!(f, "delta {q} {g} -> {q2} {g2} {m:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn simulate_corpus() {
        let w = symbols("011");
        assert_eq!(simulate_tm(&corpus::identity_tm(), &w, 10).unwrap(), w);
        assert_eq!(simulate_tm(&corpus::complement_tm(), &w, 10).unwrap(), symbols("100"));
        assert_eq!(simulate_tm(&corpus::complement_back_tm(), &w, 100).unwrap(), symbols("100"));
        assert_eq!(simulate_tm(&corpus::loop_tm(), &w, 1000), Err(TmError::Diverged(1000)));
    }

    #[test]
    fn format_round_trip() {
        let m = corpus::complement_back_tm();
        assert_eq!(parse_tm(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn rejects_bad_machines() {
        let partial = "input 0\nblank _\nstates s p\nstart s\nprint p\ndelta s 0 -> p 0 S\n";
        assert!(matches!(parse_tm(partial), Err(TmError::Invalid(_))));
        let clash = "input c\nblank _\nstates s\nstart s\nprint s\n";
        assert!(matches!(parse_tm(clash), Err(TmError::Invalid(_))));
        assert!(matches!(parse_tm("delta s 0 -> s"), Err(TmError::Syntax { line: 1, .. })));
    }

    #[test]
    fn left_end_stays() {
        let m = corpus::complement_back_tm();
        let c = TmConfig { state: "b".into(), tape: symbols("01"), head: 0 };
        let d = m.step(&c).unwrap();
        assert_eq!(d.head, 0);
    }
}
