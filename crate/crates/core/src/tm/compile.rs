//! Configurations as structures, and the compiler.
//!
//! A configuration `(q, γ₁⋯γ̲ᵢ⋯γₖ)` is the chain `e ∘ →γ₁ ∘ ⋯ ∘ →γₖ ∘` with
//! the state token `q` on the first atom, the cursor token `c` on atom `i-1`
//! (the atom the cursored cell leaves from) and `r` linking every atom back
//! to its predecessor. A cursor on the last atom reads an implicit blank.
//!
//! The compiled program has three phases: build `r` and place `c` and the
//! start state; loop while `p = omega`, one δ-step per iteration, selected
//! by a cascade of guards `q != omega & γ(c) != omega`; finally erase `r`,
//! the cursor and everything from the first blank on.

use super::{Move, TmConfig, TmSpec};
use crate::logic::Formula;
use crate::st::Program;
use crate::structures::{string_structure_symbols, Atom, AFunction, Structure, StructureError, Term};

/// Bookkeeping tokens of the compiled program.
const X: &str = "x~1";
const Y: &str = "y~1";
const T: &str = "t~1";
const MEMO: &str = "b~1";

/// The compiled program, split at its phase boundaries.
#[derive(Clone, Debug)]
pub struct CompiledTm {
    pub init: Program,
    pub guard: Formula,
    pub step: Program,
    pub finish: Program,
}

impl CompiledTm {
    pub fn program(&self) -> Program {
        Program::seq([self.init.clone(), Program::do_while(self.guard.clone(), self.step.clone()), self.finish.clone()])
    }
}

fn v(n: &str) -> Term {
    Term::var(n)
}

fn ap(g: &str, t: Term) -> Term {
    Term::app1(g, t)
}

/// `if [g1] {p1} else { if [g2] {p2} else { .. skip } }`
fn cascade(cases: Vec<(Formula, Program)>) -> Program {
    cases.into_iter().rev().fold(Program::skip(), |other, (g, p)| Program::if_else(g, p, other))
}

fn assign(f: &str, args: Vec<Term>, q: Term) -> Program {
    Program::assignment(f, args, q, MEMO)
}

fn undef_token(c: &str) -> Program {
    Program::contraction(c, vec![])
}

fn any_edge<'a>(symbols: impl IntoIterator<Item = &'a str>, at: &str) -> Formula {
    Formula::disj(symbols.into_iter().map(|g| Formula::defined(ap(g, v(at)))))
}

/// Walk `X` forward along the edges labelled `symbols`, running `visit(g)`
/// before each move along `g`.
fn walk<'a>(symbols: &[&'a str], visit: impl Fn(&'a str) -> Vec<Program>) -> Program {
    let cases = symbols
        .iter()
        .map(|g| {
            let mut body = visit(g);
            body.push(assign(X, vec![], ap(g, v(X))));
            (Formula::defined(ap(g, v(X))), Program::seq(body))
        })
        .collect();
    Program::do_while(any_edge(symbols.iter().copied(), X), cascade(cases))
}

pub fn compile_parts(m: &TmSpec) -> CompiledTm {
    let input: Vec<&str> = m.input.iter().map(String::as_str).collect();
    let gamma: Vec<&str> = m.gamma().collect();
    let marks: Vec<&str> = m.tape.iter().map(String::as_str).collect();
    let blank = m.blank.as_str();

    let init = Program::seq([
        Program::extension("c", vec![], v("e")),
        Program::extension(&m.start, vec![], v("e")),
        Program::extension(X, vec![], v("e")),
        walk(&input, |g| vec![Program::extension("r", vec![ap(g, v(X))], v(X))]),
        undef_token(X),
    ]);

    let guard = Formula::undefined(v(&m.print));

    let mut cases = Vec::new();
    for q in m.states.iter().filter(|q| **q != m.print) {
        for g in &gamma {
            let (q2, g2, mv) = &m.delta[&(q.clone(), g.to_string())];
            let reads = if *g == blank {
                Formula::conj(marks.iter().map(|h| Formula::undefined(ap(h, v("c")))))
            } else {
                Formula::defined(ap(g, v("c")))
            };
            let mut body = Vec::new();
            if *g == blank {
                // make the implicit blank cell explicit
                body.push(Program::if_else(
                    Formula::undefined(ap(blank, v("c"))),
                    Program::seq([
                        Program::inception(T),
                        Program::extension(blank, vec![v("c")], v(T)),
                        Program::extension("r", vec![v(T)], v("c")),
                        undef_token(T),
                    ]),
                    Program::skip(),
                ));
            }
            if g2 != g {
                body.extend([
                    Program::extension(T, vec![], ap(g, v("c"))),
                    Program::contraction(g, vec![v("c")]),
                    Program::extension(g2, vec![v("c")], v(T)),
                    undef_token(T),
                ]);
            }
            if q2 != q {
                body.extend([Program::extension(q2, vec![], v("e")), undef_token(q)]);
            }
            match mv {
                Move::R => body.push(assign("c", vec![], ap(g2, v("c")))),
                Move::L => body.push(Program::if_else(
                    Formula::defined(ap("r", v("c"))),
                    assign("c", vec![], ap("r", v("c"))),
                    Program::skip(),
                )),
                Move::S => {}
            }
            cases.push((Formula::defined(v(q)).and(reads), Program::seq(body)));
        }
    }
    let step = cascade(cases);

    let truncate = cascade(
        gamma
            .iter()
            .map(|g| {
                let body = Program::seq([
                    Program::extension(Y, vec![], ap(g, v(X))),
                    Program::contraction(g, vec![v(X)]),
                    undef_token(X),
                    Program::extension(X, vec![], v(Y)),
                    undef_token(Y),
                ]);
                (Formula::defined(ap(g, v(X))), body)
            })
            .collect(),
    );
    let finish = Program::seq([
        Program::extension(X, vec![], v("e")),
        walk(&gamma, |g| vec![Program::contraction("r", vec![ap(g, v(X))])]),
        undef_token(X),
        Program::extension(X, vec![], v("e")),
        walk(&marks, |_| vec![]),
        Program::do_while(any_edge(gamma.iter().copied(), X), truncate),
        undef_token(X),
        undef_token("c"),
        undef_token(&m.print),
    ]);
    CompiledTm { init, guard, step, finish }
}

/// An ST program taking `T(w)` to `T(f_M(w))` (on `e` and the tape symbols).
pub fn compile_tm(m: &TmSpec) -> Program {
    compile_parts(m).program()
}

/// `T(w)` with a component for every tape symbol of `m`.
pub fn input_structure(m: &TmSpec, w: &[String]) -> Result<Structure, StructureError> {
    let alphabet: Vec<&str> = m.input.iter().map(String::as_str).collect();
    string_structure_symbols(w, &alphabet)
}

/// The part of a result that should be `T(f_M(w))`.
pub fn output_structure(m: &TmSpec, s: &Structure) -> Structure {
    s.reduct(std::iter::once("e").chain(m.tape.iter().map(String::as_str)))
}

/// `T(out)` over `e` and the non-blank tape symbols of `m`.
pub fn expected_output(m: &TmSpec, out: &[String]) -> Result<Structure, StructureError> {
    let alphabet: Vec<&str> = m.tape.iter().map(String::as_str).collect();
    string_structure_symbols(out, &alphabet)
}

pub fn config_structure(m: &TmSpec, c: &TmConfig) -> Structure {
    let mut s = Structure::default();
    for t in ["e", "c"].into_iter().chain(m.states.iter().map(String::as_str)) {
        s.declare(t, 0).expect("validated names");
    }
    s.declare("r", 1).expect("fresh");
    for g in m.gamma() {
        s.declare(g, 1).expect("validated names");
    }
    let a = |i: usize| Atom(i as u32);
    s.set_token("e", Some(a(0))).unwrap();
    s.set_token(&c.state, Some(a(0))).unwrap();
    s.set_token("c", Some(a(c.head))).unwrap();
    for (i, g) in c.tape.iter().enumerate() {
        let mut f = s.function(g).cloned().unwrap_or_else(|| AFunction::empty(1));
        f = f.extend(&[Some(a(i))], Some(a(i + 1))).unwrap();
        s.set_function(g, f).unwrap();
    }
    let r = AFunction::from_entries(1, (0..c.tape.len()).map(|i| (vec![a(i + 1)], a(i))));
    s.set_function("r", r).unwrap();
    s
}

/// Read a configuration back off a structure; `None` if it is not one.
pub fn decode_config(m: &TmSpec, s: &Structure) -> Option<TmConfig> {
    let e = s.token("e")?;
    let cursor = s.token("c")?;
    let mut defined = m.states.iter().filter(|q| s.token(q).is_some());
    let state = defined.next()?.clone();
    if defined.next().is_some() || s.token(&state) != Some(e) {
        return None;
    }
    let mut tape = Vec::new();
    let mut head = None;
    let mut x = e;
    loop {
        if x == cursor {
            head = Some(tape.len());
        }
        let mut out = m.gamma().filter_map(|g| s.function(g)?.get(&[x]).map(|y| (g, y)));
        let Some((g, y)) = out.next() else { break };
        if out.next().is_some() || tape.len() > s.entry_count() {
            return None;
        }
        tape.push(g.to_string());
        x = y;
    }
    Some(TmConfig { state, tape, head: head? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::st::run;
    use crate::structures::isomorphic;
    use crate::tm::{simulate_tm, symbols};

    #[test]
    fn initial_config_shape() {
        let m = corpus::complement_tm();
        let c = m.initial(&symbols("01")).unwrap();
        let s = config_structure(&m, &c);
        assert_eq!(s.token("e"), Some(Atom(0)));
        assert_eq!(s.token("s"), Some(Atom(0)));
        assert_eq!(s.token("c"), Some(Atom(0)));
        assert_eq!(s.function("0").unwrap().get(&[Atom(0)]), Some(Atom(1)));
        assert_eq!(s.function("1").unwrap().get(&[Atom(1)]), Some(Atom(2)));
        assert_eq!(decode_config(&m, &s), Some(c));
        let empty = config_structure(&m, &m.initial(&[]).unwrap());
        assert_eq!(empty.scope().len(), 1);
        assert_eq!(empty.token("e"), empty.token("c"));
    }

    #[test]
    fn compiled_matches_simulation() {
        for m in [corpus::identity_tm(), corpus::complement_tm(), corpus::complement_back_tm()] {
            let p = compile_tm(&m);
            for w in ["", "0", "10", "011"] {
                let w = symbols(w);
                let out = simulate_tm(&m, &w, 1000).unwrap();
                let (res, _) = run(&input_structure(&m, &w).unwrap(), &p, 100_000).unwrap();
                let got = output_structure(&m, &res);
                assert!(isomorphic(&got, &expected_output(&m, &out).unwrap()).unwrap().is_some(), "{w:?}: {got:?}");
            }
        }
    }

    #[test]
    fn loop_diverges() {
        let m = corpus::loop_tm();
        assert!(run(&input_structure(&m, &[]).unwrap(), &compile_tm(&m), 10_000).is_err());
    }
}
