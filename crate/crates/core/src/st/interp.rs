use serde_json::{json, Value};
use thiserror::Error;

use super::{Program, Revision};
use crate::logic::{eval_fo, EvalConfig, EvalError, Formula};
use crate::structures::{eval_term, AtomAllocator, AtomOrBottom, Structure, StructureError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DeletionMode {
    /// Remove every entry the atom occurs in, as input or output.
    #[default]
    Closure,
    /// Remove only entries whose output is the atom.
    OutputsOnly,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Maximum number of revisions applied.
    pub fuel: u64,
    pub deletion: DeletionMode,
    /// Record a snapshot after every revision.
    pub trace: bool,
    /// Fresh atoms start at or above this id.
    pub atom_offset: u32,
}

impl RunConfig {
    pub fn new(fuel: u64) -> RunConfig {
        RunConfig { fuel, deletion: DeletionMode::Closure, trace: true, atom_offset: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    /// Pre-order index of the revision in the program.
    pub point: usize,
    pub revision: Revision,
    /// The structure after the revision.
    pub state: Structure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopRecord {
    /// Pre-order index of the `do` among the program's loops.
    pub point: usize,
    pub iterations: u64,
}

/// What a run did, in order. Runs are deterministic, so the steps together
/// with the program fix every intermediate structure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub initial: Structure,
    pub steps: Vec<Step>,
    pub loops: Vec<LoopRecord>,
}

impl Trace {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn to_json(&self) -> Value {
        json!({
            "version": Self::SCHEMA_VERSION,
            "initial": structure_json(&self.initial),
            "steps": self.steps.iter().map(|s| json!({
                "point": s.point,
                "revision": s.revision.to_string(),
                "state": structure_json(&s.state),
            })).collect::<Vec<_>>(),
            "loops": self.loops.iter().map(|l| json!({"point": l.point, "iterations": l.iterations})).collect::<Vec<_>>(),
        })
    }

    /// The structure before step `i` (the final one for `i = steps.len()`).
    pub fn state_before(&self, i: usize) -> &Structure {
        if i == 0 {
            &self.initial
        } else {
            &self.steps[i - 1].state
        }
    }
}

fn structure_json(s: &Structure) -> Value {
    let comps: serde_json::Map<String, Value> = s
        .components()
        .map(|(n, f)| {
            let entries: Vec<Value> = f.entries().map(|(args, v)| json!([args, v])).collect();
            (n.to_string(), json!({"arity": f.arity(), "entries": entries}))
        })
        .collect();
    Value::Object(comps)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("no result within {fuel} revisions")]
    Diverged { fuel: u64, partial: Box<(Structure, Trace)> },
    #[error("loop at point {point} repeats without applying a revision")]
    Stuck { point: usize, partial: Box<(Structure, Trace)> },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Guard(#[from] EvalError),
}

/// Apply one revision. Identifiers not yet in the structure are adjoined
/// with the empty function.
pub fn apply_revision(
    s: &Structure,
    r: &Revision,
    alloc: &mut AtomAllocator,
    mode: DeletionMode,
) -> Result<Structure, StructureError> {
    let mut out = s.clone();
    revise(&mut out, r, alloc, mode)?;
    Ok(out)
}

fn point(s: &Structure, args: &[crate::structures::Term]) -> Result<Option<Vec<crate::structures::Atom>>, StructureError> {
    let mut vals = Vec::with_capacity(args.len());
    for a in args {
        vals.push(eval_term(s, a)?);
    }
    Ok(vals.into_iter().collect())
}

fn revise(s: &mut Structure, r: &Revision, alloc: &mut AtomAllocator, mode: DeletionMode) -> Result<(), StructureError> {
    match r {
        Revision::Extension { f, args, value } => {
            s.declare(f, args.len())?;
            let Some(pt) = point(s, args)? else { return Ok(()) };
            let v = eval_term(s, value)?;
            let func = s.function_mut(f).expect("declared");
            if let (None, Some(v)) = (func.get(&pt), v) {
                func.insert(pt, v);
            }
        }
        Revision::Inception(c) => {
            s.declare(c, 0)?;
            if s.token(c).is_none() {
                let a = alloc.fresh();
                s.set_token(c, Some(a))?;
            }
        }
        Revision::Contraction { f, args } => {
            s.declare(f, args.len())?;
            if let Some(pt) = point(s, args)? {
                s.function_mut(f).expect("declared").remove(&pt);
            }
        }
        Revision::Deletion(c) => {
            s.declare(c, 0)?;
            if let Some(a) = s.token(c) {
                let names: Vec<String> = s.vocabulary().names().map(String::from).collect();
                for n in names {
                    s.function_mut(&n)
                        .expect("declared")
                        .retain(|args, v| v != a && (mode == DeletionMode::OutputsOnly || !args.contains(&a)));
                }
            }
        }
    }
    Ok(())
}

/// Run `p` on `s` with a budget of `fuel` revisions, recording a trace.
pub fn run(s: &Structure, p: &Program, fuel: u64) -> Result<(Structure, Trace), RunError> {
    run_with(s, p, &RunConfig::new(fuel))
}

pub fn run_with(s: &Structure, p: &Program, cfg: &RunConfig) -> Result<(Structure, Trace), RunError> {
    let mut state = s.clone();
    for (n, k) in p.vocabulary()?.iter() {
        state.declare(n, k)?;
    }
    let mut alloc = AtomAllocator::with_offset(cfg.atom_offset);
    alloc.observe(&state);
    let mut m = Machine {
        cfg,
        alloc,
        used: 0,
        trace: Trace { initial: state.clone(), ..Trace::default() },
    };
    match m.exec(&mut state, p, 0, 0) {
        Ok(()) => Ok((state, m.trace)),
        Err(Halt::Fuel) => Err(RunError::Diverged { fuel: cfg.fuel, partial: Box::new((state, m.trace)) }),
        Err(Halt::Stuck(point)) => Err(RunError::Stuck { point, partial: Box::new((state, m.trace)) }),
        Err(Halt::Error(e)) => Err(e),
    }
}

enum Halt {
    Fuel,
    Stuck(usize),
    Error(RunError),
}

impl<E: Into<RunError>> From<E> for Halt {
    fn from(e: E) -> Halt {
        Halt::Error(e.into())
    }
}

struct Machine<'a> {
    cfg: &'a RunConfig,
    alloc: AtomAllocator,
    used: u64,
    trace: Trace,
}

impl Machine<'_> {
    /// `rev` and `lp` are the pre-order indices of the first revision and
    /// first loop inside `p`.
    fn exec(&mut self, s: &mut Structure, p: &Program, rev: usize, lp: usize) -> Result<(), Halt> {
        match p {
            Program::Revision(r) => {
                if self.used == self.cfg.fuel {
                    return Err(Halt::Fuel);
                }
                self.used += 1;
                revise(s, r, &mut self.alloc, self.cfg.deletion)?;
                if self.cfg.trace {
                    self.trace.steps.push(Step { point: rev, revision: r.clone(), state: s.clone() });
                }
            }
            Program::Seq(ps) => {
                let (mut rev, mut lp) = (rev, lp);
                for q in ps {
                    self.exec(s, q, rev, lp)?;
                    rev += q.revision_count();
                    lp += q.loop_count();
                }
            }
            Program::If(g, q, r) => {
                if guard(s, g)? {
                    self.exec(s, q, rev, lp)?;
                } else {
                    self.exec(s, r, rev + q.revision_count(), lp + q.loop_count())?;
                }
            }
            Program::Do(g, q) => {
                let mut iterations = 0;
                while guard(s, g)? {
                    let before = self.used;
                    self.exec(s, q, rev, lp + 1)?;
                    iterations += 1;
                    if self.used == before {
                        // nothing changed, so the guard still holds
                        return Err(Halt::Stuck(lp));
                    }
                }
                self.trace.loops.push(LoopRecord { point: lp, iterations });
            }
        }
        Ok(())
    }
}

/// Evaluate a guard. Quantifier-free guards are evaluated directly.
pub(crate) fn guard(s: &Structure, g: &Formula) -> Result<bool, RunError> {
    if !g.is_quantifier_free() {
        return Ok(eval_fo(s, g, &EvalConfig::fo())?);
    }
    Ok(qf(s, g)?)
}

fn qf(s: &Structure, g: &Formula) -> Result<bool, StructureError> {
    Ok(match g {
        Formula::Eq(t, q) => value(s, t)? == value(s, q)?,
        Formula::Not(a) => !qf(s, a)?,
        Formula::And(a, b) => qf(s, a)? && qf(s, b)?,
        Formula::Or(a, b) => qf(s, a)? || qf(s, b)?,
        Formula::Implies(a, b) => !qf(s, a)? || qf(s, b)?,
        Formula::Quant(..) => unreachable!("quantifier-free"),
    })
}

fn value(s: &Structure, t: &crate::structures::Term) -> Result<AtomOrBottom, StructureError> {
    eval_term(s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::st::parse_program;
    use crate::structures::{isomorphic, numeral_structure, string_structure, Atom};

    #[test]
    fn extension_only_at_undefined_points() {
        let s = string_structure("011").unwrap();
        // 0(e) is defined, 1(e) is not
        let (out, _) = run(&s, &parse_program("0(e) := e").unwrap(), 1).unwrap();
        assert_eq!(out, s);
        let (out, _) = run(&s, &parse_program("1(e) := 0(e)").unwrap(), 1).unwrap();
        assert_eq!(out.function("1").unwrap().get(&[Atom(0)]), Some(Atom(1)));
        let (out, _) = run(&s, &parse_program("1(e) := 1(e)").unwrap(), 1).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn inception_once() {
        let (out, trace) = run(&Structure::default(), &parse_program("c!; c!").unwrap(), 2).unwrap();
        assert_eq!(out.token("c"), Some(Atom(0)));
        assert_eq!(trace.steps[0].state, trace.steps[1].state);
    }

    #[test]
    fn deletion_modes() {
        // c denotes a2 in T(011)
        let mut s = string_structure("011").unwrap();
        s.set_token("c", Some(Atom(2))).unwrap();
        let p = parse_program("delete c").unwrap();
        let (out, _) = run(&s, &p, 1).unwrap();
        assert_eq!(out.token("c"), None);
        assert_eq!(out.function("1").unwrap().len(), 0);
        assert_eq!(out.function("0").unwrap().len(), 1);
        let cfg = RunConfig { deletion: DeletionMode::OutputsOnly, ..RunConfig::new(1) };
        let (out, _) = run_with(&s, &p, &cfg).unwrap();
        assert_eq!(out.function("1").unwrap().len(), 1);
    }

    #[test]
    fn assignment_keeps_old_value() {
        let s = numeral_structure(3);
        let (out, _) = run(&s, &parse_program("z <- s(z)").unwrap(), 10).unwrap();
        assert_eq!(out.token("z"), Some(Atom(1)));
    }

    #[test]
    fn divergence() {
        let p = parse_program("do [c = omega] { c! ; delete c }").unwrap();
        let e = run(&Structure::default(), &p, 10).unwrap_err();
        let RunError::Diverged { partial, .. } = e else { panic!("{e}") };
        assert_eq!(partial.1.steps.len(), 10);
        let stuck = parse_program("do [c = omega] { skip }").unwrap();
        assert!(matches!(run(&Structure::default(), &stuck, 10), Err(RunError::Stuck { .. })));
    }

    #[test]
    fn loops_and_points() {
        // walk to the end of the chain
        let p = parse_program("x := z; do [s(x) != omega] { x <- s(x) }").unwrap();
        let (out, trace) = run(&numeral_structure(3), &p, 100).unwrap();
        assert_eq!(out.token("x"), Some(Atom(3)));
        assert_eq!(trace.loops, vec![LoopRecord { point: 0, iterations: 3 }]);
        assert_eq!(trace.steps.len(), 1 + 3 * 4);
        assert_eq!(trace.steps[4].point, 4);
        let v = trace.to_json();
        assert_eq!(v["version"], 1);
        assert_eq!(v["steps"].as_array().unwrap().len(), 13);
    }

    #[test]
    fn offsets_give_isomorphic_results() {
        let p = parse_program("x!; y!; s(x) := y; z <- x").unwrap();
        let s = numeral_structure(2);
        let (a, _) = run(&s, &p, 100).unwrap();
        let (b, _) = run_with(&s, &p, &RunConfig { atom_offset: 40, ..RunConfig::new(100) }).unwrap();
        assert_ne!(a, b);
        assert!(isomorphic(&a, &b).unwrap().is_some());
    }
}
