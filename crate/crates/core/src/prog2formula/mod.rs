//! Programs as formulas.
//!
//! `program_formula(P)` is a formula `φ_P[f⃗, g⃗]` over the program's
//! identifiers `f⃗` (the state before) and a primed copy `g⃗` (the state
//! after) that holds exactly when `P` takes `f⃗` to `g⃗`. Every node becomes
//! an existential prefix over a matrix; loops become a finite chain
//! `z, s` whose atoms carry the intermediate states in a bundle of
//! functions `ĥ` with one extra argument.
//!
//! A run's trace is enough to name every existential, so
//! [`build_witness`] turns `run(P, σ)` into a checkable certificate.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::logic::library::Fresh;
use crate::logic::{check_with_witness, EvalError, Formula, Quantifier, Var, Witnesses};
use crate::st::{guard, run_with, DeletionMode, Program, Revision, RunConfig, RunError, Trace};
use crate::structures::{AFunction, Atom, AtomAllocator, Structure, StructureError, Term, Vocabulary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranslateError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("`{0}` is not an identifier of the program")]
    UnknownIdentifier(String),
    #[error("expected {expected} names, got {found}")]
    Length { expected: usize, found: usize },
    #[error("the trace does not belong to this program")]
    TraceMismatch,
}

/// `∃ prefix. matrix`
#[derive(Clone, Debug, PartialEq)]
pub struct Ex {
    pub prefix: Vec<Var>,
    pub matrix: Formula,
}

impl Ex {
    pub fn formula(&self) -> Formula {
        Formula::exists_all(self.prefix.iter().cloned(), self.matrix.clone())
    }

    /// Peel the leading existential quantifiers off `f`.
    pub fn split(f: &Formula) -> Ex {
        let mut prefix = Vec::new();
        let mut cur = f;
        while let Formula::Quant(Quantifier::Exists, v, b) = cur {
            prefix.push(v.clone());
            cur = b;
        }
        Ex { prefix, matrix: cur.clone() }
    }
}

/// Where each existential of a translation lives, for building witnesses.
#[derive(Clone, Debug)]
pub enum Skeleton {
    Revision,
    Seq { seams: Vec<Vec<String>>, parts: Vec<Skeleton> },
    If(Box<Skeleton>, Box<Skeleton>),
    Do { z: String, s: String, h: Vec<String>, lifted: Vec<(Var, Var)>, body: Box<Skeleton> },
}

#[derive(Clone, Debug)]
pub struct ProgramFormula {
    pub program: Program,
    pub vocab: Vocabulary,
    /// Names of the identifiers before and after, in vocabulary order.
    pub pre: Vec<String>,
    pub post: Vec<String>,
    pub ex: Ex,
    pub skeleton: Skeleton,
    pub deletion: DeletionMode,
}

impl ProgramFormula {
    pub fn formula(&self) -> Formula {
        self.ex.formula()
    }

    /// The structure interpreting `pre` by `before` and `post` by `after`.
    pub fn assignment(&self, before: &Structure, after: &Structure) -> Result<Structure, TranslateError> {
        let a = relabel(before, &self.vocab, &self.pre)?;
        let b = relabel(after, &self.vocab, &self.post)?;
        Ok(a.union(&b)?)
    }
}

/// The identifiers of `vocab`, read off `s` (absent ones empty) and renamed.
fn relabel(s: &Structure, vocab: &Vocabulary, names: &[String]) -> Result<Structure, TranslateError> {
    let mut out = Structure::default();
    for ((id, k), n) in vocab.iter().zip(names) {
        out.declare(n, k)?;
        if let Some(f) = s.function(id) {
            out.set_function(n, f.clone())?;
        }
    }
    Ok(out)
}

fn primed(ids: &[String]) -> Vec<String> {
    ids.iter()
        .map(|id| {
            let mut n = format!("{id}'");
            while ids.contains(&n) {
                n.push('\'');
            }
            n
        })
        .collect()
}

/// `φ_P` with the identifiers themselves for the state before and primed
/// names for the state after.
pub fn program_formula(p: &Program) -> Result<ProgramFormula, TranslateError> {
    program_formula_with(p, DeletionMode::default())
}

pub fn program_formula_with(p: &Program, deletion: DeletionMode) -> Result<ProgramFormula, TranslateError> {
    let ids: Vec<String> = p.vocabulary()?.names().map(String::from).collect();
    let post = primed(&ids);
    program_formula_named(p, &ids, &post, deletion)
}

/// `φ_P` with explicit names for the states before and after.
pub fn program_formula_named(
    p: &Program,
    pre: &[String],
    post: &[String],
    deletion: DeletionMode,
) -> Result<ProgramFormula, TranslateError> {
    let vocab = p.vocabulary()?;
    for names in [pre, post] {
        if names.len() != vocab.len() {
            return Err(TranslateError::Length { expected: vocab.len(), found: names.len() });
        }
    }
    let mut fresh = Fresh::avoiding(vocab.names().chain(pre.iter().map(String::as_str)).chain(post.iter().map(String::as_str)));
    avoid_program(&mut fresh, p);
    let mut t = Translator { vocab: &vocab, fresh, deletion };
    let (ex, skeleton) = t.program(p, pre, post);
    Ok(ProgramFormula { program: p.clone(), vocab, pre: pre.to_vec(), post: post.to_vec(), ex, skeleton, deletion })
}

fn avoid_program(fresh: &mut Fresh, p: &Program) {
    match p {
        Program::Revision(_) => {}
        Program::Seq(ps) => ps.iter().for_each(|q| avoid_program(fresh, q)),
        Program::If(g, q, r) => {
            fresh.avoid_formula(g);
            avoid_program(fresh, q);
            avoid_program(fresh, r);
        }
        Program::Do(g, q) => {
            fresh.avoid_formula(g);
            avoid_program(fresh, q);
        }
    }
}

fn app(f: &str, args: Vec<Term>) -> Term {
    Term::app(f, args)
}

fn terms(names: &[String]) -> Vec<Term> {
    names.iter().map(Term::var).collect()
}

fn rename_map(from: impl IntoIterator<Item = impl Into<String>>, to: &[String]) -> HashMap<String, String> {
    from.into_iter().map(Into::into).zip(to.iter().cloned()).collect()
}

/// Apply `f` to every term of `phi`, bottom-up through applications.
fn map_terms(phi: &Formula, f: &dyn Fn(Term) -> Term) -> Formula {
    fn term(t: &Term, f: &dyn Fn(Term) -> Term) -> Term {
        match t {
            Term::Omega => f(Term::Omega),
            Term::App(n, args) => f(Term::App(n.clone(), args.iter().map(|a| term(a, f)).collect())),
        }
    }
    match phi {
        Formula::Eq(a, b) => Formula::Eq(term(a, f), term(b, f)),
        Formula::Not(a) => map_terms(a, f).not(),
        Formula::And(a, b) => map_terms(a, f).and(map_terms(b, f)),
        Formula::Or(a, b) => map_terms(a, f).or(map_terms(b, f)),
        Formula::Implies(a, b) => map_terms(a, f).implies(map_terms(b, f)),
        Formula::Quant(q, v, b) => Formula::Quant(*q, v.clone(), Box::new(map_terms(b, f))),
    }
}

/// Replace `w(args)` by `ŵ(x, args)` for every lifted pair `(w, ŵ)`.
fn lift(phi: &Formula, lifted: &[(Var, Var)], x: &str) -> Formula {
    let map: HashMap<&str, &str> = lifted.iter().map(|(w, h)| (w.name.as_str(), h.name.as_str())).collect();
    map_terms(phi, &|t| match t {
        Term::App(n, args) => match map.get(n.as_str()) {
            Some(h) => app(h, std::iter::once(Term::var(x)).chain(args).collect()),
            None => Term::App(n, args),
        },
        t => t,
    })
}

struct Translator<'a> {
    vocab: &'a Vocabulary,
    fresh: Fresh,
    deletion: DeletionMode,
}

impl Translator<'_> {
    fn ids(&self) -> Vec<(String, usize)> {
        self.vocab.iter().map(|(n, k)| (n.to_string(), k)).collect()
    }

    fn index(&self, id: &str) -> usize {
        self.vocab.names().position(|n| n == id).expect("identifier of the program")
    }

    fn vector(&mut self) -> Vec<String> {
        self.ids().iter().map(|(n, _)| self.fresh.name(n)).collect()
    }

    fn vars(&self, names: &[String]) -> Vec<Var> {
        names.iter().zip(self.vocab.iter()).map(|(n, (_, k))| Var::new(n.clone(), k)).collect()
    }

    /// `∀ū body(ū)` with fresh `ū`.
    fn pointwise(&mut self, k: usize, body: impl FnOnce(&[Term]) -> Formula) -> Formula {
        let us = self.fresh.names("u", k);
        Formula::forall_all(us.iter().map(Var::atomic), body(&terms(&us)))
    }

    /// `∀ū (cond(ū) → g ū ≐ then(ū)) ∧ (¬cond(ū) → g ū ≐ f ū)`
    fn pointwise_update(&mut self, k: usize, f: &str, g: &str, cond: impl Fn(&[Term]) -> Formula, then: Term) -> Formula {
        self.pointwise(k, |u| {
            let c = cond(u);
            let gu = app(g, u.to_vec());
            c.clone()
                .implies(Formula::eq(gu.clone(), then))
                .and(c.not().implies(Formula::eq(gu, app(f, u.to_vec()))))
        })
    }

    fn unchanged(&mut self, i: usize, f: &[String], g: &[String]) -> Formula {
        let k = self.ids()[i].1;
        let (fi, gi) = (f[i].clone(), g[i].clone());
        self.pointwise(k, |u| Formula::eq(app(&gi, u.to_vec()), app(&fi, u.to_vec())))
    }

    fn all_unchanged_but(&mut self, skip: Option<usize>, f: &[String], g: &[String]) -> Vec<Formula> {
        (0..f.len()).filter(|i| Some(*i) != skip).map(|i| self.unchanged(i, f, g)).collect()
    }

    fn revision(&mut self, r: &Revision, f: &[String], g: &[String]) -> Formula {
        let ids = self.ids();
        let to_f = rename_map(ids.iter().map(|(n, _)| n.clone()), f);
        let rn = |t: &Term| t.rename(&|n| to_f.get(n).cloned());
        match r {
            Revision::Extension { f: name, args, value } => {
                let i = self.index(name);
                let ps: Vec<Term> = args.iter().map(rn).collect();
                let v = rn(value);
                let fi = f[i].clone();
                let cond = |u: &[Term]| {
                    Formula::conj(
                        u.iter()
                            .zip(&ps)
                            .map(|(u, p)| Formula::eq(u.clone(), p.clone()))
                            .chain(ps.iter().map(|p| Formula::defined(p.clone())))
                            .chain([Formula::undefined(app(&fi, u.to_vec())), Formula::defined(v.clone())]),
                    )
                };
                let upd = self.pointwise_update(ps.len(), &f[i], &g[i], cond, v.clone());
                Formula::conj(std::iter::once(upd).chain(self.all_unchanged_but(Some(i), f, g)))
            }
            Revision::Contraction { f: name, args } => {
                let i = self.index(name);
                let ps: Vec<Term> = args.iter().map(rn).collect();
                let cond = |u: &[Term]| {
                    Formula::conj(
                        u.iter()
                            .zip(&ps)
                            .map(|(u, p)| Formula::eq(u.clone(), p.clone()))
                            .chain(ps.iter().map(|p| Formula::defined(p.clone()))),
                    )
                };
                let upd = self.pointwise_update(ps.len(), &f[i], &g[i], cond, Term::Omega);
                Formula::conj(std::iter::once(upd).chain(self.all_unchanged_but(Some(i), f, g)))
            }
            Revision::Inception(c) => {
                let i = self.index(c);
                let (fc, gc) = (Term::var(&f[i]), Term::var(&g[i]));
                let mut outside = vec![Formula::defined(gc.clone())];
                for (j, (_, k)) in ids.iter().enumerate() {
                    let fj = f[j].clone();
                    let gc = gc.clone();
                    outside.push(self.pointwise(*k, |u| {
                        let fu = app(&fj, u.to_vec());
                        Formula::defined(fu.clone()).implies(Formula::conj(
                            std::iter::once(Formula::neq(fu, gc.clone()))
                                .chain(u.iter().map(|u| Formula::neq(u.clone(), gc.clone()))),
                        ))
                    }));
                }
                let upd = Formula::defined(fc.clone())
                    .implies(Formula::eq(gc.clone(), fc.clone()))
                    .and(Formula::undefined(fc).implies(Formula::conj(outside)));
                Formula::conj(std::iter::once(upd).chain(self.all_unchanged_but(Some(i), f, g)))
            }
            Revision::Deletion(c) => {
                let a = Term::var(&f[self.index(c)]);
                let closure = self.deletion == DeletionMode::Closure;
                let mut parts = Vec::new();
                for (j, (_, k)) in ids.iter().enumerate() {
                    let fj = f[j].clone();
                    let a = a.clone();
                    let cond = move |u: &[Term]| {
                        let out = Formula::eq(app(&fj, u.to_vec()), a.clone());
                        if closure {
                            Formula::disj(std::iter::once(out).chain(u.iter().map(|u| Formula::eq(u.clone(), a.clone()))))
                        } else {
                            out
                        }
                    };
                    parts.push(self.pointwise_update(*k, &f[j], &g[j], cond, Term::Omega));
                }
                Formula::conj(parts)
            }
        }
    }

    fn program(&mut self, p: &Program, f: &[String], g: &[String]) -> (Ex, Skeleton) {
        let to_f = |phi: &Formula, names: &[String]| phi.rename_free(&rename_map(self.vocab.names(), names));
        match p {
            Program::Revision(r) => {
                (Ex { prefix: Vec::new(), matrix: self.revision(r, f, g) }, Skeleton::Revision)
            }
            Program::Seq(ps) if ps.is_empty() => {
                let m = Formula::conj(self.all_unchanged_but(None, f, g));
                (Ex { prefix: Vec::new(), matrix: m }, Skeleton::Seq { seams: Vec::new(), parts: Vec::new() })
            }
            Program::Seq(ps) => {
                let seams: Vec<Vec<String>> = (1..ps.len()).map(|_| self.vector()).collect();
                let mut prefix: Vec<Var> = seams.iter().flat_map(|s| self.vars(s)).collect();
                let mut matrix = Vec::new();
                let mut parts = Vec::new();
                for (j, q) in ps.iter().enumerate() {
                    let from = if j == 0 { f } else { &seams[j - 1] };
                    let to = if j + 1 == ps.len() { g } else { &seams[j] };
                    let (ex, sk) = self.program(q, from, to);
                    prefix.extend(ex.prefix);
                    matrix.push(ex.matrix);
                    parts.push(sk);
                }
                (Ex { prefix, matrix: Formula::conj(matrix) }, Skeleton::Seq { seams, parts })
            }
            Program::If(c, q, r) => {
                let c = to_f(c, f);
                let (eq, sq) = self.program(q, f, g);
                let (er, sr) = self.program(r, f, g);
                let matrix = c.clone().and(eq.matrix).or(c.not().and(er.matrix));
                let prefix = eq.prefix.into_iter().chain(er.prefix).collect();
                (Ex { prefix, matrix }, Skeleton::If(Box::new(sq), Box::new(sr)))
            }
            Program::Do(c, body) => {
                let l = self.vector();
                let m = self.vector();
                let (eb, sb) = self.program(body, &l, &m);
                let step = Ex { prefix: eb.prefix, matrix: to_f(c, &l).and(eb.matrix) };
                let (mut ex, sk) = self.star(step, &l, &m, f, g, sb);
                ex.matrix = ex.matrix.and(to_f(c, g).not());
                (ex, sk)
            }
        }
    }

    /// The reflexive-transitive closure of `step[ℓ, m]`, between `f` and `g`.
    fn star(&mut self, step: Ex, l: &[String], m: &[String], f: &[String], g: &[String], body: Skeleton) -> (Ex, Skeleton) {
        let z = self.fresh.name("z");
        let s = self.fresh.name("s");
        let x = self.fresh.name("x");
        let y = self.fresh.name("y");
        let arities: Vec<usize> = self.vocab.iter().map(|(_, k)| k).collect();
        let h: Vec<String> = self.vocab.names().map(String::from).collect::<Vec<_>>().iter().map(|n| self.fresh.name(&format!("h{n}"))).collect();
        let lifted: Vec<(Var, Var)> = step
            .prefix
            .iter()
            .map(|w| (w.clone(), Var::new(self.fresh.name(&w.name), w.arity + 1)))
            .collect();

        let (zt, xt, yt) = (Term::var(&z), Term::var(&x), Term::var(&y));
        let sx = Term::app1(&s, xt.clone());
        let sy = Term::app1(&s, yt.clone());
        let slice = |names: &[String], t: &Term, me: &mut Self| {
            Formula::conj(names.iter().zip(&h).zip(&arities).map(|((n, hn), &k)| {
                me.pointwise(k, |u| {
                    Formula::eq(app(n, u.to_vec()), app(hn, std::iter::once(t.clone()).chain(u.iter().cloned()).collect()))
                })
            }))
        };

        let chain = Formula::defined(zt.clone()).and(Formula::forall_all(
            [Var::atomic(&x), Var::atomic(&y)],
            Formula::neq(sx.clone(), zt.clone()).and(
                Formula::defined(sx.clone()).and(Formula::eq(sx.clone(), sy.clone())).implies(Formula::eq(xt.clone(), yt.clone())),
            ),
        ));
        let start = slice(f, &zt, self);
        let links = {
            let here = slice(l, &xt, self);
            let next = slice(m, &sx, self);
            let lm: Vec<Var> = self.vars(l).into_iter().chain(self.vars(m)).collect();
            Formula::defined(sx.clone()).implies(Formula::forall_all(lm, here.and(next).implies(lift(&step.matrix, &lifted, &x))))
        };
        let end = {
            let reached = Formula::eq(xt.clone(), zt.clone()).or(Formula::exists(Var::atomic(&y), Formula::eq(sy, xt.clone())));
            Formula::undefined(sx)
                .and(Formula::defined(xt.clone()))
                .and(reached)
                .implies(slice(g, &xt, self))
        };
        let matrix = Formula::conj([chain, start, Formula::forall(Var::atomic(&x), links.and(end))]);
        let prefix = [Var::atomic(&z), Var::new(s.clone(), 1)]
            .into_iter()
            .chain(h.iter().zip(&arities).map(|(n, k)| Var::new(n.clone(), k + 1)))
            .chain(lifted.iter().map(|(_, w)| w.clone()))
            .collect();
        (Ex { prefix, matrix }, Skeleton::Do { z, s, h, lifted, body: Box::new(body) })
    }
}

/// `φ*[f⃗, g⃗]` for a formula `phi` whose free identifiers include `f⃗`
/// (typed by `vocab`) and a same-typed vector `g⃗`: some finite sequence of
/// `phi`-steps leads from `f⃗` to `g⃗`.
pub fn star_formula(phi: &Formula, vocab: &Vocabulary, f: &[String], g: &[String]) -> Result<Formula, TranslateError> {
    for names in [f, g] {
        if names.len() != vocab.len() {
            return Err(TranslateError::Length { expected: vocab.len(), found: names.len() });
        }
    }
    let mut fresh = Fresh::avoiding(f.iter().chain(g).map(String::as_str));
    fresh.avoid_formula(phi);
    let mut t = Translator { vocab, fresh, deletion: DeletionMode::default() };
    let l = t.vector();
    let m = t.vector();
    let ex = Ex::split(phi);
    let mut map = rename_map(f.iter().cloned(), &l);
    map.extend(rename_map(g.iter().cloned(), &m));
    let step = Ex { prefix: ex.prefix, matrix: ex.matrix.rename_free(&map) };
    let (ex, _) = t.star(step, &l, &m, f, g, Skeleton::Revision);
    Ok(ex.formula())
}

/// `A_V[u]`: the atom denoted by `u` is reachable from the tokens of `vocab`
/// by its functions. A set is a unary function defined exactly on its
/// members; `g` grows from `∅` one image `f ȳ` at a time.
pub fn accessible_formula(vocab: &Vocabulary, u: &Term) -> Formula {
    let mut fresh = Fresh::avoiding(vocab.names());
    fresh.avoid_term(u);
    let (g, h, e, x) = (fresh.name("g"), fresh.name("h"), fresh.name("e"), fresh.name("x"));
    let xt = Term::var(&x);
    let mem = |set: &str, t: Term| Formula::defined(Term::app1(set, t));
    let images = Formula::disj(vocab.iter().map(|(f, k)| {
        let ys = fresh.names("y", k);
        Formula::exists_all(
            ys.iter().map(Var::atomic),
            Formula::conj(ys.iter().map(|y| mem(&g, Term::var(y))).chain([Formula::eq(xt.clone(), app(f, terms(&ys)))])),
        )
    }));
    let step = Formula::forall(
        Var::atomic(&x),
        Formula::eq(Term::app1(&h, xt.clone()), Term::app1(&g, xt.clone()))
            .or(Formula::conj([mem(&g, xt.clone()).not(), mem(&h, xt.clone()), images])),
    );
    let sets = Vocabulary::from_pairs([(g.clone(), 1)]).expect("one name");
    let star = star_formula(&step, &sets, std::slice::from_ref(&g), std::slice::from_ref(&h)).expect("matching lengths");
    // φ*[∅, g]: rename the closure's endpoints to `e` (empty) and `g`
    let star = star.rename_free(&HashMap::from([(g.clone(), e.clone()), (h.clone(), g.clone())]));
    let empty = Formula::forall(Var::atomic(&x), Formula::undefined(Term::app1(&e, xt)));
    Formula::exists_all([Var::new(e, 1), Var::new(g.clone(), 1)], Formula::conj([empty, star, mem(&g, u.clone())]))
}

/// Name the existentials of `pf` from a trace of its program.
pub fn build_witness(pf: &ProgramFormula, trace: &Trace) -> Result<Witnesses, TranslateError> {
    build_witness_from(pf, trace, 0)
}

/// As [`build_witness`], with every invented atom at least `floor`.
pub fn build_witness_from(pf: &ProgramFormula, trace: &Trace, floor: u32) -> Result<Witnesses, TranslateError> {
    let mut alloc = AtomAllocator::with_offset(floor);
    alloc.observe(&trace.initial);
    for s in &trace.steps {
        alloc.observe(&s.state);
    }
    let mut b = WitnessBuilder { pf, trace, idx: 0, alloc };
    let mut w = Witnesses::new();
    b.replay(&pf.program, &pf.skeleton, &mut w)?;
    if b.idx != trace.steps.len() {
        return Err(TranslateError::TraceMismatch);
    }
    for v in &pf.ex.prefix {
        w.entry(v.name.clone()).or_insert_with(|| AFunction::empty(v.arity));
    }
    Ok(w)
}

struct WitnessBuilder<'a> {
    pf: &'a ProgramFormula,
    trace: &'a Trace,
    idx: usize,
    alloc: AtomAllocator,
}

impl WitnessBuilder<'_> {
    fn state(&self) -> Result<&Structure, TranslateError> {
        if self.idx > self.trace.steps.len() {
            return Err(TranslateError::TraceMismatch);
        }
        Ok(self.trace.state_before(self.idx))
    }

    fn component(&self, s: &Structure, id: &str, k: usize) -> AFunction {
        s.function(id).cloned().unwrap_or_else(|| AFunction::empty(k))
    }

    fn replay(&mut self, p: &Program, sk: &Skeleton, w: &mut Witnesses) -> Result<(), TranslateError> {
        match (p, sk) {
            (Program::Revision(_), Skeleton::Revision) => {
                self.idx += 1;
                if self.idx > self.trace.steps.len() {
                    return Err(TranslateError::TraceMismatch);
                }
            }
            (Program::Seq(ps), Skeleton::Seq { seams, parts }) => {
                for (j, (q, sq)) in ps.iter().zip(parts).enumerate() {
                    self.replay(q, sq, w)?;
                    if let Some(seam) = seams.get(j) {
                        let s = self.state()?.clone();
                        for ((id, k), n) in self.pf.vocab.iter().zip(seam) {
                            w.insert(n.clone(), self.component(&s, id, k));
                        }
                    }
                }
            }
            (Program::If(c, q, r), Skeleton::If(sq, sr)) => {
                if guard(self.state()?, c)? {
                    self.replay(q, sq, w)?;
                } else {
                    self.replay(r, sr, w)?;
                }
            }
            (Program::Do(c, q), Skeleton::Do { z, s, h, lifted, body }) => {
                let mut states = Vec::new();
                let mut inner = Vec::new();
                loop {
                    states.push(self.state()?.clone());
                    if !guard(self.state()?, c)? {
                        break;
                    }
                    let mut wi = Witnesses::new();
                    self.replay(q, body, &mut wi)?;
                    inner.push(wi);
                }
                let atoms: Vec<Atom> = states.iter().map(|_| self.alloc.fresh()).collect();
                w.insert(z.clone(), AFunction::token(Some(atoms[0])));
                w.insert(s.clone(), AFunction::from_entries(1, atoms.windows(2).map(|p| (vec![p[0]], p[1]))));
                for ((id, k), hn) in self.pf.vocab.iter().zip(h) {
                    let entries = states.iter().zip(&atoms).flat_map(|(st, &a)| {
                        let f = self.component(st, id, k);
                        f.entries().map(move |(args, v)| (prepend(a, args), v)).collect::<Vec<_>>()
                    });
                    w.insert(hn.clone(), AFunction::from_entries(k + 1, entries));
                }
                for (v, hv) in lifted {
                    let entries = inner.iter().zip(&atoms).flat_map(|(wi, &a)| match wi.get(&v.name) {
                        Some(f) => f.entries().map(|(args, x)| (prepend(a, args), x)).collect(),
                        None => Vec::new(),
                    });
                    w.insert(hv.name.clone(), AFunction::from_entries(hv.arity, entries));
                }
            }
            _ => return Err(TranslateError::TraceMismatch),
        }
        Ok(())
    }
}

fn prepend(a: Atom, args: &[Atom]) -> Vec<Atom> {
    std::iter::once(a).chain(args.iter().copied()).collect()
}

/// Run `p` from `initial`, certify the result against `φ_P` and return the
/// final state.
pub fn certify_run(pf: &ProgramFormula, initial: &Structure, fuel: u64) -> Result<(Structure, bool), TranslateError> {
    let cfg = RunConfig { deletion: pf.deletion, ..RunConfig::new(fuel) };
    let (out, trace) = run_with(initial, &pf.program, &cfg)?;
    let w = build_witness(pf, &trace)?;
    let s = pf.assignment(&trace.initial, &out)?;
    Ok((out, check_with_witness(&s, &pf.formula(), &w)?))
}

/// `φ_P` read as a function from `inputs` to `outputs`: identifiers that
/// are not inputs start empty, and the final values of non-outputs are
/// forgotten.
#[derive(Clone, Debug)]
pub struct IoFormula {
    pub translation: ProgramFormula,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Free names standing for the outputs.
    pub output_names: Vec<String>,
    pub formula: Formula,
    /// Existentials for the hidden initial and final states.
    hidden_pre: Vec<Var>,
    hidden_post: Vec<(String, Var)>,
}

pub fn io_formula(p: &Program, inputs: &[&str], outputs: &[&str]) -> Result<IoFormula, TranslateError> {
    let vocab = p.vocabulary()?;
    for n in inputs.iter().chain(outputs) {
        if !vocab.contains(n) {
            return Err(TranslateError::UnknownIdentifier(n.to_string()));
        }
    }
    let ids: Vec<String> = vocab.names().map(String::from).collect();
    let primes = primed(&ids);
    let mut fresh = Fresh::avoiding(ids.iter().chain(&primes).map(String::as_str));
    let pre: Vec<String> =
        ids.iter().map(|id| if inputs.contains(&id.as_str()) { id.clone() } else { fresh.name(id) }).collect();
    let post: Vec<String> = ids
        .iter()
        .zip(&primes)
        .map(|(id, pr)| if outputs.contains(&id.as_str()) { pr.clone() } else { fresh.name(id) })
        .collect();
    let pf = program_formula_named(p, &pre, &post, DeletionMode::default())?;
    let mut hidden_pre = Vec::new();
    let mut hidden_post = Vec::new();
    let mut empties = Vec::new();
    let mut x = Fresh::avoiding(pre.iter().chain(&post).map(String::as_str));
    x.avoid_formula(&pf.ex.matrix);
    for (((id, k), a), b) in vocab.iter().zip(&pre).zip(&post) {
        if !inputs.contains(&id) {
            let us = x.names("u", k);
            empties.push(Formula::forall_all(us.iter().map(Var::atomic), Formula::undefined(app(a, terms(&us)))));
            hidden_pre.push(Var::new(a.clone(), k));
        }
        if !outputs.contains(&id) {
            hidden_post.push((id.to_string(), Var::new(b.clone(), k)));
        }
    }
    let prefix: Vec<Var> = hidden_pre
        .iter()
        .cloned()
        .chain(hidden_post.iter().map(|(_, v)| v.clone()))
        .chain(pf.ex.prefix.iter().cloned())
        .collect();
    let formula = Formula::exists_all(prefix, Formula::conj(empties).and(pf.ex.matrix.clone()));
    let output_names = outputs.iter().map(|o| post[vocab.names().position(|n| n == *o).expect("checked")].clone()).collect();
    Ok(IoFormula {
        translation: pf,
        inputs: inputs.iter().map(|s| s.to_string()).collect(),
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        output_names,
        formula,
        hidden_pre,
        hidden_post,
    })
}

impl IoFormula {
    /// The formula with inputs and outputs renamed; the new names must not
    /// contain `~`.
    pub fn instantiate(&self, inputs: &[&str], outputs: &[&str]) -> Result<Formula, TranslateError> {
        for (want, got) in [(self.inputs.len(), inputs.len()), (self.outputs.len(), outputs.len())] {
            if want != got {
                return Err(TranslateError::Length { expected: want, found: got });
            }
        }
        let map: HashMap<String, String> = self
            .inputs
            .iter()
            .zip(inputs)
            .chain(self.output_names.iter().zip(outputs))
            .map(|(a, b)| (a.clone(), b.to_string()))
            .collect();
        Ok(self.formula.rename_free(&map))
    }

    /// The structure the formula is evaluated on: inputs from `input`,
    /// outputs (under their free names) from `output`.
    pub fn assignment(&self, input: &Structure, output: &Structure) -> Result<Structure, TranslateError> {
        let mut s = Structure::default();
        let vocab = &self.translation.vocab;
        for n in &self.inputs {
            let k = vocab.arity(n).expect("checked");
            s.declare(n, k)?;
            if let Some(f) = input.function(n) {
                s.set_function(n, f.clone())?;
            }
        }
        for (n, name) in self.outputs.iter().zip(&self.output_names) {
            let k = vocab.arity(n).expect("checked");
            s.declare(name, k)?;
            if let Some(f) = output.function(n) {
                s.set_function(name, f.clone())?;
            }
        }
        Ok(s)
    }

    /// Witnesses from a run; the run must start with non-inputs empty.
    pub fn witness(&self, trace: &Trace, output: &Structure) -> Result<Witnesses, TranslateError> {
        self.witness_from(trace, output, 0)
    }

    /// As [`IoFormula::witness`], with every invented atom at least `floor`.
    pub fn witness_from(&self, trace: &Trace, output: &Structure, floor: u32) -> Result<Witnesses, TranslateError> {
        let mut w = build_witness_from(&self.translation, trace, floor)?;
        for v in &self.hidden_pre {
            w.insert(v.name.clone(), AFunction::empty(v.arity));
        }
        for (id, v) in &self.hidden_post {
            w.insert(v.name.clone(), output.function(id).cloned().unwrap_or_else(|| AFunction::empty(v.arity)));
        }
        Ok(w)
    }

    /// Run on `input` (restricted to the inputs) and check the result
    /// against the formula with witnesses.
    pub fn certify(&self, input: &Structure, fuel: u64) -> Result<(Structure, bool), TranslateError> {
        let start = input.reduct(self.inputs.iter().map(String::as_str));
        let (out, trace) = run_with(&start, &self.translation.program, &RunConfig::new(fuel))?;
        let w = self.witness(&trace, &out)?;
        let s = self.assignment(&start, &out)?;
        Ok((out, check_with_witness(&s, &self.formula, &w)?))
    }
}

/// How many existentials of each arity the translation uses.
pub fn prefix_summary(pf: &ProgramFormula) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for v in &pf.ex.prefix {
        *out.entry(v.arity).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests;
