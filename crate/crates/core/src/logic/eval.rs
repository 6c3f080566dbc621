//! Satisfaction over finite partial structures.
//!
//! Quantifiers range over all of `A ∪ {⊥}` (atomic) or all finite functions
//! (functional), so evaluation needs a finite stand-in. Truth is invariant
//! under permutations of atoms that fix the scope of the structure and the
//! atoms currently bound, so an atomic quantifier only needs to try `⊥`, the
//! scope, the atoms in use, and *one* atom nobody uses yet (the "generic"
//! atom). Each nested quantifier may consume one more unused atom, so a pool
//! of `q` reserved atoms suffices for `q` atomic quantifiers.
//!
//! Functional quantifiers are searched lazily: the body is evaluated with the
//! function undecided everywhere, and the first lookup at an undecided point
//! aborts evaluation with a request for that point. The owning quantifier
//! branches over the possible values (⊥, atoms in use, one generic atom) and
//! restarts. Functions are capped at `so_entry_bound` defined entries.
//!
//! Two rewrites keep common shapes cheap. Consecutive functional quantifiers
//! of one kind share a single search. A quantified variable fixed by a
//! definitional conjunct, as in `∀v (∀u v u ≐ T ∧ R → B)` or
//! `∃v (∀u v u ≐ T ∧ R)`, is replaced by `λu.T` when `T` does not mention the
//! quantified variables and `λu.T` has finite support.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use super::formula::{Formula, Quantifier, Var};
use crate::structures::{AFunction, Atom, AtomOrBottom, Structure, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreeValued {
    True,
    False,
    Unknown,
}

impl ThreeValued {
    pub fn from_bool(b: bool) -> Self {
        if b {
            ThreeValued::True
        } else {
            ThreeValued::False
        }
    }

    pub fn is_true(self) -> bool {
        self == ThreeValued::True
    }

    pub fn negate(self) -> Self {
        match self {
            ThreeValued::True => ThreeValued::False,
            ThreeValued::False => ThreeValued::True,
            ThreeValued::Unknown => ThreeValued::Unknown,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            ThreeValued::True => Some(true),
            ThreeValued::False => Some(false),
            ThreeValued::Unknown => None,
        }
    }
}

impl fmt::Display for ThreeValued {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThreeValued::True => "true",
            ThreeValued::False => "false",
            ThreeValued::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SoMode {
    /// Reject functional quantifiers.
    FoOnly,
    /// Existentials with a supplied witness use it; the rest are searched.
    Witnessed,
    /// Search every functional quantifier. When the entry bound cut the
    /// search, an `∃` that found no witness (and a `∀` that found no
    /// counterexample) is unknown.
    BoundedSearch,
    /// Search as above, but read functional quantifiers as ranging over
    /// exactly the functions within the bound, so results are two-valued.
    BoundedUniverse,
}

#[derive(Clone, Debug)]
pub struct EvalConfig {
    /// Reserved atoms outside every scope. `None` picks a count that
    /// suffices for the formula: one per atomic quantifier plus room for the
    /// atoms a bounded function can introduce.
    pub fresh_atom_count: Option<usize>,
    /// Maximum number of defined entries in a searched function.
    pub so_entry_bound: usize,
    pub so_mode: SoMode,
    /// Try a single representative unused atom instead of every one.
    pub symmetry_reduction: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { fresh_atom_count: None, so_entry_bound: 2, so_mode: SoMode::BoundedSearch, symmetry_reduction: true }
    }
}

impl EvalConfig {
    pub fn fo() -> Self {
        EvalConfig { so_mode: SoMode::FoOnly, ..Default::default() }
    }

    pub fn bounded(bound: usize) -> Self {
        EvalConfig { so_entry_bound: bound, ..Default::default() }
    }

    pub fn universe(bound: usize) -> Self {
        EvalConfig { so_entry_bound: bound, so_mode: SoMode::BoundedUniverse, ..Default::default() }
    }

    pub fn with_mode(mut self, mode: SoMode) -> Self {
        self.so_mode = mode;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("`{name}` has arity {expected}, used with {found} argument(s)")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("functional quantifier over `{0}` in first-order evaluation")]
    FunctionalQuantifier(String),
    #[error("witness for `{name}` has arity {found}, variable has arity {expected}")]
    WitnessArity { name: String, expected: usize, found: usize },
    #[error("no quantified variable `{0}` for the supplied witness")]
    UnknownWitness(String),
    #[error("reserved fresh atoms exhausted")]
    FreshAtomsExhausted,
}

/// Witness functions keyed by quantified variable name (nullary functions
/// for atomic variables).
pub type Witnesses = BTreeMap<String, AFunction>;

/// `σ ⊨ φ` for first-order `φ`. Free variables are read from `σ`.
pub fn eval_fo(s: &Structure, f: &Formula, cfg: &EvalConfig) -> Result<bool, EvalError> {
    if let Some(v) = first_functional(f) {
        return Err(EvalError::FunctionalQuantifier(v));
    }
    let cfg = EvalConfig { so_mode: SoMode::FoOnly, ..cfg.clone() };
    eval_with(s, f, &cfg, &Witnesses::new())?.as_bool().ok_or(EvalError::FreshAtomsExhausted)
}

/// Three-valued evaluation with bounded functional quantifiers.
pub fn eval_bounded(s: &Structure, f: &Formula, cfg: &EvalConfig) -> Result<ThreeValued, EvalError> {
    eval_with(s, f, cfg, &Witnesses::new())
}

/// Substitute the witnesses for the existentials they name and evaluate.
/// Quantifiers without a witness are searched (bound from `cfg`).
pub fn check_with_witness(s: &Structure, f: &Formula, w: &Witnesses) -> Result<bool, EvalError> {
    check_with_witness_cfg(s, f, w, &EvalConfig::default())
}

pub fn check_with_witness_cfg(s: &Structure, f: &Formula, w: &Witnesses, cfg: &EvalConfig) -> Result<bool, EvalError> {
    let mut decls = HashMap::new();
    collect_existentials(f, &mut decls);
    for (name, g) in w {
        match decls.get(name) {
            None => return Err(EvalError::UnknownWitness(name.clone())),
            Some(&k) if k != g.arity() => {
                return Err(EvalError::WitnessArity { name: name.clone(), expected: k, found: g.arity() })
            }
            _ => {}
        }
    }
    let cfg = EvalConfig { so_mode: SoMode::Witnessed, ..cfg.clone() };
    Ok(eval_with(s, f, &cfg, w)?.is_true())
}

pub fn eval_with(s: &Structure, f: &Formula, cfg: &EvalConfig, w: &Witnesses) -> Result<ThreeValued, EvalError> {
    let mut c = Compiler { scope: Vec::new(), slots: 0, mode: cfg.so_mode, free: Vec::new() };
    for (name, k) in f.free_vars() {
        let g = s.function(&name).ok_or_else(|| EvalError::UnboundVariable(name.clone()))?;
        if g.arity() != k {
            return Err(EvalError::ArityMismatch { name, expected: g.arity(), found: k });
        }
        let slot = c.bind(&name, k);
        let b = if k == 0 { Binding::Val(g.as_token()) } else { Binding::Fixed(Rc::new(g.clone())) };
        c.free.push((slot, b));
    }
    let node = c.formula(f)?;

    let mut statics: HashSet<Atom> = s.scope().into_iter().collect();
    if cfg.so_mode == SoMode::Witnessed {
        for g in w.values() {
            statics.extend(g.scope());
        }
    }
    let mut static_atoms: Vec<Atom> = statics.iter().copied().collect();
    static_atoms.sort();
    let base = static_atoms.last().map_or(0, |a| a.0 + 1);
    let count = cfg.fresh_atom_count.unwrap_or_else(|| default_fresh_count(f, cfg.so_entry_bound));
    let pool = (0..count as u32).map(|i| Atom(base + i)).collect();

    let mut env = vec![Binding::Unbound; c.slots];
    for (slot, b) in c.free {
        env[slot] = b;
    }
    let mut m = Machine {
        env,
        mode: cfg.so_mode,
        bound: cfg.so_entry_bound,
        symmetry: cfg.symmetry_reduction,
        witnesses: w,
        statics,
        static_atoms,
        used: HashMap::new(),
        pool,
        level: 0,
    };
    match m.eval(&node) {
        Ok((v, _)) => Ok(v),
        Err(_) => unreachable!("every searched slot is owned by an enclosing quantifier"),
    }
}

fn default_fresh_count(f: &Formula, bound: usize) -> usize {
    let mut n = 0;
    fn walk(f: &Formula, bound: usize, n: &mut usize) {
        match f {
            Formula::Eq(..) => {}
            Formula::Not(a) => walk(a, bound, n),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                walk(a, bound, n);
                walk(b, bound, n);
            }
            Formula::Quant(_, v, b) => {
                *n += if v.arity == 0 { 1 } else { bound * (v.arity + 1) };
                walk(b, bound, n);
            }
        }
    }
    walk(f, bound, &mut n);
    n.max(1)
}

fn first_functional(f: &Formula) -> Option<String> {
    match f {
        Formula::Eq(..) => None,
        Formula::Not(a) => first_functional(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            first_functional(a).or_else(|| first_functional(b))
        }
        Formula::Quant(_, v, b) => {
            if v.arity > 0 {
                Some(v.name.clone())
            } else {
                first_functional(b)
            }
        }
    }
}

fn collect_existentials(f: &Formula, out: &mut HashMap<String, usize>) {
    match f {
        Formula::Eq(..) => {}
        Formula::Not(a) => collect_existentials(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_existentials(a, out);
            collect_existentials(b, out);
        }
        Formula::Quant(q, v, b) => {
            if *q == Quantifier::Exists {
                out.entry(v.name.clone()).or_insert(v.arity);
            }
            collect_existentials(b, out);
        }
    }
}

// ---------------------------------------------------------------------------
// Compilation to slot-resolved nodes.

#[derive(Debug)]
enum CTerm {
    Omega,
    App(usize, Vec<CTerm>),
}

#[derive(Debug)]
struct AliasDef {
    params: Vec<usize>,
    term: CTerm,
}

#[derive(Debug)]
struct QVar {
    slot: usize,
    name: String,
    arity: usize,
}

#[derive(Debug)]
enum Node {
    Eq(CTerm, CTerm),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Atomic(Quantifier, QVar, Box<Node>),
    Functional(Quantifier, Vec<QVar>, Box<Node>),
    Let(usize, Rc<AliasDef>, Box<Node>),
}

struct Compiler {
    scope: Vec<(String, usize, usize)>,
    slots: usize,
    mode: SoMode,
    free: Vec<(usize, Binding)>,
}

impl Compiler {
    fn bind(&mut self, name: &str, arity: usize) -> usize {
        let slot = self.slots;
        self.slots += 1;
        self.scope.push((name.to_string(), slot, arity));
        slot
    }

    fn lookup(&self, name: &str) -> Option<(usize, usize)> {
        self.scope.iter().rev().find(|(n, _, _)| n == name).map(|(_, s, k)| (*s, *k))
    }

    fn term(&self, t: &Term) -> Result<CTerm, EvalError> {
        match t {
            Term::Omega => Ok(CTerm::Omega),
            Term::App(name, args) => {
                let (slot, k) = self.lookup(name).ok_or_else(|| EvalError::UnboundVariable(name.clone()))?;
                if k != args.len() {
                    return Err(EvalError::ArityMismatch { name: name.clone(), expected: k, found: args.len() });
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                Ok(CTerm::App(slot, args))
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<Node, EvalError> {
        Ok(match f {
            Formula::Eq(t, q) => Node::Eq(self.term(t)?, self.term(q)?),
            Formula::Not(a) => Node::Not(Box::new(self.formula(a)?)),
            Formula::And(a, b) => Node::And(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Or(a, b) => Node::Or(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Implies(a, b) => Node::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Quant(q, _, _) => self.quantifier_block(*q, f)?,
        })
    }

    fn quantifier_block(&mut self, q: Quantifier, f: &Formula) -> Result<Node, EvalError> {
        let mut vars: Vec<&Var> = Vec::new();
        let mut matrix = f;
        while let Formula::Quant(q2, v, b) = matrix {
            if *q2 != q {
                break;
            }
            vars.push(v);
            matrix = b;
        }
        let (aliases, rest_vars, body) = eliminate_definitions(q, &vars, matrix);

        let mark = self.scope.len();
        let mut lets = Vec::new();
        for (v, params, t) in &aliases {
            // `t` refers to outer variables and the parameters only.
            let pmark = self.scope.len();
            let pslots: Vec<usize> = params.iter().map(|p| self.bind(p, 0)).collect();
            let term = self.term(t)?;
            self.scope.truncate(pmark);
            let def = Rc::new(AliasDef { params: pslots, term });
            let slot = self.bind(&v.name, v.arity);
            lets.push((slot, def));
        }
        let mut groups: Vec<Vec<QVar>> = Vec::new();
        for v in &rest_vars {
            if v.arity > 0 && self.mode == SoMode::FoOnly {
                return Err(EvalError::FunctionalQuantifier(v.name.clone()));
            }
            let slot = self.bind(&v.name, v.arity);
            let qv = QVar { slot, name: v.name.clone(), arity: v.arity };
            match groups.last_mut() {
                Some(g) if v.arity > 0 && g[0].arity > 0 => g.push(qv),
                _ => groups.push(vec![qv]),
            }
        }
        let mut node = self.formula(&body)?;
        self.scope.truncate(mark);
        for g in groups.into_iter().rev() {
            node = if g[0].arity == 0 {
                let v = g.into_iter().next().expect("one");
                Node::Atomic(q, v, Box::new(node))
            } else {
                Node::Functional(q, g, Box::new(node))
            };
        }
        for (slot, def) in lets.into_iter().rev() {
            node = Node::Let(slot, def, Box::new(node));
        }
        Ok(node)
    }
}

type Alias<'a> = (&'a Var, Vec<String>, Term);

/// Split a quantifier block into variables fixed by definitional conjuncts
/// and the rest, returning the matrix without those conjuncts.
fn eliminate_definitions<'a>(q: Quantifier, vars: &[&'a Var], matrix: &Formula) -> (Vec<Alias<'a>>, Vec<&'a Var>, Formula) {
    let (hyp, concl) = match (q, matrix) {
        (Quantifier::Forall, Formula::Implies(a, c)) => (a.as_ref(), Some(c.as_ref())),
        (Quantifier::Forall, _) => return (Vec::new(), vars.to_vec(), matrix.clone()),
        (Quantifier::Exists, m) => (m, None),
    };
    let names: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
    let mut conjuncts: Vec<Option<&Formula>> = hyp.conjuncts().into_iter().map(Some).collect();
    let mut aliases = Vec::new();
    let mut rest = Vec::new();
    for (i, v) in vars.iter().enumerate() {
        // a later variable with the same name shadows this one
        let shadowed = names[i + 1..].contains(&v.name.as_str());
        let found = (!shadowed)
            .then(|| {
                conjuncts.iter().enumerate().find_map(|(j, c)| {
                    c.and_then(|c| definition_of(c, v, &names)).map(|(ps, t)| (j, ps, t))
                })
            })
            .flatten();
        match found {
            Some((j, params, t)) => {
                conjuncts[j] = None;
                aliases.push((*v, params, t));
            }
            None => rest.push(*v),
        }
    }
    if aliases.is_empty() {
        return (aliases, rest, matrix.clone());
    }
    let remaining: Vec<Formula> = conjuncts.into_iter().flatten().cloned().collect();
    let body = match concl {
        Some(c) if remaining.is_empty() => c.clone(),
        Some(c) => Formula::conj(remaining).implies(c.clone()),
        None => Formula::conj(remaining),
    };
    (aliases, rest, body)
}

/// `v ≐ T` / `T ≐ v` (atomic) or `∀u₁…uₖ v u₁…uₖ ≐ T` (functional, finite
/// support) where `T` avoids the block's variables.
fn definition_of(c: &Formula, v: &Var, block: &[&str]) -> Option<(Vec<String>, Term)> {
    let mut params = Vec::new();
    let mut cur = c;
    while let Formula::Quant(Quantifier::Forall, u, b) = cur {
        if u.arity != 0 || params.contains(&u.name) || block.contains(&u.name.as_str()) {
            return None;
        }
        params.push(u.name.clone());
        cur = b;
    }
    if params.len() != v.arity {
        return None;
    }
    let Formula::Eq(l, r) = cur else { return None };
    let is_head = |t: &Term| match t {
        Term::App(n, args) => {
            n == &v.name
                && args.len() == params.len()
                && args.iter().zip(&params).all(|(a, p)| matches!(a, Term::App(m, xs) if m == p && xs.is_empty()))
        }
        Term::Omega => false,
    };
    let t = if is_head(l) {
        r
    } else if is_head(r) {
        l
    } else {
        return None;
    };
    if block.iter().any(|n| t.mentions(n)) {
        return None;
    }
    if *t != Term::Omega && !params.iter().all(|p| guarded(t, p)) {
        return None;
    }
    Some((params, t.clone()))
}

/// `p` occurs as an argument somewhere in `t`, so `λp.t` is ⊥ for all `p`
/// outside a finite set.
fn guarded(t: &Term, p: &str) -> bool {
    match t {
        Term::Omega => false,
        Term::App(_, args) => args.iter().any(|a| a.mentions(p) || guarded(a, p)),
    }
}

// ---------------------------------------------------------------------------
// Evaluation.
//
// Every result carries the decision levels (positions on the search trail)
// it depends on. A search node whose decision is not among the dependencies
// of a failed branch knows every alternative fails the same way, and returns
// at once (conflict-directed backjumping).

#[derive(Clone, Debug)]
enum Binding {
    Unbound,
    Val(AtomOrBottom),
    Fixed(Rc<AFunction>),
    Search(Searched),
    Alias(Rc<AliasDef>),
}

#[derive(Clone, Debug, Default)]
struct Searched {
    decided: HashMap<Vec<Atom>, (AtomOrBottom, u32)>,
    /// Levels of the defined entries.
    defined: Vec<u32>,
}

/// A lookup of a searched function at a point it has not decided.
#[derive(Debug)]
struct Need {
    slot: usize,
    point: Vec<Atom>,
    suggestion: Option<AtomOrBottom>,
}

/// Sorted decision levels.
type Deps = Vec<u32>;

fn join(a: &mut Deps, b: Deps) {
    if b.is_empty() {
        return;
    }
    if a.is_empty() {
        *a = b;
        return;
    }
    a.extend(b);
    a.sort_unstable();
    a.dedup();
}

struct Machine<'a> {
    env: Vec<Binding>,
    mode: SoMode,
    bound: usize,
    symmetry: bool,
    witnesses: &'a Witnesses,
    statics: HashSet<Atom>,
    static_atoms: Vec<Atom>,
    used: HashMap<Atom, u32>,
    pool: Vec<Atom>,
    level: u32,
}

use ThreeValued::{False, True, Unknown};

fn identity(q: Quantifier) -> ThreeValued {
    match q {
        Quantifier::Forall => True,
        Quantifier::Exists => False,
    }
}

/// Accumulates the instances of a quantifier (or the branches of a search).
struct Fold {
    q: Quantifier,
    acc: ThreeValued,
    deps: Deps,
}

impl Fold {
    fn new(q: Quantifier) -> Fold {
        Fold { q, acc: identity(q), deps: Deps::new() }
    }

    /// `Some` when the instance decides the quantifier.
    fn absorb(&mut self, v: ThreeValued, deps: Deps) -> Option<(ThreeValued, Deps)> {
        match (self.q, v) {
            (Quantifier::Forall, False) | (Quantifier::Exists, True) => Some((v, deps)),
            (_, Unknown) => {
                self.acc = Unknown;
                join(&mut self.deps, deps);
                None
            }
            _ => {
                join(&mut self.deps, deps);
                None
            }
        }
    }

    fn finish(self, complete: bool) -> (ThreeValued, Deps) {
        if !complete && self.acc == identity(self.q) {
            (Unknown, self.deps)
        } else {
            (self.acc, self.deps)
        }
    }
}

type Eval = Result<(ThreeValued, Deps), Need>;

impl Machine<'_> {
    fn term(&mut self, t: &CTerm, deps: &mut Deps) -> Result<AtomOrBottom, Need> {
        match t {
            CTerm::Omega => Ok(None),
            CTerm::App(slot, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match self.term(a, deps)? {
                        Some(x) => vals.push(x),
                        None => return Ok(None),
                    }
                }
                self.lookup(*slot, vals, deps)
            }
        }
    }

    fn lookup(&mut self, slot: usize, vals: Vec<Atom>, deps: &mut Deps) -> Result<AtomOrBottom, Need> {
        match &self.env[slot] {
            Binding::Val(v) => Ok(*v),
            Binding::Fixed(f) => Ok(f.get(&vals)),
            Binding::Search(s) => match s.decided.get(&vals) {
                Some(&(v, level)) => {
                    join(deps, vec![level]);
                    Ok(v)
                }
                None => Err(Need { slot, point: vals, suggestion: None }),
            },
            Binding::Alias(def) => {
                let def = def.clone();
                let saved = self.bind_params(&def, &vals);
                let r = self.term(&def.term, deps);
                self.restore_params(&def, saved);
                r
            }
            Binding::Unbound => unreachable!("slot {slot} unbound"),
        }
    }

    fn bind_params(&mut self, def: &AliasDef, vals: &[Atom]) -> Vec<Binding> {
        def.params
            .iter()
            .zip(vals)
            .map(|(&p, &x)| std::mem::replace(&mut self.env[p], Binding::Val(Some(x))))
            .collect()
    }

    fn restore_params(&mut self, def: &AliasDef, saved: Vec<Binding>) {
        for (&p, b) in def.params.iter().zip(saved) {
            self.env[p] = b;
        }
    }

    /// The searched point whose value is the value of `t`, if any.
    fn head_point(&mut self, t: &CTerm) -> Option<(usize, Vec<Atom>)> {
        let CTerm::App(slot, args) = t else { return None };
        let mut vals = Vec::with_capacity(args.len());
        let mut scratch = Deps::new();
        for a in args {
            vals.push(self.term(a, &mut scratch).ok()??);
        }
        match &self.env[*slot] {
            Binding::Search(_) => Some((*slot, vals)),
            Binding::Alias(def) => {
                let def = def.clone();
                let saved = self.bind_params(&def, &vals);
                let r = self.head_point(&def.term);
                self.restore_params(&def, saved);
                r
            }
            _ => None,
        }
    }

    fn suggest(&mut self, mut need: Need, side: &CTerm, other: AtomOrBottom) -> Need {
        if need.suggestion.is_none() && self.head_point(side).is_some_and(|(s, p)| s == need.slot && p == need.point) {
            need.suggestion = Some(other);
        }
        need
    }

    fn eval(&mut self, n: &Node) -> Eval {
        match n {
            Node::Eq(a, b) => {
                let mut deps = Deps::new();
                let l = self.term(a, &mut deps);
                let r = self.term(b, &mut deps);
                match (l, r) {
                    (Ok(x), Ok(y)) => Ok((ThreeValued::from_bool(x == y), deps)),
                    (Err(need), Ok(y)) => Err(self.suggest(need, a, y)),
                    (Ok(x), Err(need)) => Err(self.suggest(need, b, x)),
                    (Err(need), Err(_)) => Err(need),
                }
            }
            Node::Not(a) => {
                let (v, d) = self.eval(a)?;
                Ok((v.negate(), d))
            }
            Node::And(a, b) => {
                let (va, da) = self.eval(a)?;
                if va == False {
                    return Ok((False, da));
                }
                let (vb, mut db) = self.eval(b)?;
                Ok(match (va, vb) {
                    (_, False) => (False, db),
                    (True, True) => {
                        join(&mut db, da);
                        (True, db)
                    }
                    _ => {
                        join(&mut db, da);
                        (Unknown, db)
                    }
                })
            }
            Node::Or(a, b) => {
                let (va, da) = self.eval(a)?;
                self.disjunction(va, da, b)
            }
            Node::Implies(a, b) => {
                let (va, da) = self.eval(a)?;
                self.disjunction(va.negate(), da, b)
            }
            Node::Let(slot, def, body) => {
                let old = std::mem::replace(&mut self.env[*slot], Binding::Alias(def.clone()));
                let r = self.eval(body);
                self.env[*slot] = old;
                r
            }
            Node::Atomic(q, v, body) => self.atomic(*q, v, body),
            Node::Functional(q, vars, body) => self.functional(*q, vars, body),
        }
    }

    fn disjunction(&mut self, va: ThreeValued, da: Deps, b: &Node) -> Eval {
        if va == True {
            return Ok((True, da));
        }
        let (vb, mut db) = self.eval(b)?;
        Ok(match (va, vb) {
            (_, True) => (True, db),
            (False, False) => {
                join(&mut db, da);
                (False, db)
            }
            _ => {
                join(&mut db, da);
                (Unknown, db)
            }
        })
    }

    fn mark(&mut self, a: Atom, up: bool) {
        let c = self.used.entry(a).or_insert(0);
        if up {
            *c += 1;
        } else {
            *c -= 1;
        }
    }

    fn generic(&self) -> Option<Atom> {
        self.pool.iter().copied().find(|a| self.used.get(a).is_none_or(|&c| c == 0))
    }

    /// Candidate atoms: scope, atoms in use, and either one generic atom or
    /// (without symmetry reduction) the whole pool. `false` when the pool
    /// has run dry.
    fn candidates(&self) -> (Vec<Atom>, bool) {
        let mut out = self.static_atoms.clone();
        let mut dynamic: Vec<Atom> =
            self.used.iter().filter(|(a, &c)| c > 0 && !self.statics.contains(a)).map(|(a, _)| *a).collect();
        dynamic.sort();
        if self.symmetry {
            out.extend(dynamic);
            match self.generic() {
                Some(g) => out.push(g),
                None => return (out, false),
            }
        } else {
            out.extend(dynamic.iter().copied().filter(|a| !self.pool.contains(a)));
            out.extend(self.pool.iter().copied());
        }
        (out, true)
    }

    fn atomic(&mut self, q: Quantifier, v: &QVar, body: &Node) -> Eval {
        if q == Quantifier::Exists && self.mode == SoMode::Witnessed {
            if let Some(w) = self.witnesses.get(&v.name) {
                let old = std::mem::replace(&mut self.env[v.slot], Binding::Val(w.as_token()));
                let r = self.eval(body);
                self.env[v.slot] = old;
                return r;
            }
        }
        let (atoms, complete) = self.candidates();
        let mut fold = Fold::new(q);
        let old = std::mem::replace(&mut self.env[v.slot], Binding::Val(None));
        let mut result = None;
        for x in std::iter::once(None).chain(atoms.into_iter().map(Some)) {
            self.env[v.slot] = Binding::Val(x);
            if let Some(a) = x {
                self.mark(a, true);
            }
            let r = self.eval(body);
            if let Some(a) = x {
                self.mark(a, false);
            }
            match r {
                Err(need) => {
                    result = Some(Err(need));
                    break;
                }
                Ok((val, deps)) => {
                    if let Some(done) = fold.absorb(val, deps) {
                        result = Some(Ok(done));
                        break;
                    }
                }
            }
        }
        self.env[v.slot] = old;
        match result {
            Some(r) => r,
            None => Ok(fold.finish(complete)),
        }
    }

    fn functional(&mut self, q: Quantifier, vars: &[QVar], body: &Node) -> Eval {
        let mut searched = Vec::new();
        let mut saved = Vec::new();
        for v in vars {
            let witness = match (q, self.mode) {
                (Quantifier::Exists, SoMode::Witnessed) => self.witnesses.get(&v.name),
                _ => None,
            };
            let b = match witness {
                Some(w) => Binding::Fixed(Rc::new(w.clone())),
                None => {
                    searched.push(v.slot);
                    Binding::Search(Searched::default())
                }
            };
            saved.push(std::mem::replace(&mut self.env[v.slot], b));
        }
        let base = self.level;
        let r = if searched.is_empty() { self.eval(body) } else { self.search(q, &searched, body) };
        for (v, b) in vars.iter().zip(saved) {
            self.env[v.slot] = b;
        }
        // decisions of this search are gone; only outer ones remain relevant
        r.map(|(v, mut d)| {
            d.retain(|&l| l < base);
            (v, d)
        })
    }

    fn search(&mut self, q: Quantifier, slots: &[usize], body: &Node) -> Eval {
        let need = match self.eval(body) {
            Ok(r) => return Ok(r),
            Err(need) if slots.contains(&need.slot) => need,
            Err(need) => return Err(need),
        };
        let Binding::Search(s) = &self.env[need.slot] else { unreachable!("searched slot") };
        let room = s.defined.len() < self.bound;
        let defined_levels = s.defined.clone();
        let (atoms, mut complete) = self.candidates();
        let mut values: Vec<AtomOrBottom> = Vec::with_capacity(atoms.len() + 2);
        if let Some(sv) = need.suggestion {
            if sv.is_none() || room {
                values.push(sv);
            }
        }
        if !values.contains(&None) {
            values.push(None);
        }
        let mut extra = Deps::new();
        if room {
            values.extend(atoms.into_iter().map(Some).filter(|x| Some(*x) != need.suggestion));
        } else {
            complete = self.mode == SoMode::BoundedUniverse;
            // the bound, and so this branch's outcome, depends on the entries so far
            extra = defined_levels;
        }

        let level = self.level;
        let mut fold = Fold::new(q);
        for value in values {
            self.decide(need.slot, &need.point, value, level);
            let r = self.search(q, slots, body);
            self.undecide(need.slot, &need.point, value);
            let (v, mut deps) = r?;
            let independent = deps.binary_search(&level).is_err();
            deps.retain(|&l| l != level);
            if let Some(mut done) = fold.absorb(v, deps.clone()) {
                join(&mut done.1, extra);
                return Ok(done);
            }
            if independent && v != Unknown {
                // every other value fails the same way
                join(&mut deps, extra);
                return Ok((v, deps));
            }
        }
        let (v, mut deps) = fold.finish(complete);
        join(&mut deps, extra);
        Ok((v, deps))
    }

    fn decide(&mut self, slot: usize, point: &[Atom], value: AtomOrBottom, level: u32) {
        self.level = level + 1;
        let Binding::Search(s) = &mut self.env[slot] else { unreachable!("searched slot") };
        s.decided.insert(point.to_vec(), (value, level));
        if let Some(v) = value {
            s.defined.push(level);
            for &a in point {
                self.mark(a, true);
            }
            self.mark(v, true);
        }
    }

    fn undecide(&mut self, slot: usize, point: &[Atom], value: AtomOrBottom) {
        let Binding::Search(s) = &mut self.env[slot] else { unreachable!("searched slot") };
        let (_, level) = s.decided.remove(point).expect("decided");
        self.level = level;
        if let Some(v) = value {
            s.defined.pop();
            for &a in point {
                self.mark(a, false);
            }
            self.mark(v, false);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::structures::string_structure;

    fn two_atoms() -> Structure {
        let mut s = Structure::default();
        s.set_token("a0", Some(Atom(0))).unwrap();
        s.set_token("a1", Some(Atom(1))).unwrap();
        s
    }

    fn fo(s: &Structure, f: &str) -> bool {
        eval_fo(s, &parse_formula(f).unwrap(), &EvalConfig::fo()).unwrap()
    }

    fn bounded(s: &Structure, f: &str, b: usize) -> ThreeValued {
        eval_bounded(s, &parse_formula(f).unwrap(), &EvalConfig::bounded(b)).unwrap()
    }

    #[test]
    fn first_order_basics() {
        let s = string_structure("011").unwrap();
        assert!(fo(&s, "A x. x = x"));
        assert!(!fo(&s, "A x. x != omega"));
        assert!(fo(&s, "E x. x != omega & 0(x) = omega & 1(x) = omega"));
        // some atom outside the scope exists
        assert!(fo(&s, "E x. x != omega & x != e & x != 0(e) & x != 1(0(e)) & x != 1(1(0(e)))"));
        assert!(fo(&s, "E x, y. x != y & x != omega & y != omega & 0(x) = omega & 0(y) = omega & 1(x) = omega & 1(y) = omega & x != 1(1(0(e))) & y != 1(1(0(e)))"));
        assert!(!fo(&s, "E x. 0(x) != omega & x != e"));
    }

    #[test]
    fn errors() {
        let s = string_structure("0").unwrap();
        let f = parse_formula("q = omega").unwrap();
        assert_eq!(eval_fo(&s, &f, &EvalConfig::fo()), Err(EvalError::UnboundVariable("q".into())));
        let f = parse_formula("0(e, e) = omega").unwrap();
        assert!(matches!(eval_fo(&s, &f, &EvalConfig::fo()), Err(EvalError::ArityMismatch { .. })));
        let f = parse_formula("E g^1. g(e) = e").unwrap();
        assert!(matches!(eval_fo(&s, &f, &EvalConfig::fo()), Err(EvalError::FunctionalQuantifier(_))));
    }

    #[test]
    fn bounded_examples() {
        let s = two_atoms();
        assert_eq!(bounded(&s, "E g^1. A u. g(u) = omega", 0), True);
        assert_eq!(bounded(&s, "E g^1. g(a0) = a1", 1), True);
        assert_eq!(bounded(&s, "E g^1. g(a0) = a1", 0), Unknown);
        assert_eq!(bounded(&s, "A f^1. f(a0) = omega", 1), False);
        // exhaustive up to symmetry when the bound never cuts the search
        assert_eq!(bounded(&s, "A f^1. f(a0) = f(a0)", 2), True);
        // the counterexample needs two entries
        assert_eq!(bounded(&s, "A f^1. f(a0) = omega | f(a1) = omega", 1), Unknown);
        assert_eq!(bounded(&s, "A f^1. f(a0) = omega | f(a1) = omega", 2), False);
        // a two-entry function that needs a fresh atom
        assert_eq!(bounded(&s, "E g^1. E x. x != a0 & x != a1 & x != omega & g(a0) = x & g(x) = a1", 2), True);
        assert_eq!(bounded(&s, "E g^1. E x. x != a0 & x != a1 & x != omega & g(a0) = x & g(x) = a1", 1), Unknown);
    }

    #[test]
    fn universe_mode_is_two_valued() {
        let s = two_atoms();
        let f = parse_formula("A f^1. f(a0) = f(a0)").unwrap();
        assert_eq!(eval_bounded(&s, &f, &EvalConfig::universe(2)).unwrap(), True);
        let g = parse_formula("E f^1. f(a0) = a1 & f(a1) = a0 & f(a1) != f(a1)").unwrap();
        assert_eq!(eval_bounded(&s, &g, &EvalConfig::universe(2)).unwrap(), False);
    }

    #[test]
    fn witnesses() {
        let s = two_atoms();
        let f = parse_formula("E x. x = x").unwrap();
        let mut w = Witnesses::new();
        w.insert("x".into(), AFunction::token(Some(Atom(0))));
        assert!(check_with_witness(&s, &f, &w).unwrap());
        let g = parse_formula("E g^1. g(a0) = a1").unwrap();
        let mut w = Witnesses::new();
        w.insert("g".into(), AFunction::from_entries(1, [(vec![Atom(0)], Atom(1))]));
        assert!(check_with_witness(&s, &g, &w).unwrap());
        w.insert("g".into(), AFunction::empty(1));
        assert!(!check_with_witness(&s, &g, &w).unwrap());
        w.insert("g".into(), AFunction::empty(2));
        assert!(matches!(check_with_witness(&s, &g, &w), Err(EvalError::WitnessArity { .. })));
    }

    #[test]
    fn definitional_elimination() {
        let s = string_structure("01").unwrap();
        // g is forced to be 0 shifted by one step; no search needed
        let f = parse_formula("E g^1. (A u. g(u) = 1(0(u))) & g(e) != omega").unwrap();
        assert_eq!(eval_bounded(&s, &f, &EvalConfig::bounded(0)).unwrap(), True);
        let f = parse_formula("A g^1. (A u. g(u) = 0(u)) -> g(e) = 0(e)").unwrap();
        assert_eq!(eval_bounded(&s, &f, &EvalConfig::bounded(0)).unwrap(), True);
        // `λu.u` has infinite support, so it is not a definition
        let f = parse_formula("E g^1. A u. g(u) = u").unwrap();
        assert_eq!(eval_bounded(&s, &f, &EvalConfig::bounded(3)).unwrap(), Unknown);
    }

    #[test]
    fn symmetry_reduction_agrees() {
        let s = string_structure("01").unwrap();
        for f in [
            "E x, y. x != y & x != omega & y != omega & 0(x) = omega & 0(y) = omega & 1(x) = omega & 1(y) = omega",
            "A x. E y. y != x & y != omega",
            "E g^1. E x. x != omega & 0(x) = omega & 1(x) = omega & x != 1(0(e)) & g(x) = e & g(e) = x",
        ] {
            let f = parse_formula(f).unwrap();
            let on = eval_bounded(&s, &f, &EvalConfig::bounded(2)).unwrap();
            let off = eval_bounded(&s, &f, &EvalConfig { symmetry_reduction: false, ..EvalConfig::bounded(2) }).unwrap();
            assert_eq!(on, off, "{f}");
        }
    }
}
