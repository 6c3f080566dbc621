//! PA formulas as FS formulas over numeral chains.
//!
//! A PA variable `x` becomes the pair `z_x⁰, s_x¹`, read as the chain
//! `T(sⁿz)`. Equations are flattened to the five forms and each form is
//! stated about chains; quantifiers are relativized to `ν`. Sums and
//! products go through the IO formulas of the corpus programs `add.st` and
//! `mul.st`.

use std::collections::{BTreeMap, HashMap};

use super::pa::{eval_term, flatten, Env, Form, PaError, PaFormula, PaTerm};
use super::ArithError;
use crate::corpus;
use crate::logic::library::{isom, nu, suc, Fresh};
use crate::logic::{eval_with, EvalConfig, Formula, SoMode, ThreeValued, Var, Witnesses};
use crate::prog2formula::{io_formula, IoFormula};
use crate::st::{run_with, RunConfig};
use crate::structures::{numeral_structure_named, AFunction, Atom, AtomAllocator, Structure, Term};

/// The FS pair `(z_x, s_x)` standing for the PA variable `x`.
pub fn pair_names(x: &str) -> (String, String) {
    (format!("z_{x}"), format!("s_{x}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Add,
    Mul,
}

/// Existentials whose value is fixed by the free variables, recorded so
/// that a checker can name them.
#[derive(Clone, Debug)]
enum Determined {
    /// `∃t Suc[z_y,s_y; t] ∧ …`
    Succ { t: String, y: String },
    /// `∃z,t φ_A[…; z,t] ∧ …`; `names` maps the IO formula's binders to
    /// their names here.
    Arith { op: Op, y: String, w: String, z: String, t: String, names: HashMap<String, String> },
    /// A variable introduced by flattening: `∃ z_v,s_v (ν ∧ …)`, with `lt`
    /// the order inside `ν`.
    Named { var: String, term: PaTerm, lt: String },
}

#[derive(Clone, Debug)]
pub struct PaTranslation {
    pub formula: Formula,
    determined: Vec<Determined>,
}

/// `φ^△`.
pub fn pa_translate(phi: &PaFormula) -> Formula {
    translate(phi).formula
}

fn translate(phi: &PaFormula) -> PaTranslation {
    let flat = flatten(&desugar_bounds(phi));
    let mut avoid: Vec<String> = Vec::new();
    for x in flat.all_vars() {
        let (z, s) = pair_names(&x);
        avoid.extend([z, s]);
    }
    let mut t = Translator {
        fresh: Fresh::avoiding(avoid.iter().map(String::as_str)),
        determined: Vec::new(),
        add: None,
        mul: None,
    };
    let formula = t.formula(&flat);
    PaTranslation { formula, determined: t.determined }
}

/// Replace `Q x ≤ b. ψ` by `Q x. (∃d. b = x + d) → ψ` (for `∀`) or `∧ ψ`
/// (for `∃`), so that only flattening introduces bounded quantifiers.
fn desugar_bounds(phi: &PaFormula) -> PaFormula {
    let mut used = phi.all_vars();
    fn go(phi: &PaFormula, used: &mut std::collections::BTreeSet<String>) -> PaFormula {
        match phi {
            PaFormula::Eq(..) => phi.clone(),
            PaFormula::Not(a) => go(a, used).not(),
            PaFormula::And(a, b) => go(a, used).and(go(b, used)),
            PaFormula::Or(a, b) => go(a, used).or(go(b, used)),
            PaFormula::Implies(a, b) => go(a, used).implies(go(b, used)),
            PaFormula::Forall(x, b, body) | PaFormula::Exists(x, b, body) => {
                let universal = matches!(phi, PaFormula::Forall(..));
                let body = go(body, used);
                let body = match b {
                    None => body,
                    Some(b) => {
                        let d = (1..).map(|i| format!("d{i}")).find(|n| !used.contains(n)).expect("unbounded");
                        used.insert(d.clone());
                        let le = PaFormula::exists(&d, PaFormula::eq(b.clone(), PaTerm::var(x).add(PaTerm::var(&d))));
                        if universal {
                            le.implies(body)
                        } else {
                            le.and(body)
                        }
                    }
                };
                if universal {
                    PaFormula::forall(x, body)
                } else {
                    PaFormula::exists(x, body)
                }
            }
        }
    }
    go(phi, &mut used)
}

struct Translator {
    fresh: Fresh,
    determined: Vec<Determined>,
    add: Option<IoFormula>,
    mul: Option<IoFormula>,
}

fn stem(name: &str) -> &str {
    name.split('~').next().unwrap_or(name)
}

impl Translator {
    /// `f` with every binder renamed apart; the map sends old to new names.
    fn apart(&mut self, f: &Formula) -> (Formula, HashMap<String, String>) {
        let mut map = HashMap::new();
        let fresh = &mut self.fresh;
        let g = f.rename_bound(&mut |v: &Var| {
            let n = fresh.name(stem(&v.name));
            map.insert(v.name.clone(), n.clone());
            n
        });
        (g, map)
    }

    fn iso(&mut self, z: &str, s: &str, z2: &str, s2: &str) -> Formula {
        let f = self.fresh.name("f");
        Formula::exists(Var::new(&f, 1), self.apart(&isom(&f, z, s, z2, s2)).0)
    }

    fn io(&mut self, op: Op) -> IoFormula {
        let slot = match op {
            Op::Add => &mut self.add,
            Op::Mul => &mut self.mul,
        };
        slot.get_or_insert_with(|| {
            let p = match op {
                Op::Add => corpus::add(),
                Op::Mul => corpus::mul(),
            };
            io_formula(&p, &["z1", "s1", "z2", "s2"], &["z", "s"]).expect("corpus programs name their I/O")
        })
        .clone()
    }

    fn form(&mut self, form: &Form) -> Formula {
        let v = |x: &str| Term::var(x);
        match form {
            Form::Zero(x) => {
                let (z, s) = pair_names(x);
                let u = self.fresh.name("u");
                Formula::defined(v(&z))
                    .and(Formula::forall(Var::atomic(&u), Formula::undefined(Term::app1(&s, v(&u)))))
            }
            Form::Same(x, y) => {
                let (zx, sx) = pair_names(x);
                let (zy, sy) = pair_names(y);
                self.iso(&zx, &sx, &zy, &sy)
            }
            Form::Succ(x, y) => {
                let (zx, sx) = pair_names(x);
                let (zy, sy) = pair_names(y);
                let t = self.fresh.name("t");
                let step = self.apart(&suc(&zy, &sy, &t)).0;
                let same = self.iso(&zy, &t, &zx, &sx);
                self.determined.push(Determined::Succ { t: t.clone(), y: y.clone() });
                Formula::exists(Var::new(&t, 1), step.and(same))
            }
            Form::Add(x, y, w) | Form::Mul(x, y, w) => {
                let op = if matches!(form, Form::Add(..)) { Op::Add } else { Op::Mul };
                let io = self.io(op);
                let (body, names) = self.apart(&io.formula);
                let (z, t) = (self.fresh.name("z"), self.fresh.name("t"));
                let (zx, sx) = pair_names(x);
                let (zy, sy) = pair_names(y);
                let (zw, sw) = pair_names(w);
                let map: HashMap<String, String> = io
                    .inputs
                    .iter()
                    .cloned()
                    .zip([zy, sy, zw, sw])
                    .chain(io.output_names.iter().cloned().zip([z.clone(), t.clone()]))
                    .collect();
                let body = body.rename_free(&map);
                let same = self.iso(&z, &t, &zx, &sx);
                self.determined.push(Determined::Arith {
                    op,
                    y: y.clone(),
                    w: w.clone(),
                    z: z.clone(),
                    t: t.clone(),
                    names,
                });
                Formula::exists_all([Var::atomic(&z), Var::new(&t, 1)], body.and(same))
            }
        }
    }

    fn formula(&mut self, phi: &PaFormula) -> Formula {
        match phi {
            PaFormula::Eq(..) => self.form(&Form::of(phi).expect("flattened")),
            PaFormula::Not(a) => self.formula(a).not(),
            PaFormula::And(a, b) => self.formula(a).and(self.formula(b)),
            PaFormula::Or(a, b) => self.formula(a).or(self.formula(b)),
            PaFormula::Implies(a, b) => self.formula(a).implies(self.formula(b)),
            PaFormula::Forall(x, bound, body) | PaFormula::Exists(x, bound, body) => {
                let (z, s) = pair_names(x);
                let (chain, names) = self.apart(&nu(&z, &s));
                if let Some(term) = bound {
                    let lt = names.iter().find(|(old, _)| stem(old) == "lt").map(|(_, n)| n.clone()).expect("ν orders");
                    self.determined.push(Determined::Named { var: x.clone(), term: term.clone(), lt });
                }
                let body = self.formula(body);
                let vars = [Var::atomic(&z), Var::new(&s, 1)];
                if matches!(phi, PaFormula::Forall(..)) {
                    Formula::forall_all(vars, chain.implies(body))
                } else {
                    Formula::exists_all(vars, chain.and(body))
                }
            }
        }
    }
}

/// The canonical interpretation of an assignment: one numeral chain per
/// variable, on disjoint atoms, in variable order.
pub fn canonical_structure(env: &Env) -> Structure {
    let mut out = Structure::default();
    let mut next = 0;
    for (x, &n) in env {
        let (z, s) = pair_names(x);
        let chain = numeral_structure_named(n as usize, &z, &s).shifted(next);
        next += n as u32 + 1;
        out = out.union(&chain).expect("distinct variables");
    }
    out
}

/// The FS truth of `φ^△` in the canonical interpretation of `env`.
pub fn canonical_check(phi: &PaFormula, env: &Env) -> Result<ThreeValued, ArithError> {
    canonical_check_on(phi, env, &canonical_structure(env))
}

/// As [`canonical_check`], on any structure interpreting each variable's
/// pair by a chain of the right length.
///
/// Existentials whose value the free chains fix (up to isomorphism) get
/// witnesses: the successor chain of `x = s y`, the run of `add.st` /
/// `mul.st` and its result chain, and the chains of flattening variables.
/// The isomorphisms of `x = y` are searched.
pub fn canonical_check_on(phi: &PaFormula, env: &Env, s: &Structure) -> Result<ThreeValued, ArithError> {
    if !phi.is_quantifier_free() {
        return Err(ArithError::NotQuantifierFree);
    }
    for x in phi.free_vars() {
        if !env.contains_key(&x) {
            return Err(PaError::Unbound(x).into());
        }
    }
    let tr = translate(phi);
    let mut alloc = AtomAllocator::new();
    alloc.observe(s);
    let mut values = env.clone();
    let mut chains: BTreeMap<String, (Atom, AFunction)> = BTreeMap::new();
    for x in env.keys() {
        let (z, sn) = pair_names(x);
        let zt = s.token(&z).ok_or_else(|| ArithError::NotAChain(x.clone()))?;
        let sf = s.function(&sn).cloned().unwrap_or_else(|| AFunction::empty(1));
        chains.insert(x.clone(), (zt, sf));
    }
    let mut w = Witnesses::new();
    // flattening variables are defined in order, each from earlier ones
    for d in &tr.determined {
        if let Determined::Named { var, term, lt } = d {
            let n = eval_term(term, &values)?;
            values.insert(var.clone(), n);
            let atoms: Vec<Atom> = (0..=n).map(|_| alloc.fresh()).collect();
            let (z, sn) = pair_names(var);
            let succ = AFunction::from_entries(1, atoms.windows(2).map(|p| (vec![p[0]], p[1])));
            let order = AFunction::from_entries(
                2,
                atoms.iter().enumerate().flat_map(|(i, &a)| atoms[i + 1..].iter().map(move |&b| (vec![a, b], a))),
            );
            w.insert(z, AFunction::token(Some(atoms[0])));
            w.insert(sn, succ.clone());
            w.insert(lt.clone(), order);
            chains.insert(var.clone(), (atoms[0], succ));
        }
    }
    for d in &tr.determined {
        match d {
            Determined::Named { .. } => {}
            Determined::Succ { t, y } => {
                let (z, succ) = &chains[y];
                let last = chain_end(*z, succ);
                let tf = succ.extend(&[Some(last)], Some(alloc.fresh()))?;
                w.insert(t.clone(), tf);
            }
            Determined::Arith { op, y, w: x2, z, t, names } => {
                let input = pair_structure(&chains[y], &chains[x2]);
                let p = match op {
                    Op::Add => corpus::add(),
                    Op::Mul => corpus::mul(),
                };
                let floor = alloc.fresh().0;
                let cfg = RunConfig { atom_offset: floor, ..RunConfig::new(1_000_000) };
                let (out, trace) = run_with(&input, &p, &cfg).map_err(crate::prog2formula::TranslateError::from)?;
                alloc.observe(&out);
                for st in &trace.steps {
                    alloc.observe(&st.state);
                }
                let io = io_formula(&p, &["z1", "s1", "z2", "s2"], &["z", "s"])?;
                let inner = io.witness_from(&trace, &out, alloc.fresh().0 + 1)?;
                for (name, f) in inner {
                    for a in f.scope() {
                        alloc.observe_atom(a);
                    }
                    if let Some(n) = names.get(&name) {
                        w.insert(n.clone(), f);
                    }
                }
                w.insert(z.clone(), out.function("z").cloned().unwrap_or_else(|| AFunction::token(None)));
                w.insert(t.clone(), out.function("s").cloned().unwrap_or_else(|| AFunction::empty(1)));
            }
        }
    }
    let longest = values.values().copied().max().unwrap_or(0) as usize;
    let cfg = EvalConfig { so_entry_bound: longest + 2, ..EvalConfig::default() }.with_mode(SoMode::Witnessed);
    Ok(eval_with(s, &tr.formula, &cfg, &w)?)
}

fn chain_end(z: Atom, s: &AFunction) -> Atom {
    let mut a = z;
    for _ in 0..=s.len() {
        match s.get(&[a]) {
            Some(b) => a = b,
            None => break,
        }
    }
    a
}

fn pair_structure(a: &(Atom, AFunction), b: &(Atom, AFunction)) -> Structure {
    let mut s = Structure::default();
    s.set_token("z1", Some(a.0)).expect("fresh");
    s.set_function("s1", a.1.clone()).expect("fresh");
    s.set_token("z2", Some(b.0)).expect("fresh");
    s.set_function("s2", b.1.clone()).expect("fresh");
    s
}
