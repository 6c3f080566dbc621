//! Instances of the axiom schemas for finite functions, and a few derived
//! schemas. Each builder returns the instance for a given function
//! identifier `f` (left free, so it can be read from a structure), closed
//! universally over its atomic variables.

use std::collections::HashMap;

use thiserror::Error;

use super::formula::{Formula, Var};
use super::library::Fresh;
use crate::structures::Term;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxiomError {
    #[error("schema `{0}` needs arity at least 1")]
    ZeroArity(&'static str),
}

#[derive(Clone, Debug)]
pub enum Schema {
    Strictness,
    Infinity,
    Empty,
    Extension,
    /// `λū ∈ f. t`, where `t` may mention the parameters `u1 … uk`.
    ExplicitDefinition(Term),
    /// `φ[f]`, a formula in which `f` occurs free.
    FInduction(Formula),
}

impl Schema {
    fn name(&self) -> &'static str {
        match self {
            Schema::Strictness => "Strictness",
            Schema::Infinity => "Infinity",
            Schema::Empty => "Empty-function",
            Schema::Extension => "Extension",
            Schema::ExplicitDefinition(_) => "Explicit-definition",
            Schema::FInduction(_) => "f-Induction",
        }
    }
}

/// Parameter names used by `ExplicitDefinition` terms.
pub fn parameters(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("u{i}")).collect()
}

pub fn axiom_instance(schema: &Schema, f: &str, k: usize) -> Result<Formula, AxiomError> {
    if k == 0 {
        return Err(AxiomError::ZeroArity(schema.name()));
    }
    let mut fresh = Fresh::avoiding([f]);
    Ok(match schema {
        Schema::Strictness => strictness(f, k, &mut fresh),
        Schema::Infinity => {
            let us = fresh.names("u", k);
            Formula::exists_all(atomic(&us), Formula::undefined(app(f, &us)))
        }
        Schema::Empty => {
            let g = fresh.name("g");
            let us = fresh.names("u", k);
            Formula::exists(Var::new(&g, k), Formula::forall_all(atomic(&us), Formula::undefined(app(&g, &us))))
        }
        Schema::Extension => {
            let us = fresh.names("u", k);
            let v = fresh.name("v");
            let g = fresh.name("g");
            let body = extended(&g, f, &us, &Term::var(&v), &mut fresh);
            Formula::forall_all(
                atomic(&us).into_iter().chain([Var::atomic(&v)]),
                defined_all(&us).implies(Formula::exists(Var::new(&g, k), body)),
            )
        }
        Schema::ExplicitDefinition(t) => {
            let params = parameters(k);
            fresh.avoid_term(t);
            let g = fresh.name("g");
            let us = fresh.names("u", k);
            let map: HashMap<String, String> = params.iter().cloned().zip(us.iter().cloned()).collect();
            let t = t.rename(&|n| map.get(n).cloned());
            let inf = Formula::defined(app(f, &us));
            let body = inf
                .clone()
                .and(Formula::eq(app(&g, &us), t))
                .or(inf.not().and(Formula::undefined(app(&g, &us))));
            Formula::exists(Var::new(&g, k), Formula::forall_all(atomic(&us), body))
        }
        Schema::FInduction(phi) => f_induction(phi, f, k, &mut fresh),
    })
}

/// `u₁ ≐ ω ∨ … ∨ uₖ ≐ ω → f ū ≐ ω`. The schema as displayed states the
/// converse, which fails at any defined argument outside the domain of `f`.
fn strictness(f: &str, k: usize, fresh: &mut Fresh) -> Formula {
    let us = fresh.names("u", k);
    let some_undefined = Formula::disj(us.iter().map(|u| Formula::undefined(Term::var(u))));
    Formula::forall_all(atomic(&us), some_undefined.implies(Formula::undefined(app(f, &us))))
}

fn atomic(names: &[String]) -> Vec<Var> {
    names.iter().map(Var::atomic).collect()
}

fn app(f: &str, args: &[String]) -> Term {
    Term::app(f, args.iter().map(Term::var).collect())
}

fn defined_all(us: &[String]) -> Formula {
    Formula::conj(us.iter().map(|u| Formula::defined(Term::var(u))))
}

/// `w̄ ≉ ū`, i.e. the tuples differ somewhere.
fn differs(ws: &[String], us: &[String]) -> Formula {
    Formula::conj(ws.iter().zip(us).map(|(w, u)| Formula::eq(Term::var(w), Term::var(u)))).not()
}

/// `g ū ≐ value ∧ ∀w̄ ≉ ū  g w̄ ≐ f w̄`: `g` is `{ū ↦ value} f`.
fn extended(g: &str, f: &str, us: &[String], value: &Term, fresh: &mut Fresh) -> Formula {
    let ws = fresh.names("w", us.len());
    Formula::eq(app(g, us), value.clone()).and(Formula::forall_all(
        atomic(&ws),
        differs(&ws, us).implies(Formula::eq(app(g, &ws), app(f, &ws))),
    ))
}

fn f_induction(phi: &Formula, f: &str, k: usize, fresh: &mut Fresh) -> Formula {
    fresh.avoid_formula(phi);
    let with = |name: &str| phi.rename_free(&HashMap::from([(f.to_string(), name.to_string())]));
    let f2 = fresh.name("f");
    let us = fresh.names("u", k);
    let v = fresh.name("v");
    let g = fresh.name("g");
    // φ[{ū ↦ v} f₂]
    let step_to = Formula::forall(
        Var::new(&g, k),
        extended(&g, &f2, &us, &Term::var(&v), fresh).implies(with(&g)),
    );
    let step = Formula::forall_all(
        [Var::new(&f2, k)].into_iter().chain(atomic(&us)).chain([Var::atomic(&v)]),
        with(&f2).and(Formula::undefined(app(&f2, &us))).implies(step_to),
    );
    // φ[∅]
    let g0 = fresh.name("g");
    let ws = fresh.names("w", k);
    let base = Formula::forall(
        Var::new(&g0, k),
        Formula::forall_all(atomic(&ws), Formula::undefined(app(&g0, &ws))).implies(with(&g0)),
    );
    let f3 = fresh.name("f");
    step.implies(base.implies(Formula::forall(Var::new(&f3, k), with(&f3))))
}

/// Union: `∃g ∀ū (ū ∈ g ↔ ū ∈ f₁ ∨ ū ∈ f₂)`.
pub fn union(f1: &str, f2: &str, k: usize) -> Formula {
    let mut fresh = Fresh::avoiding([f1, f2]);
    let g = fresh.name("g");
    let us = fresh.names("u", k);
    let ing = Formula::defined(app(&g, &us));
    let either = Formula::defined(app(f1, &us)).or(Formula::defined(app(f2, &us)));
    Formula::exists(
        Var::new(&g, k),
        Formula::forall_all(atomic(&us), ing.clone().implies(either.clone()).and(either.implies(ing))),
    )
}

/// Contraction: `∀ū ∃g (g ū ≐ ω ∧ ∀w̄ ≉ ū  g w̄ ≐ f w̄)`.
pub fn contraction(f: &str, k: usize) -> Formula {
    let mut fresh = Fresh::avoiding([f]);
    let us = fresh.names("u", k);
    let g = fresh.name("g");
    let body = extended(&g, f, &us, &Term::Omega, &mut fresh);
    Formula::forall_all(atomic(&us), Formula::exists(Var::new(&g, k), body))
}

/// Atomic choice: `(∀x̄ ∈ f ∃y φ[x̄,y]) → ∃g ∀x̄ ∈ f φ[x̄, g x̄]`, where `φ`
/// mentions the atomic variables `xs` and `y` free.
pub fn atomic_choice(f: &str, phi: &Formula, xs: &[&str], y: &str) -> Formula {
    let mut fresh = Fresh::avoiding([f, y]);
    fresh.avoid_formula(phi);
    for x in xs {
        fresh.avoid_formula(&Formula::eq(Term::var(*x), Term::Omega));
    }
    let g = fresh.name("g");
    let xs: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    let inf = Formula::defined(app(f, &xs));
    let premise = Formula::forall_all(atomic(&xs), inf.clone().implies(Formula::exists(Var::atomic(y), phi.clone())));
    let chosen = phi.substitute(y, &app(&g, &xs));
    let conclusion = Formula::exists(Var::new(&g, xs.len()), Formula::forall_all(atomic(&xs), inf.implies(chosen)));
    premise.implies(conclusion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{eval_bounded, eval_fo, parse_formula, EvalConfig, ThreeValued};
    use crate::structures::{string_structure, Structure};

    fn holds(s: &Structure, f: &Formula, bound: usize) -> ThreeValued {
        eval_bounded(s, f, &EvalConfig::universe(bound)).unwrap()
    }

    #[test]
    fn zero_arity_rejected() {
        assert_eq!(axiom_instance(&Schema::Empty, "f", 0), Err(AxiomError::ZeroArity("Empty-function")));
    }

    #[test]
    fn first_order_schemas() {
        let s = string_structure("0110").unwrap();
        for schema in [Schema::Strictness, Schema::Infinity] {
            let f = axiom_instance(&schema, "1", 1).unwrap();
            assert!(eval_fo(&s, &f, &EvalConfig::fo()).unwrap(), "{schema:?}");
        }
    }

    #[test]
    fn second_order_schemas() {
        let s = string_structure("011").unwrap();
        let t = Term::app1("1", Term::var("u1"));
        for schema in [Schema::Empty, Schema::Extension, Schema::ExplicitDefinition(t)] {
            let f = axiom_instance(&schema, "1", 1).unwrap();
            assert_eq!(holds(&s, &f, 3), ThreeValued::True, "{schema:?}");
        }
    }

    #[test]
    fn induction_over_tautology() {
        let phi = parse_formula("A u. f(u) = omega | f(u) != omega").unwrap();
        let f = axiom_instance(&Schema::FInduction(phi), "f", 1).unwrap();
        assert_eq!(holds(&Structure::default(), &f, 2), ThreeValued::True);
    }

    #[test]
    fn derived_schemas() {
        let s = string_structure("01").unwrap();
        assert_eq!(holds(&s, &union("0", "1", 1), 3), ThreeValued::True);
        assert_eq!(holds(&s, &contraction("1", 1), 2), ThreeValued::True);
        let phi = parse_formula("y != omega & y != x").unwrap();
        assert_eq!(holds(&s, &atomic_choice("0", &phi, &["x"], "y"), 2), ThreeValued::True);
    }
}
