//! Named formulas: scope membership, the numeral characterization, chain
//! isomorphism and successor, and the `∈` abbreviations.
//!
//! Builders take identifier names (and terms) and invent bound variables of
//! the form `base~i` that avoid every name they were given.

use std::collections::BTreeSet;

use super::formula::{Formula, Var};
use crate::structures::{Term, Vocabulary};

/// Picks bound-variable names that avoid a set of names.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    avoid: BTreeSet<String>,
}

impl Fresh {
    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a str>) -> Fresh {
        Fresh { avoid: names.into_iter().map(String::from).collect() }
    }

    pub fn avoid_term(&mut self, t: &Term) {
        if let Term::App(f, args) = t {
            self.avoid.insert(f.clone());
            for a in args {
                self.avoid_term(a);
            }
        }
    }

    pub fn avoid_formula(&mut self, f: &Formula) {
        fn walk(f: &Formula, out: &mut Fresh) {
            match f {
                Formula::Eq(t, q) => {
                    out.avoid_term(t);
                    out.avoid_term(q);
                }
                Formula::Not(a) => walk(a, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Quant(_, v, b) => {
                    out.avoid.insert(v.name.clone());
                    walk(b, out);
                }
            }
        }
        walk(f, self);
    }

    pub fn name(&mut self, base: &str) -> String {
        let n = (1..).map(|i| format!("{base}~{i}")).find(|n| !self.avoid.contains(n)).expect("unbounded");
        self.avoid.insert(n.clone());
        n
    }

    pub fn names(&mut self, base: &str, k: usize) -> Vec<String> {
        (0..k).map(|_| self.name(base)).collect()
    }
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn vars(names: &[String]) -> Vec<Term> {
    names.iter().map(|n| v(n)).collect()
}

fn atomic_vars(names: &[String]) -> Vec<Var> {
    names.iter().map(Var::atomic).collect()
}

fn app1(f: &str, t: Term) -> Term {
    Term::app1(f, t)
}

/// `f t̄ ≉ ω`
pub fn member(terms: Vec<Term>, f: &str) -> Formula {
    Formula::defined(Term::app(f, terms))
}

/// `t₁,…,tₖ ∈ f¹`, i.e. each `f tᵢ ≉ ω`.
pub fn members(terms: &[Term], f: &str) -> Formula {
    Formula::conj(terms.iter().map(|t| member(vec![t.clone()], f)))
}

/// `t ∈ f^k`: `t` occurs among the inputs of some entry of `f`.
pub fn occurs_in(t: &Term, f: &str, k: usize) -> Formula {
    let mut fresh = Fresh::avoiding([f]);
    fresh.avoid_term(t);
    Formula::disj((0..k).map(|i| {
        let before = fresh.names("v", i);
        let after = fresh.names("w", k - 1 - i);
        let mut args = vars(&before);
        args.push(t.clone());
        args.extend(vars(&after));
        Formula::exists_all(atomic_vars(&before).into_iter().chain(atomic_vars(&after)), member(args, f))
    }))
}

/// `Scope_V[t]`: `t` is an input or the value of some entry.
pub fn scope(vocab: &Vocabulary, t: &Term) -> Formula {
    let mut fresh = Fresh::avoiding(vocab.names());
    fresh.avoid_term(t);
    Formula::disj(vocab.iter().map(|(f, k)| {
        let vs = fresh.names("v", k);
        let value = Formula::exists_all(atomic_vars(&vs), Formula::eq(t.clone(), Term::app(f, vars(&vs))));
        occurs_in(t, f, k).or(value)
    }))
}

/// The numeral characterization over `{z⁰, s¹}` as intended: the models
/// are exactly the chains `T(sⁱz)`. `z` is defined, `s` is injective on its
/// domain and misses `z`, every scope atom other than `z` is a successor,
/// and a strict order `lt` (with `lt(x,y) ∈ {ω, x}`) contains every step,
/// which rules out cycles.
pub fn nu(z: &str, s: &str) -> Formula {
    let mut fresh = Fresh::avoiding([z, s]);
    let (x, y, w) = (fresh.name("x"), fresh.name("y"), fresh.name("w"));
    let lt = fresh.name("lt");
    let sx = || app1(s, v(&x));
    let sy = || app1(s, v(&y));
    let lt2 = |a: &str, b: Term| Term::app(&lt, vec![v(a), b]);
    let injective = Formula::forall_all(
        atomic_vars(&[x.clone(), y.clone()]),
        Formula::eq(sx(), sy()).and(Formula::defined(sx())).implies(Formula::eq(v(&x), v(&y))),
    );
    let z_not_successor = Formula::forall(Var::atomic(&x), Formula::neq(sx(), v(z)));
    let successors = Formula::forall(
        Var::atomic(&x),
        Formula::defined(sx())
            .and(Formula::neq(v(&x), v(z)))
            .implies(Formula::exists(Var::atomic(&y), Formula::eq(sy(), v(&x)))),
    );
    let order = Formula::exists(
        Var::new(&lt, 2),
        Formula::conj([
            Formula::forall_all(
                atomic_vars(&[x.clone(), y.clone()]),
                Formula::undefined(lt2(&x, v(&y))).or(Formula::eq(lt2(&x, v(&y)), v(&x))),
            ),
            Formula::forall(Var::atomic(&x), Formula::undefined(lt2(&x, v(&x)))),
            Formula::forall(Var::atomic(&x), Formula::defined(sx()).implies(Formula::eq(lt2(&x, sx()), v(&x)))),
            Formula::forall_all(
                atomic_vars(&[x.clone(), y.clone(), w.clone()]),
                Formula::eq(lt2(&x, v(&y)), v(&x))
                    .and(Formula::eq(lt2(&y, v(&w)), v(&y)))
                    .implies(Formula::eq(lt2(&x, v(&w)), v(&x))),
            ),
        ]),
    );
    Formula::conj([Formula::defined(v(z)), injective, z_not_successor, successors, order])
}

/// The numeral formula exactly as displayed: injectivity on defined
/// arguments, and every `x` satisfies `s x ≐ z ∨ ∃y x ≐ s y`. No structure
/// satisfies it (`x := ω` fails when `z` is defined, and fresh atoms fail
/// otherwise); kept for comparison.
pub fn nu_literal(z: &str, s: &str) -> Formula {
    let mut fresh = Fresh::avoiding([z, s]);
    let (x, y) = (fresh.name("x"), fresh.name("y"));
    let injective = Formula::forall_all(
        atomic_vars(&[x.clone(), y.clone()]),
        Formula::conj([
            Formula::eq(app1(s, v(&x)), app1(s, v(&y))),
            Formula::defined(v(&x)),
            Formula::defined(v(&y)),
        ])
        .implies(Formula::eq(v(&x), v(&y))),
    );
    let covered = Formula::forall(
        Var::atomic(&x),
        Formula::eq(app1(s, v(&x)), v(z)).or(Formula::exists(Var::atomic(&y), Formula::eq(v(&x), app1(s, v(&y))))),
    );
    injective.and(covered)
}

/// `Isom[f; z,s; z',s']` as displayed: `f z ≐ z'` and `f` commutes with the
/// successors wherever `s` is defined. Only forces the first chain to embed
/// into the second.
pub fn isom_literal(f: &str, z: &str, s: &str, z2: &str, s2: &str) -> Formula {
    let mut fresh = Fresh::avoiding([f, z, s, z2, s2]);
    let a = fresh.name("a");
    let sa = app1(s, v(&a));
    let image = app1(s2, app1(f, v(&a)));
    Formula::eq(app1(f, v(z)), v(z2)).and(Formula::forall(
        Var::atomic(&a),
        Formula::defined(sa.clone())
            .implies(Formula::eq(app1(f, sa), image.clone()).and(Formula::defined(image))),
    ))
}

/// `Isom` strengthened so that chain ends go to chain ends, which makes it
/// symmetric between two chains: the displayed conjuncts plus
/// `∀a (a ≉ ω ∧ s a ≐ ω ∧ f a ≉ ω → s'(f a) ≐ ω)`.
pub fn isom(f: &str, z: &str, s: &str, z2: &str, s2: &str) -> Formula {
    let mut fresh = Fresh::avoiding([f, z, s, z2, s2]);
    let a = fresh.name("a");
    let end = Formula::forall(
        Var::atomic(&a),
        Formula::conj([
            Formula::defined(v(&a)),
            Formula::undefined(app1(s, v(&a))),
            Formula::defined(app1(f, v(&a))),
        ])
        .implies(Formula::undefined(app1(s2, app1(f, v(&a))))),
    );
    isom_literal(f, z, s, z2, s2).and(end)
}

/// `Iso[z,s; z',s'] ≡ ∃f¹ Isom[f; z,s; z',s']`.
pub fn iso(z: &str, s: &str, z2: &str, s2: &str) -> Formula {
    let f = Fresh::avoiding([z, s, z2, s2]).name("f");
    Formula::exists(Var::new(&f, 1), isom(&f, z, s, z2, s2))
}

/// `Suc[s; t]` as displayed. It asks every atom outside the domain of `s`
/// to get a `t`-value, so no finite `t` satisfies it; kept for comparison.
pub fn suc_literal(s: &str, t: &str) -> Formula {
    let a = Fresh::avoiding([s, t]).name("a");
    let sa = app1(s, v(&a));
    let ta = app1(t, v(&a));
    Formula::forall(
        Var::atomic(&a),
        Formula::defined(v(&a)).implies(
            Formula::defined(sa.clone()).and(Formula::eq(ta.clone(), sa.clone())).or(Formula::conj([
                Formula::undefined(sa),
                Formula::defined(ta.clone()),
                Formula::undefined(app1(t, ta)),
            ])),
        ),
    )
}

/// `Suc[z,s; t]`: `t` is the chain `(z,s)` extended by one new step. The
/// displayed condition is restricted to the chain: `t` agrees with `s`
/// where `s` is defined, the last chain atom gets a `t`-successor whose own
/// `t`-value is undefined, and `t` is undefined elsewhere.
pub fn suc(z: &str, s: &str, t: &str) -> Formula {
    let mut fresh = Fresh::avoiding([z, s, t]);
    let (a, b) = (fresh.name("a"), fresh.name("b"));
    let sa = app1(s, v(&a));
    let ta = app1(t, v(&a));
    let end = Formula::conj([
        Formula::defined(v(&a)),
        Formula::undefined(sa.clone()),
        Formula::eq(v(&a), v(z)).or(Formula::exists(Var::atomic(&b), Formula::eq(app1(s, v(&b)), v(&a)))),
    ]);
    Formula::forall(
        Var::atomic(&a),
        Formula::conj([
            Formula::defined(sa.clone()).implies(Formula::eq(ta.clone(), sa.clone())),
            end.clone().implies(Formula::defined(ta.clone()).and(Formula::undefined(app1(t, ta.clone())))),
            Formula::undefined(sa).and(end.not()).implies(Formula::undefined(ta)),
        ]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{eval_bounded, eval_fo, EvalConfig, ThreeValued};
    use crate::structures::{numeral_structure, string_structure, AFunction, Atom, Structure};

    #[test]
    fn scope_includes_bottom() {
        let s = string_structure("011").unwrap();
        let x = Term::var("x~");
        let f = Formula::forall(Var::atomic("x~"), scope(s.vocabulary(), &x).implies(Formula::defined(x.clone())));
        assert!(!eval_fo(&s, &f, &EvalConfig::fo()).unwrap());
        // restricted to atoms, scope atoms are exactly the four of T(011)
        let count = Formula::exists_all(
            atomic_vars(&["p".into(), "q".into(), "r".into(), "u".into(), "w".into()]),
            Formula::conj(
                ["p", "q", "r", "u", "w"].iter().map(|n| Formula::defined(v(n)).and(scope(s.vocabulary(), &v(n)))),
            )
            .and(Formula::conj(
                [("p", "q"), ("p", "r"), ("p", "u"), ("p", "w"), ("q", "r"), ("q", "u"), ("q", "w"), ("r", "u"), ("r", "w"), ("u", "w")]
                    .iter()
                    .map(|(a, b)| Formula::neq(v(a), v(b))),
            )),
        );
        assert!(!eval_fo(&s, &count, &EvalConfig::fo()).unwrap());
    }

    #[test]
    fn nu_on_numerals() {
        for n in 0..=5 {
            let s = numeral_structure(n);
            let r = eval_bounded(&s, &nu("z", "s"), &EvalConfig::bounded(n * (n + 1) / 2)).unwrap();
            assert_eq!(r, ThreeValued::True, "n = {n}");
            assert!(!eval_bounded(&s, &nu_literal("z", "s"), &EvalConfig::bounded(0)).unwrap().is_true());
        }
    }

    #[test]
    fn nu_rejects_cycle_beside_chain() {
        let mut s = numeral_structure(1);
        s.set_function(
            "s",
            AFunction::from_entries(1, [(vec![Atom(0)], Atom(1)), (vec![Atom(2)], Atom(3)), (vec![Atom(3)], Atom(2))]),
        )
        .unwrap();
        assert_eq!(eval_bounded(&s, &nu("z", "s"), &EvalConfig::universe(6)).unwrap(), ThreeValued::False);
    }

    fn two_chains(m: usize, n: usize) -> Structure {
        let a = numeral_structure(m);
        let b = numeral_structure(n).shifted(10).renamed(|x| format!("{x}'"));
        a.union(&b).unwrap()
    }

    #[test]
    fn iso_between_chains() {
        for m in 0..=3 {
            for n in 0..=3 {
                let s = two_chains(m, n);
                let cfg = EvalConfig::universe(m.max(n) + 1);
                let r = eval_bounded(&s, &iso("z", "s", "z'", "s'"), &cfg).unwrap();
                assert_eq!(r, ThreeValued::from_bool(m == n), "{m} {n}");
            }
        }
        // the displayed form only embeds
        let s = two_chains(1, 3);
        let lit = Formula::exists(Var::new("f", 1), isom_literal("f", "z", "s", "z'", "s'"));
        assert!(eval_bounded(&s, &lit, &EvalConfig::bounded(2)).unwrap().is_true());
    }

    #[test]
    fn suc_extends_by_one() {
        for n in 0..=3 {
            let chain = numeral_structure(n);
            let f = Formula::exists(Var::new("t", 1), suc("z", "s", "t").and(iso("z", "t", "z'", "s'")));
            for m in 0..=4 {
                let s = chain.union(&numeral_structure(m).shifted(10).renamed(|x| format!("{x}'"))).unwrap();
                let r = eval_bounded(&s, &f, &EvalConfig::universe(m.max(n + 1) + 1)).unwrap();
                assert_eq!(r, ThreeValued::from_bool(m == n + 1), "{n} {m}");
            }
        }
    }

    #[test]
    fn occurs_abbreviation() {
        let s = string_structure("01").unwrap();
        let e = Term::var("e");
        assert!(eval_fo(&s, &occurs_in(&e, "0", 1), &EvalConfig::fo()).unwrap());
        assert!(!eval_fo(&s, &occurs_in(&e, "1", 1), &EvalConfig::fo()).unwrap());
        assert!(eval_fo(&s, &members(&[e.clone()], "0"), &EvalConfig::fo()).unwrap());
    }
}
