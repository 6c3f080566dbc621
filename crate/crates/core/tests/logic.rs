use std::collections::BTreeSet;

use finstruct::logic::library::{iso, nu};
use finstruct::logic::{eval_bounded, eval_fo, parse_formula, EvalConfig, Formula, ThreeValued};
use finstruct::structures::{isomorphic, numeral_structure, AFunction, Atom, Structure};
use proptest::prelude::*;

/// Every `{z⁰, s¹}` structure with scope inside `{a0..a3}`.
fn zs_structures() -> Vec<Structure> {
    let mut out = Vec::new();
    let values: Vec<Option<Atom>> = std::iter::once(None).chain((0..4).map(|i| Some(Atom(i)))).collect();
    for z in &values {
        for code in 0..values.len().pow(4) {
            let mut c = code;
            let mut entries = Vec::new();
            for i in 0..4 {
                if let Some(v) = values[c % values.len()] {
                    entries.push((vec![Atom(i)], v));
                }
                c /= values.len();
            }
            let s = AFunction::from_entries(1, entries);
            let mut st = Structure::default();
            st.set_token("z", *z).unwrap();
            st.set_function("s", s).unwrap();
            out.push(st);
        }
    }
    out
}

/// Walk from `z`: a numeral iff the walk ends, never repeats, and covers
/// every entry.
fn is_numeral(st: &Structure) -> bool {
    let Some(mut x) = st.token("z") else { return false };
    let s = st.function("s").unwrap();
    let mut seen = BTreeSet::from([x]);
    while let Some(y) = s.get(&[x]) {
        if !seen.insert(y) {
            return false;
        }
        x = y;
    }
    seen == st.scope() && s.len() + 1 == seen.len()
}

#[test]
fn nu_holds_exactly_on_numerals() {
    let cfg = EvalConfig::universe(6);
    let mut numerals = 0;
    for st in zs_structures() {
        let expected = is_numeral(&st);
        numerals += usize::from(expected);
        let got = eval_bounded(&st, &nu("z", "s"), &cfg).unwrap();
        assert_eq!(got, ThreeValued::from_bool(expected), "{st:?}");
        if expected {
            let n = st.function("s").unwrap().len();
            assert!(isomorphic(&st, &numeral_structure(n)).unwrap().is_some());
        }
    }
    // z alone on 4 atoms, plus chains: 4 + 12 + 24 + 24
    assert_eq!(numerals, 64);
}

#[test]
fn iso_matches_lengths() {
    for m in 0..=4 {
        for n in 0..=4 {
            let st = numeral_structure(m).union(&numeral_structure(n).shifted(20).renamed(|x| format!("{x}2"))).unwrap();
            let r = eval_bounded(&st, &iso("z", "s", "z2", "s2"), &EvalConfig::universe(5)).unwrap();
            assert_eq!(r, ThreeValued::from_bool(m == n), "{m} {n}");
        }
    }
}

#[test]
fn fo_scales_polynomially() {
    let f = parse_formula("A x, y. s(x) = s(y) & s(x) != omega -> x = y").unwrap();
    let st = numeral_structure(1000);
    let t = std::time::Instant::now();
    assert!(eval_fo(&st, &f, &EvalConfig::fo()).unwrap());
    assert!(t.elapsed().as_secs_f64() < 5.0);
}

fn small_structure() -> impl Strategy<Value = Structure> {
    let entry = (0u32..4, prop::option::of(0u32..4));
    (prop::option::of(0u32..4), prop::collection::vec(entry, 0..5), prop::collection::vec((0u32..4, 0u32..4, 0u32..4), 0..3))
        .prop_map(|(c, f, g)| {
            let mut st = Structure::default();
            st.set_token("c", c.map(Atom)).unwrap();
            st.set_function(
                "f",
                AFunction::from_entries(1, f.into_iter().filter_map(|(a, b)| b.map(|b| (vec![Atom(a)], Atom(b))))),
            )
            .unwrap();
            st.set_function("g", AFunction::from_entries(2, g.into_iter().map(|(a, b, v)| (vec![Atom(a), Atom(b)], Atom(v)))))
                .unwrap();
            st
        })
}

fn fo_formula() -> impl Strategy<Value = Formula> {
    let names = ["x", "y", "w"];
    let term = prop_oneof![
        Just("omega".to_string()),
        Just("c".to_string()),
        prop::sample::select(names.to_vec()).prop_map(String::from),
        prop::sample::select(names.to_vec()).prop_map(|v| format!("f({v})")),
        (prop::sample::select(names.to_vec()), prop::sample::select(names.to_vec())).prop_map(|(a, b)| format!("g({a},{b})")),
        prop::sample::select(names.to_vec()).prop_map(|v| format!("f(f({v}))")),
    ];
    let atom = (term.clone(), term, any::<bool>()).prop_map(|(a, b, eq)| format!("{a} {} {b}", if eq { "=" } else { "!=" }));
    let body = atom.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} & {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} | {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} -> {b})")),
            inner.prop_map(|a| format!("!({a})")),
        ]
    });
    (prop::collection::vec(any::<bool>(), 3), body).prop_map(|(qs, body)| {
        // close the formula: quantify x, y, w in a random order of kinds
        let mut text = String::new();
        for (forall, v) in qs.iter().zip(["x", "y", "w"]) {
            text.push_str(&format!("{} {v}. ", if *forall { "A" } else { "E" }));
        }
        text.push_str(&body);
        parse_formula(&text).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fresh_atoms_suffice(st in small_structure(), f in fo_formula()) {
        let q = f.atomic_quantifier_count();
        let base = eval_fo(&st, &f, &EvalConfig { fresh_atom_count: Some(q), ..EvalConfig::fo() }).unwrap();
        let more = eval_fo(&st, &f, &EvalConfig { fresh_atom_count: Some(q + 2), ..EvalConfig::fo() }).unwrap();
        let all = eval_fo(&st, &f, &EvalConfig { fresh_atom_count: Some(q + 2), symmetry_reduction: false, ..EvalConfig::fo() }).unwrap();
        prop_assert_eq!(base, more);
        prop_assert_eq!(base, all);
    }

    #[test]
    fn invariant_under_isomorphism(st in small_structure(), f in fo_formula(), shift in 1u32..50) {
        let moved = st.map_atoms(|a| Atom(3 - a.0 + shift));
        prop_assert_eq!(eval_fo(&st, &f, &EvalConfig::fo()).unwrap(), eval_fo(&moved, &f, &EvalConfig::fo()).unwrap());
    }

    #[test]
    fn bounded_answers_are_stable(st in small_structure(), b in 1usize..4) {
        for text in [
            "E h^1. A x. f(x) != omega -> h(f(x)) = x",
            "A h^1. h(c) = omega | E x. h(x) = c | h(c) != c",
            "E h^1. h(c) != omega & h(h(c)) = c & c != h(c)",
            "A h^1. (A x. h(x) = f(x)) -> h(c) = f(c)",
        ] {
            let f = parse_formula(text).unwrap();
            let lo = eval_bounded(&st, &f, &EvalConfig::bounded(b)).unwrap();
            let hi = eval_bounded(&st, &f, &EvalConfig::bounded(b + 1)).unwrap();
            if lo != ThreeValued::Unknown {
                prop_assert_eq!(lo, hi, "{}", text);
            }
        }
    }
}
