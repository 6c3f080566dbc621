use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use finstruct::arith::{canonical_check, canonical_check_on, canonical_structure, flatten, pa_eval, parse_pa, Env};
use finstruct::logic::library::suc;
use finstruct::logic::{eval_bounded, EvalConfig, ThreeValued};
use finstruct::structures::{AFunction, Atom, Structure};

fn env(pairs: &[(&str, u64)]) -> Env {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn standard_model_examples() {
    let e = Env::new();
    assert!(pa_eval(&parse_pa("2 + 2 = 4").unwrap(), &e, 0).unwrap());
    let phi = parse_pa("A x <= 3. E y <= 4. y = s x").unwrap();
    assert!(pa_eval(&phi, &e, 4).unwrap());
    assert!(pa_eval(&phi, &e, 5).unwrap());
    let prod = parse_pa("3 * 2 = 6").unwrap();
    assert!(pa_eval(&flatten(&prod), &e, 0).unwrap());
    assert!(!pa_eval(&flatten(&parse_pa("3 * 2 = 5").unwrap()), &e, 0).unwrap());
}

#[test]
fn canonical_examples() {
    let check = |t: &str, p: &[(&str, u64)]| canonical_check(&parse_pa(t).unwrap(), &env(p)).unwrap();
    assert_eq!(check("x1 = x2", &[("x1", 2), ("x2", 2)]), ThreeValued::True);
    assert_eq!(check("x1 = x2", &[("x1", 2), ("x2", 3)]), ThreeValued::False);
    assert_eq!(check("x1 = s x2", &[("x1", 3), ("x2", 2)]), ThreeValued::True);
    assert_eq!(check("x1 = x2 + x3", &[("x1", 5), ("x2", 2), ("x3", 3)]), ThreeValued::True);
}

/// Rename every atom by a random permutation of a larger id range.
fn shuffled(s: &Structure, rng: &mut StdRng) -> Structure {
    let n = s.max_atom().map_or(0, |a| a.0 + 1);
    let mut ids: Vec<u32> = (0..n + 7).collect();
    ids.shuffle(rng);
    s.map_atoms(|a| Atom(ids[a.0 as usize]))
}

#[test]
fn independent_of_atom_names() {
    let mut rng = StdRng::seed_from_u64(3);
    for text in ["x = y", "x = s y", "x = y + w", "x = y * w", "!(x = 0) -> x = s y"] {
        let phi = parse_pa(text).unwrap();
        for (x, y, w) in [(2, 2, 0), (3, 2, 1), (4, 2, 2), (1, 0, 3)] {
            let e = env(&[("x", x), ("y", y), ("w", w)]);
            let plain = canonical_check(&phi, &e).unwrap();
            let moved = canonical_check_on(&phi, &e, &shuffled(&canonical_structure(&e), &mut rng)).unwrap();
            assert_eq!(plain, moved, "{text} {e:?}");
            assert_eq!(plain, ThreeValued::from_bool(pa_eval(&phi, &e, 0).unwrap()));
        }
    }
}

fn chain(n: u32) -> AFunction {
    AFunction::from_entries(1, (0..n).map(|i| (vec![Atom(i)], Atom(i + 1))))
}

#[test]
fn successor_extends_the_chain_by_one() {
    let cfg = EvalConfig::fo();
    for n in 0..=4 {
        for (m, want) in [(n, false), (n + 1, true), (n + 2, false)] {
            let mut s = Structure::default();
            s.set_token("z", Some(Atom(0))).unwrap();
            s.set_function("s", chain(n)).unwrap();
            s.set_function("t", chain(m)).unwrap();
            let got = eval_bounded(&s, &suc("z", "s", "t"), &cfg).unwrap();
            assert_eq!(got, ThreeValued::from_bool(want), "{n} {m}");
        }
    }
}

#[test]
fn quantified_formulas_are_rejected() {
    assert!(canonical_check(&parse_pa("E y. x = y").unwrap(), &env(&[("x", 1)])).is_err());
    assert!(canonical_check(&parse_pa("x = y").unwrap(), &env(&[("x", 1)])).is_err());
}
