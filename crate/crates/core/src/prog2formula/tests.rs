use super::*;
use crate::corpus;
use crate::logic::{eval_bounded, EvalConfig, ThreeValued};
use crate::st::{parse_program, run};
use crate::structures::{numeral_structure, numeral_structure_named, parse_fstruct};

fn certified(p: &str, initial: &str) -> bool {
    let p = parse_program(p).unwrap();
    let pf = program_formula(&p).unwrap();
    certify_run(&pf, &parse_fstruct(initial).unwrap(), 10_000).unwrap().1
}

#[test]
fn revisions_certify() {
    let s = "fn c/0\nfn f/1\nc -> 0\nf 0 -> 1\nf 1 -> 2\n";
    for p in ["f(c) := c", "f(f(c)) := c", "undef f(c)", "d!", "c!", "delete c", "skip", "d := f(c); f(d) <- c"] {
        assert!(certified(p, s), "{p}");
    }
}

#[test]
fn control_certifies() {
    let s = "fn c/0\nfn f/1\nc -> 0\nf 0 -> 1\nf 1 -> 2\nf 2 -> 3\n";
    assert!(certified("x := c; do [f(x) != omega] { x <- f(x) }", s));
    assert!(certified("if [c = omega] { c! } else { delete c }", s));
    assert!(certified("x := c; do [f(x) != omega] { if [f(f(x)) = omega] { y := x }; x <- f(x) }", s));
    assert!(certified("do [c = omega] { skip }", s));
}

#[test]
fn wrong_results_are_rejected() {
    // every existential is searched, so a false verdict is conclusive
    let p = parse_program("d := f(c)").unwrap();
    let pf = program_formula(&p).unwrap();
    let before = parse_fstruct("fn c/0\nfn f/1\nc -> 0\nf 0 -> 1\n").unwrap();
    let (good, _) = run(&before, &p, 10).unwrap();
    let mut bad = good.clone();
    bad.set_token("d", Some(Atom(0))).unwrap();
    let cfg = EvalConfig::bounded(1);
    assert_eq!(eval_bounded(&pf.assignment(&before, &good).unwrap(), &pf.formula(), &cfg).unwrap(), ThreeValued::True);
    assert_eq!(eval_bounded(&pf.assignment(&before, &bad).unwrap(), &pf.formula(), &cfg).unwrap(), ThreeValued::False);
}

#[test]
fn loop_formula_decides_small_cases() {
    let p = parse_program("do [f(c) != omega] { c <- f(c) }").unwrap();
    let pf = program_formula(&p).unwrap();
    let before = parse_fstruct("fn c/0\nfn f/1\nc -> 0\nf 0 -> 1\n").unwrap();
    let (good, _) = run(&before, &p, 100).unwrap();
    assert!(certify_run(&pf, &before, 100).unwrap().1);
    let mut bad = good.clone();
    bad.set_token("c", Some(Atom(0))).unwrap();
    let w = build_witness(&pf, &run(&before, &p, 100).unwrap().1).unwrap();
    assert!(!check_with_witness(&pf.assignment(&before, &bad).unwrap(), &pf.formula(), &w).unwrap());
}

fn pair(m: usize, n: usize) -> Structure {
    let a = numeral_structure_named(m, "z1", "s1");
    let b = numeral_structure_named(n, "z2", "s2").shifted(m as u32 + 1);
    a.union(&b).unwrap()
}

#[test]
fn corpus_io_certifies() {
    let add = io_formula(&corpus::add(), &["z1", "s1", "z2", "s2"], &["z", "s"]).unwrap();
    let mul = io_formula(&corpus::mul(), &["z1", "s1", "z2", "s2"], &["z", "s"]).unwrap();
    for (m, n) in [(0, 0), (1, 2), (2, 1)] {
        let (out, ok) = add.certify(&pair(m, n), 10_000).unwrap();
        assert!(ok, "add {m} {n}");
        assert_eq!(out.function("s").unwrap().len(), m + n);
        assert!(mul.certify(&pair(m, n), 10_000).unwrap().1, "mul {m} {n}");
    }
    let f = add.instantiate(&["a", "b", "c", "d"], &["e", "g"]).unwrap();
    let names: Vec<String> = f.free_vars().into_keys().collect();
    assert_eq!(names, ["a", "b", "c", "d", "e", "g"]);
}

#[test]
fn io_rejects_unknown_names() {
    assert!(matches!(io_formula(&corpus::add(), &["q"], &[]), Err(TranslateError::UnknownIdentifier(_))));
}

#[test]
fn star_is_reachability() {
    // φ[f, g] ≡ g ≐ s(f): φ* says g lies on the s-path from f
    let vocab = Vocabulary::from_pairs([("f", 0)]).unwrap();
    let phi = Formula::eq(Term::var("g"), Term::app1("s", Term::var("f")));
    let star = star_formula(&phi, &vocab, &["f".into()], &["g".into()]).unwrap();
    let base = numeral_structure(2);
    for (from, to, expect) in [(0, 2, true), (1, 1, true), (2, 0, false), (0, 1, true)] {
        let mut s = base.clone();
        s.set_token("f", Some(Atom(from))).unwrap();
        s.set_token("g", Some(Atom(to))).unwrap();
        let got = eval_bounded(&s, &star, &EvalConfig::universe(4)).unwrap();
        assert_eq!(got, ThreeValued::from_bool(expect), "{from} -> {to}");
    }
}

/// Every structure over `{z⁰, s¹}` on atoms `0..n`.
fn zs_structures(n: u32) -> Vec<Structure> {
    let mut out = Vec::new();
    let opts = n as usize + 1; // each point: undefined or an atom
    for z in 0..opts {
        for code in 0..opts.pow(n) {
            let mut s = Structure::default();
            s.declare("z", 0).unwrap();
            s.set_token("z", (z > 0).then(|| Atom(z as u32 - 1))).unwrap();
            let mut c = code;
            let mut entries = Vec::new();
            for a in 0..n {
                if c % opts > 0 {
                    entries.push((vec![Atom(a)], Atom((c % opts) as u32 - 1)));
                }
                c /= opts;
            }
            s.set_function("s", AFunction::from_entries(1, entries)).unwrap();
            out.push(s);
        }
    }
    out
}

/// Witnesses for `A_V` from a sequence of sets `∅ = g₀, g₁, …, gₙ`, each
/// member representing itself.
fn accessible_witness(phi: &Formula, sets: &[Vec<Atom>], base: u32) -> Witnesses {
    let outer = Ex::split(phi);
    let star = Ex::split(outer.matrix.conjuncts()[1]);
    let (e, g) = (&outer.prefix[0].name, &outer.prefix[1].name);
    let (z, s, h) = (&star.prefix[0].name, &star.prefix[1].name, &star.prefix[2].name);
    let chain: Vec<Atom> = (0..sets.len() as u32).map(|i| Atom(base + i)).collect();
    let last = sets.last().unwrap();
    Witnesses::from([
        (e.clone(), AFunction::empty(1)),
        (g.clone(), AFunction::from_entries(1, last.iter().map(|&a| (vec![a], a)))),
        (z.clone(), AFunction::token(Some(chain[0]))),
        (s.clone(), AFunction::from_entries(1, chain.windows(2).map(|p| (vec![p[0]], p[1])))),
        (
            h.clone(),
            AFunction::from_entries(2, sets.iter().zip(&chain).flat_map(|(g, &c)| g.iter().map(move |&a| (vec![c, a], a)))),
        ),
    ])
}

fn with_u(s: &Structure, a: Atom) -> Structure {
    let mut t = s.clone();
    t.set_token("u", Some(a)).unwrap();
    t
}

#[test]
fn accessible_formula_accepts_reachable_atoms() {
    let vocab = Vocabulary::from_pairs([("z", 0), ("s", 1)]).unwrap();
    let phi = accessible_formula(&vocab, &Term::var("u"));
    for s in zs_structures(3) {
        // grow the reachable set one image at a time
        let mut sets = vec![Vec::new()];
        loop {
            let cur = sets.last().unwrap().clone();
            let next = s
                .token("z")
                .into_iter()
                .chain(cur.iter().filter_map(|&a| s.function("s").unwrap().get(&[a])))
                .find(|a| !cur.contains(a));
            let Some(a) = next else { break };
            sets.push(cur.into_iter().chain([a]).collect());
        }
        let reach = sets.last().unwrap().clone();
        assert_eq!(reach.iter().copied().collect::<std::collections::BTreeSet<_>>(), s.accessible_atoms());
        for &a in &reach {
            let w = accessible_witness(&phi, &sets, 10);
            assert!(check_with_witness(&with_u(&s, a), &phi, &w).unwrap(), "{s:?} {a:?}");
        }
    }
}

#[test]
fn accessible_formula_rejects_set_chains_past_the_closure() {
    let vocab = Vocabulary::from_pairs([("z", 0), ("s", 1)]).unwrap();
    let phi = accessible_formula(&vocab, &Term::var("u"));
    let subsets: Vec<Vec<Atom>> =
        (0..4u32).map(|m| (0..2).filter(|i| m & (1 << i) != 0).map(Atom).collect()).collect();
    for s in zs_structures(2) {
        let reach = s.accessible_atoms();
        for a in (0..2).map(Atom).filter(|a| !reach.contains(a)) {
            for len in 0..3u32 {
                for code in 0..4u32.pow(len) {
                    let mut sets = vec![Vec::new()];
                    let mut c = code;
                    for _ in 0..len {
                        sets.push(subsets[(c % 4) as usize].clone());
                        c /= 4;
                    }
                    let w = accessible_witness(&phi, &sets, 10);
                    assert!(!check_with_witness(&with_u(&s, a), &phi, &w).unwrap(), "{s:?} {a:?} {sets:?}");
                }
            }
        }
    }
}
