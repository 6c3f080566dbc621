//! Self-checks run by `fs verify`: small exhaustive and randomized
//! comparisons of each module against a plain reference computation.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::arith::{canonical_check, decode_function, decode_set, encode_function, encode_set, is_function_code, parse_pa, Env};
use crate::corpus;
use crate::logic::axioms::{axiom_instance, Schema};
use crate::logic::library::nu;
use crate::logic::{check_with_witness, eval_bounded, eval_fo, parse_formula, EvalConfig, ThreeValued};
use crate::prog2formula::{build_witness, program_formula};
use crate::st::{parse_program, run, Program};
use crate::structures::{
    isomorphic, numeral_structure, numeral_structure_named, string_structure, AFunction, Atom, Structure,
};
use crate::tm::{compile_tm, expected_output, input_structure, output_structure, simulate_tm, symbols};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

type Suite = fn() -> Result<String, String>;

pub const SUITES: [(&str, Suite); 9] = [
    ("codec exactness", codec),
    ("string structure of 011", string_figure),
    ("compiled machines simulate", machines),
    ("program formulas certify runs", programs),
    ("nu characterizes numerals", numerals),
    ("PA agrees with canonical check", arithmetic),
    ("axiom instances valid", axioms),
    ("first-order evaluation scales", scaling),
    ("corpus arithmetic", corpus_programs),
];

/// Run the suites with the given ids (all when empty).
pub fn run_suites(only: &[usize]) -> Vec<Report> {
    SUITES
        .iter()
        .enumerate()
        .filter(|(i, _)| only.is_empty() || only.contains(&(i + 1)))
        .map(|(i, (name, suite))| {
            let t = Instant::now();
            let r = suite();
            let millis = t.elapsed().as_millis();
            let (passed, detail) = match r {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            Report { id: i + 1, name, passed, detail, millis }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    cond.then_some(()).ok_or_else(msg)
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn codec() -> Result<String, String> {
    for (s, n) in [(vec![], 1u32), (vec![0], 3), (vec![0, 2], 13)] {
        ensure(encode_set(&s) == BigUint::from(n), || format!("code of {s:?}"))?;
    }
    for mask in 0u32..1 << 10 {
        let s: BTreeSet<u64> = (0..10).filter(|i| mask >> i & 1 == 1).collect();
        ensure(decode_set(&encode_set(&s)).as_ref() == Ok(&s), || format!("round trip of {s:?}"))?;
    }
    let mut accepted = 0;
    for n in 1u64..1 << 16 {
        let n = BigUint::from(n);
        for k in 0..=2 {
            if is_function_code(&n, k) {
                accepted += 1;
                let f = decode_function(&n, k).map_err(err)?;
                ensure(encode_function(&f).ok() == Some(n.clone()), || format!("{n} does not re-encode"))?;
            }
        }
    }
    Ok(format!("{accepted} function codes below 2^16 re-encode"))
}

fn string_figure() -> Result<String, String> {
    let s = string_structure("011").map_err(err)?;
    let len = |g| s.function(g).map_or(0, AFunction::len);
    ensure(s.scope().len() == 4 && len("0") == 1 && len("1") == 2, || format!("{s:?}"))?;
    Ok("4 atoms, |0| = 1, |1| = 2".into())
}

fn machines() -> Result<String, String> {
    let mut n = 0;
    for m in [corpus::identity_tm(), corpus::complement_tm(), corpus::complement_back_tm()] {
        let p = compile_tm(&m);
        for len in 0..=4 {
            for bits in 0..1u32 << len {
                let w: String = (0..len).map(|i| if bits >> i & 1 == 1 { '1' } else { '0' }).collect();
                let out = simulate_tm(&m, &symbols(&w), 10_000).map_err(err)?;
                let (res, _) = run(&input_structure(&m, &symbols(&w)).map_err(err)?, &p, 1_000_000).map_err(err)?;
                let want = expected_output(&m, &out).map_err(err)?;
                ensure(isomorphic(&output_structure(&m, &res), &want).map_err(err)?.is_some(), || format!("{w:?}"))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} runs match simulation"))
}

fn random_program(rng: &mut StdRng, depth: usize) -> String {
    let tok = |rng: &mut StdRng| ["c", "d"][rng.gen_range(0..2)];
    let term = |rng: &mut StdRng| ["c", "d", "f(c)", "f(d)"][rng.gen_range(0..4)];
    let revision = |rng: &mut StdRng| match rng.gen_range(0..5) {
        0 => format!("f({}) := {}", tok(rng), term(rng)),
        1 => format!("{}!", tok(rng)),
        2 => format!("undef f({})", tok(rng)),
        3 => format!("delete {}", tok(rng)),
        _ => format!("{} <- {}", tok(rng), term(rng)),
    };
    if depth == 0 {
        return revision(rng);
    }
    match rng.gen_range(0..4) {
        0 => revision(rng),
        1 => format!("{}; {}", random_program(rng, depth - 1), random_program(rng, depth - 1)),
        2 => format!(
            "if [{} = omega] {{ {} }} else {{ {} }}",
            term(rng),
            random_program(rng, depth - 1),
            random_program(rng, depth - 1)
        ),
        _ => {
            let c = tok(rng);
            format!("do [f({c}) != omega] {{ {}; {c} <- f({c}) }}", random_program(rng, depth - 1))
        }
    }
}

fn random_structure(rng: &mut StdRng) -> Structure {
    let n = rng.gen_range(1..=4u32);
    let mut s = Structure::default();
    for c in ["c", "d"] {
        s.set_token(c, rng.gen_bool(0.8).then(|| Atom(rng.gen_range(0..n)))).expect("fresh");
    }
    let mut entries = Vec::new();
    for i in 0..n {
        if rng.gen_bool(0.6) {
            entries.push((vec![Atom(i)], Atom(rng.gen_range(0..n))));
        }
    }
    s.set_function("f", AFunction::from_entries(1, entries)).expect("fresh");
    s
}

fn programs() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(7);
    let (mut programs, mut runs) = (0, 0);
    while programs < 20 {
        let text = random_program(&mut rng, 3);
        let p: Program = parse_program(&text).map_err(err)?;
        let pf = program_formula(&p).map_err(err)?;
        let runs_here: Vec<_> =
            (0..40).map(|_| random_structure(&mut rng)).filter_map(|s| run(&s, &p, 200).ok().map(|r| (s, r))).take(5).collect();
        if runs_here.len() < 5 || p.depth() > 3 {
            continue;
        }
        for (s, (out, trace)) in &runs_here {
            let w = build_witness(&pf, trace).map_err(err)?;
            let joint = pf.assignment(s, out).map_err(err)?;
            ensure(check_with_witness(&joint, &pf.formula(), &w).map_err(err)?, || format!("{text} on {s:?}"))?;
            runs += 1;
        }
        programs += 1;
    }
    Ok(format!("{runs} runs of {programs} programs certified by their traces"))
}

fn numerals() -> Result<String, String> {
    let values: Vec<Option<Atom>> = std::iter::once(None).chain((0..4).map(|i| Some(Atom(i)))).collect();
    let cfg = EvalConfig::universe(6);
    let numerals: Vec<Structure> = (0..=3).map(numeral_structure).collect();
    let mut count = 0;
    for z in &values {
        for code in 0..values.len().pow(4) {
            let entries = (0..4u32).filter_map(|i| values[code / values.len().pow(i) % values.len()].map(|v| (vec![Atom(i)], v)));
            let mut st = Structure::default();
            st.set_token("z", *z).expect("fresh");
            st.set_function("s", AFunction::from_entries(1, entries)).expect("fresh");
            let mut want = false;
            for n in &numerals {
                want |= isomorphic(&st, n).map_err(err)?.is_some();
            }
            let got = eval_bounded(&st, &nu("z", "s"), &cfg).map_err(err)?;
            ensure(got == ThreeValued::from_bool(want), || format!("{st:?}: {got}"))?;
            count += usize::from(want);
        }
    }
    Ok(format!("{count} numerals among 3125 structures"))
}

fn arithmetic() -> Result<String, String> {
    let forms: [(&str, &[&str], fn(&[u64]) -> bool); 5] = [
        ("x = 0", &["x"], |v| v[0] == 0),
        ("x = y", &["x", "y"], |v| v[0] == v[1]),
        ("x = s y", &["x", "y"], |v| v[0] == v[1] + 1),
        ("x = y + w", &["x", "y", "w"], |v| v[0] == v[1] + v[2]),
        ("x = y * w", &["x", "y", "w"], |v| v[0] == v[1] * v[2]),
    ];
    let mut n = 0;
    for (text, vars, want) in forms {
        let phi = parse_pa(text).map_err(err)?;
        for code in 0..5u64.pow(vars.len() as u32) {
            let vals: Vec<u64> = (0..vars.len()).map(|i| code / 5u64.pow(i as u32) % 5).collect();
            let env: Env = vars.iter().map(|v| v.to_string()).zip(vals.iter().copied()).collect();
            let got = canonical_check(&phi, &env).map_err(err)?;
            ensure(got == ThreeValued::from_bool(want(&vals)), || format!("{text} at {env:?}: {got}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} assignments agree"))
}

fn axioms() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(11);
    let mut n = 0;
    for i in 0..50 {
        let k = 1 + i % 2;
        let atoms = rng.gen_range(1..=4u32);
        let entries: std::collections::BTreeMap<Vec<Atom>, Atom> = (0..rng.gen_range(0..=3))
            .map(|_| ((0..k).map(|_| Atom(rng.gen_range(0..atoms))).collect(), Atom(rng.gen_range(0..atoms))))
            .collect();
        let cfg = EvalConfig::universe(entries.len() + 1);
        let mut s = Structure::default();
        s.set_function("f", AFunction::from_entries(k, entries)).expect("fresh");
        for schema in [Schema::Strictness, Schema::Infinity, Schema::Empty, Schema::Extension] {
            let f = axiom_instance(&schema, "f", k).map_err(err)?;
            ensure(eval_bounded(&s, &f, &cfg).map_err(err)? == ThreeValued::True, || format!("{schema:?} on {s:?}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} instances true"))
}

fn scaling() -> Result<String, String> {
    let f = parse_formula("A x, y. s(x) = s(y) & s(x) != omega -> x = y").map_err(err)?;
    let time = |n: usize| -> Result<Duration, String> {
        let st = numeral_structure(n);
        let t = Instant::now();
        ensure(eval_fo(&st, &f, &EvalConfig::fo()).map_err(err)?, || format!("false at {n}"))?;
        Ok(t.elapsed())
    };
    let (small, big) = (time(100)?, time(1000)?);
    let exponent = (big.as_secs_f64() / small.as_secs_f64().max(1e-7)).log10();
    ensure(exponent < 4.0 && big < Duration::from_secs(1), || format!("exponent {exponent:.2}, {big:?}"))?;
    Ok(format!("exponent {exponent:.2}, n = 1000 in {big:.2?}"))
}

fn corpus_programs() -> Result<String, String> {
    let pair = |m: usize, n: usize| {
        numeral_structure_named(m, "z1", "s1").union(&numeral_structure_named(n, "z2", "s2").shifted(m as u32 + 1))
    };
    let result = |p: &Program, s: &Structure| -> Result<Structure, String> {
        Ok(run(s, p, 1_000_000).map_err(err)?.0.reduct(["z", "s"]))
    };
    let same = |a: &Structure, n: usize| -> Result<bool, String> { Ok(isomorphic(a, &numeral_structure(n)).map_err(err)?.is_some()) };
    for m in 0..=6 {
        for n in 0..=6 {
            let input = pair(m, n).map_err(err)?;
            ensure(same(&result(&corpus::add(), &input)?, m + n)?, || format!("add {m} {n}"))?;
            ensure(same(&result(&corpus::mul(), &input)?, m * n)?, || format!("mul {m} {n}"))?;
        }
    }
    for n in 0..=10 {
        ensure(same(&result(&corpus::double(), &numeral_structure_named(n, "z1", "s1"))?, 2 * n)?, || format!("double {n}"))?;
    }
    Ok("add, mul on 49 pairs, double on 11 inputs".into())
}
