//! The existential formula of a program, certified by a run's trace.

use finstruct::logic::{check_with_witness, eval_bounded, EvalConfig};
use finstruct::prog2formula::{build_witness, prefix_summary, program_formula};
use finstruct::st::{parse_program, run};
use finstruct::structures::{parse_fstruct, Atom};

fn main() {
    let p = parse_program("x := c; do [f(x) != omega] { x <- f(x) }").unwrap();
    let pf = program_formula(&p).unwrap();
    println!("existentials by arity: {:?}", prefix_summary(&pf));

    let before = parse_fstruct("fn c/0\nfn f/1\nc -> 0\nf 0 -> 1\nf 1 -> 2\n").unwrap();
    let (after, trace) = run(&before, &p, 100).unwrap();
    let w = build_witness(&pf, &trace).unwrap();
    let joint = pf.assignment(&before, &after).unwrap();
    println!("trace witnesses the run: {}", check_with_witness(&joint, &pf.formula(), &w).unwrap());

    let mut wrong = after.clone();
    wrong.set_token("x", Some(Atom(0))).unwrap();
    let joint = pf.assignment(&before, &wrong).unwrap();
    println!("same witnesses for a wrong result: {}", check_with_witness(&joint, &pf.formula(), &w).unwrap());

    // loop-free programs are small enough to decide by search
    let q = parse_program("if [f(c) = omega] { f(c) := c } else { undef f(c) }").unwrap();
    let qf = program_formula(&q).unwrap();
    let (out, _) = run(&before, &q, 10).unwrap();
    let verdict = eval_bounded(&qf.assignment(&before, &out).unwrap(), &qf.formula(), &EvalConfig::universe(3)).unwrap();
    println!("{q}\n  holds of its result by search: {verdict}");
}
