//! First-order and bounded second-order evaluation.

use finstruct::logic::library::nu;
use finstruct::logic::{eval_bounded, eval_fo, parse_formula, EvalConfig};
use finstruct::structures::{numeral_structure, parse_fstruct};

fn main() {
    let s = numeral_structure(3);
    let injective = parse_formula("A x, y. s(x) = s(y) & s(x) != omega -> x = y").unwrap();
    println!("{injective}: {}", eval_fo(&s, &injective, &EvalConfig::fo()).unwrap());

    // ν holds exactly on numerals; its order on n+1 atoms needs n(n+1)/2
    // entries, so the bound must allow 6 here
    println!("nu on T(s³z): {}", eval_bounded(&s, &nu("z", "s"), &EvalConfig::universe(6)).unwrap());
    let cycle = parse_fstruct("fn z/0\nfn s/1\nz -> 0\ns 0 -> 1\ns 1 -> 0\n").unwrap();
    println!("nu on a 2-cycle: {}", eval_bounded(&cycle, &nu("z", "s"), &EvalConfig::universe(6)).unwrap());

    // an explicit definition is solved directly, whatever the bound
    let copy = parse_formula("E g^1. A x. g(x) = s(x)").unwrap();
    println!("copy of s: {}", eval_bounded(&s, &copy, &EvalConfig::bounded(1)).unwrap());
    // a searched function: too small a bound leaves the question open
    let part = parse_formula("E g^1. (A x. g(x) != omega -> g(x) = s(x)) & g(z) != omega & g(s(z)) != omega & g(s(s(z))) != omega").unwrap();
    for bound in [2, 3] {
        println!("part of s on three points within {bound} entries: {}", eval_bounded(&s, &part, &EvalConfig::bounded(bound)).unwrap());
    }
}
