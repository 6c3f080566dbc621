//! Natural-number codes of sets, entries and functions.

use finstruct::arith::{decode_function, decode_set, encode_entry, encode_function, encode_set, is_function_code};
use finstruct::structures::{AFunction, Atom};

fn main() {
    for s in [vec![], vec![0], vec![0, 2]] {
        let n = encode_set(&s);
        println!("{s:?} -> {n} = {n:b}b -> {:?}", decode_set(&n).unwrap());
    }
    println!("<a0 -> a1> -> {}", encode_entry(&[Atom(0)], Atom(1)));

    let f = AFunction::from_entries(1, [(vec![Atom(0)], Atom(1)), (vec![Atom(1)], Atom(2))]);
    let n = encode_function(&f).unwrap();
    println!("successor on a0..a2 -> {n}");
    assert_eq!(decode_function(&n, 1).unwrap(), f);

    let functional = (1u32..64).filter(|&n| is_function_code(&n.into(), 1)).collect::<Vec<_>>();
    println!("unary function codes below 64: {functional:?}");
}
