//! Run the corpus addition program on the pair (2, 3).

use finstruct::corpus;
use finstruct::st::run;
use finstruct::structures::{isomorphic, numeral_structure, numeral_structure_named};

fn main() {
    let input = numeral_structure_named(2, "z1", "s1").union(&numeral_structure_named(3, "z2", "s2").shifted(3)).unwrap();
    let (out, trace) = run(&input, &corpus::add(), 10_000).unwrap();
    println!("{} revisions, {} loop records", trace.steps.len(), trace.loops.len());
    for step in trace.steps.iter().take(5) {
        println!("  point {}: {}", step.point, step.revision);
    }
    let sum = out.reduct(["z", "s"]);
    assert!(isomorphic(&sum, &numeral_structure(5)).unwrap().is_some());
    println!("result chain has {} steps", sum.function("s").unwrap().len());
}
