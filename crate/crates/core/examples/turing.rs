//! Compile a Turing machine to ST and compare with direct simulation.

use finstruct::corpus;
use finstruct::st::run;
use finstruct::structures::isomorphic;
use finstruct::tm::{compile_tm, expected_output, input_structure, output_structure, simulate_tm, symbols};

fn main() {
    let m = corpus::complement_back_tm();
    let p = compile_tm(&m);
    println!("compiled program: {} revisions, {} loops", p.revision_count(), p.loop_count());
    for w in ["", "0", "011", "1010"] {
        let w = symbols(w);
        let out = simulate_tm(&m, &w, 1_000).unwrap();
        let (res, trace) = run(&input_structure(&m, &w).unwrap(), &p, 100_000).unwrap();
        let same = isomorphic(&output_structure(&m, &res), &expected_output(&m, &out).unwrap()).unwrap().is_some();
        println!("{:>5} -> {:>5}  ({} revisions, agrees: {same})", w.concat(), out.concat(), trace.steps.len());
    }
}
