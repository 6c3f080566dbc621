//! Run two of the built-in verification suites, as `fs verify --only 1,2`.

use finstruct::verify::run_suites;

fn main() {
    for r in run_suites(&[1, 2]) {
        println!("{} {}. {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.detail);
    }
}
