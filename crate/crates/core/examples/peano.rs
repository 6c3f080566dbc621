//! PA formulas, their FS translation, and canonical checks.

use finstruct::arith::{canonical_check, flatten, pa_eval, pa_translate, parse_pa, Env};

fn main() {
    let phi = parse_pa("x = y * (w + 1)").unwrap();
    println!("flattened: {}", flatten(&phi));
    let sentence = parse_pa("A x. E y. y = s x").unwrap();
    println!("translation has {} characters", pa_translate(&sentence).to_string().len());

    for (x, y, w) in [(6, 3, 1), (5, 3, 1), (0, 0, 4)] {
        let env: Env = [("x", x), ("y", y), ("w", w)].map(|(k, v)| (k.to_string(), v)).into();
        let standard = pa_eval(&phi, &env, 0).unwrap();
        let fs = canonical_check(&phi, &env).unwrap();
        println!("x={x} y={y} w={w}: standard {standard}, canonical {fs}");
    }
}
