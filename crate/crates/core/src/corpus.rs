//! Programs and machines shipped with the crate.
//!
//! The arithmetic programs read numerals as chains: `(z1, s1)` and
//! `(z2, s2)` in, `(z, s)` out.

use crate::st::{parse_program, Program};
use crate::tm::{parse_tm, TmSpec};

pub const ADD_ST: &str = include_str!("../corpus/add.st");
pub const MUL_ST: &str = include_str!("../corpus/mul.st");
pub const DOUBLE_ST: &str = include_str!("../corpus/double.st");
pub const IDENTITY_TM: &str = include_str!("../corpus/identity.tm");
pub const COMPLEMENT_TM: &str = include_str!("../corpus/complement.tm");
pub const COMPLEMENT_BACK_TM: &str = include_str!("../corpus/complement_back.tm");
pub const LOOP_TM: &str = include_str!("../corpus/loop.tm");

pub fn add() -> Program {
    parse_program(ADD_ST).expect("corpus program")
}

pub fn mul() -> Program {
    parse_program(MUL_ST).expect("corpus program")
}

pub fn double() -> Program {
    parse_program(DOUBLE_ST).expect("corpus program")
}

pub fn identity_tm() -> TmSpec {
    parse_tm(IDENTITY_TM).expect("corpus machine")
}

pub fn complement_tm() -> TmSpec {
    parse_tm(COMPLEMENT_TM).expect("corpus machine")
}

/// Complement using left moves and end markers.
pub fn complement_back_tm() -> TmSpec {
    parse_tm(COMPLEMENT_BACK_TM).expect("corpus machine")
}

pub fn loop_tm() -> TmSpec {
    parse_tm(LOOP_TM).expect("corpus machine")
}

/// Every shipped program by file name.
pub fn programs() -> Vec<(&'static str, Program)> {
    vec![("add.st", add()), ("mul.st", mul()), ("double.st", double())]
}

/// Every shipped machine by file name.
pub fn machines() -> Vec<(&'static str, TmSpec)> {
    vec![
        ("identity.tm", identity_tm()),
        ("complement.tm", complement_tm()),
        ("complement_back.tm", complement_back_tm()),
        ("loop.tm", loop_tm()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::st::run;
    use crate::structures::{isomorphic, numeral_structure, Structure};

    fn pair(m: usize, n: usize) -> Structure {
        let a = numeral_structure(m).renamed(|x| format!("{x}1"));
        let b = numeral_structure(n).renamed(|x| format!("{x}2")).shifted(m as u32 + 1);
        a.union(&b).unwrap()
    }

    fn value(s: &Structure) -> Option<usize> {
        let out = s.reduct(["z", "s"]);
        let n = out.function("s")?.len();
        isomorphic(&out, &numeral_structure(n)).unwrap().map(|_| n)
    }

    #[test]
    fn arithmetic() {
        for (m, n) in [(0, 0), (2, 3), (3, 0), (0, 2)] {
            assert_eq!(value(&run(&pair(m, n), &add(), 10_000).unwrap().0), Some(m + n));
            assert_eq!(value(&run(&pair(m, n), &mul(), 10_000).unwrap().0), Some(m * n));
        }
        let one = numeral_structure(4).renamed(|x| format!("{x}1"));
        assert_eq!(value(&run(&one, &double(), 10_000).unwrap().0), Some(8));
    }
}
