//! Formulas over identifiers and their satisfaction in structures.

pub mod axioms;
mod eval;
mod formula;
pub mod library;
mod parse;

pub use eval::{
    check_with_witness, check_with_witness_cfg, eval_bounded, eval_fo, eval_with, EvalConfig, EvalError, SoMode,
    ThreeValued, Witnesses,
};
pub use formula::{Formula, Quantifier, Var};
pub use parse::{parse_formula, parse_term, ParseError};
pub(crate) use parse::{is_ident_char, lex, Parser, Tok};
