//! Arithmetic inside FS: codes for sets and functions, and a translation of
//! Peano arithmetic into FS formulas over numeral chains.

mod codec;
mod pa;
mod translate;

use thiserror::Error;

pub use codec::{
    decode_entry, decode_function, decode_set, encode_entry, encode_function, encode_set, is_function_code, CodecError,
};
pub use pa::{eval_term, flatten, pa_eval, parse_pa, parse_pa_term, Env, Form, PaError, PaFormula, PaTerm};
pub use translate::{canonical_check, canonical_check_on, canonical_structure, pa_translate, pair_names};

#[derive(Debug, Error)]
pub enum ArithError {
    #[error(transparent)]
    Pa(#[from] PaError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Translate(#[from] crate::prog2formula::TranslateError),
    #[error(transparent)]
    Eval(#[from] crate::logic::EvalError),
    #[error(transparent)]
    Structure(#[from] crate::structures::StructureError),
    #[error("canonical checks take quantifier-free formulas")]
    NotQuantifierFree,
    #[error("`{0}` is not interpreted by a chain")]
    NotAChain(String),
}
