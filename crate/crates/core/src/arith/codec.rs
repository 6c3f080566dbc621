//! Natural-number codes for finite sets, entries and A-functions.
//!
//! A set `S` with largest element `m` is coded by the binary numeral
//! `1 d₀ d₁ … d_m` with `dᵢ = 1` iff `i ∈ S`; `∅` is `1`. An entry
//! `⟨a_{n₁} … a_{n_k} ↦ a_m⟩` is coded by `1 0^m 1 0^{n₁} … 1 0^{n_k}`, and a
//! function by the set of its entry codes.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::structures::{AFunction, Atom};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("0 codes nothing")]
    Zero,
    #[error("`{0}` is not a canonical set code (its last digit is 0)")]
    NotCanonical(BigUint),
    #[error("entry of arity {found} in a code for arity {expected}")]
    Arity { expected: usize, found: usize },
    #[error("two entries share the input {0:?}")]
    NotFunctional(Vec<u32>),
    #[error("entry code {0} does not fit in 64 bits")]
    TooLarge(BigUint),
}

pub fn encode_set<'a>(s: impl IntoIterator<Item = &'a u64>) -> BigUint {
    let s: BTreeSet<u64> = s.into_iter().copied().collect();
    let Some(&max) = s.last() else { return BigUint::one() };
    let mut n = BigUint::one() << (max + 1);
    for &i in &s {
        n.set_bit(max - i, true);
    }
    n
}

/// Elements of a canonical set code. Even codes end in a 0 digit and name
/// no set.
pub fn decode_set(n: &BigUint) -> Result<BTreeSet<u64>, CodecError> {
    if n.is_zero() {
        return Err(CodecError::Zero);
    }
    let digits = n.bits() - 1;
    if digits > 0 && !n.bit(0) {
        return Err(CodecError::NotCanonical(n.clone()));
    }
    Ok((0..digits).filter(|i| n.bit(digits - 1 - i)).collect())
}

pub fn encode_entry(args: &[Atom], value: Atom) -> BigUint {
    // digits from the most significant end
    let mut bits = vec![true];
    bits.extend(std::iter::repeat_n(false, value.0 as usize));
    for a in args {
        bits.push(true);
        bits.extend(std::iter::repeat_n(false, a.0 as usize));
    }
    bits.into_iter().fold(BigUint::zero(), |n, b| (n << 1u32) + if b { 1u32 } else { 0 })
}

/// `(args, value)` of an entry code; the arity is the number of 1-digits
/// after the first, less one.
pub fn decode_entry(n: &BigUint) -> Result<(Vec<Atom>, Atom), CodecError> {
    if n.is_zero() {
        return Err(CodecError::Zero);
    }
    let len = n.bits();
    // run lengths of zeros after each 1-digit, most significant first
    let mut runs = Vec::new();
    for i in (0..len).rev() {
        if n.bit(i) {
            runs.push(0u32);
        } else {
            *runs.last_mut().expect("leading digit is 1") += 1;
        }
    }
    let value = Atom(runs[0]);
    Ok((runs[1..].iter().map(|&r| Atom(r)).collect(), value))
}

/// Fails when an entry code does not fit in 64 bits (the set code would
/// have more than 2⁶⁴ digits).
pub fn encode_function(f: &AFunction) -> Result<BigUint, CodecError> {
    let mut elems = Vec::new();
    for (args, v) in f.entries() {
        let c = encode_entry(args, v);
        elems.push(c.to_u64().ok_or(CodecError::TooLarge(c))?);
    }
    Ok(encode_set(&elems))
}

pub fn decode_function(n: &BigUint, k: usize) -> Result<AFunction, CodecError> {
    let elems = decode_set(n)?;
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for e in elems {
        let (args, v) = decode_entry(&BigUint::from(e))?;
        if args.len() != k {
            return Err(CodecError::Arity { expected: k, found: args.len() });
        }
        if !seen.insert(args.clone()) {
            return Err(CodecError::NotFunctional(args.iter().map(|a| a.0).collect()));
        }
        entries.push((args, v));
    }
    Ok(AFunction::from_entries(k, entries))
}

/// `G_k`: `n` codes a `k`-ary A-function.
pub fn is_function_code(n: &BigUint, k: usize) -> bool {
    decode_function(n, k).is_ok()
}
