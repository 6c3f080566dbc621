//! Atoms, finite partial functions over atoms, and structures built from them.
//!
//! A [`Structure`] maps each identifier of an ordered [`Vocabulary`] to an
//! [`AFunction`]. Structures are plain values: operations that "change" one
//! return a new structure.

mod fstruct;
mod iso;
mod term;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use fstruct::{parse_fstruct, print_fstruct, FstructError};
pub use iso::{isomorphic, AtomMap};
pub use term::{eval_term, numeral_structure, numeral_structure_named, string_structure, string_structure_over, term_structure, Term};
pub(crate) use term::string_structure_symbols;

/// An opaque first-order element. Identity is the id.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Atom(pub u32);

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An atom or the distinguished undefined value (`None`).
pub type AtomOrBottom = Option<Atom>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("identifier `{name}` has arity {expected}, used with {found} argument(s)")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("undefined value used as an argument or output of `{0}`")]
    Strictness(String),
    #[error("vocabularies differ")]
    VocabularyMismatch,
    #[error("identifier `{0}` occurs in both structures")]
    NameClash(String),
    #[error("duplicate identifier `{0}` in vocabulary")]
    DuplicateIdentifier(String),
}

/// A finite k-ary partial function over atoms. Lookups outside the entries
/// (and lookups with an undefined argument) yield bottom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AFunction {
    arity: usize,
    entries: BTreeMap<Vec<Atom>, Atom>,
}

impl AFunction {
    pub fn empty(arity: usize) -> Self {
        AFunction { arity, entries: BTreeMap::new() }
    }

    /// A nullary function holding `value`.
    pub fn token(value: AtomOrBottom) -> Self {
        let mut f = AFunction::empty(0);
        if let Some(a) = value {
            f.entries.insert(Vec::new(), a);
        }
        f
    }

    pub fn from_entries<I>(arity: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (Vec<Atom>, Atom)>,
    {
        let mut f = AFunction::empty(arity);
        for (args, v) in entries {
            assert_eq!(args.len(), arity, "entry arity");
            f.entries.insert(args, v);
        }
        f
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[Atom], Atom)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// Strict lookup.
    pub fn apply(&self, args: &[AtomOrBottom]) -> AtomOrBottom {
        debug_assert_eq!(args.len(), self.arity);
        let mut key = Vec::with_capacity(args.len());
        for a in args {
            key.push((*a)?);
        }
        self.entries.get(&key).copied()
    }

    pub fn get(&self, args: &[Atom]) -> AtomOrBottom {
        self.entries.get(args).copied()
    }

    /// The value of a nullary function.
    pub fn as_token(&self) -> AtomOrBottom {
        if self.arity == 0 {
            self.entries.get(&Vec::new()).copied()
        } else {
            None
        }
    }

    /// `{args ↦ value} f`. Overwrites a defined point.
    pub fn extend(&self, args: &[AtomOrBottom], value: AtomOrBottom) -> Result<AFunction, StructureError> {
        let mut out = self.clone();
        out.set(args, value)?;
        Ok(out)
    }

    pub(crate) fn set(&mut self, args: &[AtomOrBottom], value: AtomOrBottom) -> Result<(), StructureError> {
        assert_eq!(args.len(), self.arity, "point arity");
        let key: Option<Vec<Atom>> = args.iter().copied().collect();
        match (key, value) {
            (Some(key), Some(v)) => {
                self.entries.insert(key, v);
                Ok(())
            }
            _ => Err(StructureError::Strictness("extend".into())),
        }
    }

    pub(crate) fn insert(&mut self, args: Vec<Atom>, value: Atom) {
        self.entries.insert(args, value);
    }

    pub(crate) fn remove(&mut self, args: &[Atom]) -> Option<Atom> {
        self.entries.remove(args)
    }

    pub(crate) fn retain(&mut self, mut keep: impl FnMut(&[Atom], Atom) -> bool) {
        self.entries.retain(|k, v| keep(k, *v));
    }

    pub fn scope(&self) -> BTreeSet<Atom> {
        let mut s = BTreeSet::new();
        for (k, v) in &self.entries {
            s.extend(k.iter().copied());
            s.insert(*v);
        }
        s
    }

    /// Rename every atom through `h`. Atoms outside `h` are kept.
    pub fn map_atoms(&self, h: impl Fn(Atom) -> Atom) -> AFunction {
        AFunction {
            arity: self.arity,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.iter().map(|a| h(*a)).collect(), h(*v)))
                .collect(),
        }
    }
}

/// Ordered list of identifiers with arities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Vocabulary {
    items: Vec<(String, usize)>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary::default()
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, usize)>) -> Result<Self, StructureError> {
        let mut v = Vocabulary::new();
        for (n, k) in pairs {
            v.push(n.into(), k)?;
        }
        Ok(v)
    }

    pub fn push(&mut self, name: String, arity: usize) -> Result<(), StructureError> {
        if self.arity(&name).is_some() {
            return Err(StructureError::DuplicateIdentifier(name));
        }
        self.items.push((name, arity));
        Ok(())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.items.iter().find(|(n, _)| n == name).map(|(_, k)| *k)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arity(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.items.iter().map(|(n, k)| (n.as_str(), *k))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.items.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// An assignment of finite partial functions to the identifiers of a vocabulary.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Structure {
    vocab: Vocabulary,
    funcs: BTreeMap<String, AFunction>,
}

impl Structure {
    /// Every identifier of `vocab` mapped to the empty function.
    pub fn empty(vocab: Vocabulary) -> Self {
        let funcs = vocab.iter().map(|(n, k)| (n.to_string(), AFunction::empty(k))).collect();
        Structure { vocab, funcs }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn function(&self, name: &str) -> Option<&AFunction> {
        self.funcs.get(name)
    }

    /// Component `name`, or an error if absent.
    pub fn component(&self, name: &str) -> Result<&AFunction, StructureError> {
        self.funcs
            .get(name)
            .ok_or_else(|| StructureError::UnknownIdentifier(name.to_string()))
    }

    pub fn token(&self, name: &str) -> AtomOrBottom {
        self.funcs.get(name).and_then(AFunction::as_token)
    }

    /// Adjoin `name` with the empty function if absent; otherwise check the arity.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<(), StructureError> {
        match self.vocab.arity(name) {
            Some(k) if k == arity => Ok(()),
            Some(k) => Err(StructureError::ArityMismatch { name: name.to_string(), expected: k, found: arity }),
            None => {
                self.vocab.push(name.to_string(), arity)?;
                self.funcs.insert(name.to_string(), AFunction::empty(arity));
                Ok(())
            }
        }
    }

    /// Replace (or adjoin) component `name`.
    pub fn set_function(&mut self, name: &str, f: AFunction) -> Result<(), StructureError> {
        self.declare(name, f.arity())?;
        self.funcs.insert(name.to_string(), f);
        Ok(())
    }

    pub(crate) fn function_mut(&mut self, name: &str) -> Option<&mut AFunction> {
        self.funcs.get_mut(name)
    }

    pub fn set_token(&mut self, name: &str, value: AtomOrBottom) -> Result<(), StructureError> {
        self.set_function(name, AFunction::token(value))
    }

    /// Components in vocabulary order.
    pub fn components(&self) -> impl Iterator<Item = (&str, &AFunction)> + '_ {
        self.vocab.names().map(move |n| (n, &self.funcs[n]))
    }

    pub fn scope(&self) -> BTreeSet<Atom> {
        let mut s = BTreeSet::new();
        for f in self.funcs.values() {
            s.extend(f.scope());
        }
        s
    }

    pub fn entry_count(&self) -> usize {
        self.funcs.values().map(AFunction::len).sum()
    }

    pub fn max_atom(&self) -> Option<Atom> {
        self.scope().iter().next_back().copied()
    }

    /// The reduct to the listed identifiers (absent ones are skipped).
    pub fn reduct<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Structure {
        let mut out = Structure::default();
        for n in names {
            if let Some(f) = self.funcs.get(n) {
                out.set_function(n, f.clone()).expect("fresh reduct");
            }
        }
        out
    }

    /// Copy of this structure with identifiers renamed through `rename`.
    pub fn renamed(&self, rename: impl Fn(&str) -> String) -> Structure {
        let mut out = Structure::default();
        for (n, f) in self.components() {
            out.set_function(&rename(n), f.clone()).expect("renaming must stay injective");
        }
        out
    }

    /// Disjoint union over disjoint vocabularies. Atoms are shared as-is.
    pub fn union(&self, other: &Structure) -> Result<Structure, StructureError> {
        let mut out = self.clone();
        for (n, f) in other.components() {
            if out.vocab.contains(n) {
                return Err(StructureError::NameClash(n.to_string()));
            }
            out.set_function(n, f.clone())?;
        }
        Ok(out)
    }

    pub fn map_atoms(&self, h: impl Fn(Atom) -> Atom) -> Structure {
        Structure {
            vocab: self.vocab.clone(),
            funcs: self.funcs.iter().map(|(n, f)| (n.clone(), f.map_atoms(&h))).collect(),
        }
    }

    /// Shift every atom id by `offset`.
    pub fn shifted(&self, offset: u32) -> Structure {
        self.map_atoms(|a| Atom(a.0 + offset))
    }

    /// Atoms reachable as values of terms: least fixpoint from the tokens.
    pub fn accessible_atoms(&self) -> BTreeSet<Atom> {
        let mut reached: BTreeSet<Atom> = BTreeSet::new();
        loop {
            let before = reached.len();
            for f in self.funcs.values() {
                for (args, v) in f.entries() {
                    if args.iter().all(|a| reached.contains(a)) {
                        reached.insert(v);
                    }
                }
            }
            if reached.len() == before {
                return reached;
            }
        }
    }

    pub fn is_accessible(&self) -> bool {
        self.accessible_atoms().len() == self.scope().len()
    }

    /// Accessible and every scope atom is produced by exactly one entry.
    /// For accessible structures this is the same as each atom being the
    /// value of a unique term.
    pub fn is_free(&self) -> bool {
        if !self.is_accessible() {
            return false;
        }
        let mut producers: BTreeMap<Atom, usize> = BTreeMap::new();
        for f in self.funcs.values() {
            for (_, v) in f.entries() {
                *producers.entry(v).or_default() += 1;
            }
        }
        producers.values().all(|&n| n == 1)
    }
}

/// `{ū ↦ v} f`.
pub fn extend_function(f: &AFunction, args: &[AtomOrBottom], value: AtomOrBottom) -> Result<AFunction, StructureError> {
    f.extend(args, value)
}

/// Hands out atoms that lie outside every structure it has observed.
#[derive(Clone, Debug, Default)]
pub struct AtomAllocator {
    next: u32,
}

impl AtomAllocator {
    pub fn new() -> Self {
        AtomAllocator::default()
    }

    /// Start allocating at `offset` (or later, once structures are observed).
    pub fn with_offset(offset: u32) -> Self {
        AtomAllocator { next: offset }
    }

    pub fn observe(&mut self, s: &Structure) {
        if let Some(m) = s.max_atom() {
            self.next = self.next.max(m.0 + 1);
        }
    }

    pub fn observe_atom(&mut self, a: Atom) {
        self.next = self.next.max(a.0 + 1);
    }

    pub fn fresh(&mut self) -> Atom {
        let a = Atom(self.next);
        self.next += 1;
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: u32) -> Atom {
        Atom(n)
    }

    #[test]
    fn strict_lookup() {
        let f = AFunction::from_entries(2, [(vec![a(0), a(1)], a(2))]);
        assert_eq!(f.apply(&[Some(a(0)), Some(a(1))]), Some(a(2)));
        assert_eq!(f.apply(&[None, Some(a(1))]), None);
        assert_eq!(f.apply(&[Some(a(1)), Some(a(1))]), None);
    }

    #[test]
    fn extend_then_lookup() {
        let f = AFunction::empty(1);
        let g = extend_function(&f, &[Some(a(0))], Some(a(1))).unwrap();
        assert_eq!(g.get(&[a(0)]), Some(a(1)));
        assert_eq!(g.get(&[a(3)]), f.get(&[a(3)]));
        assert!(extend_function(&f, &[None], Some(a(1))).is_err());
        assert!(extend_function(&f, &[Some(a(0))], None).is_err());
        // defined points are overwritten
        let h = extend_function(&g, &[Some(a(0))], Some(a(7))).unwrap();
        assert_eq!(h.get(&[a(0)]), Some(a(7)));
        assert_eq!(h.len(), 1);
    }

    #[test]
    fn scopes() {
        assert!(Structure::default().scope().is_empty());
        let mut s = Structure::default();
        s.set_function("f", AFunction::from_entries(1, [(vec![a(5)], a(5))])).unwrap();
        assert_eq!(s.scope().into_iter().collect::<Vec<_>>(), vec![a(5)]);
    }

    #[test]
    fn tokenless_structure_is_not_accessible() {
        let mut s = Structure::default();
        s.set_function("f", AFunction::from_entries(1, [(vec![a(0)], a(1))])).unwrap();
        assert!(!s.is_accessible());
        assert!(!s.is_free());
    }

    #[test]
    fn diamond_is_accessible_but_not_free() {
        // z -f-> a1 -g-> a3, z -g-> a2 -f-> a3 ; f, g injective
        let mut s = Structure::default();
        s.set_token("z", Some(a(0))).unwrap();
        s.set_function("f", AFunction::from_entries(1, [(vec![a(0)], a(1)), (vec![a(2)], a(3))])).unwrap();
        s.set_function("g", AFunction::from_entries(1, [(vec![a(0)], a(2)), (vec![a(1)], a(3))])).unwrap();
        assert!(s.is_accessible());
        assert!(!s.is_free());
    }

    #[test]
    fn union_rejects_clash() {
        let s = numeral_structure(1);
        assert!(matches!(s.union(&s), Err(StructureError::NameClash(_))));
    }

    #[test]
    fn allocator_stays_outside_scope() {
        let s = numeral_structure(3);
        let mut alloc = AtomAllocator::new();
        alloc.observe(&s);
        let x = alloc.fresh();
        assert!(!s.scope().contains(&x));
        assert_ne!(alloc.fresh(), x);
    }
}
