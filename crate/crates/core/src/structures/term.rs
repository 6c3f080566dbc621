use std::collections::HashMap;
use std::fmt;

use super::{AFunction, Atom, AtomOrBottom, Structure, StructureError};

/// `ω`, or an identifier applied to as many sub-terms as its arity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Omega,
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn app1(name: impl Into<String>, arg: Term) -> Term {
        Term::App(name.into(), vec![arg])
    }

    /// Standard terms contain no `ω`.
    pub fn is_standard(&self) -> bool {
        match self {
            Term::Omega => false,
            Term::App(_, args) => args.iter().all(Term::is_standard),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Omega => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Omega => false,
            Term::App(f, args) => f == name || args.iter().any(|a| a.mentions(name)),
        }
    }

    /// Every `(identifier, arity)` use, in first-occurrence order (post-order).
    pub fn identifiers(&self, out: &mut Vec<(String, usize)>) {
        if let Term::App(f, args) = self {
            for a in args {
                a.identifiers(out);
            }
            if !out.iter().any(|(n, _)| n == f) {
                out.push((f.clone(), args.len()));
            }
        }
    }

    pub fn rename(&self, map: &dyn Fn(&str) -> Option<String>) -> Term {
        match self {
            Term::Omega => Term::Omega,
            Term::App(f, args) => Term::App(
                map(f).unwrap_or_else(|| f.clone()),
                args.iter().map(|a| a.rename(map)).collect(),
            ),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Omega => write!(f, "omega"),
            Term::App(name, args) if args.is_empty() => write!(f, "{name}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The value of `t` in `s`.
pub fn eval_term(s: &Structure, t: &Term) -> Result<AtomOrBottom, StructureError> {
    match t {
        Term::Omega => Ok(None),
        Term::App(name, args) => {
            let f = s.component(name)?;
            if f.arity() != args.len() {
                return Err(StructureError::ArityMismatch {
                    name: name.clone(),
                    expected: f.arity(),
                    found: args.len(),
                });
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_term(s, a)?);
            }
            Ok(f.apply(&vals))
        }
    }
}

/// The free structure whose atoms are the sub-terms of `q`, numbered in
/// post-order of first occurrence. With `root`, that token denotes `q`.
pub fn term_structure(q: &Term, root: Option<&str>) -> Result<Structure, StructureError> {
    if !q.is_standard() {
        return Err(StructureError::Strictness("term_structure".into()));
    }
    let mut ids = Vec::new();
    q.identifiers(&mut ids);
    let mut s = Structure::default();
    for (n, k) in &ids {
        s.declare(n, *k)?;
    }
    let mut atoms: HashMap<Term, Atom> = HashMap::new();
    let top = build(q, &mut s, &mut atoms)?;
    if let Some(r) = root {
        s.set_token(r, Some(top))?;
    }
    Ok(s)
}

fn build(t: &Term, s: &mut Structure, atoms: &mut HashMap<Term, Atom>) -> Result<Atom, StructureError> {
    let Term::App(name, args) = t else { unreachable!("standard term") };
    let mut vals = Vec::with_capacity(args.len());
    for a in args {
        vals.push(build(a, s, atoms)?);
    }
    if let Some(a) = atoms.get(t) {
        return Ok(*a);
    }
    let a = Atom(atoms.len() as u32);
    atoms.insert(t.clone(), a);
    let f = s.function_mut(name).expect("declared");
    if f.arity() != vals.len() {
        return Err(StructureError::ArityMismatch { name: name.clone(), expected: f.arity(), found: vals.len() });
    }
    f.insert(vals, a);
    Ok(a)
}

/// `T(w)` for a string over `{0,1}`: token `e` on the leftmost atom, one
/// unary component per symbol.
pub fn string_structure(w: &str) -> Result<Structure, StructureError> {
    string_structure_over(w, &["0", "1"])
}

/// `T(w)` over an explicit alphabet (every symbol gets a component).
pub fn string_structure_over(w: &str, alphabet: &[&str]) -> Result<Structure, StructureError> {
    let symbols: Vec<String> = w.chars().map(|c| c.to_string()).collect();
    string_structure_symbols(&symbols, alphabet)
}

pub(crate) fn string_structure_symbols<S: AsRef<str>>(w: &[S], alphabet: &[&str]) -> Result<Structure, StructureError> {
    let mut s = Structure::default();
    s.declare("e", 0)?;
    for g in alphabet {
        s.declare(g, 1)?;
    }
    s.set_token("e", Some(Atom(0)))?;
    for (i, g) in w.iter().enumerate() {
        let g = g.as_ref();
        let f = s.function_mut(g).ok_or_else(|| StructureError::UnknownIdentifier(g.to_string()))?;
        f.insert(vec![Atom(i as u32)], Atom(i as u32 + 1));
    }
    Ok(s)
}

/// `T(sⁿz)`: token `z` and an `n`-step injective chain `s`.
pub fn numeral_structure(n: usize) -> Structure {
    numeral_structure_named(n, "z", "s")
}

pub fn numeral_structure_named(n: usize, z: &str, s: &str) -> Structure {
    let mut out = Structure::default();
    out.set_token(z, Some(Atom(0))).expect("fresh");
    out.set_function(
        s,
        AFunction::from_entries(1, (0..n as u32).map(|i| (vec![Atom(i)], Atom(i + 1)))),
    )
    .expect("fresh");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ssz(n: usize) -> Term {
        let mut t = Term::var("z");
        for _ in 0..n {
            t = Term::app1("s", t);
        }
        t
    }

    #[test]
    fn omega_is_bottom() {
        let s = string_structure("011").unwrap();
        assert_eq!(eval_term(&s, &Term::Omega).unwrap(), None);
        assert_eq!(eval_term(&s, &Term::app1("0", Term::Omega)).unwrap(), None);
    }

    #[test]
    fn string_011() {
        let s = string_structure("011").unwrap();
        assert_eq!(eval_term(&s, &Term::app1("0", Term::var("e"))).unwrap(), Some(Atom(1)));
        assert_eq!(s.scope().len(), 4);
        assert_eq!(s.component("0").unwrap().len(), 1);
        assert_eq!(s.component("1").unwrap().len(), 2);
    }

    #[test]
    fn unknown_identifier_and_arity() {
        let s = numeral_structure(1);
        assert!(matches!(eval_term(&s, &Term::var("q")), Err(StructureError::UnknownIdentifier(_))));
        assert!(matches!(
            eval_term(&s, &Term::app("s", vec![Term::var("z"), Term::var("z")])),
            Err(StructureError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn term_structures() {
        let t = term_structure(&ssz(2), None).unwrap();
        assert_eq!(t.scope().len(), 3);
        assert_eq!(t, numeral_structure(2));
        let fzz = term_structure(&Term::app("f", vec![Term::var("z"), Term::var("z")]), None).unwrap();
        assert_eq!(fzz.scope().len(), 2);
        let z = term_structure(&Term::var("z"), Some("root")).unwrap();
        assert_eq!(z.scope().len(), 1);
        assert_eq!(z.token("root"), z.token("z"));
        assert!(term_structure(&Term::app1("s", Term::Omega), None).is_err());
    }

    /// Every standard term up to depth 5 over {z⁰, s¹} and up to depth 3 over
    /// {z⁰, f²} gives a free, accessible structure.
    #[test]
    fn term_structures_are_free() {
        fn terms(depth: usize, binary: bool) -> Vec<Term> {
            if depth == 0 {
                return vec![Term::var("z")];
            }
            let smaller = terms(depth - 1, binary);
            let mut out = smaller.clone();
            for a in &smaller {
                if binary {
                    for b in &smaller {
                        out.push(Term::app("f", vec![a.clone(), b.clone()]));
                    }
                } else {
                    out.push(Term::app1("s", a.clone()));
                }
            }
            out.sort();
            out.dedup();
            out
        }
        for t in terms(5, false).into_iter().chain(terms(3, true)) {
            let s = term_structure(&t, None).unwrap();
            assert!(s.is_accessible(), "{t}");
            assert!(s.is_free(), "{t}");
        }
    }
}
