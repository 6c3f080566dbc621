use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Atom, Structure, StructureError};

/// A bijection between the scopes of two structures.
pub type AtomMap = BTreeMap<Atom, Atom>;

/// Search for a scope bijection commuting with every component.
///
/// Atoms are first partitioned by an occurrence signature (how often they
/// appear at each position of each component); the backtracking search only
/// pairs atoms with equal signatures and propagates forced images along
/// entries whose inputs are already mapped.
pub fn isomorphic(a: &Structure, b: &Structure) -> Result<Option<AtomMap>, StructureError> {
    let va: BTreeSet<_> = a.vocabulary().iter().collect();
    let vb: BTreeSet<_> = b.vocabulary().iter().collect();
    if va != vb {
        return Err(StructureError::VocabularyMismatch);
    }
    for (n, f) in a.components() {
        if f.len() != b.component(n)?.len() {
            return Ok(None);
        }
    }
    let sa = a.scope();
    let sb = b.scope();
    if sa.len() != sb.len() {
        return Ok(None);
    }
    let siga = signatures(a);
    let sigb = signatures(b);
    let mut ca: Vec<_> = siga.values().cloned().collect();
    let mut cb: Vec<_> = sigb.values().cloned().collect();
    ca.sort();
    cb.sort();
    if ca != cb {
        return Ok(None);
    }

    let order = search_order(a);
    let mut st = Search { a, b, siga: &siga, sigb: &sigb, fwd: HashMap::new(), used: BTreeSet::new() };
    if st.extend(&order, 0) {
        Ok(Some(st.fwd.into_iter().collect()))
    } else {
        Ok(None)
    }
}

type Signature = Vec<usize>;

fn signatures(s: &Structure) -> HashMap<Atom, Signature> {
    let width: usize = s.components().map(|(_, f)| f.arity() + 1).sum();
    let mut sig: HashMap<Atom, Signature> = HashMap::new();
    let mut base = 0;
    for (_, f) in s.components() {
        for (args, v) in f.entries() {
            for (i, x) in args.iter().enumerate() {
                sig.entry(*x).or_insert_with(|| vec![0; width])[base + i] += 1;
            }
            sig.entry(v).or_insert_with(|| vec![0; width])[base + f.arity()] += 1;
        }
        base += f.arity() + 1;
    }
    sig
}

/// Tokens first, then atoms in the order entries reach them.
fn search_order(s: &Structure) -> Vec<Atom> {
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    for (_, f) in s.components() {
        if let Some(t) = f.as_token() {
            if seen.insert(t) {
                order.push(t);
            }
        }
    }
    let mut i = 0;
    loop {
        while i < order.len() {
            let x = order[i];
            i += 1;
            for (_, f) in s.components() {
                for (args, v) in f.entries() {
                    if args.contains(&x) {
                        for y in args.iter().copied().chain(std::iter::once(v)) {
                            if seen.insert(y) {
                                order.push(y);
                            }
                        }
                    }
                }
            }
        }
        match s.scope().into_iter().find(|x| !seen.contains(x)) {
            Some(x) => {
                seen.insert(x);
                order.push(x);
            }
            None => return order,
        }
    }
}

struct Search<'a> {
    a: &'a Structure,
    b: &'a Structure,
    siga: &'a HashMap<Atom, Signature>,
    sigb: &'a HashMap<Atom, Signature>,
    fwd: HashMap<Atom, Atom>,
    used: BTreeSet<Atom>,
}

impl Search<'_> {
    fn extend(&mut self, order: &[Atom], from: usize) -> bool {
        let Some(pos) = (from..order.len()).find(|&i| !self.fwd.contains_key(&order[i])) else {
            return self.commutes();
        };
        let x = order[pos];
        let candidates: Vec<Atom> = self
            .sigb
            .iter()
            .filter(|(y, sig)| !self.used.contains(*y) && **sig == self.siga[&x])
            .map(|(y, _)| *y)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for y in candidates {
            let snapshot: Vec<Atom> = self.fwd.keys().copied().collect();
            if self.assign(x, y) && self.propagate() && self.extend(order, pos + 1) {
                return true;
            }
            self.fwd.retain(|k, _| snapshot.contains(k));
            self.used = self.fwd.values().copied().collect();
        }
        false
    }

    fn assign(&mut self, x: Atom, y: Atom) -> bool {
        match self.fwd.get(&x) {
            Some(&z) => z == y,
            None => {
                if self.used.contains(&y) || self.siga.get(&x) != self.sigb.get(&y) {
                    return false;
                }
                self.fwd.insert(x, y);
                self.used.insert(y);
                true
            }
        }
    }

    /// Follow entries whose inputs are mapped; tokens are mapped first.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for (n, f) in self.a.components() {
                let g = self.b.function(n).expect("same vocabulary");
                for (args, v) in f.entries() {
                    let Some(img): Option<Vec<Atom>> = args.iter().map(|x| self.fwd.get(x).copied()).collect() else {
                        continue;
                    };
                    let Some(w) = g.get(&img) else { return false };
                    let known = self.fwd.contains_key(&v);
                    if !self.assign(v, w) {
                        return false;
                    }
                    changed |= !known;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn commutes(&self) -> bool {
        self.a.components().all(|(n, f)| {
            let g = self.b.function(n).expect("same vocabulary");
            f.entries().all(|(args, v)| {
                let img: Vec<Atom> = args.iter().map(|x| self.fwd[x]).collect();
                g.get(&img) == Some(self.fwd[&v])
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{numeral_structure, string_structure, AFunction};

    #[test]
    fn reflexive_identity() {
        let s = string_structure("0110").unwrap();
        let h = isomorphic(&s, &s).unwrap().unwrap();
        assert!(h.iter().all(|(x, y)| x == y));
    }

    #[test]
    fn shifted_numerals() {
        let a = numeral_structure(2);
        let b = numeral_structure(2).map_atoms(|x| Atom(10 - x.0));
        assert!(isomorphic(&a, &b).unwrap().is_some());
        assert!(isomorphic(&a, &numeral_structure(1)).unwrap().is_none());
    }

    #[test]
    fn vocabulary_mismatch() {
        assert!(isomorphic(&numeral_structure(1), &string_structure("0").unwrap()).is_err());
    }

    #[test]
    fn tokenless_cycles() {
        // a 3-cycle against a 3-chain with the same counts of entries
        let mut c = Structure::default();
        c.set_function("f", AFunction::from_entries(1, [(vec![Atom(0)], Atom(1)), (vec![Atom(1)], Atom(2)), (vec![Atom(2)], Atom(0))])).unwrap();
        let mut d = Structure::default();
        d.set_function("f", AFunction::from_entries(1, [(vec![Atom(5)], Atom(7)), (vec![Atom(7)], Atom(6)), (vec![Atom(6)], Atom(5))])).unwrap();
        assert!(isomorphic(&c, &d).unwrap().is_some());
        let mut e = Structure::default();
        e.set_function("f", AFunction::from_entries(1, [(vec![Atom(0)], Atom(1)), (vec![Atom(1)], Atom(0)), (vec![Atom(2)], Atom(2))])).unwrap();
        assert!(isomorphic(&c, &e).unwrap().is_none());
    }
}
