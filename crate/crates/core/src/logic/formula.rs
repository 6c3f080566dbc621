use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::structures::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// A bound variable: arity 0 is atomic, arity ≥ 1 functional.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub arity: usize,
}

impl Var {
    pub fn new(name: impl Into<String>, arity: usize) -> Var {
        Var { name: name.into(), arity }
    }

    pub fn atomic(name: impl Into<String>) -> Var {
        Var::new(name, 0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quantifier, Var, Box<Formula>),
}

impl Formula {
    pub fn eq(t: Term, q: Term) -> Formula {
        Formula::Eq(t, q)
    }

    pub fn neq(t: Term, q: Term) -> Formula {
        Formula::Eq(t, q).not()
    }

    /// `t ≐ ω`
    pub fn undefined(t: Term) -> Formula {
        Formula::Eq(t, Term::Omega)
    }

    /// `t ≉ ω`
    pub fn defined(t: Term) -> Formula {
        Formula::neq(t, Term::Omega)
    }

    /// `ω ≐ ω`, the formula used for an empty conjunction.
    pub fn top() -> Formula {
        Formula::Eq(Term::Omega, Term::Omega)
    }

    pub fn bottom() -> Formula {
        Formula::top().not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    /// Left-nested conjunction; `top()` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction; `bottom()` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::bottom)
    }

    pub fn forall(var: Var, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Forall, var, Box::new(body))
    }

    pub fn exists(var: Var, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Exists, var, Box::new(body))
    }

    pub fn forall_all(vars: impl IntoIterator<Item = Var>, body: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |b, v| Formula::forall(v, b))
    }

    pub fn exists_all(vars: impl IntoIterator<Item = Var>, body: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |b, v| Formula::exists(v, b))
    }

    pub fn is_first_order(&self) -> bool {
        match self {
            Formula::Eq(..) => true,
            Formula::Not(a) => a.is_first_order(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.is_first_order() && b.is_first_order(),
            Formula::Quant(_, v, b) => v.arity == 0 && b.is_first_order(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Eq(..) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Quant(..) => false,
        }
    }

    /// Number of atomic quantifier occurrences.
    pub fn atomic_quantifier_count(&self) -> usize {
        self.fold_quantifiers(&mut |v| usize::from(v.arity == 0))
    }

    /// `(count, max arity)` of functional quantifier occurrences.
    pub fn functional_quantifiers(&self) -> (usize, usize) {
        let mut max = 0;
        let n = self.fold_quantifiers(&mut |v| {
            max = max.max(v.arity);
            usize::from(v.arity > 0)
        });
        (n, max)
    }

    fn fold_quantifiers(&self, f: &mut dyn FnMut(&Var) -> usize) -> usize {
        match self {
            Formula::Eq(..) => 0,
            Formula::Not(a) => a.fold_quantifiers(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.fold_quantifiers(f) + b.fold_quantifiers(f)
            }
            Formula::Quant(_, v, b) => f(v) + b.fold_quantifiers(f),
        }
    }

    /// Free variables with the arity of their first use.
    pub fn free_vars(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeMap<String, usize>) {
        match self {
            Formula::Eq(t, q) => {
                term_free(t, bound, out);
                term_free(q, bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, v, b) => {
                bound.push(v.name.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Rename free occurrences. Targets must not be captured by binders in
    /// `self`; callers use fresh names.
    pub fn rename_free(&self, map: &HashMap<String, String>) -> Formula {
        match self {
            Formula::Eq(t, q) => Formula::Eq(rename_term(t, map), rename_term(q, map)),
            Formula::Not(a) => a.rename_free(map).not(),
            Formula::And(a, b) => a.rename_free(map).and(b.rename_free(map)),
            Formula::Or(a, b) => a.rename_free(map).or(b.rename_free(map)),
            Formula::Implies(a, b) => a.rename_free(map).implies(b.rename_free(map)),
            Formula::Quant(q, v, b) => {
                debug_assert!(!map.values().any(|n| n == &v.name), "capture of {}", v.name);
                if map.contains_key(&v.name) {
                    let mut inner = map.clone();
                    inner.remove(&v.name);
                    Formula::Quant(*q, v.clone(), Box::new(b.rename_free(&inner)))
                } else {
                    Formula::Quant(*q, v.clone(), Box::new(b.rename_free(map)))
                }
            }
        }
    }

    /// Rename every binder to `name(var)`, adjusting bound occurrences.
    /// Free names are kept; new names must not clash with them.
    pub fn rename_bound(&self, name: &mut dyn FnMut(&Var) -> String) -> Formula {
        fn go(f: &Formula, map: &HashMap<String, String>, name: &mut dyn FnMut(&Var) -> String) -> Formula {
            match f {
                Formula::Eq(t, q) => Formula::Eq(rename_term(t, map), rename_term(q, map)),
                Formula::Not(a) => go(a, map, name).not(),
                Formula::And(a, b) => go(a, map, name).and(go(b, map, name)),
                Formula::Or(a, b) => go(a, map, name).or(go(b, map, name)),
                Formula::Implies(a, b) => go(a, map, name).implies(go(b, map, name)),
                Formula::Quant(q, v, b) => {
                    let n = name(v);
                    let mut inner = map.clone();
                    inner.insert(v.name.clone(), n.clone());
                    Formula::Quant(*q, Var::new(n, v.arity), Box::new(go(b, &inner, name)))
                }
            }
        }
        go(self, &HashMap::new(), name)
    }

    /// Replace free occurrences of the atomic variable `name` by `t`. Names
    /// in `t` must not be bound in `self`.
    pub fn substitute(&self, name: &str, t: &Term) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::Eq(subst_term(a, name, t), subst_term(b, name, t)),
            Formula::Not(a) => a.substitute(name, t).not(),
            Formula::And(a, b) => a.substitute(name, t).and(b.substitute(name, t)),
            Formula::Or(a, b) => a.substitute(name, t).or(b.substitute(name, t)),
            Formula::Implies(a, b) => a.substitute(name, t).implies(b.substitute(name, t)),
            Formula::Quant(q, v, b) if v.name == name => Formula::Quant(*q, v.clone(), b.clone()),
            Formula::Quant(q, v, b) => {
                debug_assert!(!t.mentions(&v.name), "capture of {}", v.name);
                Formula::Quant(*q, v.clone(), Box::new(b.substitute(name, t)))
            }
        }
    }

    /// Flatten nested conjunctions.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            if let Formula::And(a, b) = f {
                walk(a, out);
                walk(b, out);
            } else {
                out.push(f);
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(..) => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::Quant(_, _, b) => 1 + b.size(),
        }
    }
}

fn term_free(t: &Term, bound: &[String], out: &mut BTreeMap<String, usize>) {
    if let Term::App(f, args) = t {
        if !bound.iter().any(|b| b == f) {
            out.entry(f.clone()).or_insert(args.len());
        }
        for a in args {
            term_free(a, bound, out);
        }
    }
}

fn subst_term(s: &Term, name: &str, t: &Term) -> Term {
    match s {
        Term::Omega => Term::Omega,
        Term::App(f, args) if f == name && args.is_empty() => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| subst_term(a, name, t)).collect()),
    }
}

fn rename_term(t: &Term, map: &HashMap<String, String>) -> Term {
    t.rename(&|n| map.get(n).cloned())
}

// Printing. Precedence: 1 `->` (right), 2 `|`, 3 `&`, 4 prefix and atoms.
// Quantifiers extend as far right as possible, so they are bare only where
// nothing can follow them.

impl Formula {
    fn write(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        match self {
            Formula::Eq(t, q) => write!(f, "{t} = {q}"),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Eq(t, q) => write!(f, "{t} != {q}"),
                other => {
                    write!(f, "!")?;
                    other.write(f, 4)
                }
            },
            Formula::And(a, b) => self.binary(f, ctx, 3, "&", a, 3, b, 4),
            Formula::Or(a, b) => self.binary(f, ctx, 2, "|", a, 2, b, 3),
            Formula::Implies(a, b) => self.binary(f, ctx, 1, "->", a, 2, b, 1),
            Formula::Quant(q, v, body) => {
                let paren = ctx > 1;
                if paren {
                    write!(f, "(")?;
                }
                let k = if *q == Quantifier::Forall { "A" } else { "E" };
                write!(f, "{k} {}", v.name)?;
                if v.arity > 0 {
                    write!(f, "^{}", v.arity)?;
                }
                write!(f, ". ")?;
                body.write(f, 1)?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn binary(
        &self,
        f: &mut fmt::Formatter<'_>,
        ctx: u8,
        prec: u8,
        op: &str,
        a: &Formula,
        pa: u8,
        b: &Formula,
        pb: u8,
    ) -> fmt::Result {
        let paren = ctx > prec;
        if paren {
            write!(f, "(")?;
        }
        a.write(f, pa)?;
        write!(f, " {op} ")?;
        b.write(f, if paren { pb.max(1) } else { pb.max(ctx) })?;
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
