//! Instances of the axiom schemas, checked in a small structure.

use finstruct::logic::axioms::{axiom_instance, Schema};
use finstruct::logic::{eval_bounded, parse_formula, EvalConfig};
use finstruct::structures::{string_structure, Term};

fn main() {
    let s = string_structure("011").unwrap();
    let cfg = EvalConfig::universe(3);
    let tautology = parse_formula("A u. f(u) = omega | f(u) != omega").unwrap();
    let schemas = [
        ("1", Schema::Strictness),
        ("1", Schema::Infinity),
        ("1", Schema::Empty),
        ("1", Schema::Extension),
        ("1", Schema::ExplicitDefinition(Term::app1("1", Term::var("u1")))),
        ("f", Schema::FInduction(tautology)),
    ];
    for (f, schema) in schemas {
        let inst = axiom_instance(&schema, f, 1).unwrap();
        println!("{schema:?}: {}", eval_bounded(&s, &inst, &cfg).unwrap());
    }
}
