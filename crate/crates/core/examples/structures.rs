//! String and numeral structures, the text format, and isomorphism.

use finstruct::structures::{isomorphic, numeral_structure, parse_fstruct, print_fstruct, string_structure};

fn main() {
    let w = string_structure("011").unwrap();
    println!("T(011): {} atoms, accessible: {}, free: {}", w.scope().len(), w.is_accessible(), w.is_free());
    print!("{}", print_fstruct(&w));

    let three = numeral_structure(3);
    let text = print_fstruct(&three);
    let back = parse_fstruct(&text).unwrap();
    assert_eq!(back, three);

    let moved = three.shifted(10);
    let h = isomorphic(&three, &moved).unwrap().expect("same shape");
    println!("T(sss z) ≅ its shift by 10 via {h:?}");
    assert!(isomorphic(&three, &numeral_structure(2)).unwrap().is_none());
}
