//! Parse formulas, inspect them, and round-trip them through the renderer.
//!
//! ```bash
//! cargo run --example parse_and_inspect
//! ```

use sortlog::parser::{parse_formula, render_formula};
use sortlog::syntax::{
    display_sort_set, free_individual_vars, free_relation_vars, free_sorts, quantifier_rank,
    SortId, Vocabulary,
};

fn main() {
    let voc = Vocabulary::from_pairs([
        ("Mult", vec![SortId(0), SortId(0), SortId(0)]),
        ("One", vec![SortId(0)]),
    ])
    .expect("no duplicate symbols");

    let samples = [
        "A x:0. x = x",
        "x:0 = u:1",
        "E x:0. E e:0. (One(e) & Mult(x, x, e))",
        "E2 X:(0). E x:0. E y:0. (X(x) & ~X(y))",
        "Es (Z:(1)). A u:1. (Z(u) <-> u = u)",
        "A x:0. P:(0)(x) -> E y:0. Mult(x, y, y)",
    ];
    for text in samples {
        let phi = parse_formula(text, &voc).expect("parses");
        println!("input:    {}", text);
        println!("rendered: {}", render_formula(&phi));
        let ind: Vec<String> = free_individual_vars(&phi).iter().map(ToString::to_string).collect();
        let rel: Vec<String> = free_relation_vars(&phi).iter().map(ToString::to_string).collect();
        println!(
            "free vars: [{}] [{}]   free sorts: {}   rank: {}",
            ind.join(", "),
            rel.join(", "),
            display_sort_set(&free_sorts(&phi)),
            quantifier_rank(&phi),
        );
        // The renderer is exact: reparsing gives the identical tree.
        let again = parse_formula(&render_formula(&phi), &voc).expect("reparses");
        assert_eq!(again, phi);
        println!();
    }

    // Errors carry positions and a kind.
    let bad = "Es (X:(5)). X(y:5) | Q:(5)(y:5)";
    match parse_formula(bad, &voc) {
        Err(e) => println!("as expected, `{}` fails: {}", bad, e),
        Ok(_) => unreachable!("the new sort condition forbids this"),
    }
}
