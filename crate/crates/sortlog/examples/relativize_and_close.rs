//! Relativization and universal sort closure.
//!
//! Relativizing a sentence to a fresh unary relation variable and
//! existentially quantifying that variable says "some subset of the domain
//! carries a model" — which is only true in structures large enough to
//! contain one. Closing the sentence with a universal new-sort block
//! instead produces a formula with *no free sorts*, whose verdict is the
//! same in every structure: it expresses validity itself.
//!
//! ```bash
//! cargo run --release --example relativize_and_close
//! ```

use sortlog::model::{Budget, Structure};
use sortlog::parser::{parse_formula, render_formula};
use sortlog::semantics::full::eval_sentence;
use sortlog::syntax::{
    free_sorts, relativize_to_var, sort_closure, Formula, RelationVar, SortId, Vocabulary,
};

fn main() {
    let voc = Vocabulary::from_pairs([("R", vec![SortId(0), SortId(0)])]).unwrap();

    // "R is a strict linear order with at least two points" (fragment).
    let phi = parse_formula(
        "(A x:0. ~R(x, x)) & (E x:0. E y:0. R(x, y))",
        &voc,
    )
    .unwrap();

    // Relativize to a unary relation variable P and quantify it: this holds
    // in a structure iff some subset carries such an order.
    let guard = RelationVar::new("P", vec![SortId(0)]);
    let relativized = relativize_to_var(&phi, &guard).unwrap();
    let inside = Formula::exists_rel(guard, relativized);
    println!("relativized: {}", render_formula(&inside));

    let mut two = Structure::new();
    two.set_domain(0u32, ["p", "q"]);
    two.set_interp("R", [vec!["p", "q"]]);
    let mut one = Structure::new();
    one.set_domain(0u32, ["p"]);
    one.set_interp("R", Vec::<Vec<&str>>::new());
    let budget = Budget::default();
    println!(
        "  on a 2-element structure: {}",
        eval_sentence(&voc, &two, &inside, &budget).unwrap()
    );
    println!(
        "  on a 1-element structure: {} (no room for a witness inside)",
        eval_sentence(&voc, &one, &inside, &budget).unwrap()
    );

    // The sort closure replaces R by a block variable and closes every sort:
    // its verdict no longer depends on the structure at all.
    let closed = sort_closure(&phi, &voc).unwrap();
    println!("\nsort closure: {}", render_formula(&closed));
    assert!(free_sorts(&closed).is_empty());
    for (name, m) in [("2-element", &two), ("1-element", &one)] {
        println!(
            "  on the {} structure: {}",
            name,
            eval_sentence(&voc, m, &closed, &budget).unwrap()
        );
    }
    println!("(False both times: the closed sentence asserts validity, and");
    println!(" a one-point order refutes it whatever structure we stand in.)");
}
