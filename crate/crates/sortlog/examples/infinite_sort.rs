//! The infinite-sort axiom never resolves on finite budgets.
//!
//! The axiom asserts a new sort with an injective, total, non-surjective
//! self-map — an infinite domain. Every finite candidate domain fails by
//! the pigeonhole principle, so the evaluator keeps answering Unknown: it
//! can neither find a witness nor rule out larger domains. The axiom still
//! holds in every full model, which is exactly why no finite search can
//! refute it.
//!
//! ```bash
//! cargo run --release --example infinite_sort
//! ```

use sortlog::model::{Budget, Structure};
use sortlog::parser::parse_formula;
use sortlog::semantics::full::eval_sentence;
use sortlog::syntax::{free_sorts, Vocabulary};

fn corpus(name: &str) -> String {
    let path = format!("{}/corpus/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(path).expect("corpus file")
}

fn main() {
    let voc = Vocabulary::new();
    let axiom = parse_formula(&corpus("isa.slf"), &voc).expect("valid formula");
    assert!(free_sorts(&axiom).is_empty());
    println!("the axiom has no free sorts, so any structure will do\n");

    let mut m = Structure::new();
    m.set_domain(0u32, ["p", "q"]);
    for bound in 1..=4usize {
        let budget = Budget {
            domain_bound: bound,
            ..Budget::default()
        };
        let verdict = eval_sentence(&voc, &m, &axiom, &budget).unwrap();
        println!("domain bound {} -> {}", bound, verdict);
    }
    println!("\nUnknown forever: finite injective total self-maps are surjective,");
    println!("so no witness exists below any bound, and no bound refutes the rest.");
}
