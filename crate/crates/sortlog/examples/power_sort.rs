//! The power-sort axiom at desk scale.
//!
//! The axiom asserts a new sort coding all subsets of a base sort. On a
//! finite structure with n base elements the witness needs a code domain of
//! size 2^n, so the bounded evaluator answers True exactly once the domain
//! bound reaches 2^n, and can never answer False below it: a bigger budget
//! might (and here does) find the witness.
//!
//! ```bash
//! cargo run --release --example power_sort
//! ```

use std::time::Instant;

use sortlog::model::{Budget, Structure};
use sortlog::parser::parse_formula;
use sortlog::syntax::Vocabulary;
use sortlog::semantics::full::eval_sentence;

fn corpus(name: &str) -> String {
    let path = format!("{}/corpus/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(path).expect("corpus file")
}

fn main() {
    let voc = Vocabulary::new();
    let axiom = parse_formula(&corpus("psa1.slf"), &voc).expect("valid formula");
    for n in 1..=3usize {
        let mut m = Structure::new();
        m.set_domain(0u32, (0..n).map(|i| format!("e{}", i)));
        for bound in 1..=(1 << n) {
            let budget = Budget {
                domain_bound: bound,
                ..Budget::default()
            };
            let start = Instant::now();
            let verdict =
                eval_sentence(&voc, &m, &axiom, &budget).expect("preconditions hold");
            println!(
                "base size {}  bound {:2} -> {:8} ({:.2?})",
                n,
                bound,
                verdict.to_string(),
                start.elapsed()
            );
        }
    }
}
