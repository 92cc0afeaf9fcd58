//! Which groups are the multiplicative group of a field?
//!
//! Evaluates the field sentence from the corpus on three small groups. The
//! sentence quantifies over a new field sort with an addition and a zero,
//! so the evaluator searches for expansions of the group by new elements:
//!
//! - the cyclic group of order 2 extends to the 3-element field,
//! - the cyclic group of order 4 extends to the 5-element field,
//! - the Klein four group extends to no field with at most 6 elements, and
//!   the verdict stays Unknown because larger fields are out of budget.
//!
//! ```bash
//! cargo run --release --example field_from_group
//! ```

use std::time::Instant;

use sortlog::model::Budget;
use sortlog::parser::{parse_formula, parse_structure};
use sortlog::semantics::full::eval_sentence;

fn corpus(name: &str) -> String {
    let path = format!("{}/corpus/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(path).expect("corpus file")
}

fn main() {
    let cases = [
        ("group2.sls", "cyclic group of order 2", 3),
        ("group4.sls", "cyclic group of order 4", 5),
        ("klein4.sls", "Klein four group", 6),
    ];
    for (file, label, bound) in cases {
        let doc = parse_structure(&corpus(file)).expect("valid structure");
        let field = parse_formula(&corpus("field.slf"), &doc.vocabulary).expect("valid formula");
        let budget = Budget {
            domain_bound: bound,
            ..Budget::default()
        };
        let start = Instant::now();
        let verdict = eval_sentence(&doc.vocabulary, &doc.structure, &field, &budget)
            .expect("preconditions hold");
        println!(
            "{:28} bound {} -> {:8} ({:.2?})",
            label,
            bound,
            verdict.to_string(),
            start.elapsed()
        );
    }
}
