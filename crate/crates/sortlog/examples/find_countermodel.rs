//! Countermodel search over finite Henkin structures.
//!
//! The search enumerates small Henkin structures in a fixed order, keeps
//! those that pass comprehension checking, and returns the first one that
//! satisfies the theory and refutes the sentence. A valid sentence comes
//! back NotFound with the exhausted bounds.
//!
//! ```bash
//! cargo run --release --example find_countermodel
//! ```

use sortlog::parser::parse_formula;
use sortlog::semantics::henkin::{
    countermodel_search, eval_henkin_sentence, CountermodelSearch, SearchBounds,
};
use sortlog::syntax::{SortId, Vocabulary};

fn main() {
    let voc = Vocabulary::new();
    let bounds = SearchBounds::default();

    // Not every two elements are equal: refuted by any 2-element domain.
    let phi = parse_formula("A x:0. A y:0. x = y", &voc).unwrap();
    match countermodel_search(&voc, &[], &phi, &bounds).unwrap() {
        CountermodelSearch::Found(h) => {
            println!(
                "countermodel for `{}`: {} elements, {} candidate domains, {} candidate relations",
                phi,
                h.base.domain(SortId(0)).unwrap().len(),
                h.candidate_domains.len(),
                h.candidate_relations.len(),
            );
            assert!(!eval_henkin_sentence(&voc, &h, &phi).unwrap());
        }
        CountermodelSearch::NotFound(_) => unreachable!("a 2-element domain refutes it"),
    }

    // Under a theory forcing at least two elements, three distinct elements
    // still need not exist: the minimal countermodel has exactly two.
    let theory = vec![parse_formula("E x:0. E y:0. ~x = y", &voc).unwrap()];
    let three = parse_formula(
        "E x:0. E y:0. E z:0. (~x = y & ~x = z & ~y = z)",
        &voc,
    )
    .unwrap();
    match countermodel_search(&voc, &theory, &three, &bounds).unwrap() {
        CountermodelSearch::Found(h) => println!(
            "countermodel under the theory: exactly {} elements",
            h.base.domain(SortId(0)).unwrap().len()
        ),
        CountermodelSearch::NotFound(_) => unreachable!(),
    }

    // Reflexivity of equality is valid: nothing refutes it.
    let valid = parse_formula("A x:0. x = x", &voc).unwrap();
    match countermodel_search(&voc, &[], &valid, &bounds).unwrap() {
        CountermodelSearch::Found(_) => unreachable!("equality is reflexive"),
        CountermodelSearch::NotFound(nf) => println!("for `{}`: {}", valid, nf),
    }
}
