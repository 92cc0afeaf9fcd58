//! Exact evaluation over finite Henkin structures.
//!
//! A Henkin structure fixes in advance which relations (`G`) and which new
//! domains (`U`) the quantifiers may range over, making truth decidable.
//! The same sentence can hold or fail depending on how rich the pools are,
//! and the comprehension checker measures whether the pools are closed
//! enough to count as a bona fide Henkin structure.
//!
//! ```bash
//! cargo run --example henkin_semantics
//! ```

use sortlog::parser::{parse_formula, parse_henkin};
use sortlog::semantics::henkin::{
    check_comprehension, eval_henkin_sentence, HenkinStructure, TypedRelation,
};
use sortlog::syntax::SortId;

fn corpus(name: &str) -> String {
    let path = format!("{}/corpus/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(path).expect("corpus file")
}

fn main() {
    let doc = parse_henkin(&corpus("pair.slh")).expect("valid henkin file");
    let voc = doc.vocabulary.clone();

    let separating = parse_formula("E2 X:(0). E x:0. E y:0. (X(x) & ~X(y))", &voc).unwrap();
    println!(
        "a separating set exists: {}",
        eval_henkin_sentence(&voc, &doc.henkin, &separating).unwrap()
    );

    // Starve G down to the trivial relations and the same sentence flips.
    let poor = HenkinStructure {
        candidate_relations: vec![
            TypedRelation {
                sorts: vec![SortId(0)],
                tuples: Default::default(),
            },
            TypedRelation {
                sorts: vec![SortId(0)],
                tuples: [vec!["0".into()], vec!["1".into()]].into_iter().collect(),
            },
        ],
        ..doc.henkin.clone()
    };
    println!(
        "with only the empty and full sets: {}",
        eval_henkin_sentence(&voc, &poor, &separating).unwrap()
    );

    // New-sort quantifiers range over U.
    let block = parse_formula("Es (Z:(3)). A u:3. (Z(u) <-> u = u)", &voc).unwrap();
    println!(
        "a block sentence with candidate domains: {}",
        eval_henkin_sentence(&voc, &doc.henkin, &block).unwrap()
    );
    let no_domains = HenkinStructure {
        candidate_domains: vec![],
        ..doc.henkin.clone()
    };
    println!(
        "the same with U empty: {}",
        eval_henkin_sentence(&voc, &no_domains, &block).unwrap()
    );

    // How close is the file to a real Henkin structure?
    let report = check_comprehension(&voc, &doc.henkin, 1, 3);
    println!(
        "\ncomprehension at depth 1, size 3: {}/{} instances witnessed",
        report.checked_instances - report.failures.len(),
        report.checked_instances
    );
    if let Some(f) = report.failures.first() {
        println!("first failure: {}", f.instance);
    }
}
