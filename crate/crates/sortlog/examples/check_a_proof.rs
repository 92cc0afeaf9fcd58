//! Verify derivations line by line.
//!
//! ```bash
//! cargo run --example check_a_proof
//! ```

use sortlog::parser::parse_proof;
use sortlog::proof::{check_proof, Justification};

fn corpus(name: &str) -> String {
    let path = format!("{}/corpus/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(path).expect("corpus file")
}

fn main() {
    for file in ["demo.slp", "axioms.slp"] {
        let doc = parse_proof(&corpus(file)).expect("valid proof file");
        let report = check_proof(&doc.proof);
        println!("{}:", file);
        for (line, verdict) in doc.proof.lines.iter().zip(&report.lines) {
            let mark = if verdict.ok { "ok  " } else { "FAIL" };
            println!("  {} line {}: {}  [{}]", mark, verdict.index, line.0, line.1);
            if !verdict.ok {
                println!("       {}", verdict.diagnostic);
            }
        }
        println!();
    }

    // Corrupting a justification is caught at the corrupted line.
    let mut doc = parse_proof(&corpus("demo.slp")).expect("valid proof file");
    doc.proof.lines[2].1 = Justification::Mp(2, 1);
    let report = check_proof(&doc.proof);
    println!("after swapping the modus ponens references:");
    for verdict in &report.lines {
        if !verdict.ok {
            println!("  line {} rejected: {}", verdict.index, verdict.diagnostic);
        }
    }
    assert!(!report.all_ok());
}
