//! JSON document formats: vocabularies (`.json`), structures (`.sls`),
//! Henkin structures (`.slh`), and proofs (`.slp`). Every parse validates
//! the result; every render is deterministic and round-trips.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    parse_formula, parse_individual_var_str, parse_relation_var_str, render_formula, ParseError,
    ParseErrorKind, SourceSpan,
};
use crate::model::{validate_structure, Structure, TupleSet};
use crate::proof::{Justification, Proof};
use crate::semantics::henkin::{validate_henkin, HenkinStructure, TypedRelation};
use crate::syntax::{SortId, Vocabulary};

fn whole_span(text: &str) -> SourceSpan {
    SourceSpan::new(0, text.len(), 1, 1)
}

fn json_error(text: &str, e: &serde_json::Error) -> ParseError {
    let (line, column) = (e.line().max(1), e.column().max(1));
    let start = text
        .lines()
        .take(line - 1)
        .map(|l| l.len() + 1)
        .sum::<usize>()
        + column.saturating_sub(1);
    let start = start.min(text.len());
    ParseError::new(
        SourceSpan::new(start, start, line as u32, column as u32),
        ParseErrorKind::Syntax,
        e.to_string(),
    )
}

fn validation_error(text: &str, message: String) -> ParseError {
    ParseError::new(whole_span(text), ParseErrorKind::Sort, message)
}

fn voc_from_map(
    text: &str,
    map: &BTreeMap<String, Vec<u32>>,
) -> Result<Vocabulary, ParseError> {
    Vocabulary::from_pairs(
        map.iter()
            .map(|(n, ss)| (n.clone(), ss.iter().map(|&s| SortId(s)).collect())),
    )
    .map_err(|e| validation_error(text, e.to_string()))
}

fn voc_to_map(voc: &Vocabulary) -> BTreeMap<String, Vec<u32>> {
    voc.symbols()
        .map(|(n, ss)| (n.to_string(), ss.iter().map(|s| s.0).collect()))
        .collect()
}

/// Parses a vocabulary document: a JSON object mapping predicate names to
/// sort tuples, e.g. `{"Mult": [0, 0, 0], "One": [0]}`.
pub fn parse_vocabulary(text: &str) -> Result<Vocabulary, ParseError> {
    let map: BTreeMap<String, Vec<u32>> =
        serde_json::from_str(text).map_err(|e| json_error(text, &e))?;
    voc_from_map(text, &map)
}

pub fn render_vocabulary(voc: &Vocabulary) -> String {
    let mut out = serde_json::to_string_pretty(&voc_to_map(voc)).expect("map serializes");
    out.push('\n');
    out
}

#[derive(Serialize, Deserialize)]
struct StructureFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    vocabulary: BTreeMap<String, Vec<u32>>,
    sorts: BTreeMap<u32, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    relations: BTreeMap<String, Vec<Vec<String>>>,
}

/// A structure file: the structure plus the vocabulary it is read against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureDoc {
    pub vocabulary: Vocabulary,
    pub structure: Structure,
}

fn structure_from_file(text: &str, file: &StructureFile) -> Result<StructureDoc, ParseError> {
    let vocabulary = voc_from_map(text, &file.vocabulary)?;
    let mut structure = Structure::new();
    for (&sort, elems) in &file.sorts {
        let set: std::collections::BTreeSet<String> = elems.iter().cloned().collect();
        if set.len() != elems.len() {
            return Err(validation_error(
                text,
                format!("sort {} lists a duplicate element", sort),
            ));
        }
        structure.set_domain(sort, set);
    }
    for (name, tuples) in &file.relations {
        let set: TupleSet = tuples.iter().cloned().collect();
        structure.set_interp_owned(name.clone(), set);
    }
    validate_structure(&vocabulary, &structure).map_err(|vs| {
        validation_error(
            text,
            vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        )
    })?;
    Ok(StructureDoc {
        vocabulary,
        structure,
    })
}

/// Parses and validates a `.sls` structure document.
pub fn parse_structure(text: &str) -> Result<StructureDoc, ParseError> {
    let file: StructureFile = serde_json::from_str(text).map_err(|e| json_error(text, &e))?;
    structure_from_file(text, &file)
}

fn structure_to_file(doc: &StructureDoc) -> StructureFile {
    StructureFile {
        vocabulary: voc_to_map(&doc.vocabulary),
        sorts: doc
            .structure
            .domains()
            .map(|(s, d)| (s.0, d.iter().cloned().collect()))
            .collect(),
        relations: doc
            .structure
            .interps()
            .map(|(n, t)| (n.to_string(), t.iter().cloned().collect()))
            .collect(),
    }
}

pub fn render_structure(doc: &StructureDoc) -> String {
    let mut out = serde_json::to_string_pretty(&structure_to_file(doc)).expect("serializes");
    out.push('\n');
    out
}

#[derive(Serialize, Deserialize)]
struct HenkinFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    vocabulary: BTreeMap<String, Vec<u32>>,
    sorts: BTreeMap<u32, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, rename = "U")]
    u: Vec<Vec<String>>,
    #[serde(default, rename = "G")]
    g: Vec<GRecord>,
}

#[derive(Serialize, Deserialize)]
struct GRecord {
    sorts: Vec<u32>,
    tuples: Vec<Vec<String>>,
}

/// A Henkin structure file with its vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenkinDoc {
    pub vocabulary: Vocabulary,
    pub henkin: HenkinStructure,
}

/// Parses and validates a `.slh` Henkin document.
pub fn parse_henkin(text: &str) -> Result<HenkinDoc, ParseError> {
    let file: HenkinFile = serde_json::from_str(text).map_err(|e| json_error(text, &e))?;
    let base_doc = structure_from_file(
        text,
        &StructureFile {
            vocabulary: file.vocabulary.clone(),
            sorts: file.sorts.clone(),
            relations: file.relations.clone(),
        },
    )?;
    let henkin = HenkinStructure {
        base: base_doc.structure,
        candidate_domains: file.u.iter().map(|d| d.iter().cloned().collect()).collect(),
        candidate_relations: file
            .g
            .iter()
            .map(|r| TypedRelation {
                sorts: r.sorts.iter().map(|&s| SortId(s)).collect(),
                tuples: r.tuples.iter().cloned().collect(),
            })
            .collect(),
    };
    validate_henkin(&base_doc.vocabulary, &henkin).map_err(|vs| {
        validation_error(
            text,
            vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        )
    })?;
    Ok(HenkinDoc {
        vocabulary: base_doc.vocabulary,
        henkin,
    })
}

pub fn render_henkin(doc: &HenkinDoc) -> String {
    let file = HenkinFile {
        vocabulary: voc_to_map(&doc.vocabulary),
        sorts: doc
            .henkin
            .base
            .domains()
            .map(|(s, d)| (s.0, d.iter().cloned().collect()))
            .collect(),
        relations: doc
            .henkin
            .base
            .interps()
            .map(|(n, t)| (n.to_string(), t.iter().cloned().collect()))
            .collect(),
        u: doc
            .henkin
            .candidate_domains
            .iter()
            .map(|d| d.iter().cloned().collect())
            .collect(),
        g: doc
            .henkin
            .candidate_relations
            .iter()
            .map(|r| GRecord {
                sorts: r.sorts.iter().map(|s| s.0).collect(),
                tuples: r.tuples.iter().cloned().collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("serializes");
    out.push('\n');
    out
}

#[derive(Serialize, Deserialize)]
struct ProofFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    vocabulary: BTreeMap<String, Vec<u32>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    theory: Vec<String>,
    lines: Vec<LineFile>,
}

#[derive(Serialize, Deserialize)]
struct LineFile {
    formula: String,
    just: JustFile,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
enum JustFile {
    Premise,
    Tautology,
    Identity,
    QuantInd,
    QuantRel,
    QuantSort,
    Comp1,
    Comp2,
    PowerSort,
    InfiniteSort,
    Mp { from: [usize; 2] },
    GenInd { from: usize, var: String },
    GenRel { from: usize, var: String },
    GenSort { from: usize, vars: Vec<String> },
}

/// A proof file resolved into a checkable derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofDoc {
    pub proof: Proof,
}

/// Parses and validates a `.slp` proof document: every theory sentence and
/// line formula must parse and be well-formed over the file's vocabulary.
pub fn parse_proof(text: &str) -> Result<ProofDoc, ParseError> {
    let file: ProofFile = serde_json::from_str(text).map_err(|e| json_error(text, &e))?;
    let vocabulary = voc_from_map(text, &file.vocabulary)?;
    let mut theory = Vec::with_capacity(file.theory.len());
    for (i, t) in file.theory.iter().enumerate() {
        let phi = parse_formula(t, &vocabulary).map_err(|e| {
            validation_error(text, format!("theory sentence {}: {}", i + 1, e))
        })?;
        theory.push(phi);
    }
    let mut lines = Vec::with_capacity(file.lines.len());
    for (i, line) in file.lines.iter().enumerate() {
        let phi = parse_formula(&line.formula, &vocabulary)
            .map_err(|e| validation_error(text, format!("line {}: {}", i + 1, e)))?;
        let var_err =
            |e: ParseError| validation_error(text, format!("line {}: {}", i + 1, e));
        let just = match &line.just {
            JustFile::Premise => Justification::Premise,
            JustFile::Tautology => Justification::Tautology,
            JustFile::Identity => Justification::Identity,
            JustFile::QuantInd => Justification::QuantAxiomInd,
            JustFile::QuantRel => Justification::QuantAxiomRel,
            JustFile::QuantSort => Justification::QuantAxiomNewSort,
            JustFile::Comp1 => Justification::Comprehension1,
            JustFile::Comp2 => Justification::Comprehension2,
            JustFile::PowerSort => Justification::PowerSort,
            JustFile::InfiniteSort => Justification::InfiniteSort,
            JustFile::Mp { from } => Justification::Mp(from[0], from[1]),
            JustFile::GenInd { from, var } => {
                Justification::GenInd(*from, parse_individual_var_str(var).map_err(var_err)?)
            }
            JustFile::GenRel { from, var } => {
                Justification::GenRel(*from, parse_relation_var_str(var).map_err(var_err)?)
            }
            JustFile::GenSort { from, vars } => {
                let mut block = Vec::with_capacity(vars.len());
                for v in vars {
                    block.push(parse_relation_var_str(v).map_err(var_err)?);
                }
                Justification::GenNewSort(*from, block)
            }
        };
        lines.push((phi, just));
    }
    Ok(ProofDoc {
        proof: Proof {
            vocabulary,
            theory,
            lines,
        },
    })
}

pub fn render_proof(doc: &ProofDoc) -> String {
    let proof = &doc.proof;
    let file = ProofFile {
        vocabulary: voc_to_map(&proof.vocabulary),
        theory: proof.theory.iter().map(render_formula).collect(),
        lines: proof
            .lines
            .iter()
            .map(|(phi, just)| LineFile {
                formula: render_formula(phi),
                just: match just {
                    Justification::Premise => JustFile::Premise,
                    Justification::Tautology => JustFile::Tautology,
                    Justification::Identity => JustFile::Identity,
                    Justification::QuantAxiomInd => JustFile::QuantInd,
                    Justification::QuantAxiomRel => JustFile::QuantRel,
                    Justification::QuantAxiomNewSort => JustFile::QuantSort,
                    Justification::Comprehension1 => JustFile::Comp1,
                    Justification::Comprehension2 => JustFile::Comp2,
                    Justification::PowerSort => JustFile::PowerSort,
                    Justification::InfiniteSort => JustFile::InfiniteSort,
                    Justification::Mp(i, j) => JustFile::Mp { from: [*i, *j] },
                    Justification::GenInd(i, x) => JustFile::GenInd {
                        from: *i,
                        var: x.to_string(),
                    },
                    Justification::GenRel(i, x) => JustFile::GenRel {
                        from: *i,
                        var: x.to_string(),
                    },
                    Justification::GenNewSort(i, xs) => JustFile::GenSort {
                        from: *i,
                        vars: xs.iter().map(ToString::to_string).collect(),
                    },
                },
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_file_round_trips() {
        let text = r#"{
            "vocabulary": {"Mult": [0, 0, 0], "One": [0]},
            "sorts": {"0": ["1", "a"]},
            "relations": {
                "Mult": [["1","1","1"],["1","a","a"],["a","1","a"],["a","a","1"]],
                "One": [["1"]]
            }
        }"#;
        let doc = parse_structure(text).unwrap();
        assert_eq!(doc.structure.domain(SortId(0)).unwrap().len(), 2);
        assert_eq!(doc.structure.interp("Mult").unwrap().len(), 4);
        let rendered = render_structure(&doc);
        assert_eq!(parse_structure(&rendered).unwrap(), doc);
    }

    #[test]
    fn structure_file_rejects_bad_tuples() {
        let text = r#"{
            "vocabulary": {"One": [0]},
            "sorts": {"0": ["1"]},
            "relations": {"One": [["zebra"]]}
        }"#;
        let err = parse_structure(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Sort);
    }

    #[test]
    fn henkin_file_round_trips() {
        let text = r#"{
            "sorts": {"0": ["0", "1"]},
            "U": [["0"], ["0", "1"]],
            "G": [{"sorts": [0], "tuples": [["0"]]}]
        }"#;
        let doc = parse_henkin(text).unwrap();
        assert_eq!(doc.henkin.candidate_domains.len(), 2);
        let rendered = render_henkin(&doc);
        assert_eq!(parse_henkin(&rendered).unwrap(), doc);
    }

    #[test]
    fn proof_file_round_trips() {
        let text = r#"{
            "theory": [],
            "lines": [
                {"formula": "x:0 = x:0", "just": {"rule": "identity"}},
                {"formula": "x:0 = x:0 -> E x:0. x = x", "just": {"rule": "quant-ind"}},
                {"formula": "E x:0. x = x", "just": {"rule": "mp", "from": [1, 2]}}
            ]
        }"#;
        let doc = parse_proof(text).unwrap();
        assert_eq!(doc.proof.lines.len(), 3);
        assert!(crate::proof::check_proof(&doc.proof).all_ok());
        let rendered = render_proof(&doc);
        assert_eq!(parse_proof(&rendered).unwrap(), doc);
    }

    #[test]
    fn json_errors_carry_positions() {
        let text = "{ not json";
        let err = parse_structure(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert!(err.span.start <= text.len());
    }
}
