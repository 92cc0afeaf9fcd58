//! Concrete syntax: a keyword text grammar for formulas and JSON documents
//! for vocabularies, structures, Henkin structures, and proofs.
//!
//! Formula grammar (`.slf` files, `#` comments):
//!
//! ```text
//! formula := imp ( "<->" imp )?                  non-associative
//! imp     := or ( "->" imp )?                    right-associative
//! or      := and ( "|" and )*                    left-associative
//! and     := unary ( "&" unary )*                left-associative
//! unary   := "~" unary | quant | primary
//! quant   := ("E" | "A") name ":" sort "." formula
//!          | ("E2" | "A2") name ":(" sorts ")" "." formula
//!          | ("Es" | "As") "(" relvar-decls ")" "." formula
//! primary := "(" formula ")" | atom | equation
//! atom    := head "(" terms ")"
//! equation:= term "=" term
//! term    := name | name ":" sort
//! ```
//!
//! Quantifier bodies extend as far right as possible. A bare name refers to
//! the innermost binder with that name; free variables must be written with
//! their sort (`x:0`, `X:(0,1)`). An atom head is resolved first against the
//! enclosing relation binders, then against the vocabulary.
//!
//! `&`, `->`, `<->`, `A`, `A2` and `As` are sugar; the parser expands them,
//! so round-tripping is over the core AST.

mod files;
mod formula;
mod lexer;

pub use files::{
    parse_henkin, parse_proof, parse_structure, parse_vocabulary, render_henkin, render_proof,
    render_structure, render_vocabulary, HenkinDoc, ProofDoc, StructureDoc,
};
pub use formula::{
    parse_formula, parse_individual_var_str, parse_relation_var_str, render_formula,
};

use std::fmt;
use thiserror::Error;

/// Byte range plus the line/column of its start (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    pub(crate) fn new(start: usize, end: usize, line: u32, column: u32) -> Self {
        debug_assert!(start <= end);
        Self {
            start,
            end,
            line,
            column,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lex,
    Syntax,
    Sort,
    /// Only produced by the well-formedness pass over new-sort blocks.
    NewSort,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ParseErrorKind::Lex => "lex",
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::Sort => "sort",
            ParseErrorKind::NewSort => "new-sort",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} error at {span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        Self {
            span,
            kind,
            message: message.into(),
        }
    }
}
