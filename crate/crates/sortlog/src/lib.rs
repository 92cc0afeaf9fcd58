//! sortlog: a workbench for many-sorted logic with new-sort quantifiers.
//!
//! The language extends many-sorted second-order logic with a block
//! quantifier `Es (X1:(..), ..., Xn:(..)). phi` asserting that *new domains*
//! exist for the sorts of the block's relation variables, together with
//! relations on them making `phi` true. This is what lets a sentence look
//! outside its model: a group is the multiplicative group of some field
//! exactly when new elements and an addition can be adjoined to it, and the
//! sentence saying so is evaluated inside the group alone.
//!
//! The crate provides:
//!
//! - [`syntax`]: vocabularies, sorted variables, the formula AST,
//!   well-formedness (including the New Sort Condition), free variables and
//!   free sorts, substitution, relativization, and universal sort closure.
//! - [`parser`]: a plain-text formula grammar and JSON documents for
//!   structures (`.sls`), Henkin structures (`.slh`), and proofs (`.slp`),
//!   with deterministic renderers that round-trip.
//! - [`model`]: finite many-sorted structures, assignments, and bounded
//!   enumeration of relation spaces and domain expansions.
//! - [`semantics::full`]: a bounded three-valued evaluator for the full
//!   semantics; `True`/`False` are final, `Unknown` means a budget ran out.
//! - [`semantics::henkin`]: an exact evaluator over finite Henkin
//!   structures, comprehension checking, and countermodel search.
//! - [`proof`]: a checker for Hilbert-style derivations with recognizers
//!   for every axiom family, including the power-sort and infinite-sort
//!   axioms.
//!
//! The `examples/` directory shows one runnable program per capability; the
//! `sortlog` binary wires the same operations into a small CLI.

pub mod model;
pub mod parser;
pub mod proof;
pub mod semantics;
pub mod syntax;

pub use model::{Assignment, Budget, Structure};
pub use semantics::{full, henkin, Verdict};
pub use syntax::{Formula, IndividualVar, RelationVar, SortId, Vocabulary};
