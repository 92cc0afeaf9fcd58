//! Sorted vocabularies, variables, and the formula language.
//!
//! Formulas are built from eight core forms: equations, predicate atoms,
//! relation-variable atoms, negation, disjunction, and three existential
//! quantifiers (individual, relation, and new-sort block). Conjunction,
//! implication and the universal quantifiers are sugar expanded by the
//! constructors; the core AST never contains them.
//!
//! The new-sort block binder `ExistsNewSorts` quantifies a *set* of relation
//! variables at once and asserts the existence of new domains for every sort
//! mentioned in their sort tuples. A block is subject to the New Sort
//! Condition: the body may not mention, freely, any variable or predicate
//! symbol whose sorts meet the block's sorts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A sort name. Sorts are plain natural numbers.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct SortId(pub u32);

impl fmt::Display for SortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for SortId {
    fn from(n: u32) -> Self {
        SortId(n)
    }
}

/// A finite set of sorts.
pub type SortSet = BTreeSet<SortId>;

/// Renders a sort set as `{0, 1}`.
pub fn display_sort_set(sorts: &SortSet) -> String {
    let inner: Vec<String> = sorts.iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabularyError {
    #[error("duplicate predicate symbol `{0}`")]
    DuplicateSymbol(String),
}

/// Predicate symbols together with their argument sort tuples.
///
/// The arity of a symbol is the length of its sort tuple, so an arity/tuple
/// mismatch is unrepresentable. Name uniqueness is enforced at construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    symbols: BTreeMap<String, Vec<SortId>>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a symbol, rejecting duplicates.
    pub fn declare(
        &mut self,
        name: impl Into<String>,
        sorts: Vec<SortId>,
    ) -> Result<(), VocabularyError> {
        let name = name.into();
        if self.symbols.contains_key(&name) {
            return Err(VocabularyError::DuplicateSymbol(name));
        }
        self.symbols.insert(name, sorts);
        Ok(())
    }

    /// Builds a vocabulary from `(name, sort tuple)` pairs.
    pub fn from_pairs<N, I>(pairs: I) -> Result<Self, VocabularyError>
    where
        N: Into<String>,
        I: IntoIterator<Item = (N, Vec<SortId>)>,
    {
        let mut voc = Self::new();
        for (name, sorts) in pairs {
            voc.declare(name, sorts)?;
        }
        Ok(voc)
    }

    pub fn sorts_of(&self, name: &str) -> Option<&[SortId]> {
        self.symbols.get(name).map(Vec::as_slice)
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).map(Vec::len)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbols in name order.
    pub fn symbols(&self) -> impl Iterator<Item = (&str, &[SortId])> {
        self.symbols.iter().map(|(n, s)| (n.as_str(), s.as_slice()))
    }
}

/// An individual variable. The sort is part of the variable's identity:
/// `x:0` and `x:1` are distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndividualVar {
    pub name: String,
    pub sort: SortId,
}

impl IndividualVar {
    pub fn new(name: impl Into<String>, sort: impl Into<SortId>) -> Self {
        Self {
            name: name.into(),
            sort: sort.into(),
        }
    }
}

impl fmt::Display for IndividualVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

/// A relation variable with a nonempty tuple of argument sorts.
/// Like individual variables, the sort tuple is part of the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationVar {
    pub name: String,
    pub sorts: Vec<SortId>,
}

impl RelationVar {
    /// Panics if `sorts` is empty; relation variables always have arity >= 1.
    pub fn new(name: impl Into<String>, sorts: Vec<SortId>) -> Self {
        assert!(!sorts.is_empty(), "relation variable needs at least one sort");
        Self {
            name: name.into(),
            sorts,
        }
    }

    pub fn arity(&self) -> usize {
        self.sorts.len()
    }
}

impl fmt::Display for RelationVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sorts: Vec<String> = self.sorts.iter().map(|s| s.to_string()).collect();
        write!(f, "{}:({})", self.name, sorts.join(","))
    }
}

/// Formulas over the eight core formation rules.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `x = y`; the two variables may have different sorts.
    Equation(IndividualVar, IndividualVar),
    /// `R(x1, ..., xn)` for a vocabulary symbol `R`.
    PredAtom { pred: String, args: Vec<IndividualVar> },
    /// `X(x1, ..., xn)` for a relation variable `X`.
    VarAtom { var: RelationVar, args: Vec<IndividualVar> },
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    ExistsInd(IndividualVar, Box<Formula>),
    ExistsRel(RelationVar, Box<Formula>),
    /// Block new-sort quantifier. Binds every variable in the block and
    /// asserts new domains for the union of their sorts.
    ExistsNewSorts(Vec<RelationVar>, Box<Formula>),
}

impl Formula {
    pub fn eq(x: IndividualVar, y: IndividualVar) -> Self {
        Formula::Equation(x, y)
    }

    pub fn pred(pred: impl Into<String>, args: Vec<IndividualVar>) -> Self {
        Formula::PredAtom {
            pred: pred.into(),
            args,
        }
    }

    pub fn rel(var: RelationVar, args: Vec<IndividualVar>) -> Self {
        Formula::VarAtom { var, args }
    }

    pub fn not(phi: Formula) -> Self {
        Formula::Not(Box::new(phi))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// `a & b`, expanded to `~(~a | ~b)`.
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    /// `a -> b`, expanded to `~a | b`.
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    /// `a <-> b`, expanded to `(a -> b) & (b -> a)`.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn exists(x: IndividualVar, phi: Formula) -> Self {
        Formula::ExistsInd(x, Box::new(phi))
    }

    /// `A x. phi`, expanded to `~E x. ~phi`.
    pub fn forall(x: IndividualVar, phi: Formula) -> Self {
        Formula::not(Formula::exists(x, Formula::not(phi)))
    }

    pub fn exists_rel(var: RelationVar, phi: Formula) -> Self {
        Formula::ExistsRel(var, Box::new(phi))
    }

    pub fn forall_rel(var: RelationVar, phi: Formula) -> Self {
        Formula::not(Formula::exists_rel(var, Formula::not(phi)))
    }

    /// Panics if `block` is empty.
    pub fn exists_new(block: Vec<RelationVar>, phi: Formula) -> Self {
        assert!(!block.is_empty(), "new-sort block must be nonempty");
        Formula::ExistsNewSorts(block, Box::new(phi))
    }

    pub fn forall_new(block: Vec<RelationVar>, phi: Formula) -> Self {
        Formula::not(Formula::exists_new(block, Formula::not(phi)))
    }

    /// Chains `and` left-associatively over at least one conjunct.
    pub fn and_all(conjuncts: Vec<Formula>) -> Self {
        let mut it = conjuncts.into_iter();
        let first = it.next().expect("and_all needs at least one conjunct");
        it.fold(first, Formula::and)
    }

    // View functions recovering the sugar the constructors expand. Each
    // matches exactly the expansion shape, so `as_and(and(a, b)) == (a, b)`.

    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Or(lhs, rhs) = self {
            if let Formula::Not(a) = lhs.as_ref() {
                return Some((a, rhs));
            }
        }
        None
    }

    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::Or(na, nb) = inner.as_ref() {
                if let (Formula::Not(a), Formula::Not(b)) = (na.as_ref(), nb.as_ref()) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        let (l, r) = self.as_and()?;
        let (a, b) = l.as_implies()?;
        let (b2, a2) = r.as_implies()?;
        if a == a2 && b == b2 {
            Some((a, b))
        } else {
            None
        }
    }

    pub fn as_forall_ind(&self) -> Option<(&IndividualVar, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::ExistsInd(x, body) = inner.as_ref() {
                if let Formula::Not(phi) = body.as_ref() {
                    return Some((x, phi));
                }
            }
        }
        None
    }

    pub fn as_forall_rel(&self) -> Option<(&RelationVar, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::ExistsRel(x, body) = inner.as_ref() {
                if let Formula::Not(phi) = body.as_ref() {
                    return Some((x, phi));
                }
            }
        }
        None
    }

    pub fn as_forall_new(&self) -> Option<(&[RelationVar], &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::ExistsNewSorts(block, body) = inner.as_ref() {
                if let Formula::Not(phi) = body.as_ref() {
                    return Some((block, phi));
                }
            }
        }
        None
    }

    /// Splits a left-associated `and` chain into its conjuncts.
    pub fn flatten_and(&self) -> Vec<&Formula> {
        match self.as_and() {
            Some((l, r)) => {
                let mut out = l.flatten_and();
                out.push(r);
                out
            }
            None => vec![self],
        }
    }

    pub fn is_sentence(&self) -> bool {
        free_individual_vars(self).is_empty() && free_relation_vars(self).is_empty()
    }
}

/// Free individual variables; the block quantifier binds only relation
/// variables, so it never removes anything here.
pub fn free_individual_vars(phi: &Formula) -> BTreeSet<IndividualVar> {
    fn walk(
        phi: &Formula,
        bound: &mut Vec<IndividualVar>,
        out: &mut BTreeSet<IndividualVar>,
    ) {
        let visit = |v: &IndividualVar, bound: &Vec<IndividualVar>, out: &mut BTreeSet<IndividualVar>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match phi {
            Formula::Equation(x, y) => {
                visit(x, bound, out);
                visit(y, bound, out);
            }
            Formula::PredAtom { args, .. } | Formula::VarAtom { args, .. } => {
                for a in args {
                    visit(a, bound, out);
                }
            }
            Formula::Not(p) => walk(p, bound, out),
            Formula::Or(a, b) => {
                walk(a, bound, out);
                walk(b, bound, out);
            }
            Formula::ExistsInd(x, body) => {
                bound.push(x.clone());
                walk(body, bound, out);
                bound.pop();
            }
            Formula::ExistsRel(_, body) | Formula::ExistsNewSorts(_, body) => {
                walk(body, bound, out)
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(phi, &mut Vec::new(), &mut out);
    out
}

/// Free relation variables; a block binds all of its members.
pub fn free_relation_vars(phi: &Formula) -> BTreeSet<RelationVar> {
    fn walk(phi: &Formula, bound: &mut Vec<RelationVar>, out: &mut BTreeSet<RelationVar>) {
        match phi {
            Formula::Equation(..) | Formula::PredAtom { .. } => {}
            Formula::VarAtom { var, .. } => {
                if !bound.contains(var) {
                    out.insert(var.clone());
                }
            }
            Formula::Not(p) => walk(p, bound, out),
            Formula::Or(a, b) => {
                walk(a, bound, out);
                walk(b, bound, out);
            }
            Formula::ExistsInd(_, body) => walk(body, bound, out),
            Formula::ExistsRel(x, body) => {
                bound.push(x.clone());
                walk(body, bound, out);
                bound.pop();
            }
            Formula::ExistsNewSorts(block, body) => {
                let n = block.len();
                bound.extend(block.iter().cloned());
                walk(body, bound, out);
                bound.truncate(bound.len() - n);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(phi, &mut Vec::new(), &mut out);
    out
}

/// Predicate symbols occurring anywhere in the formula, with the argument
/// sorts attached to their occurrences.
pub fn occurring_symbols(phi: &Formula) -> BTreeMap<String, Vec<SortId>> {
    fn walk(phi: &Formula, out: &mut BTreeMap<String, Vec<SortId>>) {
        match phi {
            Formula::PredAtom { pred, args } => {
                out.entry(pred.clone())
                    .or_insert_with(|| args.iter().map(|a| a.sort).collect());
            }
            Formula::Equation(..) | Formula::VarAtom { .. } => {}
            Formula::Not(p) => walk(p, out),
            Formula::Or(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Formula::ExistsInd(_, body)
            | Formula::ExistsRel(_, body)
            | Formula::ExistsNewSorts(_, body) => walk(body, out),
        }
    }
    let mut out = BTreeMap::new();
    walk(phi, &mut out);
    out
}

/// The free sorts of a formula: the sorts whose domains must already be
/// fixed to evaluate it. Equations and atoms contribute the sorts of their
/// arguments, both individual quantifiers and relation quantifiers *add*
/// their variable's sorts, and only the new-sort block *removes* sorts
/// (the union of its block's sort tuples).
pub fn free_sorts(phi: &Formula) -> SortSet {
    match phi {
        Formula::Equation(x, y) => [x.sort, y.sort].into_iter().collect(),
        Formula::PredAtom { args, .. } | Formula::VarAtom { args, .. } => {
            args.iter().map(|a| a.sort).collect()
        }
        Formula::Not(p) => free_sorts(p),
        Formula::Or(a, b) => {
            let mut s = free_sorts(a);
            s.extend(free_sorts(b));
            s
        }
        Formula::ExistsInd(x, body) => {
            let mut s = free_sorts(body);
            s.insert(x.sort);
            s
        }
        Formula::ExistsRel(x, body) => {
            let mut s = free_sorts(body);
            s.extend(x.sorts.iter().copied());
            s
        }
        Formula::ExistsNewSorts(block, body) => {
            let mut s = free_sorts(body);
            for member in block {
                for sort in &member.sorts {
                    s.remove(sort);
                }
            }
            s
        }
    }
}

/// Union of the sort tuples of a block's members.
pub fn block_sorts(block: &[RelationVar]) -> SortSet {
    block
        .iter()
        .flat_map(|v| v.sorts.iter().copied())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WellFormednessViolation {
    #[error("atom {atom}: {detail}")]
    SortMismatchAtAtom { atom: String, detail: String },
    #[error("predicate symbol `{0}` is not declared in the vocabulary")]
    UndeclaredSymbol(String),
    #[error("new-sort block {binder}: {offender} violates the New Sort Condition")]
    NewSortViolation { binder: String, offender: String },
}

fn display_block(block: &[RelationVar]) -> String {
    let parts: Vec<String> = block.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// New Sort Condition for one block node: the body may not freely mention a
/// variable or symbol whose sorts meet the block's sorts, block members
/// excepted.
pub(crate) fn new_sort_condition_violations(
    voc: &Vocabulary,
    block: &[RelationVar],
    body: &Formula,
) -> Vec<WellFormednessViolation> {
    let mut out = Vec::new();
    let new = block_sorts(block);
    let binder = display_block(block);
    for v in free_individual_vars(body) {
        if new.contains(&v.sort) {
            out.push(WellFormednessViolation::NewSortViolation {
                binder: binder.clone(),
                offender: format!("free variable {}", v),
            });
        }
    }
    for v in free_relation_vars(body) {
        if block.contains(&v) {
            continue;
        }
        if v.sorts.iter().any(|s| new.contains(s)) {
            out.push(WellFormednessViolation::NewSortViolation {
                binder: binder.clone(),
                offender: format!("free relation variable {}", v),
            });
        }
    }
    for (name, fallback) in occurring_symbols(body) {
        let sorts = voc
            .sorts_of(&name)
            .map(<[SortId]>::to_vec)
            .unwrap_or(fallback);
        if sorts.iter().any(|s| new.contains(s)) {
            out.push(WellFormednessViolation::NewSortViolation {
                binder: binder.clone(),
                offender: format!("symbol `{}`", name),
            });
        }
    }
    out
}

/// Checks every formula invariant, including the New Sort Condition at each
/// block node. Returns all violations rather than stopping at the first.
pub fn well_formed(voc: &Vocabulary, phi: &Formula) -> Result<(), Vec<WellFormednessViolation>> {
    fn walk(voc: &Vocabulary, phi: &Formula, out: &mut Vec<WellFormednessViolation>) {
        match phi {
            Formula::Equation(..) => {}
            Formula::PredAtom { pred, args } => match voc.sorts_of(pred) {
                None => out.push(WellFormednessViolation::UndeclaredSymbol(pred.clone())),
                Some(sorts) => {
                    let got: Vec<SortId> = args.iter().map(|a| a.sort).collect();
                    if got != sorts {
                        out.push(WellFormednessViolation::SortMismatchAtAtom {
                            atom: format!("{}(..)", pred),
                            detail: format!(
                                "declared sorts ({}), argument sorts ({})",
                                sorts.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                                got.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                            ),
                        });
                    }
                }
            },
            Formula::VarAtom { var, args } => {
                let got: Vec<SortId> = args.iter().map(|a| a.sort).collect();
                if got != var.sorts {
                    out.push(WellFormednessViolation::SortMismatchAtAtom {
                        atom: format!("{}(..)", var.name),
                        detail: format!(
                            "variable sorts ({}), argument sorts ({})",
                            var.sorts.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                            got.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                        ),
                    });
                }
            }
            Formula::Not(p) => walk(voc, p, out),
            Formula::Or(a, b) => {
                walk(voc, a, out);
                walk(voc, b, out);
            }
            Formula::ExistsInd(_, body) | Formula::ExistsRel(_, body) => walk(voc, body, out),
            Formula::ExistsNewSorts(block, body) => {
                out.extend(new_sort_condition_violations(voc, block, body));
                walk(voc, body, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(voc, phi, &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("sort clash: `{replacement}` cannot stand in for `{target}`")]
    SortClash { target: String, replacement: String },
    #[error("`{replacement}` is not free for `{target}`: captured by binder `{binder}`")]
    CaptureViolation {
        target: String,
        replacement: String,
        binder: String,
    },
}

fn occurs_free_ind(phi: &Formula, x: &IndividualVar) -> bool {
    match phi {
        Formula::Equation(a, b) => a == x || b == x,
        Formula::PredAtom { args, .. } | Formula::VarAtom { args, .. } => args.contains(x),
        Formula::Not(p) => occurs_free_ind(p, x),
        Formula::Or(a, b) => occurs_free_ind(a, x) || occurs_free_ind(b, x),
        Formula::ExistsInd(v, body) => v != x && occurs_free_ind(body, x),
        Formula::ExistsRel(_, body) | Formula::ExistsNewSorts(_, body) => occurs_free_ind(body, x),
    }
}

fn occurs_free_rel(phi: &Formula, x: &RelationVar) -> bool {
    match phi {
        Formula::Equation(..) | Formula::PredAtom { .. } => false,
        Formula::VarAtom { var, .. } => var == x,
        Formula::Not(p) => occurs_free_rel(p, x),
        Formula::Or(a, b) => occurs_free_rel(a, x) || occurs_free_rel(b, x),
        Formula::ExistsInd(_, body) => occurs_free_rel(body, x),
        Formula::ExistsRel(v, body) => v != x && occurs_free_rel(body, x),
        Formula::ExistsNewSorts(block, body) => {
            !block.contains(x) && occurs_free_rel(body, x)
        }
    }
}

/// Simultaneous substitution of individual variables: every free occurrence
/// of a target is replaced by its partner. Targets must be pairwise distinct.
/// Fails if sorts disagree or a replacement would be captured.
pub fn substitute_individuals(
    phi: &Formula,
    pairs: &[(IndividualVar, IndividualVar)],
) -> Result<Formula, SubstError> {
    for (x, y) in pairs {
        if x.sort != y.sort {
            return Err(SubstError::SortClash {
                target: x.to_string(),
                replacement: y.to_string(),
            });
        }
    }
    debug_assert!(
        {
            let targets: BTreeSet<_> = pairs.iter().map(|(x, _)| x).collect();
            targets.len() == pairs.len()
        },
        "substitution targets must be distinct"
    );
    fn go(
        phi: &Formula,
        pairs: &[(IndividualVar, IndividualVar)],
    ) -> Result<Formula, SubstError> {
        let lookup = |v: &IndividualVar| {
            pairs
                .iter()
                .find(|(x, _)| x == v)
                .map(|(_, y)| y.clone())
                .unwrap_or_else(|| v.clone())
        };
        Ok(match phi {
            Formula::Equation(a, b) => Formula::Equation(lookup(a), lookup(b)),
            Formula::PredAtom { pred, args } => Formula::PredAtom {
                pred: pred.clone(),
                args: args.iter().map(lookup).collect(),
            },
            Formula::VarAtom { var, args } => Formula::VarAtom {
                var: var.clone(),
                args: args.iter().map(lookup).collect(),
            },
            Formula::Not(p) => Formula::not(go(p, pairs)?),
            Formula::Or(a, b) => Formula::or(go(a, pairs)?, go(b, pairs)?),
            Formula::ExistsInd(v, body) => {
                // The binder shadows any substitution targeting it.
                let inner: Vec<_> = pairs.iter().filter(|(x, _)| x != v).cloned().collect();
                if inner.is_empty() {
                    phi.clone()
                } else {
                    for (x, y) in &inner {
                        if y == v && occurs_free_ind(body, x) {
                            return Err(SubstError::CaptureViolation {
                                target: x.to_string(),
                                replacement: y.to_string(),
                                binder: v.to_string(),
                            });
                        }
                    }
                    Formula::exists(v.clone(), go(body, &inner)?)
                }
            }
            Formula::ExistsRel(v, body) => Formula::exists_rel(v.clone(), go(body, pairs)?),
            Formula::ExistsNewSorts(block, body) => {
                Formula::exists_new(block.clone(), go(body, pairs)?)
            }
        })
    }
    go(phi, pairs)
}

/// `phi(y/x)` for individual variables.
pub fn substitute_individual(
    phi: &Formula,
    x: &IndividualVar,
    y: &IndividualVar,
) -> Result<Formula, SubstError> {
    substitute_individuals(phi, &[(x.clone(), y.clone())])
}

/// Simultaneous substitution of relation variables in atom heads.
pub fn substitute_relations(
    phi: &Formula,
    pairs: &[(RelationVar, RelationVar)],
) -> Result<Formula, SubstError> {
    for (x, y) in pairs {
        if x.sorts != y.sorts {
            return Err(SubstError::SortClash {
                target: x.to_string(),
                replacement: y.to_string(),
            });
        }
    }
    fn go(phi: &Formula, pairs: &[(RelationVar, RelationVar)]) -> Result<Formula, SubstError> {
        Ok(match phi {
            Formula::Equation(..) | Formula::PredAtom { .. } => phi.clone(),
            Formula::VarAtom { var, args } => {
                let var = pairs
                    .iter()
                    .find(|(x, _)| x == var)
                    .map(|(_, y)| y.clone())
                    .unwrap_or_else(|| var.clone());
                Formula::VarAtom {
                    var,
                    args: args.clone(),
                }
            }
            Formula::Not(p) => Formula::not(go(p, pairs)?),
            Formula::Or(a, b) => Formula::or(go(a, pairs)?, go(b, pairs)?),
            Formula::ExistsInd(v, body) => Formula::exists(v.clone(), go(body, pairs)?),
            Formula::ExistsRel(v, body) => {
                let inner: Vec<_> = pairs.iter().filter(|(x, _)| x != v).cloned().collect();
                if inner.is_empty() {
                    phi.clone()
                } else {
                    for (x, y) in &inner {
                        if y == v && occurs_free_rel(body, x) {
                            return Err(SubstError::CaptureViolation {
                                target: x.to_string(),
                                replacement: y.to_string(),
                                binder: v.to_string(),
                            });
                        }
                    }
                    Formula::exists_rel(v.clone(), go(body, &inner)?)
                }
            }
            Formula::ExistsNewSorts(block, body) => {
                let inner: Vec<_> = pairs
                    .iter()
                    .filter(|(x, _)| !block.contains(x))
                    .cloned()
                    .collect();
                if inner.is_empty() {
                    phi.clone()
                } else {
                    for (x, y) in &inner {
                        if block.contains(y) && occurs_free_rel(body, x) {
                            return Err(SubstError::CaptureViolation {
                                target: x.to_string(),
                                replacement: y.to_string(),
                                binder: display_block(block),
                            });
                        }
                    }
                    Formula::exists_new(block.clone(), go(body, &inner)?)
                }
            }
        })
    }
    go(phi, pairs)
}

/// `phi(Y/X)` for relation variables.
pub fn substitute_relation(
    phi: &Formula,
    x: &RelationVar,
    y: &RelationVar,
) -> Result<Formula, SubstError> {
    substitute_relations(phi, &[(x.clone(), y.clone())])
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelativizeError {
    #[error("guard must be unary, `{0}` is not")]
    NotUnary(String),
    #[error("predicate `{0}` is not declared in the vocabulary")]
    UnknownPredicate(String),
    #[error("quantifier over {var} does not range over the guard sort {guard_sort}")]
    SortClash { var: String, guard_sort: SortId },
}

enum GuardAtom {
    Pred(String),
    Var(RelationVar),
}

impl GuardAtom {
    fn apply(&self, x: &IndividualVar) -> Formula {
        match self {
            GuardAtom::Pred(name) => Formula::pred(name.clone(), vec![x.clone()]),
            GuardAtom::Var(v) => Formula::rel(v.clone(), vec![x.clone()]),
        }
    }
}

fn relativize_with(
    phi: &Formula,
    sort: SortId,
    guard: &GuardAtom,
) -> Result<Formula, RelativizeError> {
    Ok(match phi {
        Formula::Equation(..) | Formula::PredAtom { .. } | Formula::VarAtom { .. } => phi.clone(),
        Formula::Not(p) => Formula::not(relativize_with(p, sort, guard)?),
        Formula::Or(a, b) => Formula::or(
            relativize_with(a, sort, guard)?,
            relativize_with(b, sort, guard)?,
        ),
        Formula::ExistsInd(x, body) => {
            if x.sort != sort {
                return Err(RelativizeError::SortClash {
                    var: x.to_string(),
                    guard_sort: sort,
                });
            }
            Formula::exists(
                x.clone(),
                Formula::and(guard.apply(x), relativize_with(body, sort, guard)?),
            )
        }
        Formula::ExistsRel(v, body) => {
            Formula::exists_rel(v.clone(), relativize_with(body, sort, guard)?)
        }
        Formula::ExistsNewSorts(block, body) => {
            Formula::exists_new(block.clone(), relativize_with(body, sort, guard)?)
        }
    })
}

/// Restricts every individual quantifier of `phi` to the extension of a
/// unary vocabulary predicate: `E x. psi` becomes `E x. (P(x) & psi)`, and
/// through the sugar expansion `A x. psi` becomes `A x. (P(x) -> psi)`.
pub fn relativize_to_pred(
    phi: &Formula,
    voc: &Vocabulary,
    pred: &str,
) -> Result<Formula, RelativizeError> {
    let sorts = voc
        .sorts_of(pred)
        .ok_or_else(|| RelativizeError::UnknownPredicate(pred.to_string()))?;
    if sorts.len() != 1 {
        return Err(RelativizeError::NotUnary(pred.to_string()));
    }
    relativize_with(phi, sorts[0], &GuardAtom::Pred(pred.to_string()))
}

/// Same as [`relativize_to_pred`] with a unary relation variable as guard.
pub fn relativize_to_var(phi: &Formula, guard: &RelationVar) -> Result<Formula, RelativizeError> {
    if guard.arity() != 1 {
        return Err(RelativizeError::NotUnary(guard.to_string()));
    }
    relativize_with(phi, guard.sorts[0], &GuardAtom::Var(guard.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("sort closure needs a sentence; `{0}` occurs free")]
    NotASentence(String),
    #[error("symbol `{0}` occurs in the formula but is not declared")]
    UndeclaredSymbol(String),
}

/// Universally closes a sentence over its vocabulary: each occurring symbol
/// is replaced by a fresh relation variable of the same sorts and the result
/// is wrapped in one universal new-sort block over those variables. Free
/// sorts not covered by any symbol get an extra fresh unary block variable,
/// so the closure always has empty free sorts and is therefore evaluable,
/// with the same verdict, in any structure.
pub fn sort_closure(phi: &Formula, voc: &Vocabulary) -> Result<Formula, ClosureError> {
    if let Some(v) = free_individual_vars(phi).into_iter().next() {
        return Err(ClosureError::NotASentence(v.to_string()));
    }
    if let Some(v) = free_relation_vars(phi).into_iter().next() {
        return Err(ClosureError::NotASentence(v.to_string()));
    }

    let mut avoid: BTreeSet<String> = voc.symbols().map(|(n, _)| n.to_string()).collect();
    fn collect_rel_names(phi: &Formula, out: &mut BTreeSet<String>) {
        match phi {
            Formula::VarAtom { var, .. } => {
                out.insert(var.name.clone());
            }
            Formula::Equation(..) | Formula::PredAtom { .. } => {}
            Formula::Not(p) => collect_rel_names(p, out),
            Formula::Or(a, b) => {
                collect_rel_names(a, out);
                collect_rel_names(b, out);
            }
            Formula::ExistsInd(_, body) => collect_rel_names(body, out),
            Formula::ExistsRel(v, body) => {
                out.insert(v.name.clone());
                collect_rel_names(body, out);
            }
            Formula::ExistsNewSorts(block, body) => {
                for v in block {
                    out.insert(v.name.clone());
                }
                collect_rel_names(body, out);
            }
        }
    }
    collect_rel_names(phi, &mut avoid);
    let mut counter = 0u32;
    let mut fresh_name = move |avoid: &BTreeSet<String>| loop {
        counter += 1;
        let candidate = format!("X{}", counter);
        if !avoid.contains(&candidate) {
            return candidate;
        }
    };

    let mut block = Vec::new();
    let mut pairs = Vec::new();
    for (name, _) in occurring_symbols(phi) {
        let sorts = voc
            .sorts_of(&name)
            .ok_or_else(|| ClosureError::UndeclaredSymbol(name.clone()))?
            .to_vec();
        let var = RelationVar::new(fresh_name(&avoid), sorts);
        avoid.insert(var.name.clone());
        block.push(var.clone());
        pairs.push((name, var));
    }

    fn replace(phi: &Formula, pairs: &[(String, RelationVar)]) -> Formula {
        match phi {
            Formula::PredAtom { pred, args } => {
                match pairs.iter().find(|(name, _)| name == pred) {
                    Some((_, var)) => Formula::rel(var.clone(), args.clone()),
                    None => phi.clone(),
                }
            }
            Formula::Equation(..) | Formula::VarAtom { .. } => phi.clone(),
            Formula::Not(p) => Formula::not(replace(p, pairs)),
            Formula::Or(a, b) => Formula::or(replace(a, pairs), replace(b, pairs)),
            Formula::ExistsInd(v, body) => Formula::exists(v.clone(), replace(body, pairs)),
            Formula::ExistsRel(v, body) => Formula::exists_rel(v.clone(), replace(body, pairs)),
            Formula::ExistsNewSorts(b, body) => {
                Formula::exists_new(b.clone(), replace(body, pairs))
            }
        }
    }
    let body = replace(phi, &pairs);

    // Sorts that occur only through quantifiers stay free after the symbol
    // block is subtracted; a dummy unary member per leftover sort closes them.
    let covered = block_sorts(&block);
    for sort in free_sorts(&body) {
        if !covered.contains(&sort) {
            let var = RelationVar::new(fresh_name(&avoid), vec![sort]);
            avoid.insert(var.name.clone());
            block.push(var);
        }
    }

    if block.is_empty() {
        // Closed formula with no symbols and no free sorts needs no block.
        return Ok(body);
    }
    Ok(Formula::forall_new(block, body))
}

/// Quantifier nesting depth; each of the three quantifier kinds counts one,
/// a block counts one regardless of its width.
pub fn quantifier_rank(phi: &Formula) -> u32 {
    match phi {
        Formula::Equation(..) | Formula::PredAtom { .. } | Formula::VarAtom { .. } => 0,
        Formula::Not(p) => quantifier_rank(p),
        Formula::Or(a, b) => quantifier_rank(a).max(quantifier_rank(b)),
        Formula::ExistsInd(_, body)
        | Formula::ExistsRel(_, body)
        | Formula::ExistsNewSorts(_, body) => 1 + quantifier_rank(body),
    }
}

/// Renames bound variables to canonical names (`#0`, `#1`, ... by binder
/// depth), leaving free occurrences untouched. Two formulas are
/// alpha-equivalent exactly when their normal forms are equal.
pub fn alpha_normalize(phi: &Formula) -> Formula {
    fn canon(depth: u32) -> String {
        format!("#{}", depth)
    }
    fn go(
        phi: &Formula,
        depth: u32,
        ind_env: &mut Vec<(IndividualVar, IndividualVar)>,
        rel_env: &mut Vec<(RelationVar, RelationVar)>,
    ) -> Formula {
        let lookup_ind = |v: &IndividualVar, env: &Vec<(IndividualVar, IndividualVar)>| {
            env.iter()
                .rev()
                .find(|(orig, _)| orig == v)
                .map(|(_, new)| new.clone())
                .unwrap_or_else(|| v.clone())
        };
        let lookup_rel = |v: &RelationVar, env: &Vec<(RelationVar, RelationVar)>| {
            env.iter()
                .rev()
                .find(|(orig, _)| orig == v)
                .map(|(_, new)| new.clone())
                .unwrap_or_else(|| v.clone())
        };
        match phi {
            Formula::Equation(a, b) => {
                Formula::Equation(lookup_ind(a, ind_env), lookup_ind(b, ind_env))
            }
            Formula::PredAtom { pred, args } => Formula::PredAtom {
                pred: pred.clone(),
                args: args.iter().map(|a| lookup_ind(a, ind_env)).collect(),
            },
            Formula::VarAtom { var, args } => Formula::VarAtom {
                var: lookup_rel(var, rel_env),
                args: args.iter().map(|a| lookup_ind(a, ind_env)).collect(),
            },
            Formula::Not(p) => Formula::not(go(p, depth, ind_env, rel_env)),
            Formula::Or(a, b) => Formula::or(
                go(a, depth, ind_env, rel_env),
                go(b, depth, ind_env, rel_env),
            ),
            Formula::ExistsInd(v, body) => {
                let renamed = IndividualVar::new(canon(depth), v.sort);
                ind_env.push((v.clone(), renamed.clone()));
                let body = go(body, depth + 1, ind_env, rel_env);
                ind_env.pop();
                Formula::exists(renamed, body)
            }
            Formula::ExistsRel(v, body) => {
                let renamed = RelationVar::new(canon(depth), v.sorts.clone());
                rel_env.push((v.clone(), renamed.clone()));
                let body = go(body, depth + 1, ind_env, rel_env);
                rel_env.pop();
                Formula::exists_rel(renamed, body)
            }
            Formula::ExistsNewSorts(block, body) => {
                let mut renamed = Vec::with_capacity(block.len());
                for (i, v) in block.iter().enumerate() {
                    let new = RelationVar::new(canon(depth + i as u32), v.sorts.clone());
                    rel_env.push((v.clone(), new.clone()));
                    renamed.push(new);
                }
                let body = go(body, depth + block.len() as u32, ind_env, rel_env);
                rel_env.truncate(rel_env.len() - block.len());
                Formula::exists_new(renamed, body)
            }
        }
    }
    go(phi, 0, &mut Vec::new(), &mut Vec::new())
}

/// Structural equality modulo bound-variable renaming.
pub fn alpha_equivalent(a: &Formula, b: &Formula) -> bool {
    alpha_normalize(a) == alpha_normalize(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ivar(name: &str, sort: u32) -> IndividualVar {
        IndividualVar::new(name, sort)
    }

    fn rvar(name: &str, sorts: &[u32]) -> RelationVar {
        RelationVar::new(name, sorts.iter().map(|&s| SortId(s)).collect())
    }

    #[test]
    fn vocabulary_rejects_duplicates() {
        let mut voc = Vocabulary::new();
        voc.declare("P", vec![SortId(0)]).unwrap();
        assert_eq!(
            voc.declare("P", vec![SortId(1)]),
            Err(VocabularyError::DuplicateSymbol("P".into()))
        );
    }

    #[test]
    fn field_style_vocabulary_is_valid() {
        // Relational encoding of a multiplication with its unit.
        let voc = Vocabulary::from_pairs([
            ("Mult", vec![SortId(0), SortId(0), SortId(0)]),
            ("One", vec![SortId(0)]),
        ])
        .unwrap();
        assert_eq!(voc.arity_of("Mult"), Some(3));
        assert!(Vocabulary::from_pairs::<&str, _>([]).unwrap().is_empty());
    }

    #[test]
    fn equations_may_cross_sorts() {
        let voc = Vocabulary::new();
        let phi = Formula::eq(ivar("x", 0), ivar("u", 1));
        assert!(well_formed(&voc, &phi).is_ok());
        assert_eq!(
            free_sorts(&phi),
            [SortId(0), SortId(1)].into_iter().collect::<SortSet>()
        );
    }

    #[test]
    fn new_sort_condition_rejects_free_variable_and_symbol() {
        let voc = Vocabulary::from_pairs([("P", vec![SortId(5)])]).unwrap();
        let x = ivar("x", 5);
        // Es (X:(5)). (X(x) & P(x)) with x:5 free and P over sort 5.
        let phi = Formula::exists_new(
            vec![rvar("X", &[5])],
            Formula::and(
                Formula::rel(rvar("X", &[5]), vec![x.clone()]),
                Formula::pred("P", vec![x.clone()]),
            ),
        );
        let violations = well_formed(&voc, &phi).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, WellFormednessViolation::NewSortViolation { .. })));
        assert_eq!(violations.len(), 2, "both the variable and the symbol offend");
    }

    #[test]
    fn block_members_are_exempt_from_the_condition() {
        let voc = Vocabulary::new();
        let z = ivar("z", 1);
        let phi = Formula::exists_new(
            vec![rvar("X", &[1])],
            Formula::forall(
                z.clone(),
                Formula::iff(
                    Formula::rel(rvar("X", &[1]), vec![z.clone()]),
                    Formula::eq(z.clone(), z.clone()),
                ),
            ),
        );
        assert!(well_formed(&voc, &phi).is_ok());
        assert!(free_sorts(&phi).is_empty());
    }

    #[test]
    fn free_vars_of_equation() {
        let phi = Formula::eq(ivar("x", 0), ivar("y", 0));
        let free = free_individual_vars(&phi);
        assert_eq!(free.len(), 2);
    }

    #[test]
    fn exists_binds_individual_but_not_relation() {
        let phi = Formula::exists(
            ivar("x", 0),
            Formula::rel(rvar("X", &[0]), vec![ivar("x", 0)]),
        );
        assert!(free_individual_vars(&phi).is_empty());
        assert_eq!(
            free_relation_vars(&phi).into_iter().collect::<Vec<_>>(),
            vec![rvar("X", &[0])]
        );
    }

    #[test]
    fn block_binds_all_members() {
        let body = Formula::and(
            Formula::rel(rvar("A", &[2]), vec![ivar("x", 2)]),
            Formula::rel(rvar("Z", &[2]), vec![ivar("x", 2)]),
        );
        let phi = Formula::exists_new(vec![rvar("A", &[2]), rvar("Z", &[2])], body.clone());
        assert!(free_relation_vars(&phi).is_empty());
        assert_eq!(free_relation_vars(&body).len(), 2);
    }

    #[test]
    fn same_name_different_sort_is_a_different_variable() {
        let phi = Formula::exists(ivar("x", 0), Formula::eq(ivar("x", 0), ivar("x", 1)));
        let free: Vec<_> = free_individual_vars(&phi).into_iter().collect();
        assert_eq!(free, vec![ivar("x", 1)]);
    }

    #[test]
    fn free_sorts_add_quantified_sorts_and_blocks_remove_them() {
        // E x:0 adds sort 0 even though nothing else mentions it.
        let phi = Formula::exists(ivar("x", 0), Formula::eq(ivar("u", 1), ivar("u", 1)));
        assert_eq!(
            free_sorts(&phi),
            [SortId(0), SortId(1)].into_iter().collect::<SortSet>()
        );
        // Relation quantifier adds its sorts too.
        let psi = Formula::exists_rel(rvar("X", &[3, 4]), Formula::eq(ivar("x", 0), ivar("x", 0)));
        assert_eq!(
            free_sorts(&psi),
            [SortId(0), SortId(3), SortId(4)].into_iter().collect::<SortSet>()
        );
    }

    #[test]
    fn substitute_simple_and_shadowed() {
        let x = ivar("x", 0);
        let y = ivar("y", 0);
        // (x=x)(y/x) = y=y
        let phi = Formula::eq(x.clone(), x.clone());
        assert_eq!(
            substitute_individual(&phi, &x, &y).unwrap(),
            Formula::eq(y.clone(), y.clone())
        );
        // (P(x) | E x. Q(x))(y/x) replaces only the free occurrence.
        let phi = Formula::or(
            Formula::pred("P", vec![x.clone()]),
            Formula::exists(x.clone(), Formula::pred("Q", vec![x.clone()])),
        );
        let expected = Formula::or(
            Formula::pred("P", vec![y.clone()]),
            Formula::exists(x.clone(), Formula::pred("Q", vec![x.clone()])),
        );
        assert_eq!(substitute_individual(&phi, &x, &y).unwrap(), expected);
    }

    #[test]
    fn substitute_detects_capture_and_sort_clash() {
        let x = ivar("x", 0);
        let y = ivar("y", 0);
        // (E y. x=y)(y/x) would capture y.
        let phi = Formula::exists(y.clone(), Formula::eq(x.clone(), y.clone()));
        assert!(matches!(
            substitute_individual(&phi, &x, &y),
            Err(SubstError::CaptureViolation { .. })
        ));
        assert!(matches!(
            substitute_individual(&phi, &x, &ivar("z", 1)),
            Err(SubstError::SortClash { .. })
        ));
    }

    #[test]
    fn substitute_relation_mirrors_individual_behaviour() {
        let x = rvar("X", &[0]);
        let y = rvar("Y", &[0]);
        let arg = ivar("a", 0);
        let atom = |v: &RelationVar| Formula::rel(v.clone(), vec![arg.clone()]);
        assert_eq!(substitute_relation(&atom(&x), &x, &y).unwrap(), atom(&y));
        // Capture under E2 Y.
        let phi = Formula::exists_rel(y.clone(), Formula::and(atom(&x), atom(&y)));
        assert!(matches!(
            substitute_relation(&phi, &x, &y),
            Err(SubstError::CaptureViolation { .. })
        ));
        // Sort clash.
        assert!(matches!(
            substitute_relation(&atom(&x), &x, &rvar("Y", &[1])),
            Err(SubstError::SortClash { .. })
        ));
        // Shadowed occurrences stay put.
        let phi = Formula::exists_rel(x.clone(), atom(&x));
        assert_eq!(substitute_relation(&phi, &x, &y).unwrap(), phi);
    }

    #[test]
    fn relativize_guards_quantifiers_and_leaves_atoms() {
        let voc = Vocabulary::from_pairs([("R", vec![SortId(0)]), ("P", vec![SortId(0)])]).unwrap();
        let x = ivar("x", 0);
        let phi = Formula::exists(x.clone(), Formula::pred("R", vec![x.clone()]));
        let expected = Formula::exists(
            x.clone(),
            Formula::and(
                Formula::pred("P", vec![x.clone()]),
                Formula::pred("R", vec![x.clone()]),
            ),
        );
        assert_eq!(relativize_to_pred(&phi, &voc, "P").unwrap(), expected);
        // Quantifier-free formulas are fixpoints.
        let atom = Formula::pred("R", vec![x.clone()]);
        assert_eq!(relativize_to_pred(&atom, &voc, "P").unwrap(), atom);
        // Quantifier over a different sort clashes.
        let bad = Formula::exists(ivar("u", 1), Formula::eq(ivar("u", 1), ivar("u", 1)));
        assert!(matches!(
            relativize_to_pred(&bad, &voc, "P"),
            Err(RelativizeError::SortClash { .. })
        ));
    }

    #[test]
    fn sort_closure_single_symbol() {
        let voc = Vocabulary::from_pairs([("P", vec![SortId(0)])]).unwrap();
        let x = ivar("x", 0);
        let phi = Formula::forall(x.clone(), Formula::pred("P", vec![x.clone()]));
        let closed = sort_closure(&phi, &voc).unwrap();
        let fresh = rvar("X1", &[0]);
        let expected = Formula::forall_new(
            vec![fresh.clone()],
            Formula::forall(x.clone(), Formula::rel(fresh, vec![x])),
        );
        assert_eq!(closed, expected);
        assert!(free_sorts(&closed).is_empty());
        assert!(well_formed(&voc, &closed).is_ok());
    }

    #[test]
    fn sort_closure_covers_sorts_without_symbols() {
        let voc = Vocabulary::new();
        // E x:5. x=x has free sort 5 but no symbol to carry it.
        let phi = Formula::exists(ivar("x", 5), Formula::eq(ivar("x", 5), ivar("x", 5)));
        let closed = sort_closure(&phi, &voc).unwrap();
        assert!(free_sorts(&closed).is_empty());
        assert!(well_formed(&voc, &closed).is_ok());
    }

    #[test]
    fn sort_closure_requires_sentence() {
        let voc = Vocabulary::new();
        let phi = Formula::eq(ivar("x", 0), ivar("x", 0));
        assert!(matches!(
            sort_closure(&phi, &voc),
            Err(ClosureError::NotASentence(_))
        ));
    }

    #[test]
    fn quantifier_rank_counts_all_kinds() {
        let x = ivar("x", 0);
        assert_eq!(quantifier_rank(&Formula::eq(x.clone(), x.clone())), 0);
        let phi = Formula::exists(
            x.clone(),
            Formula::exists_rel(rvar("X", &[0]), Formula::eq(x.clone(), x.clone())),
        );
        assert_eq!(quantifier_rank(&phi), 2);
        let blocked = Formula::exists_new(vec![rvar("Y", &[1])], Formula::eq(x.clone(), x.clone()));
        assert_eq!(quantifier_rank(&blocked), 1);
    }

    #[test]
    fn alpha_normalization_identifies_renamings() {
        let phi = Formula::exists(ivar("x", 0), Formula::eq(ivar("x", 0), ivar("x", 0)));
        let psi = Formula::exists(ivar("y", 0), Formula::eq(ivar("y", 0), ivar("y", 0)));
        assert!(alpha_equivalent(&phi, &psi));
        let chi = Formula::exists(ivar("y", 1), Formula::eq(ivar("y", 1), ivar("y", 1)));
        assert!(!alpha_equivalent(&phi, &chi));
        // Free variables must not be renamed.
        let free = Formula::eq(ivar("a", 0), ivar("a", 0));
        assert_eq!(alpha_normalize(&free), free);
    }

    #[test]
    fn well_formed_is_closed_under_subformulas() {
        let voc = Vocabulary::from_pairs([("P", vec![SortId(0)])]).unwrap();
        let x = ivar("x", 0);
        let phi = Formula::exists_new(
            vec![rvar("X", &[7])],
            Formula::and(
                Formula::forall(
                    ivar("z", 7),
                    Formula::rel(rvar("X", &[7]), vec![ivar("z", 7)]),
                ),
                Formula::pred("P", vec![x.clone()]),
            ),
        );
        assert!(well_formed(&voc, &phi).is_ok());
        fn subformulas<'a>(phi: &'a Formula, out: &mut Vec<&'a Formula>) {
            out.push(phi);
            match phi {
                Formula::Equation(..) | Formula::PredAtom { .. } | Formula::VarAtom { .. } => {}
                Formula::Not(p) => subformulas(p, out),
                Formula::Or(a, b) => {
                    subformulas(a, out);
                    subformulas(b, out);
                }
                Formula::ExistsInd(_, b)
                | Formula::ExistsRel(_, b)
                | Formula::ExistsNewSorts(_, b) => subformulas(b, out),
            }
        }
        let mut all = Vec::new();
        subformulas(&phi, &mut all);
        for sub in all {
            assert!(well_formed(&voc, sub).is_ok(), "subformula failed: {:?}", sub);
        }
    }
}
