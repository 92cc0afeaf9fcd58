//! Bounded three-valued evaluation over full structures.
//!
//! The truth clauses are the textbook ones: atoms and equations look up the
//! structure and the assignment, connectives are Kleene, `E x` folds over
//! the finite domain, `E2 X` ranges over all relations in the product, and
//! the new-sort block ranges over all expansions by new domains. The last
//! two ranges are unbounded in principle; the budget truncates them, and
//! whatever the truncated search cannot settle comes back `Unknown` rather
//! than as a guess. `True` and `False` are therefore final verdicts.

use thiserror::Error;

use crate::model::{validate_structure, Assignment, Budget, SortViolation, Structure, StructureViolation};
use crate::semantics::engine::{compile, Engine};
use crate::semantics::Verdict;
use crate::syntax::{
    free_individual_vars, free_relation_vars, free_sorts, well_formed, Formula, SortId, Vocabulary,
    WellFormednessViolation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreconditionViolation {
    #[error("formula is not well-formed: {}", format_list(.0))]
    NotWellFormed(Vec<WellFormednessViolation>),
    #[error("structure is invalid: {}", format_list(.0))]
    InvalidStructure(Vec<StructureViolation>),
    #[error("assignment is invalid: {0}")]
    InvalidAssignment(SortViolation),
    #[error("assignment does not cover free variable {0}")]
    UncoveredVariable(String),
    #[error("free sort {0} has no domain in the structure")]
    UnfixedFreeSort(SortId),
    #[error("symbol `{0}` occurs in the formula but has no interpretation")]
    UninterpretedSymbol(String),
    #[error("expected a sentence; `{0}` occurs free")]
    NotASentence(String),
}

fn format_list<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Evaluation outcome plus how much of the budget the search consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOutcome {
    pub verdict: Verdict,
    pub steps_used: u64,
}

fn check_preconditions(
    voc: &Vocabulary,
    m: &Structure,
    s: &Assignment,
    phi: &Formula,
) -> Result<(), PreconditionViolation> {
    well_formed(voc, phi).map_err(PreconditionViolation::NotWellFormed)?;
    validate_structure(voc, m).map_err(PreconditionViolation::InvalidStructure)?;
    s.validate(m).map_err(PreconditionViolation::InvalidAssignment)?;
    for var in free_individual_vars(phi) {
        if s.get_ind(&var).is_none() {
            return Err(PreconditionViolation::UncoveredVariable(var.to_string()));
        }
    }
    for var in free_relation_vars(phi) {
        if s.get_rel(&var).is_none() {
            return Err(PreconditionViolation::UncoveredVariable(var.to_string()));
        }
    }
    for sort in free_sorts(phi) {
        if !m.has_domain(sort) {
            return Err(PreconditionViolation::UnfixedFreeSort(sort));
        }
    }
    for (name, _) in crate::syntax::occurring_symbols(phi) {
        if m.interp(&name).is_none() {
            return Err(PreconditionViolation::UninterpretedSymbol(name));
        }
    }
    Ok(())
}

/// Evaluates `phi` in `m` under `s` within the budget, reporting the steps
/// spent alongside the verdict.
pub fn eval_with_stats(
    voc: &Vocabulary,
    m: &Structure,
    s: &Assignment,
    phi: &Formula,
    budget: &Budget,
) -> Result<EvalOutcome, PreconditionViolation> {
    check_preconditions(voc, m, s, phi)?;
    let mut engine = Engine::new(voc, m, budget);
    let compiled = compile(phi, &engine.pred_index)?;
    let verdict = engine.run(&compiled, s)?;
    Ok(EvalOutcome {
        verdict,
        steps_used: engine.steps_used(),
    })
}

/// Evaluates `phi` in `m` under the assignment `s` within the budget.
pub fn eval(
    voc: &Vocabulary,
    m: &Structure,
    s: &Assignment,
    phi: &Formula,
    budget: &Budget,
) -> Result<Verdict, PreconditionViolation> {
    eval_with_stats(voc, m, s, phi, budget).map(|o| o.verdict)
}

/// Evaluates a sentence under the empty assignment.
pub fn eval_sentence(
    voc: &Vocabulary,
    m: &Structure,
    phi: &Formula,
    budget: &Budget,
) -> Result<Verdict, PreconditionViolation> {
    if let Some(v) = free_individual_vars(phi).into_iter().next() {
        return Err(PreconditionViolation::NotASentence(v.to_string()));
    }
    if let Some(v) = free_relation_vars(phi).into_iter().next() {
        return Err(PreconditionViolation::NotASentence(v.to_string()));
    }
    eval(voc, m, &Assignment::new(), phi, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::syntax::{IndividualVar, RelationVar, SortId};

    fn one_sort(elems: &[&'static str]) -> Structure {
        let mut m = Structure::new();
        m.set_domain(0u32, elems.iter().copied());
        m
    }

    #[test]
    fn reflexivity_holds_everywhere() {
        let voc = Vocabulary::new();
        let m = one_sort(&["p", "q"]);
        let phi = parse_formula("A x:0. x = x", &voc).unwrap();
        assert_eq!(
            eval_sentence(&voc, &m, &phi, &Budget::default()).unwrap(),
            Verdict::True
        );
        let neg = parse_formula("A x:0. ~x = x", &voc).unwrap();
        assert_eq!(
            eval_sentence(&voc, &m, &neg, &Budget::default()).unwrap(),
            Verdict::False
        );
    }

    #[test]
    fn existential_individual_quantifier_is_exact() {
        let voc = Vocabulary::new();
        let m = one_sort(&["p", "q"]);
        let phi = parse_formula("E x:0. E y:0. ~x = y", &voc).unwrap();
        assert_eq!(
            eval_sentence(&voc, &m, &phi, &Budget::default()).unwrap(),
            Verdict::True
        );
        let single = one_sort(&["p"]);
        assert_eq!(
            eval_sentence(&voc, &single, &phi, &Budget::default()).unwrap(),
            Verdict::False
        );
    }

    #[test]
    fn relation_quantifier_finds_a_separating_set() {
        let voc = Vocabulary::new();
        let m = one_sort(&["p", "q"]);
        let phi = parse_formula("E2 X:(0). E x:0. E y:0. (X(x) & ~X(y))", &voc).unwrap();
        assert_eq!(
            eval_sentence(&voc, &m, &phi, &Budget::default()).unwrap(),
            Verdict::True
        );
        // On a single element no set separates.
        let single = one_sort(&["p"]);
        assert_eq!(
            eval_sentence(&voc, &single, &phi, &Budget::default()).unwrap(),
            Verdict::False
        );
    }

    #[test]
    fn forall_relation_is_exact_via_duality() {
        let voc = Vocabulary::new();
        let m = one_sort(&["p", "q"]);
        // Every unary relation is reflexive under equality of members.
        let phi = parse_formula("A2 X:(0). A x:0. (X(x) -> X(x))", &voc).unwrap();
        assert_eq!(
            eval_sentence(&voc, &m, &phi, &Budget::default()).unwrap(),
            Verdict::True
        );
        // Not every unary relation holds of every element.
        let bad = parse_formula("A2 X:(0). A x:0. X(x)", &voc).unwrap();
        assert_eq!(
            eval_sentence(&voc, &m, &bad, &Budget::default()).unwrap(),
            Verdict::False
        );
    }

    #[test]
    fn second_comprehension_instance_needs_one_new_element() {
        let voc = Vocabulary::new();
        let m = one_sort(&["p"]);
        let phi = parse_formula("Es (X:(7)). A y:7. (X(y) <-> y = y)", &voc).unwrap();
        assert_eq!(
            eval_sentence(&voc, &m, &phi, &Budget::with_domain_bound(1)).unwrap(),
            Verdict::True
        );
    }

    #[test]
    fn block_never_returns_false() {
        let voc = Vocabulary::new();
        let m = one_sort(&["p"]);
        // No new domain can make an element unequal to itself.
        let phi = parse_formula("Es (X:(7)). E y:7. ~y = y", &voc).unwrap();
        for bound in 0..4 {
            assert_eq!(
                eval_sentence(&voc, &m, &phi, &Budget::with_domain_bound(bound)).unwrap(),
                Verdict::Unknown
            );
        }
        // Dually a universal block never returns True: a refuting expansion
        // makes it False, exhaustion leaves it Unknown.
        let refuted = parse_formula("As (X:(7)). E y:7. ~y = y", &voc).unwrap();
        assert_eq!(
            eval_sentence(&voc, &m, &refuted, &Budget::default()).unwrap(),
            Verdict::False
        );
        let dual = parse_formula("As (X:(7)). A y:7. y = y", &voc).unwrap();
        assert_eq!(
            eval_sentence(&voc, &m, &dual, &Budget::default()).unwrap(),
            Verdict::Unknown
        );
    }

    #[test]
    fn relation_cap_degrades_to_unknown() {
        let voc = Vocabulary::new();
        let m = one_sort(&["a", "b", "c"]);
        // Forcing a full exploration of a binary relation space with almost
        // no budget cannot settle the universal claim.
        let phi = parse_formula("A2 X:(0,0). E x:0. X(x, x)", &voc).unwrap();
        let budget = Budget {
            relation_cap: 1,
            ..Budget::default()
        };
        assert_eq!(eval_sentence(&voc, &m, &phi, &budget).unwrap(), Verdict::Unknown);
        assert_eq!(
            eval_sentence(&voc, &m, &phi, &Budget::default()).unwrap(),
            Verdict::False
        );
    }

    #[test]
    fn preconditions_are_reported() {
        let voc = Vocabulary::new();
        let m = one_sort(&["p"]);
        let x = IndividualVar::new("x", 0u32);
        let free = Formula::eq(x.clone(), x.clone());
        assert!(matches!(
            eval_sentence(&voc, &m, &free, &Budget::default()),
            Err(PreconditionViolation::NotASentence(_))
        ));
        assert!(matches!(
            eval(&voc, &m, &Assignment::new(), &free, &Budget::default()),
            Err(PreconditionViolation::UncoveredVariable(_))
        ));
        // Free sort without a domain.
        let phi = Formula::exists(
            IndividualVar::new("u", 3u32),
            Formula::eq(IndividualVar::new("u", 3u32), IndividualVar::new("u", 3u32)),
        );
        assert!(matches!(
            eval_sentence(&voc, &m, &phi, &Budget::default()),
            Err(PreconditionViolation::UnfixedFreeSort(SortId(3)))
        ));
        // Uninterpreted symbol.
        let voc2 = Vocabulary::from_pairs([("P", vec![SortId(0)])]).unwrap();
        let atom = Formula::forall(
            x.clone(),
            Formula::pred("P", vec![x.clone()]),
        );
        assert!(matches!(
            eval_sentence(&voc2, &m, &atom, &Budget::default()),
            Err(PreconditionViolation::UninterpretedSymbol(_))
        ));
    }

    #[test]
    fn negation_duality() {
        let voc = Vocabulary::new();
        let m = one_sort(&["p", "q"]);
        let budget = Budget::default();
        for text in [
            "A x:0. x = x",
            "E x:0. E y:0. ~x = y",
            "Es (X:(7)). E y:7. ~y = y",
        ] {
            let phi = parse_formula(text, &voc).unwrap();
            let v = eval_sentence(&voc, &m, &phi, &budget).unwrap();
            let nv = eval_sentence(&voc, &m, &Formula::not(phi), &budget).unwrap();
            assert_eq!(nv, v.negate(), "duality failed for {}", text);
        }
    }

    #[test]
    fn assignment_values_feed_atoms() {
        let voc = Vocabulary::new();
        let m = one_sort(&["p", "q"]);
        let x = IndividualVar::new("x", 0u32);
        let big = RelationVar::new("X", vec![SortId(0)]);
        let phi = Formula::rel(big.clone(), vec![x.clone()]);
        let s = Assignment::new()
            .with_ind(&m, x.clone(), "p")
            .unwrap()
            .with_rel(&m, big.clone(), [vec!["p".to_string()]].into_iter().collect())
            .unwrap();
        assert_eq!(
            eval(&voc, &m, &s, &phi, &Budget::default()).unwrap(),
            Verdict::True
        );
        let s2 = s.with_ind(&m, x.clone(), "q").unwrap();
        assert_eq!(
            eval(&voc, &m, &s2, &phi, &Budget::default()).unwrap(),
            Verdict::False
        );
    }
}
