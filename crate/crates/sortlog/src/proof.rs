//! Hilbert-style proof checking: recognizers for every axiom family and a
//! line-by-line verifier for the two rules of proof.
//!
//! Schema matching is structural, stable under renaming of bound variables,
//! and never up to logical equivalence: conjunctions must be written in the
//! parser's left-associated shape and biconditionals with `<->`.

use thiserror::Error;

use crate::syntax::{
    alpha_normalize, block_sorts, free_individual_vars, free_relation_vars, free_sorts,
    new_sort_condition_violations, substitute_individuals, substitute_relation,
    substitute_relations, well_formed, Formula, IndividualVar, RelationVar, SortId, Vocabulary,
};

/// How a proof line claims to be justified. Line references are 1-based and
/// must point at earlier lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Premise,
    Tautology,
    Identity,
    QuantAxiomInd,
    QuantAxiomRel,
    QuantAxiomNewSort,
    Comprehension1,
    Comprehension2,
    PowerSort,
    InfiniteSort,
    Mp(usize, usize),
    GenInd(usize, IndividualVar),
    GenRel(usize, RelationVar),
    GenNewSort(usize, Vec<RelationVar>),
}

impl std::fmt::Display for Justification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Justification::Premise => write!(f, "premise"),
            Justification::Tautology => write!(f, "tautology"),
            Justification::Identity => write!(f, "identity"),
            Justification::QuantAxiomInd => write!(f, "quant-ind"),
            Justification::QuantAxiomRel => write!(f, "quant-rel"),
            Justification::QuantAxiomNewSort => write!(f, "quant-sort"),
            Justification::Comprehension1 => write!(f, "comp1"),
            Justification::Comprehension2 => write!(f, "comp2"),
            Justification::PowerSort => write!(f, "power-sort"),
            Justification::InfiniteSort => write!(f, "infinite-sort"),
            Justification::Mp(i, j) => write!(f, "mp {} {}", i, j),
            Justification::GenInd(i, x) => write!(f, "gen-ind {} {}", i, x),
            Justification::GenRel(i, x) => write!(f, "gen-rel {} {}", i, x),
            Justification::GenNewSort(i, xs) => {
                let names: Vec<String> = xs.iter().map(ToString::to_string).collect();
                write!(f, "gen-sort {} {}", i, names.join(" "))
            }
        }
    }
}

/// A derivation: a theory and numbered lines, each a formula plus its
/// claimed justification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub vocabulary: Vocabulary,
    pub theory: Vec<Formula>,
    pub lines: Vec<(Formula, Justification)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineVerdict {
    pub index: usize,
    pub ok: bool,
    pub diagnostic: String,
}

/// The checker's output: one verdict per line. `budget_exceeded` marks the
/// case where a tautology line had more distinct atoms than the truth-table
/// cap; such a line is rejected rather than guessed at.
#[derive(Debug, Clone)]
pub struct ProofReport {
    pub lines: Vec<LineVerdict>,
    pub budget_exceeded: bool,
}

impl ProofReport {
    pub fn all_ok(&self) -> bool {
        self.lines.iter().all(|l| l.ok)
    }
}

/// Truth tables are capped at this many distinct atoms (65536 rows).
pub const TAUTOLOGY_ATOM_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("propositional skeleton has more than {0} distinct atoms")]
pub struct AtomCapExceeded(pub usize);

enum Skeleton {
    Atom(usize),
    Not(Box<Skeleton>),
    Or(Box<Skeleton>, Box<Skeleton>),
}

fn skeleton(phi: &Formula, atoms: &mut Vec<Formula>) -> Result<Skeleton, AtomCapExceeded> {
    match phi {
        Formula::Not(p) => Ok(Skeleton::Not(Box::new(skeleton(p, atoms)?))),
        Formula::Or(a, b) => Ok(Skeleton::Or(
            Box::new(skeleton(a, atoms)?),
            Box::new(skeleton(b, atoms)?),
        )),
        _ => {
            // Maximal non-propositional subformulas are the atoms, keyed up
            // to renaming of their bound variables.
            let key = alpha_normalize(phi);
            let idx = match atoms.iter().position(|a| *a == key) {
                Some(i) => i,
                None => {
                    if atoms.len() >= TAUTOLOGY_ATOM_CAP {
                        return Err(AtomCapExceeded(TAUTOLOGY_ATOM_CAP));
                    }
                    atoms.push(key);
                    atoms.len() - 1
                }
            };
            Ok(Skeleton::Atom(idx))
        }
    }
}

fn skeleton_truth(s: &Skeleton, valuation: u32) -> bool {
    match s {
        Skeleton::Atom(i) => valuation >> i & 1 == 1,
        Skeleton::Not(p) => !skeleton_truth(p, valuation),
        Skeleton::Or(a, b) => skeleton_truth(a, valuation) || skeleton_truth(b, valuation),
    }
}

/// Is the propositional skeleton a tautology by truth table?
pub fn recognize_tautology(phi: &Formula) -> Result<bool, AtomCapExceeded> {
    let mut atoms = Vec::new();
    let skel = skeleton(phi, &mut atoms)?;
    let n = atoms.len() as u32;
    Ok((0..(1u64 << n)).all(|v| skeleton_truth(&skel, v as u32)))
}

/// Reflexivity, symmetry, or the atomic congruence scheme
/// `(x1=y1 & ... & xn=yn & phi) -> phi(ys/xs)`.
pub fn recognize_identity(phi: &Formula) -> bool {
    if let Formula::Equation(a, b) = phi {
        return a == b;
    }
    if let Some((hyp, concl)) = phi.as_implies() {
        if let (Formula::Equation(a, b), Formula::Equation(c, d)) = (hyp, concl) {
            if a == d && b == c {
                return true;
            }
        }
        let parts = hyp.flatten_and();
        if parts.len() >= 2 {
            let atom = *parts.last().unwrap();
            if matches!(
                atom,
                Formula::Equation(..) | Formula::PredAtom { .. } | Formula::VarAtom { .. }
            ) {
                let mut pairs = Vec::new();
                let mut all_equations = true;
                for part in &parts[..parts.len() - 1] {
                    match part {
                        Formula::Equation(x, y) => pairs.push((x.clone(), y.clone())),
                        _ => {
                            all_equations = false;
                            break;
                        }
                    }
                }
                let distinct = pairs
                    .iter()
                    .enumerate()
                    .all(|(i, (x, _))| pairs[..i].iter().all(|(w, _)| w != x));
                if all_equations && distinct && pairs.iter().all(|(x, y)| x.sort == y.sort) {
                    if let Ok(image) = substitute_individuals(atom, &pairs) {
                        return &image == concl;
                    }
                }
            }
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantAxiomKind {
    Individual,
    Relation,
    NewSort,
}

/// Matches `phi(y/x) -> E x. phi` and its relation and new-sort forms,
/// verifying the substitution, its free-for side condition, and (for the
/// new-sort form) the New Sort Condition of the conclusion.
pub fn recognize_quant_axiom(voc: &Vocabulary, phi: &Formula) -> Option<QuantAxiomKind> {
    let (lhs, rhs) = phi.as_implies()?;
    match rhs {
        Formula::ExistsInd(x, body) => {
            let mut candidates: Vec<IndividualVar> = vec![x.clone()];
            for v in free_individual_vars(lhs) {
                if v.sort == x.sort && !candidates.contains(&v) {
                    candidates.push(v);
                }
            }
            for y in candidates {
                if let Ok(image) = substitute_individuals(body, &[(x.clone(), y)]) {
                    if &image == lhs {
                        return Some(QuantAxiomKind::Individual);
                    }
                }
            }
            None
        }
        Formula::ExistsRel(x, body) => {
            let mut candidates: Vec<RelationVar> = vec![x.clone()];
            for v in free_relation_vars(lhs) {
                if v.sorts == x.sorts && !candidates.contains(&v) {
                    candidates.push(v);
                }
            }
            for y in candidates {
                if let Ok(image) = substitute_relation(body, x, &y) {
                    if &image == lhs {
                        return Some(QuantAxiomKind::Relation);
                    }
                }
            }
            None
        }
        Formula::ExistsNewSorts(block, body) => {
            if !new_sort_condition_violations(voc, block, body).is_empty() {
                return None;
            }
            // Simultaneous witnesses, one per block member.
            let mut candidate_sets: Vec<Vec<RelationVar>> = Vec::new();
            for member in block {
                let mut cs = vec![member.clone()];
                for v in free_relation_vars(lhs) {
                    if v.sorts == member.sorts && !cs.contains(&v) {
                        cs.push(v);
                    }
                }
                candidate_sets.push(cs);
            }
            let mut pick = vec![0usize; block.len()];
            loop {
                let pairs: Vec<(RelationVar, RelationVar)> = block
                    .iter()
                    .zip(&pick)
                    .map(|(m, &i)| (m.clone(), candidate_sets[block.iter().position(|b| b == m).unwrap()][i].clone()))
                    .collect();
                if let Ok(image) = substitute_relations(body, &pairs) {
                    if &image == lhs {
                        return Some(QuantAxiomKind::NewSort);
                    }
                }
                let mut i = 0;
                loop {
                    if i == pick.len() {
                        return None;
                    }
                    pick[i] += 1;
                    if pick[i] < candidate_sets[i].len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
            }
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComprehensionKind {
    First,
    Second,
}

fn peel_foralls<'a>(mut phi: &'a Formula, n: usize) -> Option<(Vec<&'a IndividualVar>, &'a Formula)> {
    let mut vars = Vec::with_capacity(n);
    for _ in 0..n {
        let (v, body) = phi.as_forall_ind()?;
        vars.push(v);
        phi = body;
    }
    Some((vars, phi))
}

/// Matches `E2 X. A y1...ym. (X(ys) <-> psi)` with `X` not free in `psi`,
/// and the new-sort block form for the second kind.
pub fn recognize_comprehension(voc: &Vocabulary, phi: &Formula) -> Option<ComprehensionKind> {
    let (x, chain, kind) = match phi {
        Formula::ExistsRel(x, chain) => (x, chain.as_ref(), ComprehensionKind::First),
        Formula::ExistsNewSorts(block, chain) => {
            if block.len() != 1 {
                return None;
            }
            if !new_sort_condition_violations(voc, block, chain).is_empty() {
                return None;
            }
            (&block[0], chain.as_ref(), ComprehensionKind::Second)
        }
        _ => return None,
    };
    let (ys, core) = peel_foralls(chain, x.arity())?;
    for (i, y) in ys.iter().enumerate() {
        if ys[..i].contains(y) {
            return None;
        }
    }
    let (head, psi) = core.as_iff()?;
    match head {
        Formula::VarAtom { var, args } if var == x && args.iter().eq(ys.iter().copied()) => {}
        _ => return None,
    }
    if free_relation_vars(psi).contains(x) {
        return None;
    }
    let expected: Vec<SortId> = ys.iter().map(|y| y.sort).collect();
    if expected != x.sorts {
        return None;
    }
    Some(kind)
}

/// Matches the power-sort axiom: a single-member block `Es (Y)` over a
/// conjunction of (1) a bridge making the copy sort extensionally equal to
/// the base sort, (2) its converse, (3) extensionality of codes, and (4)
/// surjectivity of the coding onto all relations. The base, copy, and code
/// sorts must be pairwise distinct.
pub fn recognize_power_sort(phi: &Formula) -> bool {
    let Formula::ExistsNewSorts(block, body) = phi else {
        return false;
    };
    if block.len() != 1 {
        return false;
    }
    let y_rel = &block[0];
    if y_rel.arity() < 2 {
        return false;
    }
    let code_sort = y_rel.sorts[0];
    let copy_sort = y_rel.sorts[1];
    let n = y_rel.arity() - 1;
    if y_rel.sorts[1..].iter().any(|s| *s != copy_sort) {
        return false;
    }
    let parts = body.flatten_and();
    if parts.len() != 4 {
        return false;
    }

    // (1) A u. E z. u = z
    let base_sort = {
        let Some((u, rest)) = parts[0].as_forall_ind() else {
            return false;
        };
        let Formula::ExistsInd(z, eq) = rest else {
            return false;
        };
        if z.sort != copy_sort {
            return false;
        }
        match eq.as_ref() {
            Formula::Equation(a, b) if a == u && b == z => {}
            _ => return false,
        }
        u.sort
    };
    if base_sort == copy_sort || base_sort == code_sort || copy_sort == code_sort {
        return false;
    }

    // (2) A z. E u. u = z
    {
        let Some((z, rest)) = parts[1].as_forall_ind() else {
            return false;
        };
        if z.sort != copy_sort {
            return false;
        }
        let Formula::ExistsInd(u, eq) = rest else {
            return false;
        };
        if u.sort != base_sort {
            return false;
        }
        match eq.as_ref() {
            Formula::Equation(a, b) if a == u && b == z => {}
            _ => return false,
        }
    }

    // (3) A x. A y. ((A zs. (Y(x, zs) <-> Y(y, zs))) -> x = y)
    {
        let Some((vars, rest)) = peel_foralls(parts[2], 2) else {
            return false;
        };
        let (x, y) = (vars[0], vars[1]);
        if x.sort != code_sort || y.sort != code_sort || x == y {
            return false;
        }
        let Some((inner, eq)) = rest.as_implies() else {
            return false;
        };
        match eq {
            Formula::Equation(a, b) if a == x && b == y => {}
            _ => return false,
        }
        let Some((zs, core)) = peel_foralls(inner, n) else {
            return false;
        };
        if zs.iter().any(|z| z.sort != copy_sort) {
            return false;
        }
        for (i, z) in zs.iter().enumerate() {
            if zs[..i].contains(z) {
                return false;
            }
        }
        let Some((l, r)) = core.as_iff() else {
            return false;
        };
        let want = |first: &IndividualVar, side: &Formula| -> bool {
            match side {
                Formula::VarAtom { var, args } => {
                    var == y_rel
                        && args.len() == n + 1
                        && &args[0] == first
                        && args[1..].iter().eq(zs.iter().copied())
                }
                _ => false,
            }
        };
        if !want(x, l) || !want(y, r) {
            return false;
        }
    }

    // (4) A2 X. E x. A zs. (X(zs) <-> Y(x, zs))
    {
        let Some((x_rel, rest)) = parts[3].as_forall_rel() else {
            return false;
        };
        if x_rel.sorts != vec![copy_sort; n] {
            return false;
        }
        let Formula::ExistsInd(x, chain) = rest else {
            return false;
        };
        if x.sort != code_sort {
            return false;
        }
        let Some((zs, core)) = peel_foralls(chain, n) else {
            return false;
        };
        if zs.iter().any(|z| z.sort != copy_sort) {
            return false;
        }
        let Some((l, r)) = core.as_iff() else {
            return false;
        };
        match l {
            Formula::VarAtom { var, args } if var == x_rel && args.iter().eq(zs.iter().copied()) => {}
            _ => return false,
        }
        match r {
            Formula::VarAtom { var, args }
                if var == y_rel
                    && args.len() == n + 1
                    && args[0] == *x
                    && args[1..].iter().eq(zs.iter().copied()) => {}
            _ => return false,
        }
    }
    true
}

/// Matches the infinite-sort axiom: a single-member block `Es (X:(s,s))`
/// over the conjunction of functionality, injectivity, totality, and
/// non-surjectivity of `X` as a self-map of the new sort.
pub fn recognize_infinite_sort(phi: &Formula) -> bool {
    let Formula::ExistsNewSorts(block, body) = phi else {
        return false;
    };
    if block.len() != 1 {
        return false;
    }
    let x_rel = &block[0];
    if x_rel.arity() != 2 || x_rel.sorts[0] != x_rel.sorts[1] {
        return false;
    }
    let sort = x_rel.sorts[0];
    let parts = body.flatten_and();
    if parts.len() != 4 {
        return false;
    }
    let atom = |var: &IndividualVar, war: &IndividualVar, side: &Formula| -> bool {
        matches!(side, Formula::VarAtom { var: v, args } if v == x_rel && args.len() == 2 && &args[0] == var && &args[1] == war)
    };

    // (1) A x. A y. A z. ((X(x,y) & X(x,z)) -> y = z)
    {
        let Some((vars, rest)) = peel_foralls(parts[0], 3) else {
            return false;
        };
        let (x, y, z) = (vars[0], vars[1], vars[2]);
        if [x, y, z].iter().any(|v| v.sort != sort) || x == y || x == z || y == z {
            return false;
        }
        let Some((hyp, concl)) = rest.as_implies() else {
            return false;
        };
        let Some((a, b)) = hyp.as_and() else {
            return false;
        };
        if !(atom(x, y, a) && atom(x, z, b)) {
            return false;
        }
        match concl {
            Formula::Equation(l, r) if l == y && r == z => {}
            _ => return false,
        }
    }
    // (2) A x. A y. A z. ((X(x,z) & X(y,z)) -> x = y)
    {
        let Some((vars, rest)) = peel_foralls(parts[1], 3) else {
            return false;
        };
        let (x, y, z) = (vars[0], vars[1], vars[2]);
        if [x, y, z].iter().any(|v| v.sort != sort) || x == y || x == z || y == z {
            return false;
        }
        let Some((hyp, concl)) = rest.as_implies() else {
            return false;
        };
        let Some((a, b)) = hyp.as_and() else {
            return false;
        };
        if !(atom(x, z, a) && atom(y, z, b)) {
            return false;
        }
        match concl {
            Formula::Equation(l, r) if l == x && r == y => {}
            _ => return false,
        }
    }
    // (3) A x. E y. X(x, y)
    {
        let Some((x, rest)) = parts[2].as_forall_ind() else {
            return false;
        };
        let Formula::ExistsInd(y, inner) = rest else {
            return false;
        };
        if x.sort != sort || y.sort != sort {
            return false;
        }
        if !atom(x, y, inner) {
            return false;
        }
    }
    // (4) E z. A x. A y. (X(x,y) -> ~y = z)
    {
        let Formula::ExistsInd(z, rest) = parts[3] else {
            return false;
        };
        if z.sort != sort {
            return false;
        }
        let Some((vars, inner)) = peel_foralls(rest, 2) else {
            return false;
        };
        let (x, y) = (vars[0], vars[1]);
        if x.sort != sort || y.sort != sort || x == y || x == z || y == z {
            return false;
        }
        let Some((hyp, concl)) = inner.as_implies() else {
            return false;
        };
        if !atom(x, y, hyp) {
            return false;
        }
        match concl {
            Formula::Not(eq) => match eq.as_ref() {
                Formula::Equation(l, r) if l == y && r == z => {}
                _ => return false,
            },
            _ => return false,
        }
    }
    true
}

/// Verifies every line of a derivation. A failed line gets a diagnostic and
/// checking continues: later lines may still refer to its formula.
pub fn check_proof(proof: &Proof) -> ProofReport {
    let mut verdicts = Vec::with_capacity(proof.lines.len());
    let mut budget_exceeded = false;
    for (idx0, (formula, just)) in proof.lines.iter().enumerate() {
        let index = idx0 + 1;
        let mut ok = true;
        let mut diagnostic = String::new();
        let fail = |ok: &mut bool, diagnostic: &mut String, msg: String| {
            *ok = false;
            *diagnostic = msg;
        };
        if let Err(violations) = well_formed(&proof.vocabulary, formula) {
            fail(
                &mut ok,
                &mut diagnostic,
                format!("line is not well-formed: {}", violations[0]),
            );
            verdicts.push(LineVerdict { index, ok, diagnostic });
            continue;
        }
        let earlier = |i: usize| -> Result<&Formula, String> {
            if i == 0 || i >= index {
                Err(format!("reference {} is not an earlier line", i))
            } else {
                Ok(&proof.lines[i - 1].0)
            }
        };
        match just {
            Justification::Premise => {
                if !proof.theory.contains(formula) {
                    fail(&mut ok, &mut diagnostic, "formula is not in the theory".into());
                }
            }
            Justification::Tautology => match recognize_tautology(formula) {
                Ok(true) => {}
                Ok(false) => fail(
                    &mut ok,
                    &mut diagnostic,
                    "not a tautology of propositional logic".into(),
                ),
                Err(e) => {
                    budget_exceeded = true;
                    fail(&mut ok, &mut diagnostic, e.to_string());
                }
            },
            Justification::Identity => {
                if !recognize_identity(formula) {
                    fail(&mut ok, &mut diagnostic, "not an identity axiom".into());
                }
            }
            Justification::QuantAxiomInd
            | Justification::QuantAxiomRel
            | Justification::QuantAxiomNewSort => {
                let expected = match just {
                    Justification::QuantAxiomInd => QuantAxiomKind::Individual,
                    Justification::QuantAxiomRel => QuantAxiomKind::Relation,
                    _ => QuantAxiomKind::NewSort,
                };
                match recognize_quant_axiom(&proof.vocabulary, formula) {
                    Some(kind) if kind == expected => {}
                    Some(_) => fail(
                        &mut ok,
                        &mut diagnostic,
                        "quantifier axiom of a different kind".into(),
                    ),
                    None => fail(
                        &mut ok,
                        &mut diagnostic,
                        "not a quantifier axiom (substitution or side condition fails)".into(),
                    ),
                }
            }
            Justification::Comprehension1 | Justification::Comprehension2 => {
                let expected = if matches!(just, Justification::Comprehension1) {
                    ComprehensionKind::First
                } else {
                    ComprehensionKind::Second
                };
                match recognize_comprehension(&proof.vocabulary, formula) {
                    Some(kind) if kind == expected => {}
                    Some(_) => fail(
                        &mut ok,
                        &mut diagnostic,
                        "comprehension axiom of the other kind".into(),
                    ),
                    None => fail(
                        &mut ok,
                        &mut diagnostic,
                        "not a comprehension axiom instance".into(),
                    ),
                }
            }
            Justification::PowerSort => {
                if !recognize_power_sort(formula) {
                    fail(
                        &mut ok,
                        &mut diagnostic,
                        "not a power-sort axiom instance (shape or sort side conditions fail)".into(),
                    );
                }
            }
            Justification::InfiniteSort => {
                if !recognize_infinite_sort(formula) {
                    fail(
                        &mut ok,
                        &mut diagnostic,
                        "not an infinite-sort axiom instance".into(),
                    );
                }
            }
            Justification::Mp(i, j) => match (earlier(*i), earlier(*j)) {
                (Ok(prem), Ok(imp)) => {
                    let expected = Formula::implies(prem.clone(), formula.clone());
                    if *imp != expected {
                        fail(
                            &mut ok,
                            &mut diagnostic,
                            format!("line {} is not (line {} -> this line)", j, i),
                        );
                    }
                }
                (Err(e), _) | (_, Err(e)) => fail(&mut ok, &mut diagnostic, e),
            },
            Justification::GenInd(i, x) => match earlier(*i) {
                Ok(prev) => match (prev.as_implies(), formula.as_implies()) {
                    (Some((hyp, psi)), Some((ex, psi2))) => {
                        let expected = Formula::exists(x.clone(), hyp.clone());
                        if psi != psi2 {
                            fail(&mut ok, &mut diagnostic, "conclusion differs from the cited line".into());
                        } else if *ex != expected {
                            fail(
                                &mut ok,
                                &mut diagnostic,
                                format!("antecedent is not E {}. of the cited antecedent", x),
                            );
                        } else if free_individual_vars(psi).contains(x) {
                            fail(
                                &mut ok,
                                &mut diagnostic,
                                format!("{} occurs free in the conclusion", x),
                            );
                        } else if let Some(t) = proof
                            .theory
                            .iter()
                            .find(|t| free_individual_vars(t).contains(x))
                        {
                            fail(
                                &mut ok,
                                &mut diagnostic,
                                format!("{} occurs free in theory sentence {}", x, t),
                            );
                        }
                    }
                    _ => fail(&mut ok, &mut diagnostic, "both lines must be implications".into()),
                },
                Err(e) => fail(&mut ok, &mut diagnostic, e),
            },
            Justification::GenRel(i, x) => match earlier(*i) {
                Ok(prev) => match (prev.as_implies(), formula.as_implies()) {
                    (Some((hyp, psi)), Some((ex, psi2))) => {
                        let expected = Formula::exists_rel(x.clone(), hyp.clone());
                        if psi != psi2 {
                            fail(&mut ok, &mut diagnostic, "conclusion differs from the cited line".into());
                        } else if *ex != expected {
                            fail(
                                &mut ok,
                                &mut diagnostic,
                                format!("antecedent is not E2 {}. of the cited antecedent", x),
                            );
                        } else if free_relation_vars(psi).contains(x) {
                            fail(
                                &mut ok,
                                &mut diagnostic,
                                format!("{} occurs free in the conclusion", x),
                            );
                        } else if let Some(t) = proof
                            .theory
                            .iter()
                            .find(|t| free_relation_vars(t).contains(x))
                        {
                            fail(
                                &mut ok,
                                &mut diagnostic,
                                format!("{} occurs free in theory sentence {}", x, t),
                            );
                        }
                    }
                    _ => fail(&mut ok, &mut diagnostic, "both lines must be implications".into()),
                },
                Err(e) => fail(&mut ok, &mut diagnostic, e),
            },
            Justification::GenNewSort(i, block) => match earlier(*i) {
                Ok(prev) => match (prev.as_implies(), formula.as_implies()) {
                    (Some((hyp, psi)), Some((ex, psi2))) => {
                        if block.is_empty() {
                            fail(&mut ok, &mut diagnostic, "empty block".into());
                        } else {
                            let expected = Formula::exists_new(block.clone(), hyp.clone());
                            let clash: Vec<SortId> = {
                                let news = block_sorts(block);
                                free_sorts(psi).intersection(&news).copied().collect()
                            };
                            if psi != psi2 {
                                fail(&mut ok, &mut diagnostic, "conclusion differs from the cited line".into());
                            } else if *ex != expected {
                                fail(
                                    &mut ok,
                                    &mut diagnostic,
                                    "antecedent is not the new-sort closure of the cited antecedent".into(),
                                );
                            } else if !clash.is_empty() {
                                fail(
                                    &mut ok,
                                    &mut diagnostic,
                                    format!(
                                        "free sort {} of the conclusion occurs in the block's sorts",
                                        clash[0]
                                    ),
                                );
                            }
                        }
                    }
                    _ => fail(&mut ok, &mut diagnostic, "both lines must be implications".into()),
                },
                Err(e) => fail(&mut ok, &mut diagnostic, e),
            },
        }
        verdicts.push(LineVerdict { index, ok, diagnostic });
    }
    ProofReport {
        lines: verdicts,
        budget_exceeded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn voc() -> Vocabulary {
        Vocabulary::from_pairs([("P", vec![SortId(0)]), ("Q", vec![SortId(0)])]).unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &voc()).unwrap()
    }

    #[test]
    fn tautologies() {
        assert!(recognize_tautology(&f("P(x:0) | ~P(x:0)")).unwrap());
        assert!(recognize_tautology(&f("P(x:0) -> P(x:0)")).unwrap());
        assert!(!recognize_tautology(&f("P(x:0) | Q(x:0)")).unwrap());
        // Alpha-variant atoms are identified.
        assert!(recognize_tautology(&f("(E x:0. P(x)) | ~(E y:0. P(y))")).unwrap());
    }

    #[test]
    fn tautology_atom_cap() {
        // 17 distinct atoms overflow the cap.
        let mut phi = f("x1:0 = x1:0");
        for i in 2..=17 {
            phi = Formula::or(phi, f(&format!("x{}:0 = x{}:0", i, i)));
        }
        assert!(recognize_tautology(&phi).is_err());
    }

    #[test]
    fn identity_axioms() {
        assert!(recognize_identity(&f("x:0 = x:0")));
        assert!(recognize_identity(&f("x:0 = y:0 -> y:0 = x:0")));
        assert!(recognize_identity(&f("(x:0 = y:0 & P(x:0)) -> P(y:0)")));
        // Two equations, simultaneous substitution into an equation.
        assert!(recognize_identity(&f(
            "(x:0 = y:0 & u:0 = v:0 & x:0 = u:0) -> y:0 = v:0"
        )));
        // x = y alone is not an axiom.
        assert!(!recognize_identity(&f("x:0 = y:0")));
        assert!(!recognize_identity(&f("(x:0 = y:0 & P(x:0)) -> P(x:0)")));
        // Sort clash between the equated variables.
        assert!(!recognize_identity(&f("(x:0 = y:1 & P(x:0)) -> P(x:0)")));
    }

    #[test]
    fn quantifier_axioms() {
        let v = voc();
        assert_eq!(
            recognize_quant_axiom(&v, &f("y:0 = y:0 -> E x:0. x = x")),
            Some(QuantAxiomKind::Individual)
        );
        assert_eq!(
            recognize_quant_axiom(&v, &f("P(x:0) -> E x:0. P(x)")),
            Some(QuantAxiomKind::Individual)
        );
        // Capture: (E y. x = y)(y/x) -> E x. E y. x = y is not an instance.
        assert_eq!(
            recognize_quant_axiom(&v, &f("(E y:0. y = y) -> E x:0. E y:0. x = y")),
            None
        );
        let rel = f("(E x:0. Y:(0)(x)) -> E2 X:(0). E x:0. X(x)");
        assert_eq!(recognize_quant_axiom(&v, &rel), Some(QuantAxiomKind::Relation));
        let ns = f("(E x:7. Y:(7)(x)) -> Es (X:(7)). E x:7. X(x)");
        assert_eq!(recognize_quant_axiom(&v, &ns), Some(QuantAxiomKind::NewSort));
        assert_eq!(recognize_quant_axiom(&v, &f("P(x:0) -> Q(x:0)")), None);
    }

    #[test]
    fn comprehension_schemas() {
        let v = voc();
        assert_eq!(
            recognize_comprehension(&v, &f("E2 X:(0). A y:0. (X(y) <-> y = y)")),
            Some(ComprehensionKind::First)
        );
        assert_eq!(
            recognize_comprehension(&v, &f("Es (X:(5)). A y:5. (X(y) <-> y = y)")),
            Some(ComprehensionKind::Second)
        );
        // Binary with a defining formula over the vocabulary.
        assert_eq!(
            recognize_comprehension(
                &v,
                &f("E2 X:(0,0). A y:0. A z:0. (X(y, z) <-> (P(y) & y = z))")
            ),
            Some(ComprehensionKind::First)
        );
        // X free in psi disqualifies.
        assert_eq!(
            recognize_comprehension(&v, &f("E2 X:(0). A y:0. (X(y) <-> X(y))")),
            None
        );
    }

    fn power_sort_n1() -> Formula {
        f("Es (Y:(2,1)). (\
             (A u:0. E z:1. u = z)\
           & (A z:1. E u:0. u = z)\
           & (A x:2. A y:2. ((A z:1. (Y(x, z) <-> Y(y, z))) -> x = y))\
           & (A2 X:(1). E x:2. A z:1. (X(z) <-> Y(x, z))))")
    }

    fn infinite_sort() -> Formula {
        f("Es (X:(0,0)). (\
             (A x:0. A y:0. A z:0. ((X(x, y) & X(x, z)) -> y = z))\
           & (A x:0. A y:0. A z:0. ((X(x, z) & X(y, z)) -> x = y))\
           & (A x:0. E y:0. X(x, y))\
           & (E z:0. A x:0. A y:0. (X(x, y) -> ~y = z)))")
    }

    #[test]
    fn power_sort_recognizer() {
        assert!(recognize_power_sort(&power_sort_n1()));
        // Renamed bound variables still match.
        let renamed = f("Es (W:(2,1)). (\
             (A a:0. E b:1. a = b)\
           & (A b:1. E a:0. a = b)\
           & (A c:2. A d:2. ((A b:1. (W(c, b) <-> W(d, b))) -> c = d))\
           & (A2 V:(1). E c:2. A b:1. (V(b) <-> W(c, b))))");
        assert!(recognize_power_sort(&renamed));
        // Code and copy sorts must differ: Y:(1,1) collapses them.
        let collapsed = f("Es (Y:(1,1)). (\
             (A u:0. E z:1. u = z)\
           & (A z:1. E u:0. u = z)\
           & (A x:1. A y:1. ((A z:1. (Y(x, z) <-> Y(y, z))) -> x = y))\
           & (A2 X:(1). E x:1. A z:1. (X(z) <-> Y(x, z))))");
        assert!(!recognize_power_sort(&collapsed));
        // s(x) != s(y) breaks the extensionality conjunct.
        let skew = f("Es (Y:(2,1)). (\
             (A u:0. E z:1. u = z)\
           & (A z:1. E u:0. u = z)\
           & (A x:2. A y:2. ((A z:1. (Y(x, z) <-> Y(x, z))) -> x = x))\
           & (A2 X:(1). E x:2. A z:1. (X(z) <-> Y(x, z))))");
        assert!(!recognize_power_sort(&skew));
    }

    #[test]
    fn infinite_sort_recognizer() {
        assert!(recognize_infinite_sort(&infinite_sort()));
        // A block over two different sorts is not the axiom.
        let wrong = f("Es (X:(0,1)). (\
             (A x:0. A y:1. A z:1. ((X(x, y) & X(x, z)) -> y = z))\
           & (A x:0. A y:0. A z:1. ((X(x, z) & X(y, z)) -> x = y))\
           & (A x:0. E y:1. X(x, y))\
           & (E z:1. A x:0. A y:1. (X(x, y) -> ~y = z)))");
        assert!(!recognize_infinite_sort(&wrong));
    }

    #[test]
    fn three_line_derivation_checks() {
        let proof = Proof {
            vocabulary: voc(),
            theory: vec![],
            lines: vec![
                (f("x:0 = x:0"), Justification::Identity),
                (
                    f("x:0 = x:0 -> E x:0. x = x"),
                    Justification::QuantAxiomInd,
                ),
                (f("E x:0. x = x"), Justification::Mp(1, 2)),
            ],
        };
        let report = check_proof(&proof);
        assert!(report.all_ok(), "{:?}", report.lines);
    }

    #[test]
    fn comprehension_line_checks() {
        let proof = Proof {
            vocabulary: voc(),
            theory: vec![],
            lines: vec![(
                f("Es (X:(5)). A y:5. (X(y) <-> y = y)"),
                Justification::Comprehension2,
            )],
        };
        assert!(check_proof(&proof).all_ok());
    }

    #[test]
    fn gen_new_sort_side_condition() {
        let v = voc();
        // From P(u:1) -> E x:0. x = x  infer  (Es (X:(1)). P-free hyp) -> ...
        // with the conclusion's free sort 0 disjoint from the block: fine.
        let hyp = parse_formula("(E u:5. Y:(5)(u)) -> E x:0. x = x", &v).unwrap();
        let concl =
            parse_formula("(Es (Y:(5)). E u:5. Y(u)) -> E x:0. x = x", &v).unwrap();
        let block = vec![RelationVar::new("Y", vec![SortId(5)])];
        let good = Proof {
            vocabulary: v.clone(),
            theory: vec![],
            lines: vec![
                (hyp.clone(), Justification::Premise),
                (concl, Justification::GenNewSort(1, block.clone())),
            ],
        };
        // Line 1 is not in the (empty) theory, but line 2's rule application
        // itself is judged locally.
        let report = check_proof(&good);
        assert!(!report.lines[0].ok);
        assert!(report.lines[1].ok, "{:?}", report.lines[1]);

        // Breach: the conclusion's free sort occurs in the block's sorts.
        let hyp2 = parse_formula("(E u:5. Y:(5)(u)) -> E x:5. x = x", &v).unwrap();
        let concl2 =
            parse_formula("(Es (Y:(5)). E u:5. Y(u)) -> E x:5. x = x", &v).unwrap();
        let bad = Proof {
            vocabulary: v,
            theory: vec![],
            lines: vec![
                (hyp2, Justification::Premise),
                (concl2, Justification::GenNewSort(1, block)),
            ],
        };
        let report = check_proof(&bad);
        assert!(!report.lines[1].ok);
        assert!(report.lines[1].diagnostic.contains("free sort"));
    }

    #[test]
    fn generalization_side_conditions() {
        let v = voc();
        let theory = vec![parse_formula("P(c:0)", &v).unwrap()];
        let prev = parse_formula("P(x:0) -> Q(y:0)", &v).unwrap();
        let concl = parse_formula("(E x:0. P(x)) -> Q(y:0)", &v).unwrap();
        let x = IndividualVar::new("x", 0u32);
        let proof = Proof {
            vocabulary: v.clone(),
            theory: theory.clone(),
            lines: vec![
                (prev.clone(), Justification::Premise),
                (concl.clone(), Justification::GenInd(1, x.clone())),
            ],
        };
        let report = check_proof(&proof);
        assert!(report.lines[1].ok, "{:?}", report.lines[1]);

        // x free in the theory blocks the rule.
        let theory_with_x = vec![parse_formula("P(x:0)", &v).unwrap()];
        let proof = Proof {
            vocabulary: v.clone(),
            theory: theory_with_x,
            lines: vec![
                (prev, Justification::Premise),
                (concl, Justification::GenInd(1, x.clone())),
            ],
        };
        assert!(!check_proof(&proof).lines[1].ok);

        // x free in the conclusion blocks the rule.
        let prev2 = parse_formula("P(x:0) -> Q(x:0)", &v).unwrap();
        let concl2 = parse_formula("(E x:0. P(x)) -> Q(x:0)", &v).unwrap();
        let proof = Proof {
            vocabulary: v,
            theory,
            lines: vec![
                (prev2, Justification::Premise),
                (concl2, Justification::GenInd(1, x)),
            ],
        };
        assert!(!check_proof(&proof).lines[1].ok);
    }

    #[test]
    fn mp_requires_the_right_implication() {
        let proof = Proof {
            vocabulary: voc(),
            theory: vec![],
            lines: vec![
                (f("x:0 = x:0"), Justification::Identity),
                (f("y:0 = y:0 -> E x:0. x = x"), Justification::QuantAxiomInd),
                (f("E x:0. x = x"), Justification::Mp(1, 2)),
            ],
        };
        let report = check_proof(&proof);
        assert!(report.lines[0].ok && report.lines[1].ok);
        assert!(!report.lines[2].ok, "premise mismatch must be caught");
        // Forward references are rejected.
        let proof = Proof {
            vocabulary: voc(),
            theory: vec![],
            lines: vec![(f("x:0 = x:0"), Justification::Mp(1, 2))],
        };
        assert!(!check_proof(&proof).lines[0].ok);
    }

    #[test]
    fn recognizers_are_alpha_invariant() {
        let v = voc();
        let phi = f("E2 X:(0). A y:0. (X(y) <-> y = y)");
        let renamed = f("E2 Z:(0). A w:0. (Z(w) <-> w = w)");
        assert_eq!(
            recognize_comprehension(&v, &phi),
            recognize_comprehension(&v, &renamed)
        );
        assert_eq!(
            crate::syntax::alpha_equivalent(&phi, &renamed),
            true
        );
    }
}
