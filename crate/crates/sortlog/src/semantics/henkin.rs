//! Exact evaluation over finite Henkin structures.
//!
//! A Henkin structure supplies, next to its base structure, the pool `U` of
//! candidate domains for new-sort quantifiers and the pool `G` of candidate
//! relations for relation quantifiers. Truth is two-valued and decidable:
//! every quantifier ranges over a finite, explicitly given collection.
//!
//! Candidate relations are matched extensionally: a record serves a
//! relation variable when its arity fits and its tuples lie inside the
//! variable's current domain product. The sort tuple stored with a record
//! is validation metadata, so truth does not depend on how new sorts are
//! numbered, and `G` may hold relations over domains not attached to any
//! sort yet.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{validate_structure, Assignment, Elem, Structure, StructureViolation, Tuple, TupleSet};
use crate::semantics::full::PreconditionViolation;
use crate::syntax::{
    block_sorts, free_individual_vars, free_relation_vars, free_sorts, occurring_symbols,
    well_formed, Formula, IndividualVar, RelationVar, SortId, Vocabulary,
};

/// A candidate relation: a sort tuple for validation plus its tuples.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TypedRelation {
    pub sorts: Vec<SortId>,
    pub tuples: TupleSet,
}

/// A base structure plus the candidate domains `U` and candidate relations
/// `G`. Whether the triple genuinely satisfies the comprehension axioms is
/// checked separately by [`check_comprehension`]; evaluation is total on
/// any triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenkinStructure {
    pub base: Structure,
    pub candidate_domains: Vec<BTreeSet<Elem>>,
    pub candidate_relations: Vec<TypedRelation>,
}

impl HenkinStructure {
    pub fn full_over(base: Structure, extra_arities: &[usize]) -> Self {
        // Convenience for tests and examples: U = all nonempty subsets of
        // the element pool, G = all relations of the given arities over it.
        let pool: Vec<Elem> = base.element_pool().into_iter().collect();
        let mut candidate_domains = Vec::new();
        if pool.len() < 16 {
            for mask in 1u32..(1 << pool.len()) {
                let dom: BTreeSet<Elem> = (0..pool.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| pool[i].clone())
                    .collect();
                candidate_domains.push(dom);
            }
        }
        candidate_domains.sort_by_key(|d| (d.len(), d.iter().cloned().collect::<Vec<_>>()));
        let mut candidate_relations = Vec::new();
        for &arity in extra_arities {
            let mut tuples = vec![Vec::new()];
            for _ in 0..arity {
                let mut next = Vec::new();
                for prefix in &tuples {
                    for e in &pool {
                        let mut t: Tuple = prefix.clone();
                        t.push(e.clone());
                        next.push(t);
                    }
                }
                tuples = next;
            }
            if tuples.len() < 20 {
                for mask in 0u32..(1 << tuples.len()) {
                    let set: TupleSet = (0..tuples.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| tuples[i].clone())
                        .collect();
                    candidate_relations.push(TypedRelation {
                        sorts: vec![SortId(0); arity],
                        tuples: set,
                    });
                }
            }
        }
        HenkinStructure {
            base,
            candidate_domains,
            candidate_relations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HenkinViolation {
    #[error("base structure: {0}")]
    Base(StructureViolation),
    #[error("candidate domain {0} is empty")]
    EmptyCandidateDomain(usize),
    #[error("candidate relation {index}: {detail}")]
    IllTypedRelation { index: usize, detail: String },
}

/// Validates the Henkin invariants: a valid base, no empty candidate
/// domain, and every candidate relation's tuples built from known elements
/// with the record's arity.
pub fn validate_henkin(voc: &Vocabulary, h: &HenkinStructure) -> Result<(), Vec<HenkinViolation>> {
    let mut out = Vec::new();
    if let Err(vs) = validate_structure(voc, &h.base) {
        out.extend(vs.into_iter().map(HenkinViolation::Base));
    }
    for (i, d) in h.candidate_domains.iter().enumerate() {
        if d.is_empty() {
            out.push(HenkinViolation::EmptyCandidateDomain(i));
        }
    }
    let pool: BTreeSet<Elem> = h
        .base
        .element_pool()
        .into_iter()
        .chain(h.candidate_domains.iter().flatten().cloned())
        .collect();
    for (i, rec) in h.candidate_relations.iter().enumerate() {
        if rec.sorts.is_empty() {
            out.push(HenkinViolation::IllTypedRelation {
                index: i,
                detail: "empty sort tuple".into(),
            });
            continue;
        }
        for t in &rec.tuples {
            if t.len() != rec.sorts.len() {
                out.push(HenkinViolation::IllTypedRelation {
                    index: i,
                    detail: format!("tuple ({:?}) does not match arity {}", t, rec.sorts.len()),
                });
            } else if let Some(e) = t.iter().find(|e| !pool.contains(*e)) {
                out.push(HenkinViolation::IllTypedRelation {
                    index: i,
                    detail: format!("unknown element `{}`", e),
                });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

struct Ctx<'a> {
    voc: &'a Vocabulary,
    h: &'a HenkinStructure,
    domains: BTreeMap<SortId, BTreeSet<Elem>>,
    ind: Vec<(IndividualVar, Elem)>,
    rel: Vec<(RelationVar, TupleSet)>,
}

impl Ctx<'_> {
    fn lookup_ind(&self, v: &IndividualVar) -> &Elem {
        self.ind
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|(_, e)| e)
            .expect("precondition: assignment covers free variables")
    }

    fn lookup_rel(&self, v: &RelationVar) -> &TupleSet {
        self.rel
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|(_, t)| t)
            .expect("precondition: assignment covers free variables")
    }

    /// Does the candidate fit the variable's current domain product?
    fn fits(&self, sorts: &[SortId], rec: &TypedRelation) -> bool {
        if rec.sorts.len() != sorts.len() {
            return false;
        }
        rec.tuples.iter().all(|t| {
            t.len() == sorts.len()
                && t.iter()
                    .zip(sorts)
                    .all(|(e, s)| self.domains.get(s).is_some_and(|d| d.contains(e)))
        })
    }

    fn eval(&mut self, phi: &Formula) -> bool {
        match phi {
            Formula::Equation(a, b) => self.lookup_ind(a) == self.lookup_ind(b),
            Formula::PredAtom { pred, args } => {
                let tuple: Tuple = args.iter().map(|a| self.lookup_ind(a).clone()).collect();
                self.h
                    .base
                    .interp(pred)
                    .is_some_and(|tuples| tuples.contains(&tuple))
            }
            Formula::VarAtom { var, args } => {
                let tuple: Tuple = args.iter().map(|a| self.lookup_ind(a).clone()).collect();
                self.lookup_rel(var).contains(&tuple)
            }
            Formula::Not(p) => !self.eval(p),
            Formula::Or(a, b) => self.eval(a) || self.eval(b),
            Formula::ExistsInd(x, body) => {
                let Some(dom) = self.domains.get(&x.sort).cloned() else {
                    return false;
                };
                for e in dom {
                    self.ind.push((x.clone(), e));
                    let v = self.eval(body);
                    self.ind.pop();
                    if v {
                        return true;
                    }
                }
                false
            }
            Formula::ExistsRel(x, body) => {
                for i in 0..self.h.candidate_relations.len() {
                    let rec = &self.h.candidate_relations[i];
                    if !self.fits(&x.sorts, rec) {
                        continue;
                    }
                    let tuples = rec.tuples.clone();
                    self.rel.push((x.clone(), tuples));
                    let v = self.eval(body);
                    self.rel.pop();
                    if v {
                        return true;
                    }
                }
                false
            }
            Formula::ExistsNewSorts(block, body) => {
                let sorts: Vec<SortId> = block_sorts(block).into_iter().collect();
                let u = &self.h.candidate_domains;
                if u.is_empty() {
                    return false;
                }
                // Every way of drawing one candidate domain per block sort.
                let mut pick = vec![0usize; sorts.len()];
                loop {
                    let saved: Vec<(SortId, Option<BTreeSet<Elem>>)> = sorts
                        .iter()
                        .zip(&pick)
                        .map(|(s, &i)| (*s, self.domains.insert(*s, u[i].clone())))
                        .collect();
                    let v = self.bind_members(block, 0, body);
                    for (s, old) in saved {
                        match old {
                            Some(d) => {
                                self.domains.insert(s, d);
                            }
                            None => {
                                self.domains.remove(&s);
                            }
                        }
                    }
                    if v {
                        return true;
                    }
                    // Advance the multi-index.
                    let mut i = 0;
                    loop {
                        if i == pick.len() {
                            return false;
                        }
                        pick[i] += 1;
                        if pick[i] < u.len() {
                            break;
                        }
                        pick[i] = 0;
                        i += 1;
                    }
                }
            }
        }
    }

    /// Binds each block member to a fitting candidate relation in turn.
    fn bind_members(&mut self, block: &[RelationVar], i: usize, body: &Formula) -> bool {
        if i == block.len() {
            return self.eval(body);
        }
        let x = &block[i];
        for j in 0..self.h.candidate_relations.len() {
            let rec = &self.h.candidate_relations[j];
            if !self.fits(&x.sorts, rec) {
                continue;
            }
            let tuples = rec.tuples.clone();
            self.rel.push((x.clone(), tuples));
            let v = self.bind_members(block, i + 1, body);
            self.rel.pop();
            if v {
                return true;
            }
        }
        false
    }
}

fn check_preconditions(
    voc: &Vocabulary,
    h: &HenkinStructure,
    s: &Assignment,
    phi: &Formula,
) -> Result<(), PreconditionViolation> {
    well_formed(voc, phi).map_err(PreconditionViolation::NotWellFormed)?;
    validate_structure(voc, &h.base).map_err(PreconditionViolation::InvalidStructure)?;
    s.validate(&h.base)
        .map_err(PreconditionViolation::InvalidAssignment)?;
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
        if !h.base.has_domain(sort) {
            return Err(PreconditionViolation::UnfixedFreeSort(sort));
        }
    }
    for (name, _) in occurring_symbols(phi) {
        if h.base.interp(&name).is_none() {
            return Err(PreconditionViolation::UninterpretedSymbol(name));
        }
    }
    Ok(())
}

/// Exact two-valued truth in a Henkin structure.
pub fn eval_henkin(
    voc: &Vocabulary,
    h: &HenkinStructure,
    s: &Assignment,
    phi: &Formula,
) -> Result<bool, PreconditionViolation> {
    check_preconditions(voc, h, s, phi)?;
    let mut ctx = Ctx {
        voc,
        h,
        domains: h.base.domains().map(|(s, d)| (s, d.clone())).collect(),
        ind: s.ind_vars().map(|(v, e)| (v.clone(), e.clone())).collect(),
        rel: s.rel_vars().map(|(v, t)| (v.clone(), t.clone())).collect(),
    };
    let _ = ctx.voc;
    Ok(ctx.eval(phi))
}

/// Exact truth of a sentence.
pub fn eval_henkin_sentence(
    voc: &Vocabulary,
    h: &HenkinStructure,
    phi: &Formula,
) -> Result<bool, PreconditionViolation> {
    if let Some(v) = free_individual_vars(phi).into_iter().next() {
        return Err(PreconditionViolation::NotASentence(v.to_string()));
    }
    if let Some(v) = free_relation_vars(phi).into_iter().next() {
        return Err(PreconditionViolation::NotASentence(v.to_string()));
    }
    eval_henkin(voc, h, &Assignment::new(), phi)
}

/// One comprehension instance the structure fails to witness.
#[derive(Debug, Clone)]
pub struct ComprehensionFailure {
    pub instance: Formula,
    pub detail: String,
}

/// Result of bounded comprehension checking. The schema has infinitely many
/// instances; only those with defining formulas within the stated bounds
/// were enumerated.
#[derive(Debug, Clone)]
pub struct ComprehensionReport {
    pub depth_bound: usize,
    pub size_bound: usize,
    pub checked_instances: usize,
    pub failures: Vec<ComprehensionFailure>,
}

impl ComprehensionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// All defining formulas with free variables among `scope`, quantifiers
/// over `quant_sorts`, quantifier rank at most `depth` and at most `size`
/// surface nodes. Purely first-order and deterministic.
pub fn enumerate_defining_formulas(
    voc: &Vocabulary,
    scope: &[IndividualVar],
    quant_sorts: &[SortId],
    depth: usize,
    size: usize,
) -> Vec<Formula> {
    let mut out = Vec::new();
    if size == 0 {
        return out;
    }
    // Atoms.
    for a in scope {
        for b in scope {
            out.push(Formula::eq(a.clone(), b.clone()));
        }
    }
    for (name, sorts) in voc.symbols() {
        let mut arg_lists: Vec<Vec<IndividualVar>> = vec![Vec::new()];
        for s in sorts {
            let mut next = Vec::new();
            for prefix in &arg_lists {
                for v in scope.iter().filter(|v| v.sort == *s) {
                    let mut args = prefix.clone();
                    args.push(v.clone());
                    next.push(args);
                }
            }
            arg_lists = next;
        }
        if !sorts.is_empty() || !scope.is_empty() {
            for args in arg_lists {
                if args.len() == sorts.len() {
                    out.push(Formula::pred(name, args));
                }
            }
        }
    }
    if size >= 2 {
        for sub in enumerate_defining_formulas(voc, scope, quant_sorts, depth, size - 1) {
            out.push(Formula::not(sub));
        }
        if depth >= 1 {
            for &sort in quant_sorts {
                let z = IndividualVar::new(format!("z{}", scope.len()), sort);
                let mut inner_scope = scope.to_vec();
                inner_scope.push(z.clone());
                for sub in
                    enumerate_defining_formulas(voc, &inner_scope, quant_sorts, depth - 1, size - 1)
                {
                    out.push(Formula::exists(z.clone(), sub));
                }
            }
        }
    }
    if size >= 3 {
        for left_size in 1..(size - 1) {
            let lefts = enumerate_defining_formulas(voc, scope, quant_sorts, depth, left_size);
            let rights =
                enumerate_defining_formulas(voc, scope, quant_sorts, depth, size - 1 - left_size);
            for l in &lefts {
                for r in &rights {
                    out.push(Formula::or(l.clone(), r.clone()));
                }
            }
        }
    }
    out
}

/// Comprehension instances (both kinds) over the given base sorts: for each
/// relation-variable sort tuple of arity one or two, every defining formula
/// within the bounds. The second kind quantifies a block over a sort not
/// among the base sorts.
pub fn comprehension_instances(
    voc: &Vocabulary,
    base_sorts: &[SortId],
    depth: usize,
    size: usize,
) -> Vec<Formula> {
    let mut out = Vec::new();
    let mut tuples: Vec<Vec<SortId>> = Vec::new();
    for &s in base_sorts {
        tuples.push(vec![s]);
    }
    for &s in base_sorts {
        for &t in base_sorts {
            tuples.push(vec![s, t]);
        }
    }
    let make = |sorts: &[SortId]| -> (RelationVar, Vec<IndividualVar>) {
        let x = RelationVar::new("X", sorts.to_vec());
        let ys: Vec<IndividualVar> = sorts
            .iter()
            .enumerate()
            .map(|(i, s)| IndividualVar::new(format!("y{}", i + 1), *s))
            .collect();
        (x, ys)
    };
    // First kind: the defined relation lives on existing sorts.
    for sorts in &tuples {
        let (x, ys) = make(sorts);
        for psi in enumerate_defining_formulas(voc, &ys, base_sorts, depth, size) {
            let mut body = Formula::iff(Formula::rel(x.clone(), ys.clone()), psi);
            for y in ys.iter().rev() {
                body = Formula::forall(y.clone(), body);
            }
            out.push(Formula::exists_rel(x.clone(), body));
        }
    }
    // Second kind: the defined relation lives on a new sort.
    let fresh = SortId(base_sorts.iter().map(|s| s.0).max().map_or(0, |m| m + 1));
    for arity in [1usize, 2] {
        let sorts = vec![fresh; arity];
        let (x, ys) = make(&sorts);
        for psi in enumerate_defining_formulas(voc, &ys, base_sorts, depth, size) {
            let mut body = Formula::iff(Formula::rel(x.clone(), ys.clone()), psi);
            for y in ys.iter().rev() {
                body = Formula::forall(y.clone(), body);
            }
            out.push(Formula::exists_new(vec![x.clone()], body));
        }
    }
    out
}

/// Checks every comprehension instance within the bounds against the
/// structure and reports the ones it fails to witness.
pub fn check_comprehension(
    voc: &Vocabulary,
    h: &HenkinStructure,
    depth_bound: usize,
    size_bound: usize,
) -> ComprehensionReport {
    let base_sorts: Vec<SortId> = h.base.domains().map(|(s, _)| s).collect();
    let instances = comprehension_instances(voc, &base_sorts, depth_bound, size_bound);
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for instance in instances {
        checked += 1;
        match eval_henkin_sentence(voc, h, &instance) {
            Ok(true) => {}
            Ok(false) => {
                let detail = match &instance {
                    Formula::ExistsNewSorts(..) => {
                        "no candidate domain and relation witness the defined relation".to_string()
                    }
                    _ => "no candidate relation matches the defined extension".to_string(),
                };
                failures.push(ComprehensionFailure { instance, detail });
            }
            Err(e) => failures.push(ComprehensionFailure {
                instance,
                detail: format!("instance not evaluable: {}", e),
            }),
        }
    }
    ComprehensionReport {
        depth_bound,
        size_bound,
        checked_instances: checked,
        failures,
    }
}

/// Bounds for the countermodel search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    /// Maximum size of each base domain.
    pub max_domain_size: usize,
    /// Comprehension is checked at this depth/size on every candidate.
    pub comprehension_depth: usize,
    pub comprehension_size: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            max_domain_size: 3,
            comprehension_depth: 1,
            comprehension_size: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error(
    "no countermodel found within domain size {} (comprehension checked at depth {}, size {})",
    .bounds.max_domain_size,
    .bounds.comprehension_depth,
    .bounds.comprehension_size
)]
pub struct NotFound {
    pub bounds: SearchBounds,
}

/// First-order extension of `psi` with free variables `ys` over explicit
/// ranges, evaluated against the base interpretations.
fn extension_over(
    voc: &Vocabulary,
    base: &Structure,
    extra: &BTreeMap<SortId, BTreeSet<Elem>>,
    ys: &[IndividualVar],
    ranges: &[&BTreeSet<Elem>],
    psi: &Formula,
) -> TupleSet {
    let mut extended = base.clone();
    for (s, d) in extra {
        extended.set_domain(*s, d.iter().cloned());
    }
    let h = HenkinStructure {
        base: extended,
        candidate_domains: vec![],
        candidate_relations: vec![],
    };
    let mut ctx = Ctx {
        voc,
        h: &h,
        domains: h.base.domains().map(|(s, d)| (s, d.clone())).collect(),
        ind: Vec::new(),
        rel: Vec::new(),
    };
    let mut out = TupleSet::new();
    let mut tuple_space = vec![Vec::new()];
    for r in ranges {
        let mut next = Vec::new();
        for prefix in &tuple_space {
            for e in r.iter() {
                let mut t: Tuple = prefix.clone();
                t.push(e.clone());
                next.push(t);
            }
        }
        tuple_space = next;
    }
    for tuple in tuple_space {
        ctx.ind.clear();
        for (y, e) in ys.iter().zip(&tuple) {
            ctx.ind.push((y.clone(), e.clone()));
        }
        if ctx.eval(psi) {
            out.insert(tuple);
        }
    }
    out
}

/// The definable closure: every extension a comprehension instance within
/// the bounds demands, over base products and over candidate-domain
/// products for the fresh sort.
fn definable_relations(
    voc: &Vocabulary,
    base: &Structure,
    candidate_domains: &[BTreeSet<Elem>],
    bounds: &SearchBounds,
) -> Vec<TypedRelation> {
    let base_sorts: Vec<SortId> = base.domains().map(|(s, _)| s).collect();
    let mut seen: BTreeSet<(usize, TupleSet)> = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |sorts: Vec<SortId>, tuples: TupleSet| {
        if seen.insert((sorts.len(), tuples.clone())) {
            out.push(TypedRelation { sorts, tuples });
        }
    };
    // Over base products.
    let mut tuples: Vec<Vec<SortId>> = Vec::new();
    for &s in &base_sorts {
        tuples.push(vec![s]);
    }
    for &s in &base_sorts {
        for &t in &base_sorts {
            tuples.push(vec![s, t]);
        }
    }
    for sorts in &tuples {
        let ys: Vec<IndividualVar> = sorts
            .iter()
            .enumerate()
            .map(|(i, s)| IndividualVar::new(format!("y{}", i + 1), *s))
            .collect();
        let ranges: Vec<&BTreeSet<Elem>> =
            sorts.iter().map(|s| base.domain(*s).unwrap()).collect();
        for psi in enumerate_defining_formulas(
            voc,
            &ys,
            &base_sorts,
            bounds.comprehension_depth,
            bounds.comprehension_size,
        ) {
            let ext = extension_over(voc, base, &BTreeMap::new(), &ys, &ranges, &psi);
            push(sorts.clone(), ext);
        }
    }
    // Over candidate-domain products for the fresh sort of second-kind
    // instances.
    let fresh = SortId(base_sorts.iter().map(|s| s.0).max().map_or(0, |m| m + 1));
    for arity in [1usize, 2] {
        let sorts = vec![fresh; arity];
        let ys: Vec<IndividualVar> = (0..arity)
            .map(|i| IndividualVar::new(format!("y{}", i + 1), fresh))
            .collect();
        for d in candidate_domains {
            let mut extra = BTreeMap::new();
            extra.insert(fresh, d.clone());
            let ranges: Vec<&BTreeSet<Elem>> = vec![d; arity];
            for psi in enumerate_defining_formulas(
                voc,
                &ys,
                &base_sorts,
                bounds.comprehension_depth,
                bounds.comprehension_size,
            ) {
                let ext = extension_over(voc, base, &extra, &ys, &ranges, &psi);
                push(sorts.clone(), ext);
            }
        }
    }
    out
}

pub enum CountermodelSearch {
    Found(HenkinStructure),
    NotFound(NotFound),
}

/// Searches for a finite Henkin structure that satisfies every sentence of
/// the theory, refutes `phi`, and passes comprehension checking at the
/// configured depth. Base structures are enumerated by total domain size
/// with disjoint canonical domains per needed sort and all interpretations
/// of the occurring symbols; for each base the search tries the definable
/// closure of `G` first and an enlarged `G` second. The first hit in this
/// deterministic order is returned, re-verified; exhaustion reports the
/// bounds.
pub fn countermodel_search(
    voc: &Vocabulary,
    theory: &[Formula],
    phi: &Formula,
    bounds: &SearchBounds,
) -> Result<CountermodelSearch, PreconditionViolation> {
    for psi in theory.iter().chain([phi]) {
        well_formed(voc, psi).map_err(PreconditionViolation::NotWellFormed)?;
        if let Some(v) = free_individual_vars(psi).into_iter().next() {
            return Err(PreconditionViolation::NotASentence(v.to_string()));
        }
        if let Some(v) = free_relation_vars(psi).into_iter().next() {
            return Err(PreconditionViolation::NotASentence(v.to_string()));
        }
    }
    let mut needed_sorts: BTreeSet<SortId> = BTreeSet::new();
    let mut needed_symbols: BTreeMap<String, Vec<SortId>> = BTreeMap::new();
    for psi in theory.iter().chain([phi]) {
        needed_sorts.extend(free_sorts(psi));
        for (name, _) in occurring_symbols(psi) {
            let sorts = voc
                .sorts_of(&name)
                .ok_or_else(|| PreconditionViolation::UninterpretedSymbol(name.clone()))?;
            needed_symbols.insert(name, sorts.to_vec());
        }
    }
    let sorts: Vec<SortId> = needed_sorts.into_iter().collect();

    let is_countermodel = |h: &HenkinStructure| -> bool {
        if !check_comprehension(voc, h, bounds.comprehension_depth, bounds.comprehension_size)
            .passed()
        {
            return false;
        }
        for t in theory {
            if !eval_henkin_sentence(voc, h, t).unwrap_or(false) {
                return false;
            }
        }
        matches!(eval_henkin_sentence(voc, h, phi), Ok(false))
    };

    let mut size_vectors: Vec<Vec<usize>> = Vec::new();
    if sorts.is_empty() {
        size_vectors.push(Vec::new());
    } else {
        let mut v = vec![1usize; sorts.len()];
        loop {
            size_vectors.push(v.clone());
            let mut i = 0;
            loop {
                if i == v.len() {
                    break;
                }
                v[i] += 1;
                if v[i] <= bounds.max_domain_size {
                    break;
                }
                v[i] = 1;
                i += 1;
            }
            if i == v.len() {
                break;
            }
        }
        size_vectors.sort_by_key(|v| (v.iter().sum::<usize>(), v.clone()));
    }

    for sizes in size_vectors {
        let mut base = Structure::new();
        for (i, (&sort, &n)) in sorts.iter().zip(&sizes).enumerate() {
            let letter = (b'a' + (i % 26) as u8) as char;
            base.set_domain(sort, (0..n).map(|j| format!("{}{}", letter, j)));
        }
        // Interpretation spaces per needed symbol.
        let products: Vec<(String, Vec<Tuple>)> = needed_symbols
            .iter()
            .map(|(name, ss)| {
                let p = base.product(ss).unwrap_or_default();
                (name.clone(), p)
            })
            .collect();
        if products.iter().any(|(_, p)| p.len() > 16) {
            // Interpretation space too large to sweep; skip this base size.
            continue;
        }
        let mut masks: Vec<u32> = vec![0; products.len()];
        loop {
            let mut m = base.clone();
            for ((name, product), &mask) in products.iter().zip(&masks) {
                let tuples: TupleSet = product
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, t)| t.clone())
                    .collect();
                m.set_interp_owned(name.clone(), tuples);
            }

            let mut u0: Vec<BTreeSet<Elem>> = m.domains().map(|(_, d)| d.clone()).collect();
            let pool = m.element_pool();
            if !pool.is_empty() && !u0.contains(&pool) {
                u0.push(pool);
            }
            if u0.is_empty() {
                u0.push(["q0".to_string()].into_iter().collect());
            }
            u0.sort_by_key(|d| (d.len(), d.iter().cloned().collect::<Vec<_>>()));
            u0.dedup();

            let g_def = definable_relations(voc, &m, &u0, bounds);
            let ladder: Vec<Vec<TypedRelation>> = {
                let mut extra = g_def.clone();
                let mut seen: BTreeSet<(usize, TupleSet)> = g_def
                    .iter()
                    .map(|r| (r.sorts.len(), r.tuples.clone()))
                    .collect();
                for (_, d) in m.domains() {
                    for arity in [1usize, 2] {
                        let dims: Vec<&BTreeSet<Elem>> = vec![d; arity];
                        if let Ok(iter) = crate::model::enumerate_relations(&dims, 512) {
                            for tuples in iter {
                                if seen.insert((arity, tuples.clone())) {
                                    extra.push(TypedRelation {
                                        sorts: vec![SortId(0); arity],
                                        tuples,
                                    });
                                }
                            }
                        }
                    }
                }
                if extra.len() > g_def.len() {
                    vec![g_def.clone(), extra]
                } else {
                    vec![g_def.clone()]
                }
            };

            for g in ladder {
                let h = HenkinStructure {
                    base: m.clone(),
                    candidate_domains: u0.clone(),
                    candidate_relations: g,
                };
                if is_countermodel(&h) {
                    // Re-verify before returning.
                    debug_assert!(is_countermodel(&h));
                    return Ok(CountermodelSearch::Found(h));
                }
            }

            // Advance interpretation masks.
            let mut i = 0;
            loop {
                if i == masks.len() {
                    break;
                }
                masks[i] += 1;
                if (masks[i] as usize) < (1usize << products[i].1.len()) {
                    break;
                }
                masks[i] = 0;
                i += 1;
            }
            if i == masks.len() || masks.is_empty() {
                break;
            }
        }
    }
    Ok(CountermodelSearch::NotFound(NotFound { bounds: *bounds }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn two_elem_base() -> Structure {
        let mut m = Structure::new();
        m.set_domain(0u32, ["0", "1"]);
        m
    }

    fn unary(elems: &[&str]) -> TypedRelation {
        TypedRelation {
            sorts: vec![SortId(0)],
            tuples: elems.iter().map(|e| vec![e.to_string()]).collect(),
        }
    }

    #[test]
    fn separating_set_depends_on_g() {
        let voc = Vocabulary::new();
        let phi = parse_formula("E2 X:(0). E x:0. E y:0. (X(x) & ~X(y))", &voc).unwrap();
        let rich = HenkinStructure {
            base: two_elem_base(),
            candidate_domains: vec![],
            candidate_relations: vec![unary(&[]), unary(&["0"]), unary(&["1"]), unary(&["0", "1"])],
        };
        assert!(eval_henkin_sentence(&voc, &rich, &phi).unwrap());
        let poor = HenkinStructure {
            base: two_elem_base(),
            candidate_domains: vec![],
            candidate_relations: vec![unary(&[]), unary(&["0", "1"])],
        };
        assert!(!eval_henkin_sentence(&voc, &poor, &phi).unwrap());
    }

    #[test]
    fn empty_u_refutes_every_block_sentence() {
        let voc = Vocabulary::new();
        let phi = parse_formula("Es (X:(3)). A y:3. (X(y) <-> y = y)", &voc).unwrap();
        let h = HenkinStructure {
            base: two_elem_base(),
            candidate_domains: vec![],
            candidate_relations: vec![unary(&["0"])],
        };
        assert!(!eval_henkin_sentence(&voc, &h, &phi).unwrap());
    }

    #[test]
    fn block_draws_domains_from_u_and_relations_from_g() {
        let voc = Vocabulary::new();
        let phi = parse_formula("Es (X:(3)). A y:3. (X(y) <-> y = y)", &voc).unwrap();
        let dom: BTreeSet<Elem> = ["p".to_string()].into_iter().collect();
        let h = HenkinStructure {
            base: two_elem_base(),
            candidate_domains: vec![dom],
            candidate_relations: vec![TypedRelation {
                sorts: vec![SortId(3)],
                tuples: [vec!["p".to_string()]].into_iter().collect(),
            }],
        };
        assert!(eval_henkin_sentence(&voc, &h, &phi).unwrap());
        // The record's recorded sorts do not matter, only its extension.
        let retagged = HenkinStructure {
            candidate_relations: vec![TypedRelation {
                sorts: vec![SortId(9)],
                tuples: [vec!["p".to_string()]].into_iter().collect(),
            }],
            ..h.clone()
        };
        assert!(eval_henkin_sentence(&voc, &retagged, &phi).unwrap());
    }

    #[test]
    fn comprehension_passes_on_full_g() {
        let voc = Vocabulary::new();
        let h = HenkinStructure::full_over(two_elem_base(), &[1, 2]);
        let report = check_comprehension(&voc, &h, 1, 3);
        assert!(report.checked_instances > 0);
        assert!(
            report.passed(),
            "failures: {:?}",
            report
                .failures
                .iter()
                .map(|f| f.instance.to_string())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn comprehension_fails_without_the_full_relation() {
        let voc = Vocabulary::new();
        let h = HenkinStructure {
            base: two_elem_base(),
            candidate_domains: vec![two_elem_base().element_pool()],
            candidate_relations: vec![unary(&[])],
        };
        let report = check_comprehension(&voc, &h, 1, 3);
        assert!(!report.passed());
        // The instance E2 X. A y. (X(y) <-> y = y) demands the full set.
        let expected = parse_formula("E2 X:(0). A y1:0. (X(y1) <-> y1 = y1)", &voc).unwrap();
        assert!(report
            .failures
            .iter()
            .any(|f| f.instance == expected));
    }

    #[test]
    fn depth_zero_equality_closure_passes() {
        let voc = Vocabulary::new();
        // G closed under the rank-0 equality-definable relations.
        let full: BTreeSet<Elem> = ["0".to_string(), "1".to_string()].into_iter().collect();
        let diag: TupleSet = [["0", "0"], ["1", "1"]]
            .iter()
            .map(|t| t.iter().map(|s| s.to_string()).collect())
            .collect();
        let all2: TupleSet = [["0", "0"], ["0", "1"], ["1", "0"], ["1", "1"]]
            .iter()
            .map(|t| t.iter().map(|s| s.to_string()).collect())
            .collect();
        let offdiag: TupleSet = all2.difference(&diag).cloned().collect();
        let h = HenkinStructure {
            base: two_elem_base(),
            candidate_domains: vec![full.clone()],
            candidate_relations: vec![
                unary(&[]),
                unary(&["0", "1"]),
                TypedRelation { sorts: vec![SortId(0); 2], tuples: TupleSet::new() },
                TypedRelation { sorts: vec![SortId(0); 2], tuples: diag },
                TypedRelation { sorts: vec![SortId(0); 2], tuples: offdiag },
                TypedRelation { sorts: vec![SortId(0); 2], tuples: all2 },
            ],
        };
        let report = check_comprehension(&voc, &h, 0, 3);
        assert!(
            report.passed(),
            "failures: {:?}",
            report
                .failures
                .iter()
                .map(|f| f.instance.to_string())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn countermodel_for_everything_equal() {
        let voc = Vocabulary::new();
        let phi = parse_formula("A x:0. A y:0. x = y", &voc).unwrap();
        let result = countermodel_search(&voc, &[], &phi, &SearchBounds::default()).unwrap();
        match result {
            CountermodelSearch::Found(h) => {
                assert_eq!(h.base.domain(SortId(0)).unwrap().len(), 2);
                assert!(!eval_henkin_sentence(&voc, &h, &phi).unwrap());
            }
            CountermodelSearch::NotFound(_) => panic!("expected a countermodel"),
        }
    }

    #[test]
    fn no_countermodel_for_reflexivity() {
        let voc = Vocabulary::new();
        let phi = parse_formula("A x:0. x = x", &voc).unwrap();
        let result = countermodel_search(&voc, &[], &phi, &SearchBounds::default()).unwrap();
        assert!(matches!(result, CountermodelSearch::NotFound(_)));
    }

    #[test]
    fn theory_forces_the_countermodel_size() {
        let voc = Vocabulary::new();
        let theory = vec![parse_formula("E x:0. E y:0. ~x = y", &voc).unwrap()];
        let phi =
            parse_formula("E x:0. E y:0. E z:0. (~x = y & ~x = z & ~y = z)", &voc).unwrap();
        let result = countermodel_search(&voc, &theory, &phi, &SearchBounds::default()).unwrap();
        match result {
            CountermodelSearch::Found(h) => {
                assert_eq!(h.base.domain(SortId(0)).unwrap().len(), 2);
            }
            CountermodelSearch::NotFound(_) => panic!("expected a countermodel"),
        }
    }
}
