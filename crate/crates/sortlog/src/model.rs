//! Many-sorted structures, assignments, and bounded enumeration of relation
//! spaces and domain expansions.
//!
//! Element names are opaque strings and equality across sorts is name
//! identity: the element `"a"` appearing in two domains is the same object.
//! Expansions for new-sort quantifiers may therefore reuse existing elements
//! in their new domains as well as invent fresh ones.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{IndividualVar, RelationVar, SortId, Vocabulary};

pub type Elem = String;
pub type Tuple = Vec<Elem>;
pub type TupleSet = BTreeSet<Tuple>;

/// A structure: a partial map from sorts to finite nonempty domains plus
/// interpretations for a subset of the vocabulary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Structure {
    domains: BTreeMap<SortId, BTreeSet<Elem>>,
    interps: BTreeMap<String, TupleSet>,
}

impl Structure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_domain(&mut self, sort: impl Into<SortId>, elems: impl IntoIterator<Item = impl Into<Elem>>) {
        self.domains
            .insert(sort.into(), elems.into_iter().map(Into::into).collect());
    }

    pub fn remove_domain(&mut self, sort: SortId) {
        self.domains.remove(&sort);
    }

    pub fn set_interp(
        &mut self,
        name: impl Into<String>,
        tuples: impl IntoIterator<Item = Vec<&'static str>>,
    ) {
        self.interps.insert(
            name.into(),
            tuples
                .into_iter()
                .map(|t| t.into_iter().map(str::to_string).collect())
                .collect(),
        );
    }

    pub fn set_interp_owned(&mut self, name: impl Into<String>, tuples: TupleSet) {
        self.interps.insert(name.into(), tuples);
    }

    pub fn remove_interp(&mut self, name: &str) {
        self.interps.remove(name);
    }

    pub fn domain(&self, sort: SortId) -> Option<&BTreeSet<Elem>> {
        self.domains.get(&sort)
    }

    pub fn has_domain(&self, sort: SortId) -> bool {
        self.domains.contains_key(&sort)
    }

    pub fn domains(&self) -> impl Iterator<Item = (SortId, &BTreeSet<Elem>)> {
        self.domains.iter().map(|(s, d)| (*s, d))
    }

    pub fn interp(&self, name: &str) -> Option<&TupleSet> {
        self.interps.get(name)
    }

    pub fn interps(&self) -> impl Iterator<Item = (&str, &TupleSet)> {
        self.interps.iter().map(|(n, t)| (n.as_str(), t))
    }

    /// All element names across all domains.
    pub fn element_pool(&self) -> BTreeSet<Elem> {
        self.domains.values().flatten().cloned().collect()
    }

    pub fn total_size(&self) -> usize {
        self.domains.values().map(BTreeSet::len).sum()
    }

    /// Cartesian product of the domains of the given sorts, in row-major
    /// order with each domain iterated in name order. `None` if a sort has
    /// no domain. The empty sort tuple yields one empty tuple.
    pub fn product(&self, sorts: &[SortId]) -> Option<Vec<Tuple>> {
        let doms: Option<Vec<&BTreeSet<Elem>>> = sorts.iter().map(|s| self.domain(*s)).collect();
        Some(product_of(&doms?))
    }
}

/// Row-major cartesian product of the given domains.
pub fn product_of(domains: &[&BTreeSet<Elem>]) -> Vec<Tuple> {
    let mut out = vec![Vec::new()];
    for dom in domains {
        let mut next = Vec::with_capacity(out.len() * dom.len());
        for prefix in &out {
            for e in dom.iter() {
                let mut t = prefix.clone();
                t.push(e.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureViolation {
    #[error("sort {0} has an empty or missing domain needed by `{1}`")]
    MissingDomain(SortId, String),
    #[error("sort {0} has an empty domain")]
    EmptyDomain(SortId),
    #[error("relation `{name}` contains tuple ({tuple:?}) outside its domain product")]
    TupleOutOfDomain { name: String, tuple: Tuple },
    #[error("relation `{0}` is not declared in the vocabulary")]
    UnknownSymbol(String),
}

/// Checks the structure invariants: domains nonempty, every interpreted
/// symbol declared with domains for all its sorts, and every tuple inside
/// the corresponding product.
pub fn validate_structure(voc: &Vocabulary, m: &Structure) -> Result<(), Vec<StructureViolation>> {
    let mut out = Vec::new();
    for (sort, dom) in m.domains() {
        if dom.is_empty() {
            out.push(StructureViolation::EmptyDomain(sort));
        }
    }
    for (name, tuples) in m.interps() {
        let Some(sorts) = voc.sorts_of(name) else {
            out.push(StructureViolation::UnknownSymbol(name.to_string()));
            continue;
        };
        let mut ok = true;
        for sort in sorts {
            match m.domain(*sort) {
                Some(d) if !d.is_empty() => {}
                _ => {
                    out.push(StructureViolation::MissingDomain(*sort, name.to_string()));
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        for tuple in tuples {
            let fits = tuple.len() == sorts.len()
                && tuple
                    .iter()
                    .zip(sorts)
                    .all(|(e, s)| m.domain(*s).is_some_and(|d| d.contains(e)));
            if !fits {
                out.push(StructureViolation::TupleOutOfDomain {
                    name: name.to_string(),
                    tuple: tuple.clone(),
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

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortViolation {
    #[error("`{elem}` is not in the domain of sort {sort} (variable {var})")]
    ElementOutsideDomain { var: String, sort: SortId, elem: Elem },
    #[error("relation for {var} contains tuple ({tuple:?}) outside its sort product")]
    RelationOutsideProduct { var: String, tuple: Tuple },
    #[error("sort {0} has no domain")]
    NoDomain(SortId),
}

/// A variable assignment: elements for individual variables, tuple sets for
/// relation variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    ind: BTreeMap<IndividualVar, Elem>,
    rel: BTreeMap<RelationVar, TupleSet>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_ind(&self, var: &IndividualVar) -> Option<&Elem> {
        self.ind.get(var)
    }

    pub fn get_rel(&self, var: &RelationVar) -> Option<&TupleSet> {
        self.rel.get(var)
    }

    pub fn ind_vars(&self) -> impl Iterator<Item = (&IndividualVar, &Elem)> {
        self.ind.iter()
    }

    pub fn rel_vars(&self) -> impl Iterator<Item = (&RelationVar, &TupleSet)> {
        self.rel.iter()
    }

    /// The modified assignment `s[value/var]`: equal to `self` everywhere
    /// except at `var`. The value must live in the variable's sort domain.
    pub fn with_ind(
        &self,
        m: &Structure,
        var: IndividualVar,
        value: impl Into<Elem>,
    ) -> Result<Assignment, SortViolation> {
        let value = value.into();
        let dom = m.domain(var.sort).ok_or(SortViolation::NoDomain(var.sort))?;
        if !dom.contains(&value) {
            return Err(SortViolation::ElementOutsideDomain {
                var: var.to_string(),
                sort: var.sort,
                elem: value,
            });
        }
        let mut next = self.clone();
        next.ind.insert(var, value);
        Ok(next)
    }

    /// The modified assignment `s[tuples/var]` for a relation variable.
    pub fn with_rel(
        &self,
        m: &Structure,
        var: RelationVar,
        tuples: TupleSet,
    ) -> Result<Assignment, SortViolation> {
        let product = m
            .product(&var.sorts)
            .ok_or_else(|| SortViolation::NoDomain(*var.sorts.iter().find(|s| !m.has_domain(**s)).unwrap()))?;
        let product: BTreeSet<&Tuple> = product.iter().collect();
        for t in &tuples {
            if !product.contains(t) {
                return Err(SortViolation::RelationOutsideProduct {
                    var: var.to_string(),
                    tuple: t.clone(),
                });
            }
        }
        let mut next = self.clone();
        next.rel.insert(var, tuples);
        Ok(next)
    }

    /// Checks every binding against the structure's domains.
    pub fn validate(&self, m: &Structure) -> Result<(), SortViolation> {
        for (var, elem) in &self.ind {
            let dom = m.domain(var.sort).ok_or(SortViolation::NoDomain(var.sort))?;
            if !dom.contains(elem) {
                return Err(SortViolation::ElementOutsideDomain {
                    var: var.to_string(),
                    sort: var.sort,
                    elem: elem.clone(),
                });
            }
        }
        for (var, tuples) in &self.rel {
            let product = m
                .product(&var.sorts)
                .ok_or_else(|| SortViolation::NoDomain(*var.sorts.iter().find(|s| !m.has_domain(**s)).unwrap()))?;
            let product: BTreeSet<&Tuple> = product.iter().collect();
            for t in tuples {
                if !product.contains(t) {
                    return Err(SortViolation::RelationOutsideProduct {
                        var: var.to_string(),
                        tuple: t.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Work limits for the bounded evaluator.
///
/// `domain_bound` caps the size of each new domain tried for a new-sort
/// quantifier. `relation_cap` caps the candidates explored per relation or
/// expansion quantifier. `step_cap` caps the total number of search steps
/// (relation branch decisions plus expansion candidates) across a whole
/// evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub domain_bound: usize,
    pub relation_cap: u64,
    pub step_cap: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            domain_bound: 3,
            relation_cap: 65536,
            step_cap: 10_000_000,
        }
    }
}

impl Budget {
    pub fn with_domain_bound(bound: usize) -> Self {
        Self {
            domain_bound: bound,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("budget exceeded: {0}")]
pub struct BudgetExceeded(pub String);

/// All subsets of the row-major product of `domains`, in binary counting
/// order (the subset for mask `m` contains the i-th product tuple exactly
/// when bit i of `m` is set). Fails upfront when there are more than `cap`
/// subsets.
pub fn enumerate_relations(
    domains: &[&BTreeSet<Elem>],
    cap: u64,
) -> Result<impl Iterator<Item = TupleSet>, BudgetExceeded> {
    let product = product_of(domains);
    let n = product.len();
    if n >= 64 || (n < 64 && (1u128 << n) > cap as u128) {
        return Err(BudgetExceeded(format!(
            "2^{} candidate relations exceed the cap of {}",
            n, cap
        )));
    }
    let count: u64 = 1u64 << n;
    Ok((0..count).map(move |mask| {
        product
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, t)| t.clone())
            .collect()
    }))
}

/// New domains for the sorts of a block quantifier. Keys are exactly the
/// block's sorts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExpansionCandidate {
    pub new_domains: BTreeMap<SortId, BTreeSet<Elem>>,
}

impl ExpansionCandidate {
    pub fn total_size(&self) -> usize {
        self.new_domains.values().map(BTreeSet::len).sum()
    }

    /// Builds the expanded structure: block-sort domains are replaced by the
    /// candidate's domains, and interpretations of symbols touching a block
    /// sort are dropped (the New Sort Condition keeps them unobservable).
    pub fn apply(&self, m: &Structure, voc: &Vocabulary) -> Structure {
        let mut out = m.clone();
        let dropped: Vec<String> = out
            .interps()
            .filter(|(name, _)| {
                voc.sorts_of(name)
                    .is_some_and(|sorts| sorts.iter().any(|s| self.new_domains.contains_key(s)))
            })
            .map(|(name, _)| name.to_string())
            .collect();
        for name in dropped {
            out.remove_interp(&name);
        }
        for (sort, dom) in &self.new_domains {
            out.set_domain(*sort, dom.iter().cloned());
        }
        out
    }
}

/// Enumerates every expansion candidate for the given block sorts with each
/// new domain of size at most `budget.domain_bound`, deduplicated up to
/// isomorphisms fixing the old structure pointwise, ordered by total size
/// and then lexicographically. Existing domains of block sorts contribute
/// their elements to the reuse pool (they are replaced, not extended).
///
/// Fresh elements are canonical: within one candidate they are named by
/// which block sorts share them, so two candidates differing only in fresh
/// names never both appear. At most `budget.relation_cap` candidates are
/// yielded; the stream ends with a `BudgetExceeded` item if more exist.
pub fn enumerate_expansions(
    m: &Structure,
    block_sorts: &[SortId],
    budget: &Budget,
) -> impl Iterator<Item = Result<ExpansionCandidate, BudgetExceeded>> {
    let sorts: Vec<SortId> = {
        let set: BTreeSet<SortId> = block_sorts.iter().copied().collect();
        set.into_iter().collect()
    };
    let pool: Vec<Elem> = m.element_pool().into_iter().collect();
    let bound = budget.domain_bound;
    let cap = budget.relation_cap;

    let k = sorts.len();
    // Fresh-element sharing patterns: nonempty subsets of block-sort indices.
    let traces: Vec<Vec<usize>> = if k == 0 {
        Vec::new()
    } else {
        (1u32..(1u32 << k))
            .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
            .collect()
    };

    let mut all: Vec<ExpansionCandidate> = Vec::new();
    let mut truncated = false;
    if k > 0 && bound > 0 {
        // Old-element subset choices per sort, smallest first.
        let mut subset_choices: Vec<Vec<Elem>> = Vec::new();
        let pool_len = pool.len();
        if pool_len < 20 {
            for mask in 0u32..(1u32 << pool_len) {
                let subset: Vec<Elem> = (0..pool_len)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| pool[i].clone())
                    .collect();
                if subset.len() <= bound {
                    subset_choices.push(subset);
                }
            }
        } else {
            // Structures this large are outside desk scale; fall back to
            // reusing nothing or everything.
            subset_choices.push(Vec::new());
            subset_choices.push(pool.clone());
        }

        // Enumerate per-sort old subsets, then distribute fresh elements
        // over sharing traces so that every domain stays within the bound.
        let mut assignment: Vec<usize> = vec![0; k];
        loop {
            let olds: Vec<&Vec<Elem>> = assignment.iter().map(|&i| &subset_choices[i]).collect();
            let old_sizes: Vec<usize> = olds.iter().map(|s| s.len()).collect();
            let mut trace_counts = vec![0usize; traces.len()];
            distribute_fresh(
                &traces,
                &mut trace_counts,
                0,
                &old_sizes,
                bound,
                &mut |counts| {
                    let sizes: Vec<usize> = (0..k)
                        .map(|i| {
                            old_sizes[i]
                                + traces
                                    .iter()
                                    .zip(counts)
                                    .filter(|(t, _)| t.contains(&i))
                                    .map(|(_, c)| *c)
                                    .sum::<usize>()
                        })
                        .collect();
                    if sizes.iter().any(|&s| s == 0) {
                        return;
                    }
                    let fresh_names = fresh_elems(&pool, counts.iter().sum());
                    let mut doms: Vec<BTreeSet<Elem>> =
                        olds.iter().map(|s| s.iter().cloned().collect()).collect();
                    let mut next_fresh = 0usize;
                    for (trace, &count) in traces.iter().zip(counts.iter()) {
                        for _ in 0..count {
                            let name = &fresh_names[next_fresh];
                            next_fresh += 1;
                            for &i in trace {
                                doms[i].insert(name.clone());
                            }
                        }
                    }
                    let new_domains: BTreeMap<SortId, BTreeSet<Elem>> =
                        sorts.iter().copied().zip(doms).collect();
                    all.push(ExpansionCandidate { new_domains });
                },
            );
            // Advance the per-sort subset assignment.
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                assignment[i] += 1;
                if assignment[i] < subset_choices.len() {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
        all.sort_by(|a, b| {
            (a.total_size(), &a.new_domains).cmp(&(b.total_size(), &b.new_domains))
        });
        all.dedup();
        if all.len() as u64 > cap {
            all.truncate(cap as usize);
            truncated = true;
        }
    }

    let over = truncated.then(|| {
        BudgetExceeded(format!(
            "more than {} expansion candidates for block sorts {:?}",
            cap, sorts
        ))
    });
    all.into_iter().map(Ok).chain(over.map(Err))
}

fn distribute_fresh(
    traces: &[Vec<usize>],
    counts: &mut Vec<usize>,
    idx: usize,
    old_sizes: &[usize],
    bound: usize,
    emit: &mut impl FnMut(&[usize]),
) {
    if idx == traces.len() {
        emit(counts);
        return;
    }
    // Max copies of this trace allowed by the tightest touched sort.
    let used = |i: usize, counts: &[usize]| {
        old_sizes[i]
            + traces
                .iter()
                .zip(counts)
                .filter(|(t, _)| t.contains(&i))
                .map(|(_, c)| *c)
                .sum::<usize>()
    };
    let max_here = traces[idx]
        .iter()
        .map(|&i| bound.saturating_sub(used(i, counts)))
        .min()
        .unwrap_or(0);
    for c in 0..=max_here {
        counts[idx] = c;
        distribute_fresh(traces, counts, idx + 1, old_sizes, bound, emit);
    }
    counts[idx] = 0;
}

/// Canonical fresh names `f0, f1, ...`, skipping collisions with the pool.
fn fresh_elems(pool: &[Elem], count: usize) -> Vec<Elem> {
    let taken: BTreeSet<&Elem> = pool.iter().collect();
    let mut out = Vec::with_capacity(count);
    let mut i = 0usize;
    while out.len() < count {
        let name = format!("f{}", i);
        i += 1;
        if !taken.contains(&name) {
            out.push(name);
        }
    }
    out
}

/// Structural isomorphism: a single injective renaming of elements that maps
/// every domain of `m` onto the corresponding domain of `n` and preserves
/// every relation both ways. One map for all sorts, because equality across
/// sorts is name identity.
pub fn isomorphic(m: &Structure, n: &Structure) -> bool {
    let m_sorts: Vec<SortId> = m.domains().map(|(s, _)| s).collect();
    let n_sorts: Vec<SortId> = n.domains().map(|(s, _)| s).collect();
    if m_sorts != n_sorts {
        return false;
    }
    for &s in &m_sorts {
        if m.domain(s).unwrap().len() != n.domain(s).unwrap().len() {
            return false;
        }
    }
    let m_names: Vec<&str> = m.interps().map(|(name, _)| name).collect();
    let n_names: Vec<&str> = n.interps().map(|(name, _)| name).collect();
    if m_names != n_names {
        return false;
    }

    // Sort-membership pattern of each element; images must match patterns.
    let pattern = |st: &Structure, e: &Elem| -> Vec<SortId> {
        st.domains()
            .filter(|(_, d)| d.contains(e))
            .map(|(s, _)| s)
            .collect()
    };
    let m_elems: Vec<Elem> = m.element_pool().into_iter().collect();
    let n_elems: Vec<Elem> = n.element_pool().into_iter().collect();
    if m_elems.len() != n_elems.len() {
        return false;
    }

    fn extend(
        idx: usize,
        m_elems: &[Elem],
        n_elems: &[Elem],
        m: &Structure,
        n: &Structure,
        map: &mut BTreeMap<Elem, Elem>,
        used: &mut BTreeSet<Elem>,
        pattern: &impl Fn(&Structure, &Elem) -> Vec<SortId>,
    ) -> bool {
        if idx == m_elems.len() {
            // All relations must transfer exactly.
            return m.interps().zip(n.interps()).all(|((_, mt), (_, nt))| {
                if mt.len() != nt.len() {
                    return false;
                }
                mt.iter().all(|tuple| {
                    let image: Tuple = tuple.iter().map(|e| map[e].clone()).collect();
                    nt.contains(&image)
                })
            });
        }
        let e = &m_elems[idx];
        let pat = pattern(m, e);
        for candidate in n_elems {
            if used.contains(candidate) || pattern(n, candidate) != pat {
                continue;
            }
            map.insert(e.clone(), candidate.clone());
            used.insert(candidate.clone());
            if extend(idx + 1, m_elems, n_elems, m, n, map, used, pattern) {
                return true;
            }
            map.remove(e);
            used.remove(candidate);
        }
        false
    }

    extend(
        0,
        &m_elems,
        &n_elems,
        m,
        n,
        &mut BTreeMap::new(),
        &mut BTreeSet::new(),
        &pattern,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2_vocabulary() -> Vocabulary {
        Vocabulary::from_pairs([
            ("Mult", vec![SortId(0), SortId(0), SortId(0)]),
            ("One", vec![SortId(0)]),
        ])
        .unwrap()
    }

    fn c2() -> Structure {
        let mut m = Structure::new();
        m.set_domain(0u32, ["1", "a"]);
        m.set_interp(
            "Mult",
            [
                vec!["1", "1", "1"],
                vec!["1", "a", "a"],
                vec!["a", "1", "a"],
                vec!["a", "a", "1"],
            ],
        );
        m.set_interp("One", [vec!["1"]]);
        m
    }

    #[test]
    fn order_two_group_validates() {
        assert!(validate_structure(&c2_vocabulary(), &c2()).is_ok());
    }

    #[test]
    fn unknown_element_in_tuple_is_caught() {
        let mut m = c2();
        m.set_interp("One", [vec!["b"]]);
        let violations = validate_structure(&c2_vocabulary(), &m).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, StructureViolation::TupleOutOfDomain { .. })));
    }

    #[test]
    fn empty_domain_for_used_sort_is_missing() {
        let mut m = c2();
        m.set_domain(0u32, Vec::<String>::new());
        let violations = validate_structure(&c2_vocabulary(), &m).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, StructureViolation::MissingDomain(..))));
    }

    #[test]
    fn modified_assignment_is_pointwise() {
        let m = c2();
        let x = IndividualVar::new("x", 0u32);
        let y = IndividualVar::new("y", 0u32);
        let s = Assignment::new()
            .with_ind(&m, y.clone(), "1")
            .unwrap();
        let s2 = s.with_ind(&m, x.clone(), "a").unwrap();
        assert_eq!(s2.get_ind(&x).unwrap(), "a");
        assert_eq!(s2.get_ind(&y).unwrap(), "1");
        assert!(s.get_ind(&x).is_none());
        // Values outside the domain are rejected.
        assert!(matches!(
            s.with_ind(&m, x, "zebra"),
            Err(SortViolation::ElementOutsideDomain { .. })
        ));
        // Relation assignment on a fresh variable extends the domain of s.
        let big = RelationVar::new("X", vec![SortId(0), SortId(0)]);
        let tuples: TupleSet = [vec!["1".to_string(), "a".to_string()]].into_iter().collect();
        let s3 = s.with_rel(&m, big.clone(), tuples.clone()).unwrap();
        assert_eq!(s3.get_rel(&big).unwrap(), &tuples);
    }

    #[test]
    fn relation_enumeration_counts() {
        let dom: BTreeSet<Elem> = ["0".to_string(), "1".to_string()].into_iter().collect();
        let unary = enumerate_relations(&[&dom], 1 << 20).unwrap();
        assert_eq!(unary.count(), 4);
        let binary = enumerate_relations(&[&dom, &dom], 1 << 20).unwrap();
        assert_eq!(binary.count(), 16);
        assert!(enumerate_relations(&[&dom, &dom], 8).is_err());
    }

    #[test]
    fn relation_enumeration_is_deterministic_and_complete() {
        let dom: BTreeSet<Elem> = ["0".to_string(), "1".to_string()].into_iter().collect();
        let sets: Vec<TupleSet> = enumerate_relations(&[&dom], 100).unwrap().collect();
        assert_eq!(sets[0], TupleSet::new());
        let all: BTreeSet<TupleSet> = sets.iter().cloned().collect();
        assert_eq!(all.len(), 4, "no duplicates");
    }

    #[test]
    fn expansion_enumeration_matches_hand_count() {
        let mut m = Structure::new();
        m.set_domain(0u32, ["1", "a"]);
        // Fresh sort 1, bound 1: reuse {1}, reuse {a}, or one fresh element.
        let budget = Budget::with_domain_bound(1);
        let candidates: Vec<_> = enumerate_expansions(&m, &[SortId(1)], &budget)
            .map(Result::unwrap)
            .collect();
        assert_eq!(candidates.len(), 3);
        let doms: Vec<Vec<&str>> = candidates
            .iter()
            .map(|c| {
                c.new_domains[&SortId(1)]
                    .iter()
                    .map(String::as_str)
                    .collect()
            })
            .collect();
        assert_eq!(doms, vec![vec!["1"], vec!["a"], vec!["f0"]]);
    }

    #[test]
    fn zero_bound_gives_no_expansions() {
        let mut m = Structure::new();
        m.set_domain(0u32, ["1", "a"]);
        let budget = Budget::with_domain_bound(0);
        assert_eq!(enumerate_expansions(&m, &[SortId(1)], &budget).count(), 0);
    }

    #[test]
    fn replacement_of_existing_sort_keeps_the_pool() {
        let mut m = Structure::new();
        m.set_domain(0u32, ["1", "a"]);
        let budget = Budget::with_domain_bound(1);
        // Block sort 0 replaces the existing domain but may reuse its
        // elements, so the count matches the fresh-sort case.
        let candidates: Vec<_> = enumerate_expansions(&m, &[SortId(0)], &budget)
            .map(Result::unwrap)
            .collect();
        assert_eq!(candidates.len(), 3);
    }

    #[test]
    fn expansions_are_ordered_by_total_size() {
        let mut m = Structure::new();
        m.set_domain(0u32, ["1"]);
        let budget = Budget::with_domain_bound(2);
        let sizes: Vec<usize> = enumerate_expansions(&m, &[SortId(1)], &budget)
            .map(|c| c.unwrap().total_size())
            .collect();
        let mut sorted = sizes.clone();
        sorted.sort_unstable();
        assert_eq!(sizes, sorted);
        // Pool {1}: size-1 domains {1}, {f0}; size-2 domain {1, f0}, {f0, f1}.
        assert_eq!(sizes, vec![1, 1, 2, 2]);
    }

    #[test]
    fn multi_sort_blocks_enumerate_shared_fresh_elements() {
        let m = Structure::new();
        let budget = Budget::with_domain_bound(1);
        let candidates: Vec<_> = enumerate_expansions(&m, &[SortId(1), SortId(2)], &budget)
            .map(Result::unwrap)
            .collect();
        // Either both sorts share one fresh element or they get their own.
        assert_eq!(candidates.len(), 2);
        let shared = &candidates[0].new_domains;
        assert_eq!(shared[&SortId(1)], shared[&SortId(2)]);
        let split = &candidates[1].new_domains;
        assert_ne!(split[&SortId(1)], split[&SortId(2)]);
    }

    #[test]
    fn apply_replaces_domains_and_drops_touched_interps() {
        let voc = c2_vocabulary();
        let m = c2();
        let mut new_domains = BTreeMap::new();
        new_domains.insert(SortId(0), ["q".to_string()].into_iter().collect());
        let candidate = ExpansionCandidate { new_domains };
        let expanded = candidate.apply(&m, &voc);
        assert_eq!(
            expanded.domain(SortId(0)).unwrap().iter().collect::<Vec<_>>(),
            vec!["q"]
        );
        assert!(expanded.interp("Mult").is_none());
        assert!(expanded.interp("One").is_none());
    }

    #[test]
    fn isomorphism_brute_force() {
        let m = c2();
        assert!(isomorphic(&m, &m));
        // Renaming: swap element names.
        let mut n = Structure::new();
        n.set_domain(0u32, ["e", "g"]);
        n.set_interp(
            "Mult",
            [
                vec!["e", "e", "e"],
                vec!["e", "g", "g"],
                vec!["g", "e", "g"],
                vec!["g", "g", "e"],
            ],
        );
        n.set_interp("One", [vec!["e"]]);
        assert!(isomorphic(&m, &n));
        // Size mismatch.
        let mut k4 = Structure::new();
        k4.set_domain(0u32, ["1", "a", "b", "c"]);
        k4.set_interp("Mult", Vec::<Vec<&str>>::new());
        k4.set_interp("One", [vec!["1"]]);
        assert!(!isomorphic(&m, &k4));
        // Same sizes, different relations.
        let mut bad = c2();
        bad.set_interp("One", [vec!["1"], vec!["a"]]);
        assert!(!isomorphic(&m, &bad));
    }
}
