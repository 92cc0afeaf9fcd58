//! The bounded evaluator's internals.
//!
//! Formulas are compiled once per evaluation: variables become environment
//! slots, predicate atoms become bitset tables indexed over the base
//! domains, and element names are interned. Relation quantifiers are
//! decided by a branch-and-prune search over *partial* relations: every
//! tuple of the product is in, out, or undecided, the body is evaluated
//! with Kleene logic, and a definite verdict at a partial relation settles
//! every completion at once. The search is deterministic (first undecided
//! tuple, in-branch first), so verdicts are reproducible, and budgets only
//! truncate the traversal, so raising them can only resolve Unknowns.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::model::{enumerate_expansions, Assignment, Budget, Structure};
use crate::semantics::Verdict;
use crate::syntax::{Formula, IndividualVar, RelationVar, SortId, Vocabulary};

use super::full::PreconditionViolation;

type ElemId = u32;

/// A disjunction whose left side is at most this cheap (a guard) and whose
/// right side costs more than `LAZY_OR_COST` returns Unknown without
/// evaluating the right side when the guard is Unknown. Conjunction spines
/// have expensive left sides, so their scan is never cut short.
const LAZY_OR_GUARD: u32 = 8;
const LAZY_OR_COST: u32 = 96;

/// A domain at a point in time: element ids in element-name order plus a
/// position lookup for product indexing.
pub(crate) struct DomSnap {
    elems: Vec<ElemId>,
    pos: HashMap<ElemId, u32>,
}

impl DomSnap {
    fn new(elems: Vec<ElemId>) -> Self {
        let pos = elems.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
        Self { elems, pos }
    }

    fn len(&self) -> usize {
        self.elems.len()
    }
}

struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
        }
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    fn clear(&mut self, i: usize) {
        self.words[i >> 6] &= !(1 << (i & 63));
    }
}

/// A (possibly partial) relation value over the product of its dims.
pub(crate) struct RelVal {
    dims: Vec<Rc<DomSnap>>,
    strides: Vec<usize>,
    len: usize,
    in_bits: Bits,
    out_bits: Bits,
}

impl RelVal {
    fn undecided(dims: Vec<Rc<DomSnap>>) -> Self {
        let mut len = 1usize;
        let mut strides = vec![0usize; dims.len()];
        for i in (0..dims.len()).rev() {
            strides[i] = len;
            len *= dims[i].len();
        }
        Self {
            strides,
            len,
            in_bits: Bits::new(len),
            out_bits: Bits::new(len),
            dims,
        }
    }

    fn index_of(&self, args: &[ElemId]) -> Option<usize> {
        debug_assert_eq!(args.len(), self.dims.len());
        let mut idx = 0usize;
        for (i, &e) in args.iter().enumerate() {
            idx += *self.dims[i].pos.get(&e)? as usize * self.strides[i];
        }
        Some(idx)
    }

    #[inline]
    fn lookup(&self, idx: usize) -> Verdict {
        if self.in_bits.get(idx) {
            Verdict::True
        } else if self.out_bits.get(idx) {
            Verdict::False
        } else {
            Verdict::Unknown
        }
    }

    fn first_undecided(&self) -> Option<usize> {
        for (w, (inw, outw)) in self
            .in_bits
            .words
            .iter()
            .zip(&self.out_bits.words)
            .enumerate()
        {
            let undecided = !(inw | outw);
            if undecided != 0 {
                let idx = (w << 6) + undecided.trailing_zeros() as usize;
                if idx < self.len {
                    return Some(idx);
                }
            }
        }
        None
    }
}

/// A total predicate table over base-domain snapshots.
struct PredTable {
    dims: Vec<Rc<DomSnap>>,
    strides: Vec<usize>,
    bits: Bits,
}

impl PredTable {
    fn index_of(&self, args: &[ElemId]) -> Option<usize> {
        let mut idx = 0usize;
        for (i, &e) in args.iter().enumerate() {
            idx += *self.dims[i].pos.get(&e)? as usize * self.strides[i];
        }
        Some(idx)
    }
}

pub(crate) struct Node {
    id: usize,
    cacheable: bool,
    /// Static work estimate, used to decide when a disjunction may give up
    /// early on an Unknown left side rather than evaluate a big right side.
    cost: u32,
    kind: Kind,
}

enum Kind {
    Eq(usize, usize),
    Pred { table: usize, args: Vec<usize> },
    VarAtom { rel: usize, args: Vec<usize> },
    Not(Box<Node>),
    Or(Box<Node>, Box<Node>),
    ExistsInd { slot: usize, sort: SortId, body: Box<Node> },
    ExistsRel {
        slot: usize,
        sorts: Vec<SortId>,
        /// Relation slots bound outside this quantifier that the body reads.
        /// While any of them has undecided tuples, searching this relation
        /// deeply is futile (the body cannot become True), so the search
        /// defers to the outer quantifier after a single body evaluation.
        outer_rels: Vec<usize>,
        body: Box<Node>,
    },
    /// A block compiles to the union of its sorts plus an inner chain of
    /// `ExistsRel` nodes, one per member: expanding the domains first and
    /// then searching the members is exactly the block's truth clause.
    ExistsNew { sorts: Vec<SortId>, inner: Box<Node> },
}

pub(crate) struct Compiled {
    root: Node,
    n_ind: usize,
    n_rel: usize,
    free_ind: Vec<(IndividualVar, usize)>,
    free_rel: Vec<(RelationVar, usize)>,
}

#[derive(Default)]
struct Deps {
    ind: Vec<usize>,
    rel: Vec<usize>,
}

impl Deps {
    fn union(mut self, other: Deps) -> Deps {
        for s in other.ind {
            if !self.ind.contains(&s) {
                self.ind.push(s);
            }
        }
        for s in other.rel {
            if !self.rel.contains(&s) {
                self.rel.push(s);
            }
        }
        self
    }

    fn without_ind(mut self, slot: usize) -> Deps {
        self.ind.retain(|&s| s != slot);
        self
    }

    fn without_rel(mut self, slot: usize) -> Deps {
        self.rel.retain(|&s| s != slot);
        self
    }

    fn is_empty(&self) -> bool {
        self.ind.is_empty() && self.rel.is_empty()
    }
}

struct Compiler<'a> {
    pred_index: &'a BTreeMap<String, usize>,
    ind_scope: Vec<(IndividualVar, usize)>,
    rel_scope: Vec<(RelationVar, usize)>,
    free_ind: Vec<(IndividualVar, usize)>,
    free_rel: Vec<(RelationVar, usize)>,
    n_ind: usize,
    n_rel: usize,
    next_id: usize,
}

impl<'a> Compiler<'a> {
    fn node(&mut self, kind: Kind, deps: &Deps) -> Node {
        let id = self.next_id;
        self.next_id += 1;
        let cost = match &kind {
            Kind::Eq(..) | Kind::Pred { .. } | Kind::VarAtom { .. } => 1,
            Kind::Not(p) => p.cost.saturating_add(1),
            Kind::Or(a, b) => a.cost.saturating_add(b.cost).saturating_add(1),
            // A nominal branching factor stands in for the unknown domain
            // size; only the order of magnitude matters.
            Kind::ExistsInd { body, .. } => body.cost.saturating_mul(4).saturating_add(2),
            Kind::ExistsRel { body, .. } => body.cost.saturating_mul(256).saturating_add(2),
            Kind::ExistsNew { inner, .. } => inner.cost.saturating_mul(256).saturating_add(2),
        };
        Node {
            id,
            cacheable: deps.is_empty(),
            cost,
            kind,
        }
    }

    fn ind_slot(&mut self, var: &IndividualVar) -> usize {
        if let Some((_, slot)) = self.ind_scope.iter().rev().find(|(v, _)| v == var) {
            return *slot;
        }
        if let Some((_, slot)) = self.free_ind.iter().find(|(v, _)| v == var) {
            return *slot;
        }
        let slot = self.n_ind;
        self.n_ind += 1;
        self.free_ind.push((var.clone(), slot));
        slot
    }

    fn rel_slot(&mut self, var: &RelationVar) -> usize {
        if let Some((_, slot)) = self.rel_scope.iter().rev().find(|(v, _)| v == var) {
            return *slot;
        }
        if let Some((_, slot)) = self.free_rel.iter().find(|(v, _)| v == var) {
            return *slot;
        }
        let slot = self.n_rel;
        self.n_rel += 1;
        self.free_rel.push((var.clone(), slot));
        slot
    }

    fn fresh_ind_slot(&mut self) -> usize {
        let slot = self.n_ind;
        self.n_ind += 1;
        slot
    }

    fn fresh_rel_slot(&mut self) -> usize {
        let slot = self.n_rel;
        self.n_rel += 1;
        slot
    }

    fn compile(&mut self, phi: &Formula) -> Result<(Node, Deps), PreconditionViolation> {
        Ok(match phi {
            Formula::Equation(a, b) => {
                let sa = self.ind_slot(a);
                let sb = self.ind_slot(b);
                let deps = Deps {
                    ind: if sa == sb { vec![sa] } else { vec![sa, sb] },
                    rel: vec![],
                };
                (self.node(Kind::Eq(sa, sb), &deps), deps)
            }
            Formula::PredAtom { pred, args } => {
                let table = *self
                    .pred_index
                    .get(pred)
                    .ok_or_else(|| PreconditionViolation::UninterpretedSymbol(pred.clone()))?;
                let slots: Vec<usize> = args.iter().map(|a| self.ind_slot(a)).collect();
                let mut deps = Deps::default();
                for &s in &slots {
                    if !deps.ind.contains(&s) {
                        deps.ind.push(s);
                    }
                }
                (self.node(Kind::Pred { table, args: slots }, &deps), deps)
            }
            Formula::VarAtom { var, args } => {
                let rel = self.rel_slot(var);
                let slots: Vec<usize> = args.iter().map(|a| self.ind_slot(a)).collect();
                let mut deps = Deps {
                    ind: vec![],
                    rel: vec![rel],
                };
                for &s in &slots {
                    if !deps.ind.contains(&s) {
                        deps.ind.push(s);
                    }
                }
                (self.node(Kind::VarAtom { rel, args: slots }, &deps), deps)
            }
            Formula::Not(p) => {
                let (n, deps) = self.compile(p)?;
                (self.node(Kind::Not(Box::new(n)), &deps), deps)
            }
            Formula::Or(a, b) => {
                let (na, da) = self.compile(a)?;
                let (nb, db) = self.compile(b)?;
                let deps = da.union(db);
                (self.node(Kind::Or(Box::new(na), Box::new(nb)), &deps), deps)
            }
            Formula::ExistsInd(x, body) => {
                let slot = self.fresh_ind_slot();
                self.ind_scope.push((x.clone(), slot));
                let result = self.compile(body);
                self.ind_scope.pop();
                let (n, deps) = result?;
                let deps = deps.without_ind(slot);
                (
                    self.node(
                        Kind::ExistsInd {
                            slot,
                            sort: x.sort,
                            body: Box::new(n),
                        },
                        &deps,
                    ),
                    deps,
                )
            }
            Formula::ExistsRel(x, body) => {
                let slot = self.fresh_rel_slot();
                self.rel_scope.push((x.clone(), slot));
                let result = self.compile(body);
                self.rel_scope.pop();
                let (n, deps) = result?;
                let deps = deps.without_rel(slot);
                (
                    self.node(
                        Kind::ExistsRel {
                            slot,
                            sorts: x.sorts.clone(),
                            outer_rels: deps.rel.clone(),
                            body: Box::new(n),
                        },
                        &deps,
                    ),
                    deps,
                )
            }
            Formula::ExistsNewSorts(block, body) => {
                let slots: Vec<usize> = block.iter().map(|_| self.fresh_rel_slot()).collect();
                for (v, &slot) in block.iter().zip(&slots) {
                    self.rel_scope.push((v.clone(), slot));
                }
                let result = self.compile(body);
                self.rel_scope.truncate(self.rel_scope.len() - block.len());
                let (mut node, mut deps) = result?;
                // Chain the members innermost-last so the written order is
                // the search nesting order.
                for (v, &slot) in block.iter().zip(&slots).rev() {
                    deps = deps.without_rel(slot);
                    node = self.node(
                        Kind::ExistsRel {
                            slot,
                            sorts: v.sorts.clone(),
                            outer_rels: deps.rel.clone(),
                            body: Box::new(node),
                        },
                        &deps,
                    );
                }
                let sorts: Vec<SortId> = crate::syntax::block_sorts(block).into_iter().collect();
                (
                    self.node(
                        Kind::ExistsNew {
                            sorts,
                            inner: Box::new(node),
                        },
                        &deps,
                    ),
                    deps,
                )
            }
        })
    }
}

pub(crate) fn compile(
    phi: &Formula,
    pred_index: &BTreeMap<String, usize>,
) -> Result<Compiled, PreconditionViolation> {
    let mut c = Compiler {
        pred_index,
        ind_scope: Vec::new(),
        rel_scope: Vec::new(),
        free_ind: Vec::new(),
        free_rel: Vec::new(),
        n_ind: 0,
        n_rel: 0,
        next_id: 0,
    };
    let (root, _) = c.compile(phi)?;
    Ok(Compiled {
        root,
        n_ind: c.n_ind,
        n_rel: c.n_rel,
        free_ind: c.free_ind,
        free_rel: c.free_rel,
    })
}

pub(crate) struct Engine<'a> {
    voc: &'a Vocabulary,
    elem_names: Vec<String>,
    elem_ids: HashMap<String, ElemId>,
    domains: BTreeMap<SortId, Rc<DomSnap>>,
    preds: Vec<PredTable>,
    pub(crate) pred_index: BTreeMap<String, usize>,
    ind_env: Vec<Option<ElemId>>,
    rel_env: Vec<Option<RelVal>>,
    epoch: u64,
    cache: HashMap<(usize, u64), Verdict>,
    steps: u64,
    exhausted: bool,
    domain_bound: usize,
    relation_cap: u64,
    step_cap: u64,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(voc: &'a Vocabulary, m: &Structure, budget: &Budget) -> Self {
        let mut engine = Engine {
            voc,
            elem_names: Vec::new(),
            elem_ids: HashMap::new(),
            domains: BTreeMap::new(),
            preds: Vec::new(),
            pred_index: BTreeMap::new(),
            ind_env: Vec::new(),
            rel_env: Vec::new(),
            epoch: 0,
            cache: HashMap::new(),
            steps: 0,
            exhausted: false,
            domain_bound: budget.domain_bound,
            relation_cap: budget.relation_cap,
            step_cap: budget.step_cap,
        };
        for (sort, dom) in m.domains() {
            let ids: Vec<ElemId> = dom.iter().map(|e| engine.intern(e)).collect();
            engine.domains.insert(sort, Rc::new(DomSnap::new(ids)));
        }
        for (name, tuples) in m.interps() {
            let sorts = engine.voc.sorts_of(name).expect("validated structure");
            let dims: Vec<Rc<DomSnap>> = sorts
                .iter()
                .map(|s| engine.domains.get(s).expect("validated structure").clone())
                .collect();
            let mut len = 1usize;
            let mut strides = vec![0usize; dims.len()];
            for i in (0..dims.len()).rev() {
                strides[i] = len;
                len *= dims[i].len();
            }
            let mut bits = Bits::new(len);
            for tuple in tuples {
                let ids: Vec<ElemId> = tuple.iter().map(|e| engine.intern(e)).collect();
                let mut idx = 0usize;
                for (i, &e) in ids.iter().enumerate() {
                    idx += *dims[i].pos.get(&e).expect("validated tuple") as usize * strides[i];
                }
                bits.set(idx);
            }
            engine.pred_index.insert(name.to_string(), engine.preds.len());
            engine.preds.push(PredTable { dims, strides, bits });
        }
        engine
    }

    fn intern(&mut self, name: &str) -> ElemId {
        if let Some(&id) = self.elem_ids.get(name) {
            return id;
        }
        let id = self.elem_names.len() as ElemId;
        self.elem_names.push(name.to_string());
        self.elem_ids.insert(name.to_string(), id);
        id
    }

    pub(crate) fn steps_used(&self) -> u64 {
        self.steps
    }

    fn count_step(&mut self) -> bool {
        self.steps += 1;
        if self.steps > self.step_cap {
            self.exhausted = true;
            return false;
        }
        true
    }

    /// Evaluates a compiled formula under the given assignment for its free
    /// variables.
    pub(crate) fn run(
        &mut self,
        compiled: &Compiled,
        s: &Assignment,
    ) -> Result<Verdict, PreconditionViolation> {
        self.ind_env = vec![None; compiled.n_ind];
        self.rel_env = (0..compiled.n_rel).map(|_| None).collect();
        for (var, slot) in &compiled.free_ind {
            let elem = s
                .get_ind(var)
                .ok_or_else(|| PreconditionViolation::UncoveredVariable(var.to_string()))?;
            let id = self.intern(elem);
            self.ind_env[*slot] = Some(id);
        }
        for (var, slot) in &compiled.free_rel {
            let tuples = s
                .get_rel(var)
                .ok_or_else(|| PreconditionViolation::UncoveredVariable(var.to_string()))?;
            let dims: Vec<Rc<DomSnap>> = var
                .sorts
                .iter()
                .map(|sort| {
                    self.domains
                        .get(sort)
                        .cloned()
                        .ok_or(PreconditionViolation::UnfixedFreeSort(*sort))
                })
                .collect::<Result<_, _>>()?;
            let mut rv = RelVal::undecided(dims);
            // Total value: everything not listed is out.
            for w in &mut rv.out_bits.words {
                *w = u64::MAX;
            }
            for tuple in tuples {
                let ids: Vec<ElemId> = tuple.iter().map(|e| self.intern(e)).collect();
                if let Some(idx) = rv.index_of(&ids) {
                    rv.out_bits.clear(idx);
                    rv.in_bits.set(idx);
                }
            }
            self.rel_env[*slot] = Some(rv);
        }
        Ok(self.eval(&compiled.root))
    }

    fn eval(&mut self, node: &Node) -> Verdict {
        if self.exhausted {
            return Verdict::Unknown;
        }
        let entry_epoch = self.epoch;
        if node.cacheable {
            if let Some(&v) = self.cache.get(&(node.id, entry_epoch)) {
                return v;
            }
        }
        let v = match &node.kind {
            Kind::Eq(a, b) => {
                let va = self.ind_env[*a].expect("bound individual slot");
                let vb = self.ind_env[*b].expect("bound individual slot");
                Verdict::from_bool(va == vb)
            }
            Kind::Pred { table, args } => {
                let t = &self.preds[*table];
                let mut ids = [0 as ElemId; 8];
                debug_assert!(args.len() <= 8);
                for (i, &slot) in args.iter().enumerate() {
                    ids[i] = self.ind_env[slot].expect("bound individual slot");
                }
                match t.index_of(&ids[..args.len()]) {
                    Some(idx) => Verdict::from_bool(t.bits.get(idx)),
                    None => Verdict::False,
                }
            }
            Kind::VarAtom { rel, args } => {
                let mut ids = [0 as ElemId; 8];
                debug_assert!(args.len() <= 8);
                for (i, &slot) in args.iter().enumerate() {
                    ids[i] = self.ind_env[slot].expect("bound individual slot");
                }
                let rv = self.rel_env[*rel].as_ref().expect("bound relation slot");
                match rv.index_of(&ids[..args.len()]) {
                    Some(idx) => rv.lookup(idx),
                    None => Verdict::False,
                }
            }
            Kind::Not(p) => self.eval(p).negate(),
            Kind::Or(a, b) => {
                let va = self.eval(a);
                if va == Verdict::True {
                    Verdict::True
                } else if va == Verdict::Unknown && a.cost <= LAZY_OR_GUARD && b.cost > LAZY_OR_COST {
                    // An Unknown left side already rules out False, and the
                    // right side is expensive: settle for Unknown. Witnesses
                    // deferred this way are still confirmed at fully decided
                    // leaves, where nothing is Unknown; refutations never
                    // pass through here (they need a False left side).
                    Verdict::Unknown
                } else {
                    match self.eval(b) {
                        Verdict::True => Verdict::True,
                        Verdict::False => {
                            if va == Verdict::False {
                                Verdict::False
                            } else {
                                Verdict::Unknown
                            }
                        }
                        Verdict::Unknown => Verdict::Unknown,
                    }
                }
            }
            Kind::ExistsInd { slot, sort, body } => {
                let Some(dom) = self.domains.get(sort).cloned() else {
                    debug_assert!(false, "individual quantifier over a sort with no domain");
                    return Verdict::Unknown;
                };
                let mut saw_unknown = false;
                let mut result = Verdict::False;
                for &e in &dom.elems {
                    self.ind_env[*slot] = Some(e);
                    match self.eval(body) {
                        Verdict::True => {
                            result = Verdict::True;
                            break;
                        }
                        Verdict::Unknown => saw_unknown = true,
                        Verdict::False => {}
                    }
                    if self.exhausted {
                        saw_unknown = true;
                        break;
                    }
                }
                self.ind_env[*slot] = None;
                if result == Verdict::True {
                    Verdict::True
                } else if saw_unknown {
                    Verdict::Unknown
                } else {
                    Verdict::False
                }
            }
            Kind::ExistsRel {
                slot,
                sorts,
                outer_rels,
                body,
            } => self.search_rel(*slot, sorts, outer_rels, body),
            Kind::ExistsNew { sorts, inner } => self.eval_block(sorts, inner),
        };
        if node.cacheable {
            self.cache.insert((node.id, entry_epoch), v);
        }
        v
    }

    /// Branch-and-prune witness search for an existential relation
    /// quantifier. Starts from the fully undecided relation; a True body at
    /// a partial relation proves every completion, a False body prunes them
    /// all. Branches on the first undecided tuple, in-branch first. Only
    /// opening a branch consumes budget, so a full exploration of an
    /// n-tuple product costs at most 2^n - 1 of the relation cap.
    fn search_rel(
        &mut self,
        slot: usize,
        sorts: &[SortId],
        outer_rels: &[usize],
        body: &Node,
    ) -> Verdict {
        let dims: Option<Vec<Rc<DomSnap>>> =
            sorts.iter().map(|s| self.domains.get(s).cloned()).collect();
        let Some(dims) = dims else {
            debug_assert!(false, "relation quantifier over a sort with no domain");
            return Verdict::Unknown;
        };
        self.rel_env[slot] = Some(RelVal::undecided(dims));
        let blocked = outer_rels.iter().any(|&s| {
            self.rel_env[s]
                .as_ref()
                .is_some_and(|rv| rv.first_undecided().is_some())
        });
        if blocked {
            // Definite verdicts at the fully undecided relation still count;
            // anything else waits for the outer search to finish deciding.
            let v = self.eval(body);
            self.rel_env[slot] = None;
            return v;
        }
        let mut branch_budget = self.relation_cap;
        let mut saw_unknown = false;
        let mut stack: Vec<(usize, bool)> = Vec::new();
        let verdict = loop {
            let v = self.eval(body);
            let next = match v {
                Verdict::True => break Verdict::True,
                Verdict::False => Backtrack::Up,
                Verdict::Unknown => {
                    if self.exhausted {
                        break Verdict::Unknown;
                    }
                    match self.rel_env[slot].as_ref().unwrap().first_undecided() {
                        Some(t) => {
                            if branch_budget == 0 || !self.count_step() {
                                break Verdict::Unknown;
                            }
                            branch_budget -= 1;
                            Backtrack::Branch(t)
                        }
                        None => {
                            // Fully decided yet Unknown: an inner budget ran
                            // out; this leaf proves nothing either way.
                            saw_unknown = true;
                            Backtrack::Up
                        }
                    }
                }
            };
            match next {
                Backtrack::Branch(t) => {
                    self.rel_env[slot].as_mut().unwrap().in_bits.set(t);
                    stack.push((t, false));
                }
                Backtrack::Up => {
                    let mut resumed = false;
                    while let Some((t, tried_out)) = stack.pop() {
                        let rv = self.rel_env[slot].as_mut().unwrap();
                        if tried_out {
                            rv.out_bits.clear(t);
                        } else {
                            rv.in_bits.clear(t);
                            rv.out_bits.set(t);
                            stack.push((t, true));
                            resumed = true;
                            break;
                        }
                    }
                    if !resumed {
                        break if saw_unknown {
                            Verdict::Unknown
                        } else {
                            Verdict::False
                        };
                    }
                }
            }
        };
        self.rel_env[slot] = None;
        verdict
    }

    /// New-sort block: try every expansion candidate within the domain
    /// bound; a witness makes the block True, exhaustion leaves it Unknown.
    /// Never False: domains beyond the bound are unexplored.
    fn eval_block(&mut self, sorts: &[SortId], inner: &Node) -> Verdict {
        let mut pool = Structure::new();
        for (sort, snap) in &self.domains {
            let names: Vec<&str> = snap
                .elems
                .iter()
                .map(|&e| self.elem_names[e as usize].as_str())
                .collect();
            pool.set_domain(*sort, names);
        }
        let budget = Budget {
            domain_bound: self.domain_bound,
            relation_cap: self.relation_cap,
            step_cap: self.step_cap,
        };
        let candidates: Vec<_> = enumerate_expansions(&pool, sorts, &budget).collect();
        for item in candidates {
            let Ok(cand) = item else {
                break;
            };
            if !self.count_step() {
                break;
            }
            let saved: Vec<(SortId, Option<Rc<DomSnap>>)> = cand
                .new_domains
                .iter()
                .map(|(sort, dom)| {
                    let ids: Vec<ElemId> = dom.iter().map(|e| self.intern(e)).collect();
                    let old = self.domains.insert(*sort, Rc::new(DomSnap::new(ids)));
                    (*sort, old)
                })
                .collect();
            self.epoch += 1;
            let v = self.eval(inner);
            for (sort, old) in saved {
                match old {
                    Some(snap) => {
                        self.domains.insert(sort, snap);
                    }
                    None => {
                        self.domains.remove(&sort);
                    }
                }
            }
            self.epoch += 1;
            if v == Verdict::True {
                return Verdict::True;
            }
            if self.exhausted {
                break;
            }
        }
        Verdict::Unknown
    }
}

enum Backtrack {
    Branch(usize),
    Up,
}
