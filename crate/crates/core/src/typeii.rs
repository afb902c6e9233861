//! The type-II subsemigroup, the Tilson congruence on `G x B` and the characterizations
//! built on them.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::eval::{flow_search, ExploreOptions, Family, SearchOutcome};
use crate::flow::{check_pair, flow_to_division, verify_complete_flow, Automaton, DivisionCertificate, FlowCandidate};
use crate::gm::{monomial_completions, GMSystem};
use crate::group::Gid;
use crate::lattice::SPCElement;
use crate::matrix::RowMonomialMatrix;
use crate::semigroup::{classes_from_labels, is_aperiodic, scc_labels, Element, FinSemigroup};

/// Full tables above this size cost too much memory; products fall back to hashing.
const TABLE_LIMIT: usize = 6000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `x t y`
    Left,
    /// `y t x`
    Right,
}

/// How an element entered `S_II`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Idempotent,
    Product(usize, usize),
    /// `xyx = x`; `t = None` is the empty middle factor.
    WeakConjugation { x: usize, y: usize, t: Option<usize>, side: Side },
}

#[derive(Clone, Debug)]
pub struct TypeII {
    /// Member ids, ascending.
    pub members: Vec<usize>,
    pub steps: HashMap<usize, Step>,
    /// The empty middle factor is allowed (`t` ranges over `S_II` with an identity adjoined).
    pub includes_empty_middle: bool,
}

impl TypeII {
    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// Re-evaluates the derivation of `i`, checking every weak-conjugation certificate.
    pub fn replay<E: Element>(&self, s: &FinSemigroup<E>, i: usize) -> Option<usize> {
        match *self.steps.get(&i)? {
            Step::Idempotent => s.is_idempotent(i).then_some(i),
            Step::Product(a, b) => Some(s.product(self.replay(s, a)?, self.replay(s, b)?)),
            Step::WeakConjugation { x, y, t, side } => {
                if s.product(s.product(x, y), x) != x {
                    return None;
                }
                let (l, r) = match side {
                    Side::Left => (x, y),
                    Side::Right => (y, x),
                };
                match t {
                    Some(t) => Some(s.product(s.product(l, self.replay(s, t)?), r)),
                    None => Some(s.product(l, r)),
                }
            }
        }
    }
}

struct Mult<'a, E: Element> {
    s: &'a FinSemigroup<E>,
    table: Option<Vec<u32>>,
}

impl<E: Element> Mult<'_, E> {
    #[inline]
    fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.s.len() + b] as usize,
            None => self.s.product(a, b),
        }
    }
}

/// Least subsemigroup containing the idempotents and closed under weak conjugation.
pub fn type_ii<E: Element>(s: &FinSemigroup<E>) -> TypeII {
    let n = s.len();
    let m = Mult { s, table: (n <= TABLE_LIMIT).then(|| s.cayley_table()) };
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if m.mul(m.mul(x, y), x) == x {
                pairs.push((x, y));
            }
        }
    }
    let mut inside = vec![false; n];
    let mut steps = HashMap::new();
    let mut list: Vec<usize> = Vec::new();
    let mut add = |i: usize, step: Step, inside: &mut Vec<bool>, list: &mut Vec<usize>| {
        if !inside[i] {
            inside[i] = true;
            steps.insert(i, step);
            list.push(i);
        }
    };
    for e in 0..n {
        if m.mul(e, e) == e {
            add(e, Step::Idempotent, &mut inside, &mut list);
        }
    }
    // xy and yx are idempotent whenever xyx = x, so the empty middle factor adds nothing new.
    for &(x, y) in &pairs {
        add(m.mul(x, y), Step::WeakConjugation { x, y, t: None, side: Side::Left }, &mut inside, &mut list);
        add(m.mul(y, x), Step::WeakConjugation { x, y, t: None, side: Side::Right }, &mut inside, &mut list);
    }
    let mut i = 0;
    while i < list.len() {
        let t = list[i];
        let mut j = 0;
        while j <= i {
            let u = list[j];
            add(m.mul(t, u), Step::Product(t, u), &mut inside, &mut list);
            add(m.mul(u, t), Step::Product(u, t), &mut inside, &mut list);
            j += 1;
        }
        for &(x, y) in &pairs {
            let xt = m.mul(x, t);
            add(m.mul(xt, y), Step::WeakConjugation { x, y, t: Some(t), side: Side::Left }, &mut inside, &mut list);
            let yt = m.mul(y, t);
            add(m.mul(yt, x), Step::WeakConjugation { x, y, t: Some(t), side: Side::Right }, &mut inside, &mut list);
        }
        i += 1;
    }
    list.sort_unstable();
    TypeII { members: list, steps, includes_empty_middle: true }
}

/// `S in Ap * Gp` iff `S_II` is aperiodic; returns a non-aperiodic member as witness.
pub fn ap_star_gp_member<E: Element>(s: &FinSemigroup<E>) -> (bool, Option<usize>) {
    let t = type_ii(s);
    let w = t.members.iter().copied().find(|&x| s.index_period(x).1 != 1);
    debug_assert_eq!(w.is_none(), is_aperiodic(s, Some(&t.members)).unwrap_or(false));
    (w.is_none(), w)
}

/// A partition of `G x B` (points `b * |G| + g`) into classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauPartition {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    /// Induced partition of `B`, labels per `b`.
    pub tau_b: Vec<usize>,
    /// Per class: hits every `b` at most once.
    pub cross: Vec<bool>,
    /// Every generator acts as a compatible partial injection on the classes.
    pub injective: bool,
    pub g_order: usize,
}

impl TauPartition {
    pub fn from_labels(labels: &[usize], g_order: usize) -> Self {
        let classes = classes_from_labels(labels);
        let b_size = labels.len() / g_order;
        // Union of B-projections; G-invariance makes these disjoint.
        let mut parent: Vec<usize> = (0..b_size).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let n = p[c];
                p[c] = r;
                c = n;
            }
            r
        }
        for cl in &classes {
            let b0 = cl[0] / g_order;
            for &p in cl {
                let (a, b) = (find(&mut parent, b0), find(&mut parent, p / g_order));
                parent[a.max(b)] = a.min(b);
            }
        }
        let raw: Vec<usize> = (0..b_size).map(|b| find(&mut parent, b)).collect();
        let tau_b = crate::semigroup::relabel(&raw);
        let cross = classes
            .iter()
            .map(|cl| {
                let mut bs: Vec<usize> = cl.iter().map(|p| p / g_order).collect();
                bs.sort_unstable();
                bs.windows(2).all(|w| w[0] != w[1])
            })
            .collect();
        TauPartition { class_of: labels.to_vec(), classes, tau_b, cross, injective: false, g_order }
    }

    pub fn num_points(&self) -> usize {
        self.class_of.len()
    }

    /// `None` when every class is a cross-section, else two points `(g,b), (h,b)` with `g != h`.
    pub fn cross_section_witness(&self) -> Option<((Gid, usize), (Gid, usize))> {
        for cl in &self.classes {
            let mut seen: HashMap<usize, usize> = HashMap::new();
            for &p in cl {
                let b = p / self.g_order;
                if let Some(&q) = seen.get(&b) {
                    return Some((
                        ((q % self.g_order) as Gid, b),
                        ((p % self.g_order) as Gid, b),
                    ));
                }
                seen.insert(b, p);
            }
        }
        None
    }

    /// Blocks of `B` in ascending order of least member.
    pub fn b_blocks(&self) -> Vec<Vec<usize>> {
        classes_from_labels(&self.tau_b)
    }
}

pub fn tau_is_cross_section(t: &TauPartition) -> (bool, Option<((Gid, usize), (Gid, usize))>) {
    let w = t.cross_section_witness();
    (w.is_none(), w)
}

/// Point map of element `i` on `G x B`.
pub fn point_map(g: &GMSystem, i: usize) -> Vec<Option<usize>> {
    let m = g.matrix(i);
    (0..g.num_points())
        .map(|p| {
            let (h, b) = g.unpoint(p);
            m.act(&g.group, (h, b)).map(|(h2, b2)| g.point(h2, b2))
        })
        .collect()
}

/// `labels` is compatible with every generator and each generator is injective on classes.
pub fn is_injective_congruence(g: &GMSystem, labels: &[usize]) -> bool {
    (0..g.s.num_generators()).all(|k| {
        let f = point_map(g, g.s.gen_id(k));
        congruence_ok(&f, labels)
    })
}

fn congruence_ok(f: &[Option<usize>], labels: &[usize]) -> bool {
    let mut img: HashMap<usize, usize> = HashMap::new();
    let mut pre: HashMap<usize, usize> = HashMap::new();
    for (p, q) in f.iter().enumerate() {
        if let Some(q) = *q {
            let (cp, cq) = (labels[p], labels[q]);
            if *img.entry(cp).or_insert(cq) != cq || *pre.entry(cq).or_insert(cp) != cp {
                return false;
            }
        }
    }
    true
}

/// Mutual reachability under `S_II ∩ I(S)` acting on `G x B`.
pub fn tilson_tau(g: &GMSystem) -> TauPartition {
    tilson_tau_with(g, &type_ii(&g.s))
}

pub fn tilson_tau_with(g: &GMSystem, t2: &TypeII) -> TauPartition {
    let n = g.num_points();
    let mut edges = Vec::new();
    for &x in &t2.members {
        if g.ideal.contains(x) {
            for (p, q) in point_map(g, x).into_iter().enumerate() {
                if let Some(q) = q {
                    edges.push((p, q));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let labels = scc_labels(n, edges.into_iter());
    let mut t = TauPartition::from_labels(&labels, g.group.order());
    t.injective = is_injective_congruence(g, &labels);
    t
}

/// Members of `S_II ∩ I(S)` and whether that subsemigroup is aperiodic.
pub fn ideal_type_ii(g: &GMSystem, t2: &TypeII) -> (Vec<usize>, Option<usize>) {
    let members: Vec<usize> = t2.members.iter().copied().filter(|&x| g.ideal.contains(x)).collect();
    let w = members.iter().copied().find(|&x| g.s.index_period(x).1 != 1);
    (members, w)
}

/// Division into `G x RLM(S)` when all weights inside each matrix agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroConstant {
    pub holds: bool,
    /// First element with two distinct weights.
    pub witness: Option<usize>,
    /// Per element: `(weight, RLM id)`; injective when `holds`.
    pub division: Option<Vec<(Gid, usize)>>,
}

pub fn is_zero_constant(g: &GMSystem) -> ZeroConstant {
    let witness = (0..g.s.len()).find(|&i| {
        let mut ws = g.matrix(i).weights();
        match ws.next() {
            Some(w0) => ws.any(|w| w != w0),
            None => false,
        }
    });
    if witness.is_some() {
        return ZeroConstant { holds: false, witness, division: None };
    }
    let div: Vec<(Gid, usize)> = (0..g.s.len())
        .map(|i| (g.matrix(i).weights().next().unwrap_or(g.group.id()), g.rlm_map[i]))
        .collect();
    let mut sorted = div.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), div.len(), "0-constant action embeds into G x RLM(S)");
    ZeroConstant { holds: true, witness: None, division: Some(div) }
}

/// Cross-section state of `G x B` induced by `τ`: blocks `τ_B`, and on each block the
/// weights of the class through `(1, b)` for the least `b` of the block.
pub fn tau_state(g: &GMSystem, t: &TauPartition) -> Option<SPCElement> {
    if t.cross_section_witness().is_some() {
        return None;
    }
    let mut entries: Vec<Option<(u32, Gid)>> = vec![None; g.dim];
    for (bl, block) in t.b_blocks().iter().enumerate() {
        let class = t.class_of[g.point(g.group.id(), block[0])];
        for &p in &t.classes[class] {
            let (h, b) = g.unpoint(p);
            entries[b] = Some((bl as u32, h));
        }
    }
    Some(SPCElement::from_entries(&g.group, &entries))
}

/// The three equivalent conditions for a one-point flow, evaluated separately.
#[derive(Clone, Debug)]
pub struct OnePointFlow {
    /// `S_II ∩ I(S)` is aperiodic; otherwise an element of non-trivial period.
    pub ideal_aperiodic: bool,
    pub period_witness: Option<usize>,
    /// `τ` is a cross-section; otherwise two points `(g,b), (h,b)` in one class.
    pub tau_cross: bool,
    pub tau_witness: Option<((Gid, usize), (Gid, usize))>,
    /// A one-state flow was exhibited: the `τ` state when it exists, otherwise whatever a
    /// bounded search over explored states finds.
    pub flow_found: bool,
    pub flow: Option<FlowCandidate>,
}

impl OnePointFlow {
    pub fn exists(&self) -> bool {
        self.flow.is_some()
    }

    pub fn state(&self) -> Option<&SPCElement> {
        self.flow.as_ref().map(|f| &f.assignment[0])
    }
}

pub fn one_state_candidate(g: &GMSystem, l: SPCElement) -> FlowCandidate {
    FlowCandidate { automaton: Automaton::one_state(), cover: vec![0; g.s.num_generators()], assignment: vec![l] }
}

/// Evaluates all three conditions. In the negative case the flow condition is probed by a
/// one-state search over states explored to depth 2.
pub fn one_point_flow(g: &GMSystem) -> Result<OnePointFlow> {
    let t2 = type_ii(&g.s);
    let (_, period_witness) = ideal_type_ii(g, &t2);
    let tau = tilson_tau_with(g, &t2);
    let tau_witness = tau.cross_section_witness();
    let flow = match tau_state(g, &tau) {
        Some(l) => {
            let c = one_state_candidate(g, l);
            verify_complete_flow(g, &c).is_valid().then_some(c)
        }
        None => {
            let opts = ExploreOptions { bound: 20_000, word_length: 1, nested: false, depth: Some(2) };
            match flow_search(g, &Family::Given(Automaton::one_state()), &opts) {
                Ok(SearchOutcome::Found { candidate, .. }) => Some(candidate),
                Ok(SearchOutcome::Exhausted { .. }) | Err(Error::UniverseOverflow { .. }) => None,
                Err(e) => return Err(e),
            }
        }
    };
    let r = OnePointFlow {
        ideal_aperiodic: period_witness.is_none(),
        period_witness,
        tau_cross: tau_witness.is_none(),
        tau_witness,
        flow_found: flow.is_some(),
        flow,
    };
    if r.ideal_aperiodic != r.tau_cross || r.tau_cross != r.flow_found {
        return Err(Error::InternalInconsistency(format!(
            "one-point conditions disagree: aperiodic={} cross-section={} flow={}",
            r.ideal_aperiodic, r.tau_cross, r.flow_found
        )));
    }
    Ok(r)
}

/// Completions are enumerated per element only for at most this many blocks.
pub const COMPLETION_BLOCKS: usize = 8;
const COMPLETION_LIMIT: usize = 4096;

/// `ρ(s)`: the block action `s̄` on `B/τ` and its monomial completions in `G wr Sym(B/τ)`,
/// with the slice certificate for `S ≺ (G wr Sym(B/τ)) x RLM(S)`.
#[derive(Clone, Debug)]
pub struct ResolutionRho {
    pub state: SPCElement,
    pub blocks: usize,
    /// Per element of `S`.
    pub bar: Vec<RowMonomialMatrix>,
    /// Per element; a single canonical completion above the block limit.
    pub completions: Vec<Vec<RowMonomialMatrix>>,
    pub truncated: bool,
    pub division: DivisionCertificate,
}

pub fn resolution_rho(g: &GMSystem) -> Result<ResolutionRho> {
    let tau = tilson_tau(g);
    let state = tau_state(g, &tau).ok_or_else(|| {
        let ((h1, b), (h2, _)) = tau.cross_section_witness().expect("not a cross-section");
        Error::NotCrossSection(format!(
            "({},{}) and ({},{}) share a class",
            g.group.label(h1),
            b + 1,
            g.group.label(h2),
            b + 1
        ))
    })?;
    let k = state.num_blocks();
    let mut bar = Vec::with_capacity(g.s.len());
    for i in 0..g.s.len() {
        let map = check_pair(&g.group, g.matrix(i), &state, &state)
            .map_err(|e| Error::InternalInconsistency(format!("τ state not stable under element {i}: {e:?}")))?;
        bar.push(RowMonomialMatrix::from_rows(map.iter().map(|e| e.map(|(t, c)| (t as u32, c))).collect()));
    }
    let limit = if k <= COMPLETION_BLOCKS { COMPLETION_LIMIT } else { 1 };
    let completions: Vec<Vec<RowMonomialMatrix>> = bar.iter().map(|m| monomial_completions(m, &g.group, limit)).collect();
    let truncated = k > COMPLETION_BLOCKS || completions.iter().any(|c| c.len() >= COMPLETION_LIMIT);
    let division = flow_to_division(g, &one_state_candidate(g, state.clone()))?;
    Ok(ResolutionRho { state, blocks: k, bar, completions, truncated, division })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupTable;
    use crate::gm::gwr_sim;
    use crate::semigroup::generate_semigroup;

    #[test]
    fn group_type_ii_is_trivial() {
        let g = GroupTable::cyclic(3);
        let x = crate::matrix::RowMonomialMatrix::from_rows(vec![Some((0, 1))]);
        let s = generate_semigroup(&[x], &g, 10).unwrap();
        let t = type_ii(&s);
        assert_eq!(t.members.len(), 1);
        assert!(s.is_idempotent(t.members[0]));
        assert_eq!(ap_star_gp_member(&s), (true, None));
    }

    #[test]
    fn inverse_tau_is_equality() {
        let g = GroupTable::cyclic(2);
        let sys = gwr_sim(&g, 2).unwrap();
        let t = tilson_tau(&sys);
        assert_eq!(t.classes.len(), 4);
        assert!(t.injective && tau_is_cross_section(&t).0);
        let t2 = type_ii(&sys.s);
        for &m in &t2.members {
            assert_eq!(t2.replay(&sys.s, m), Some(m));
        }
    }
}
