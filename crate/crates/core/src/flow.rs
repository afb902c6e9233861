//! Automata, flow verification, and the division a complete flow induces.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gm::{GMSystem, Pair};
use crate::group::{Gid, GroupTable};
use crate::lattice::{RhElement, SPCElement};
use crate::matrix::RowMonomialMatrix;
use crate::semigroup::{green_relations, Element, FinSemigroup};

/// Deterministic partial automaton; `delta[letter][state]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    pub state_names: Vec<String>,
    pub letters: Vec<String>,
    pub delta: Vec<Vec<Option<usize>>>,
}

impl Automaton {
    pub fn new(state_names: Vec<String>, letters: Vec<String>, delta: Vec<Vec<Option<usize>>>) -> Result<Self> {
        let n = state_names.len();
        if delta.len() != letters.len() || delta.iter().any(|r| r.len() != n) {
            return Err(Error::Input("transition table shape does not match states and letters".into()));
        }
        if delta.iter().flatten().flatten().any(|&q| q >= n) {
            return Err(Error::Input("transition to an unknown state".into()));
        }
        Ok(Automaton { state_names, letters, delta })
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    /// `RZ(k)^1` on states `1..k`: letter `1` is the identity, letter `ci` the constant map to `i`.
    pub fn rz_one(k: usize) -> Self {
        let mut letters = vec!["1".to_string()];
        let mut delta = vec![(0..k).map(Some).collect::<Vec<_>>()];
        for i in 0..k {
            letters.push(format!("c{}", i + 1));
            delta.push(vec![Some(i); k]);
        }
        Automaton { state_names: (1..=k).map(|i| i.to_string()).collect(), letters, delta }
    }

    /// Letter id of the constant map to state `i` in [`Automaton::rz_one`].
    pub fn rz_constant(i: usize) -> usize {
        i + 1
    }

    pub fn one_state() -> Self {
        Self::rz_one(1)
    }

    pub fn letter(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == name)
    }

    #[inline]
    pub fn step(&self, q: usize, letter: usize) -> Option<usize> {
        self.delta[letter][q]
    }

    /// Adds the sink `□` (last state) receiving every undefined transition.
    pub fn completed(&self) -> Automaton {
        let sink = self.num_states();
        let mut names = self.state_names.clone();
        names.push("□".into());
        let delta = self
            .delta
            .iter()
            .map(|row| row.iter().map(|q| Some(q.unwrap_or(sink))).chain(std::iter::once(Some(sink))).collect())
            .collect();
        Automaton { state_names: names, letters: self.letters.clone(), delta }
    }

    /// Transformation semigroup of the automaton, as 0/1 matrices.
    pub fn semigroup(&self) -> Result<FinSemigroup<RowMonomialMatrix>> {
        let triv = GroupTable::trivial();
        let gens: Vec<RowMonomialMatrix> = self
            .delta
            .iter()
            .map(|row| RowMonomialMatrix::from_rows(row.iter().map(|q| q.map(|q| (q as u32, 0))).collect()))
            .collect();
        FinSemigroup::generate(gens, triv, 1 << 20)
    }
}

/// Automaton, cover map from the letters of `S` and one SPC per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowCandidate {
    pub automaton: Automaton,
    /// `cover[x]` is the automaton letter covering generator `x` of `S`.
    pub cover: Vec<usize>,
    pub assignment: Vec<SPCElement>,
}

impl FlowCandidate {
    pub fn new(automaton: Automaton, cover: Vec<usize>, assignment: Vec<SPCElement>) -> Result<Self> {
        if assignment.len() != automaton.num_states() {
            return Err(Error::Input("one SPC per automaton state is required".into()));
        }
        if cover.iter().any(|&t| t >= automaton.letters.len()) {
            return Err(Error::Input("cover map names an unknown automaton letter".into()));
        }
        Ok(FlowCandidate { automaton, cover, assignment })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairFailure {
    /// A point over `b` leaves the target set.
    Containment { b: usize },
    /// A source block meets two target blocks.
    NotWellDefined { block: usize },
    /// A source block lands in one target block with non-proportional weights.
    CrossSectionMismatch { block: usize },
    /// Two source blocks share a target block.
    NotInjective { blocks: (usize, usize) },
}

/// Block-transition data for a pair that flows: `(target block, weight)` per source block,
/// with `f_q^i x = g_{ij} f_{qx}^j`.
pub type BlockMap = Vec<Option<(usize, Gid)>>;

/// `(l, m) ∈ f_x`: images stay in `m`, and blocks map partially injectively with compatible
/// cross-sections.
pub fn check_pair(group: &GroupTable, x: &RowMonomialMatrix, l: &SPCElement, m: &SPCElement) -> std::result::Result<BlockMap, PairFailure> {
    let mut map: BlockMap = vec![None; l.num_blocks()];
    for b in 0..l.b_size() {
        let Some((bl, f)) = l.entry(b) else { continue };
        let Some((b2, w)) = x.row(b) else { continue };
        let Some((bl2, f2)) = m.entry(b2) else { return Err(PairFailure::Containment { b }) };
        // (h f(b), b) x = (h f(b) w, b2) lies in translate k of the target block with k f2 = h f w.
        let c = group.mul(group.mul(f, w), group.inv(f2));
        match map[bl] {
            None => map[bl] = Some((bl2, c)),
            Some((t, _)) if t != bl2 => return Err(PairFailure::NotWellDefined { block: bl }),
            Some((_, c0)) if c0 != c => return Err(PairFailure::CrossSectionMismatch { block: bl }),
            Some(_) => {}
        }
    }
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (i, e) in map.iter().enumerate() {
        if let Some((t, _)) = e {
            if let Some(&j) = seen.get(t) {
                return Err(PairFailure::NotInjective { blocks: (j, i) });
            }
            seen.insert(*t, i);
        }
    }
    Ok(map)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Pair(PairFailure),
    /// `(g, b)` lies in no state.
    Coverage { g: Gid, b: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub state: Option<usize>,
    pub letter: Option<usize>,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self, g: &GMSystem, c: &FlowCandidate) -> String {
        let mut s = String::new();
        for v in &self.violations {
            let q = v.state.map_or("-".to_string(), |q| c.automaton.state_names.get(q).cloned().unwrap_or("□".into()));
            let x = v.letter.map_or("-".to_string(), |x| g.names[x].clone());
            let _ = writeln!(s, "violation state={q} letter={x} kind={:?}", v.kind);
        }
        s
    }
}

fn check_letters(g: &GMSystem, c: &FlowCandidate, sink_bottom: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    let bottom = SPCElement::bottom(g.dim);
    for (x, m) in g.generators().iter().enumerate() {
        let t = c.cover[x];
        for q in 0..c.automaton.num_states() {
            let target = match c.automaton.step(q, t) {
                Some(q2) => &c.assignment[q2],
                None if sink_bottom => &bottom,
                None => continue,
            };
            if let Err(f) = check_pair(&g.group, m, &c.assignment[q], target) {
                out.push(Violation { state: Some(q), letter: Some(x), kind: ViolationKind::Pair(f) });
            }
        }
    }
    out
}

/// Conditions on every `(q, x)` with `qx` defined. States are SPCs, so each is a cross-section.
pub fn verify_flow(g: &GMSystem, c: &FlowCandidate) -> Verdict {
    Verdict { violations: check_letters(g, c, false) }
}

/// Flow on the completion with `□ ↦ (∅, ∅)`, plus coverage of `G x B`.
pub fn verify_complete_flow(g: &GMSystem, c: &FlowCandidate) -> Verdict {
    let mut violations = check_letters(g, c, true);
    for b in 0..g.dim {
        if c.assignment.iter().all(|s| s.entry(b).is_none()) {
            for h in g.group.elements() {
                violations.push(Violation { state: None, letter: None, kind: ViolationKind::Coverage { g: h, b } });
            }
        }
    }
    Verdict { violations }
}

/// Element of `G wr Sym(B) wr T`: one monomial matrix per state plus the automaton map;
/// the sink is the last state and carries the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WreathElt {
    pub f: Vec<RowMonomialMatrix>,
    pub t: Vec<u32>,
}

impl Element for WreathElt {
    type Ctx = GroupTable;
    fn mul(&self, o: &Self, g: &GroupTable) -> Self {
        let f = self.f.iter().enumerate().map(|(q, m)| m.compose(&o.f[self.t[q] as usize], g)).collect();
        let t = self.t.iter().map(|&q| o.t[q as usize]).collect();
        WreathElt { f, t }
    }
}

/// Pads an `n_q x n_q'` block transition to a `|B| x |B|` monomial matrix: rows without an
/// entry take the unused columns in ascending order with weight 1.
pub fn pad_block_matrix(map: &BlockMap, dim: usize, group: &GroupTable) -> RowMonomialMatrix {
    let mut rows: Vec<Option<(u32, Gid)>> = vec![None; dim];
    let mut used = vec![false; dim];
    for (i, e) in map.iter().enumerate() {
        if let Some((j, w)) = *e {
            rows[i] = Some((j as u32, w));
            used[j] = true;
        }
    }
    let mut free = (0..dim).filter(|&j| !used[j]);
    for row in rows.iter_mut() {
        if row.is_none() {
            *row = Some((free.next().expect("square padding") as u32, group.id()));
        }
    }
    RowMonomialMatrix::from_rows(rows)
}

/// Outcome of a slice check: either certified or an offending pair of distinct elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceReport {
    pub ok: bool,
    /// Size of the generated relation `V ⊆ S x U`.
    pub relation_size: usize,
    pub pairs_checked: usize,
    pub witness: Option<(usize, usize)>,
    /// First projection of `V` is onto `S`.
    pub surjective: bool,
}

/// `labels` is compatible with right and left multiplication by generators.
pub fn is_congruence<E: Element>(s: &FinSemigroup<E>, labels: &[usize]) -> bool {
    let mut rep: HashMap<usize, usize> = HashMap::new();
    for i in 0..s.len() {
        let r = *rep.entry(labels[i]).or_insert(i);
        for k in 0..s.num_generators() {
            if labels[s.right_mul(i, k)] != labels[s.right_mul(r, k)] {
                return false;
            }
            if labels[s.left_mul(i, k)] != labels[s.left_mul(r, k)] {
                return false;
            }
        }
    }
    true
}

/// Generates `V` from `(generator, seed)` pairs and checks: `s ≡ s'` with a shared image
/// forces `s = s'`. Certifies `S ≺ U x S/≡`.
pub fn slice_check<E: Element, U: Element>(
    s: &FinSemigroup<E>,
    cong: &[usize],
    seeds: Vec<U>,
    uctx: U::Ctx,
    cap: usize,
) -> Result<SliceReport> {
    if !is_congruence(s, cong) {
        return Err(Error::NotACongruence("labels are not stable under multiplication".into()));
    }
    if seeds.len() != s.num_generators() {
        return Err(Error::Input("one seed per generator is required".into()));
    }
    let gens: Vec<Pair<E, U>> = s.generators().iter().cloned().zip(seeds).map(|(a, b)| Pair(a, b)).collect();
    let v = FinSemigroup::generate(gens, (s.ctx().clone(), uctx), cap)?;
    let mut by_key: HashMap<(&U, usize), usize> = HashMap::new();
    let mut hit = vec![false; s.len()];
    let mut witness = None;
    for p in v.elements() {
        let sid = s.id_of(&p.0).expect("first projection lies in S");
        hit[sid] = true;
        let prev = *by_key.entry((&p.1, cong[sid])).or_insert(sid);
        if prev != sid && witness.is_none() {
            witness = Some((prev.min(sid), prev.max(sid)));
        }
    }
    Ok(SliceReport {
        ok: witness.is_none(),
        relation_size: v.len(),
        pairs_checked: v.len(),
        witness,
        surjective: hit.iter().all(|&h| h),
    })
}

/// Data certifying `(G x B, S) ≺ (G wr Sym(B) wr T) x RLM(S)`.
#[derive(Clone, Debug)]
pub struct DivisionCertificate {
    /// `(state, letter) -> M_{q,qx}` padded into `G wr Sym(B)`.
    pub block_matrices: Vec<Vec<RowMonomialMatrix>>,
    /// Seed `(ρ_x, t_x)` per generator of `S`.
    pub seeds: Vec<WreathElt>,
    pub slice: SliceReport,
    pub group_order: usize,
    pub dim: usize,
}

impl DivisionCertificate {
    /// Structured text with the replay data.
    pub fn to_text(&self, g: &GMSystem) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "division.target = G wr Sym({}) wr T x RLM(S)", self.dim);
        let _ = writeln!(s, "division.relation_size = {}", self.slice.relation_size);
        let _ = writeln!(s, "division.slice_ok = {}", self.slice.ok);
        let _ = writeln!(s, "division.surjective = {}", self.slice.surjective);
        for (x, seed) in self.seeds.iter().enumerate() {
            let t: Vec<String> = seed.t.iter().map(|q| (q + 1).to_string()).collect();
            let _ = writeln!(s, "seed {} t = [{}]", g.names[x], t.join(" "));
            for (q, m) in seed.f.iter().enumerate() {
                let _ = writeln!(s, "seed {} rho[{}] = {}", g.names[x], q + 1, m.display(&g.group));
            }
        }
        s
    }
}

/// Builds the block matrices and seeds from a verified complete flow and runs the exhaustive
/// slice check against the RLM kernel.
pub fn flow_to_division(g: &GMSystem, c: &FlowCandidate) -> Result<DivisionCertificate> {
    let verdict = verify_complete_flow(g, c);
    if !verdict.is_valid() {
        return Err(Error::FlowVerificationFailed(verdict.describe(g, c)));
    }
    let aut = c.automaton.completed();
    let nq = aut.num_states();
    let sink = nq - 1;
    let mut states = c.assignment.clone();
    states.push(SPCElement::bottom(g.dim));
    let mut block_matrices = Vec::new();
    let mut seeds = Vec::new();
    for (x, m) in g.generators().iter().enumerate() {
        let tl = c.cover[x];
        let mut row = Vec::with_capacity(nq);
        let mut t = Vec::with_capacity(nq);
        for q in 0..nq {
            let q2 = aut.step(q, tl).expect("completed automaton is total");
            let q2 = if q == sink { sink } else { q2 };
            let map = check_pair(&g.group, m, &states[q], &states[q2])
                .map_err(|e| Error::InternalInconsistency(format!("verified pair fails: {e:?}")))?;
            row.push(pad_block_matrix(&map, g.dim, &g.group));
            t.push(q2 as u32);
        }
        seeds.push(WreathElt { f: row.clone(), t });
        block_matrices.push(row);
    }
    let slice = slice_check(&g.s, &g.rlm_map, seeds.clone(), g.group.clone(), 50_000_000)?;
    if !slice.ok {
        let (a, b) = slice.witness.expect("failed slice check has a witness");
        return Err(Error::SliceViolation(format!("elements {a} and {b} share an image and an RLM class")));
    }
    Ok(DivisionCertificate { block_matrices, seeds, slice, group_order: g.group.order(), dim: g.dim })
}

/// `Res(f)`: the wreath projection of the division, with its minimal ideal.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub semigroup: FinSemigroup<WreathElt>,
    pub minimal_ideal: Vec<usize>,
}

pub fn resolution_semigroup(d: &DivisionCertificate, group: &GroupTable) -> Result<Resolution> {
    let semigroup = FinSemigroup::generate(d.seeds.clone(), group.clone(), 10_000_000)?;
    let minimal_ideal = minimal_ideal(&semigroup);
    Ok(Resolution { semigroup, minimal_ideal })
}

/// The J-class of a product of all elements.
pub fn minimal_ideal<E: Element>(s: &FinSemigroup<E>) -> Vec<usize> {
    let mut z = 0;
    for i in 0..s.len() {
        z = s.product(z, i);
    }
    let gd = green_relations(s);
    gd.j_classes[gd.j_of[z]].clone()
}

/// The flow over `(B, RLM(S))` with point states `b/<1>`.
pub fn set_trivial_candidate(g: &GMSystem) -> FlowCandidate {
    let n = g.dim;
    let delta: Vec<Vec<Option<usize>>> = g.generators().iter().map(|m| m.support_map()).collect();
    let aut = Automaton {
        state_names: (1..=n).map(|b| b.to_string()).collect(),
        letters: g.names.clone(),
        delta,
    };
    let assignment = (0..n).map(|b| SPCElement::point(n, b)).collect();
    FlowCandidate { automaton: aut, cover: (0..g.s.num_generators()).collect(), assignment }
}

/// Set-trivial flow when `RLM(S)` is aperiodic; otherwise an RLM element of non-trivial period.
pub fn set_trivial_flow(g: &GMSystem) -> std::result::Result<FlowCandidate, usize> {
    if let Some(w) = (0..g.rlm.len()).find(|&x| g.rlm.index_period(x).1 != 1) {
        return Err(w);
    }
    let c = set_trivial_candidate(g);
    assert!(verify_complete_flow(g, &c).is_valid(), "point states flow under partial maps");
    Ok(c)
}

/// Assignment from [`RhElement`]s; contradictions are not allowed as states.
pub fn assignment_from_rh(states: &[RhElement]) -> Result<Vec<SPCElement>> {
    states
        .iter()
        .map(|s| s.spc().cloned().ok_or_else(|| Error::Input("contradiction cannot be a state value".into())))
        .collect()
}
