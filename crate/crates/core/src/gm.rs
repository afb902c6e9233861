//! Group-mapping transformation semigroups: the 0-minimal regular ideal, its Rees
//! coordinates, the right letter mapping image, `G wr SIM(B)` and E-unitary covers.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::{Gid, GroupTable};
use crate::matrix::RowMonomialMatrix;
use crate::rees::{ReesElt, ReesMatrixSemigroup};
use crate::semigroup::{generate_semigroup, green_relations, is_aperiodic, Element, FinSemigroup, GreenData};

pub const DEFAULT_CAP: usize = 200_000;

/// The unique 0-minimal regular ideal located inside a generated semigroup.
#[derive(Clone, Debug)]
pub struct IdealData {
    pub j_class: usize,
    /// Non-zero members of the ideal, ascending ids.
    pub members: Vec<usize>,
    pub zero: Option<usize>,
    /// Distinguished idempotent, identified with `(1, b0)`.
    pub e: usize,
    /// `r_reps[b]` lies in the R-class of `e` and the L-class indexed by `b`.
    pub r_reps: Vec<usize>,
    /// `l_reps[a]` lies in the L-class of `e` and the R-class indexed by `a`.
    pub l_reps: Vec<usize>,
    /// Maximal subgroup at `e`; position is the group id in `rees.group`.
    pub h_elems: Vec<usize>,
    pub rees: ReesMatrixSemigroup,
    /// Rees coordinates of each ideal member.
    pub coords: HashMap<usize, ReesElt>,
}

impl IdealData {
    pub fn contains(&self, i: usize) -> bool {
        Some(i) == self.zero || self.members.binary_search(&i).is_ok()
    }

    /// All ids in `I(S)`, including zero when present.
    pub fn ids(&self) -> Vec<usize> {
        let mut v = self.members.clone();
        if let Some(z) = self.zero {
            v.push(z);
            v.sort_unstable();
        }
        v
    }
}

/// What was checked when accepting a semigroup as GM.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GmCertificate {
    /// Faithfulness was tested on the R-class and L-class of the distinguished idempotent only.
    pub right_faithful_on_r_class: bool,
    pub left_faithful_on_l_class: bool,
    pub group_order: usize,
    pub zero_minimal_candidates: usize,
    pub rlm_smaller: bool,
}

/// A validated GM transformation semigroup `(G x B, S)`.
#[derive(Clone, Debug)]
pub struct GMSystem {
    pub group: GroupTable,
    pub dim: usize,
    pub s: FinSemigroup<RowMonomialMatrix>,
    pub green: GreenData,
    pub ideal: IdealData,
    pub rlm: FinSemigroup<RowMonomialMatrix>,
    /// Element id in `s` to element id in `rlm`.
    pub rlm_map: Vec<usize>,
    pub certificate: GmCertificate,
    /// Letter names of the generators, `g1, g2, ...` unless set.
    pub names: Vec<String>,
}

impl GMSystem {
    pub fn num_points(&self) -> usize {
        self.group.order() * self.dim
    }

    /// Point index of `(g, b)` in `G x B`.
    #[inline]
    pub fn point(&self, g: Gid, b: usize) -> usize {
        b * self.group.order() + g as usize
    }

    #[inline]
    pub fn unpoint(&self, p: usize) -> (Gid, usize) {
        ((p % self.group.order()) as Gid, p / self.group.order())
    }

    pub fn matrix(&self, i: usize) -> &RowMonomialMatrix {
        self.s.element(i)
    }

    /// Generator matrices in input order.
    pub fn generators(&self) -> &[RowMonomialMatrix] {
        self.s.generators()
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.s.num_generators(), "one name per generator");
        self.names = names;
        self
    }

    pub fn letter(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn ideal_ids(&self) -> Vec<usize> {
        self.ideal.ids()
    }

    /// True for generators lying in `I(S)`.
    pub fn generator_in_ideal(&self, k: usize) -> bool {
        self.ideal.contains(self.s.gen_id(k))
    }
}

/// Locates the ideal, extracts Rees coordinates and checks the GM conditions.
pub fn gm_from_generators(group: &GroupTable, b_size: usize, gens: &[RowMonomialMatrix]) -> Result<GMSystem> {
    gm_from_generators_capped(group, b_size, gens, DEFAULT_CAP)
}

pub fn gm_from_generators_capped(
    group: &GroupTable,
    b_size: usize,
    gens: &[RowMonomialMatrix],
    cap: usize,
) -> Result<GMSystem> {
    if gens.is_empty() {
        return Err(Error::Input("no generators".into()));
    }
    if let Some(m) = gens.iter().find(|m| m.dim() != b_size) {
        return Err(Error::DimMismatch { expected: b_size, found: m.dim() });
    }
    if group.is_trivial() {
        return Err(Error::NotGM("the group G is trivial".into()));
    }
    let mut s = generate_semigroup(gens, group, cap)?;
    s.ensure_left();
    gm_from_semigroup(group, b_size, s)
}

fn gm_from_semigroup(group: &GroupTable, b_size: usize, s: FinSemigroup<RowMonomialMatrix>) -> Result<GMSystem> {
    let green = green_relations(&s);
    let zero = s.zero();
    let ng = s.num_generators();
    let zero_j = zero.map(|z| green.j_of[z]);
    // 0-minimal J-classes: every one-step neighbour stays inside the class or drops to zero.
    let minimal: Vec<usize> = (0..green.num_j())
        .filter(|&j| Some(j) != zero_j)
        .filter(|&j| {
            green.j_classes[j].iter().all(|&x| {
                (0..ng).all(|k| {
                    let r = green.j_of[s.right_mul(x, k)];
                    let l = green.j_of[s.left_mul(x, k)];
                    (r == j || Some(r) == zero_j) && (l == j || Some(l) == zero_j)
                })
            })
        })
        .collect();
    let regular: Vec<usize> = minimal.iter().copied().filter(|&j| green.j_regular[j]).collect();
    let j = match regular.as_slice() {
        [j] => *j,
        [] => return Err(Error::NotGM("no 0-minimal regular ideal".into())),
        _ => return Err(Error::NotGM(format!("{} 0-minimal regular ideals, expected one", regular.len()))),
    };
    let members = green.j_classes[j].clone();
    let e = *members.iter().find(|&&x| s.is_idempotent(x)).expect("regular J-class has an idempotent");
    let h_elems = green.h_classes[green.h_of[e]].clone();
    if h_elems.len() < 2 {
        return Err(Error::NotGM("the maximal subgroup of the ideal is trivial".into()));
    }
    // B indexes L-classes in the R-class of e, A indexes R-classes in the L-class of e.
    let r_class = &green.r_classes[green.r_of[e]];
    let l_class = &green.l_classes[green.l_of[e]];
    let mut r_reps = vec![e];
    let mut seen_l = vec![green.l_of[e]];
    for &x in r_class {
        if !seen_l.contains(&green.l_of[x]) {
            seen_l.push(green.l_of[x]);
            r_reps.push(x);
        }
    }
    let mut l_reps = vec![e];
    let mut seen_r = vec![green.r_of[e]];
    for &x in l_class {
        if !seen_r.contains(&green.r_of[x]) {
            seen_r.push(green.r_of[x]);
            l_reps.push(x);
        }
    }
    // Put e first in H so it becomes the group identity.
    let mut h_sorted = vec![e];
    h_sorted.extend(h_elems.iter().copied().filter(|&x| x != e));
    let h_pos: HashMap<usize, Gid> = h_sorted.iter().enumerate().map(|(i, &x)| (x, i as Gid)).collect();
    let hn = h_sorted.len();
    let table: Vec<Vec<Gid>> =
        h_sorted.iter().map(|&x| h_sorted.iter().map(|&y| h_pos[&s.product(x, y)]).collect()).collect();
    let labels: Vec<String> =
        (0..hn).map(|i| if i == 0 { "1".to_string() } else { format!("h{i}") }).collect();
    let hgroup = GroupTable::from_table(table, Some(labels)).expect("maximal subgroup is a group");
    let c: Vec<Vec<Option<Gid>>> = r_reps
        .iter()
        .map(|&rb| l_reps.iter().map(|&la| h_pos.get(&s.product(rb, la)).copied()).collect())
        .collect();
    let rees = ReesMatrixSemigroup::new(hgroup, l_reps.len(), r_reps.len(), c)?;
    // Coordinates: x = l_a h r_b.
    let mut coords = HashMap::new();
    let b_of_l: HashMap<usize, usize> = r_reps.iter().enumerate().map(|(b, &x)| (green.l_of[x], b)).collect();
    let a_of_r: HashMap<usize, usize> = l_reps.iter().enumerate().map(|(a, &x)| (green.r_of[x], a)).collect();
    let mut by_triple: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for &x in &members {
        by_triple.entry((a_of_r[&green.r_of[x]], b_of_l[&green.l_of[x]])).or_default().push(x);
    }
    for (&(a, b), xs) in &by_triple {
        for (gi, &h) in h_sorted.iter().enumerate() {
            let x = s.product(s.product(l_reps[a], h), r_reps[b]);
            debug_assert!(xs.contains(&x));
            coords.insert(x, ReesElt::T(a as u32, gi as Gid, b as u32));
        }
    }
    if let Some(z) = zero {
        coords.insert(z, ReesElt::Zero);
    }
    let right_faithful = faithful(&s, r_class, |x, t| s.product(x, t));
    let left_faithful = faithful(&s, l_class, |x, t| s.product(t, x));
    if !right_faithful {
        return Err(Error::NotGM("right Schutzenberger action on the distinguished R-class is not faithful".into()));
    }
    if !left_faithful {
        return Err(Error::NotGM("left Schutzenberger action on the distinguished L-class is not faithful".into()));
    }
    let (rlm, rlm_map) = weight_erased_image(&s);
    let certificate = GmCertificate {
        right_faithful_on_r_class: right_faithful,
        left_faithful_on_l_class: left_faithful,
        group_order: hn,
        zero_minimal_candidates: minimal.len(),
        rlm_smaller: rlm.len() < s.len(),
    };
    if !certificate.rlm_smaller {
        return Err(Error::NotGM("RLM image is not smaller than S".into()));
    }
    let ideal = IdealData { j_class: j, members, zero, e, r_reps, l_reps, h_elems: h_sorted, rees, coords };
    let names = (1..=s.num_generators()).map(|k| format!("g{k}")).collect();
    Ok(GMSystem { group: group.clone(), dim: b_size, s, green, ideal, rlm, rlm_map, certificate, names })
}

/// Distinct elements act differently on `class ∪ {0}`.
fn faithful(
    s: &FinSemigroup<RowMonomialMatrix>,
    class: &[usize],
    act: impl Fn(usize, usize) -> usize,
) -> bool {
    let inside: std::collections::HashSet<usize> = class.iter().copied().collect();
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    for t in 0..s.len() {
        let sig: Vec<u32> = class
            .iter()
            .map(|&x| {
                let y = act(x, t);
                if inside.contains(&y) {
                    y as u32
                } else {
                    u32::MAX
                }
            })
            .collect();
        if seen.insert(sig, t).is_some() {
            return false;
        }
    }
    true
}

/// The image of `S` with weights erased and the element map into it.
fn weight_erased_image(s: &FinSemigroup<RowMonomialMatrix>) -> (FinSemigroup<RowMonomialMatrix>, Vec<usize>) {
    let triv = GroupTable::trivial();
    let erase = |m: &RowMonomialMatrix| {
        RowMonomialMatrix::from_rows(m.support_map().into_iter().map(|c| c.map(|c| (c as u32, 0))).collect())
    };
    let gens: Vec<RowMonomialMatrix> = s.generators().iter().map(erase).collect();
    let rlm = FinSemigroup::generate(gens, triv, s.len()).expect("image is no larger than S");
    let map = s.elements().iter().map(|m| rlm.id_of(&erase(m)).expect("image element")).collect();
    (rlm, map)
}

/// Right letter mapping image with the quotient map `S -> RLM(S)`.
pub fn rlm_image(g: &GMSystem) -> (&FinSemigroup<RowMonomialMatrix>, &[usize]) {
    (&g.rlm, &g.rlm_map)
}

/// Generators of `G wr Sym(n)` plus one rank `n-1` diagonal idempotent.
pub fn gwr_sim_generators(group: &GroupTable, n: usize) -> Vec<RowMonomialMatrix> {
    let mut gens = Vec::new();
    let id = group.id();
    if n >= 2 {
        let swap: Vec<usize> = (0..n).map(|b| if b == 0 { 1 } else if b == 1 { 0 } else { b }).collect();
        gens.push(RowMonomialMatrix::permutation(&swap, group));
        let cycle: Vec<usize> = (0..n).map(|b| (b + 1) % n).collect();
        gens.push(RowMonomialMatrix::permutation(&cycle, group));
    } else {
        gens.push(RowMonomialMatrix::identity(n, group));
    }
    for w in group.elements().filter(|&w| w != id) {
        let mut rows: Vec<Option<(u32, Gid)>> = (0..n).map(|b| Some((b as u32, id))).collect();
        rows[0] = Some((0, w));
        gens.push(RowMonomialMatrix::from_rows(rows));
    }
    let mut rows: Vec<Option<(u32, Gid)>> = (0..n).map(|b| Some((b as u32, id))).collect();
    rows[n - 1] = None;
    gens.push(RowMonomialMatrix::from_rows(rows));
    gens
}

/// `G wr SIM(B)`: all partial row-and-column monomial matrices.
pub fn gwr_sim(group: &GroupTable, b_size: usize) -> Result<GMSystem> {
    gm_from_generators(group, b_size, &gwr_sim_generators(group, b_size))
}

/// Closed form `sum_k C(n,k)^2 k! |G|^k`.
pub fn gwr_sim_order(g_order: usize, n: usize) -> usize {
    let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
    let fact = |k: usize| (1..=k).product::<usize>();
    (0..=n).map(|k| binom(n, k).pow(2) * fact(k) * g_order.pow(k as u32)).sum()
}

/// Pair element for direct products of semigroups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair<A, B>(pub A, pub B);

impl<A: Element, B: Element> Element for Pair<A, B> {
    type Ctx = (A::Ctx, B::Ctx);
    fn mul(&self, other: &Self, ctx: &Self::Ctx) -> Self {
        Pair(self.0.mul(&other.0, &ctx.0), self.1.mul(&other.1, &ctx.1))
    }
}

/// The cover `R_S = {(M, N) : N monomial, N agrees with M on Dom(M)}` with its checks.
#[derive(Clone, Debug)]
pub struct EUnitaryCover {
    pub cover: FinSemigroup<Pair<RowMonomialMatrix, RowMonomialMatrix>>,
    /// Projection of each cover element to its id in `S`.
    pub proj: Vec<usize>,
    pub surjective: bool,
    pub idempotent_separating: bool,
    pub idempotents: usize,
    /// Second projection closed under products and inverses.
    pub second_projection_is_group: bool,
    pub second_projection_order: usize,
    /// `(rank, maximal subgroup order)` for each regular J-class of the cover.
    pub max_subgroups: Vec<(usize, usize)>,
}

/// Inverse test: regular and idempotents commute.
pub fn check_inverse(g: &GMSystem) -> Result<()> {
    if let Some(j) = (0..g.green.num_j()).find(|&j| !g.green.j_regular[j]) {
        return Err(Error::NotInverse(format!("J-class {j} is not regular")));
    }
    let es = g.s.idempotents();
    for &e in &es {
        for &f in &es {
            if g.s.product(e, f) != g.s.product(f, e) {
                return Err(Error::NotInverse(format!("idempotents {e} and {f} do not commute")));
            }
        }
    }
    Ok(())
}

/// All monomial completions of the partial injection `m`; `None` rows are filled bijectively.
pub fn monomial_completions(m: &RowMonomialMatrix, group: &GroupTable, limit: usize) -> Vec<RowMonomialMatrix> {
    let n = m.dim();
    let free_rows: Vec<usize> = (0..n).filter(|&b| m.row(b).is_none()).collect();
    let mut used = vec![false; n];
    for b in 0..n {
        if let Some((c, _)) = m.row(b) {
            used[c] = true;
        }
    }
    let free_cols: Vec<usize> = (0..n).filter(|&c| !used[c]).collect();
    let mut out = Vec::new();
    let mut rows: Vec<Option<(u32, Gid)>> = m.rows().to_vec();
    let mut col_used = vec![false; free_cols.len()];
    fn rec(
        i: usize,
        free_rows: &[usize],
        free_cols: &[usize],
        col_used: &mut Vec<bool>,
        rows: &mut Vec<Option<(u32, Gid)>>,
        group: &GroupTable,
        out: &mut Vec<RowMonomialMatrix>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if i == free_rows.len() {
            out.push(RowMonomialMatrix::from_rows(rows.clone()));
            return;
        }
        for ci in 0..free_cols.len() {
            if col_used[ci] {
                continue;
            }
            col_used[ci] = true;
            for w in group.elements() {
                rows[free_rows[i]] = Some((free_cols[ci] as u32, w));
                rec(i + 1, free_rows, free_cols, col_used, rows, group, out, limit);
            }
            col_used[ci] = false;
        }
        rows[free_rows[i]] = None;
    }
    rec(0, &free_rows, &free_cols, &mut col_used, &mut rows, group, &mut out, limit);
    out
}

pub fn e_unitary_cover(g: &GMSystem) -> Result<EUnitaryCover> {
    check_inverse(g)?;
    if let Some(i) = (0..g.s.len()).find(|&i| !g.matrix(i).is_column_monomial()) {
        return Err(Error::NotInverse(format!("element {i} is not a partial bijection on B")));
    }
    let mut pairs = Vec::new();
    for m in g.s.elements() {
        for n in monomial_completions(m, &g.group, usize::MAX) {
            pairs.push(Pair(m.clone(), n));
        }
    }
    let ctx = (g.group.clone(), g.group.clone());
    let cap = pairs.len();
    let cover = FinSemigroup::generate(pairs, ctx, cap).map_err(|_| {
        Error::InternalInconsistency("pairs agreeing on domains are not closed".into())
    })?;
    let proj: Vec<usize> = cover.elements().iter().map(|p| g.s.id_of(&p.0).expect("first coordinate in S")).collect();
    let mut hit = vec![false; g.s.len()];
    for &p in &proj {
        hit[p] = true;
    }
    let surjective = hit.iter().all(|&h| h);
    let cover_idem = cover.idempotents();
    let mut idem_images: Vec<usize> = cover_idem.iter().map(|&i| proj[i]).collect();
    idem_images.sort_unstable();
    idem_images.dedup();
    let s_idem = g.s.idempotents();
    let idempotent_separating = idem_images.len() == cover_idem.len() && idem_images == s_idem;
    let mut seconds: Vec<RowMonomialMatrix> = cover.elements().iter().map(|p| p.1.clone()).collect();
    seconds.sort();
    seconds.dedup();
    let second_group = generate_semigroup(&seconds, &g.group, seconds.len() + 1)?;
    let second_projection_is_group = second_group.len() == seconds.len()
        && second_group.idempotents().len() == 1
        && is_group(&second_group);
    let gd = green_relations(&cover);
    let mut max_subgroups = Vec::new();
    for (j, members) in gd.j_classes.iter().enumerate() {
        if let Some(order) = gd.j_max_subgroup[j] {
            let rank = cover.element(members[0]).0.rank();
            max_subgroups.push((rank, order));
        }
    }
    max_subgroups.sort_unstable();
    Ok(EUnitaryCover {
        proj,
        surjective,
        idempotent_separating,
        idempotents: cover_idem.len(),
        second_projection_is_group,
        second_projection_order: seconds.len(),
        max_subgroups,
        cover,
    })
}

fn is_group<E: Element>(s: &FinSemigroup<E>) -> bool {
    let gd = green_relations(s);
    gd.num_h() == 1 && gd.j_regular[0]
}

/// Decides whether `C` normalizes to `{0,1}` through aperiodicity of `IG(M0(G,A,B,C))`;
/// the witness is the least non-idempotent group element of `IG`.
pub fn normalizable_01(r: &ReesMatrixSemigroup) -> (bool, Option<ReesElt>) {
    let cap = r.elements().len() + 1;
    let ig = FinSemigroup::generate(r.idempotents(), r.clone(), cap).expect("IG is a subsemigroup");
    let aperiodic = is_aperiodic(&ig, None).expect("whole semigroup is closed");
    if aperiodic {
        return (true, None);
    }
    let mut cands: Vec<(u32, u32, Gid)> = ig
        .elements()
        .iter()
        .filter_map(|&x| match x {
            ReesElt::T(a, g, b) if r.entry(b as usize, a as usize).is_some() && r.mul(x, x) != x => Some((a, b, g)),
            _ => None,
        })
        .collect();
    cands.sort_unstable();
    let w = cands.first().map(|&(a, b, g)| ReesElt::T(a, g, b));
    (false, w)
}
