//! Small monoids: a group of units `H` over a 0-minimal ideal `M0(G, A, B, C)`, acting on `B`
//! by monomial matrices over `G`.

use std::collections::HashMap;

use crate::chartab::shk_rees;
use crate::error::{Error, Result};
use crate::flow::{verify_complete_flow, Automaton, FlowCandidate};
use crate::gm::{gm_from_generators, GMSystem};
use crate::group::{Gid, GroupTable};
use crate::io::ideal_letter_name;
use crate::lattice::{cs_extract, SPElement};
use crate::matrix::RowMonomialMatrix;
use crate::rees::{ReesElt, ReesMatrixSemigroup};
use crate::semigroup::{scc_labels, FinSemigroup};

#[derive(Clone, Debug)]
pub struct SmallMonoid {
    pub group: GroupTable,
    /// Unit generators, acting on `B` on the right.
    pub units: Vec<RowMonomialMatrix>,
    pub unit_names: Vec<String>,
    pub rees: ReesMatrixSemigroup,
    /// Order of the group of units.
    pub h_order: usize,
    /// Letters: the unit generators, then every `(a, g, b)`.
    pub system: GMSystem,
    /// `(a, g, b)` of each ideal letter, indexed from the first ideal letter.
    pub ideal_letters: Vec<ReesElt>,
}

impl SmallMonoid {
    /// Assembles `H ∪ M0(G, A, B, C)` and checks that nothing else is generated.
    pub fn new(rees: ReesMatrixSemigroup, units: Vec<RowMonomialMatrix>, unit_names: Vec<String>) -> Result<Self> {
        let group = rees.group.clone();
        let n = rees.b_size;
        if let Some(u) = units.iter().find(|u| u.dim() != n || u.rank() != n) {
            return Err(Error::Input(format!("unit {} is not an invertible {n} x {n} monomial matrix", u.display(&group))));
        }
        let hgens = if units.is_empty() { vec![RowMonomialMatrix::identity(n, &group)] } else { units.clone() };
        let h = FinSemigroup::generate(hgens, group.clone(), 1 << 20)?;
        let mut gens = units.clone();
        let mut names = unit_names.clone();
        if units.is_empty() {
            gens.push(RowMonomialMatrix::identity(n, &group));
            names.push("u".into());
        }
        let mut ideal_letters = Vec::new();
        for x in rees.elements() {
            if let ReesElt::T(..) = x {
                gens.push(rees.as_matrix(x));
                names.push(ideal_letter_name(&group, x));
                ideal_letters.push(x);
            }
        }
        let system = gm_from_generators(&group, n, &gens)?.with_names(names);
        let zero = usize::from(system.s.zero().is_some());
        let ideal_size = rees.a_size * rees.b_size * group.order();
        if system.s.len() != h.len() + ideal_size + zero {
            return Err(Error::NotGM(format!(
                "generated {} elements; a small monoid with these units and ideal has {}",
                system.s.len(),
                h.len() + ideal_size + zero
            )));
        }
        let m = SmallMonoid { group, unit_names: unit_names.clone(), units, rees, h_order: h.len(), system, ideal_letters };
        Ok(m)
    }

    pub fn first_ideal_letter(&self) -> usize {
        self.units.len().max(1)
    }

    /// Permutation of `B` induced by a unit.
    fn unit_perm(u: &RowMonomialMatrix) -> Vec<usize> {
        u.support_map().into_iter().map(|t| t.expect("units are total")).collect()
    }
}

/// Orbits of `H` on `B`, in order of least member, with the right-orbit monoids as ids of
/// the assembled semigroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitData {
    pub k: usize,
    pub orbits: Vec<Vec<usize>>,
    pub orbit_of: Vec<usize>,
    pub monoids: Vec<Vec<usize>>,
}

pub fn orbits(m: &SmallMonoid) -> OrbitData {
    let n = m.rees.b_size;
    let mut orbit_of = vec![usize::MAX; n];
    let mut orbits = Vec::new();
    let perms: Vec<Vec<usize>> = m.units.iter().map(SmallMonoid::unit_perm).collect();
    for b in 0..n {
        if orbit_of[b] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut orb = vec![b];
        orbit_of[b] = id;
        let mut i = 0;
        while i < orb.len() {
            for p in &perms {
                let c = p[orb[i]];
                if orbit_of[c] == usize::MAX {
                    orbit_of[c] = id;
                    orb.push(c);
                }
            }
            i += 1;
        }
        orb.sort_unstable();
        orbits.push(orb);
    }
    let s = &m.system.s;
    let first = m.first_ideal_letter();
    let monoids = orbits
        .iter()
        .enumerate()
        .map(|(o, _)| {
            let mut seeds: Vec<usize> = (0..first).map(|k| s.gen_id(k)).collect();
            for (i, x) in m.ideal_letters.iter().enumerate() {
                if let ReesElt::T(_, _, b) = x {
                    if orbit_of[*b as usize] == o {
                        seeds.push(s.gen_id(first + i));
                    }
                }
            }
            s.closure_of(&seeds)
        })
        .collect();
    OrbitData { k: orbits.len(), orbits, orbit_of, monoids }
}

/// Idempotent-generated subsemigroup of `A x G x B_i` inside the Rees semigroup.
fn orbit_ig(rees: &ReesMatrixSemigroup, orbit: &[usize]) -> FinSemigroup<ReesElt> {
    let gens: Vec<ReesElt> = rees
        .idempotents()
        .into_iter()
        .filter(|x| matches!(x, ReesElt::T(_, _, b) if orbit.contains(&(*b as usize))))
        .collect();
    let cap = rees.elements().len() + 1;
    if gens.is_empty() {
        return FinSemigroup::generate(vec![ReesElt::Zero], rees.clone(), cap).expect("finite");
    }
    FinSemigroup::generate(gens, rees.clone(), cap).expect("finite")
}

/// Least element (in `(a, g, b)` order) of non-trivial period in the subsemigroup generated
/// by the idempotents whose `b` lies in `bs`.
pub fn ig_group_witness(rees: &ReesMatrixSemigroup, bs: &[usize]) -> Option<ReesElt> {
    let ig = orbit_ig(rees, bs);
    (0..ig.len()).filter(|&x| ig.index_period(x).1 != 1).map(|x| *ig.element(x)).min()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complexity2J {
    pub complexity: usize,
    pub orbits: OrbitData,
    /// Per orbit: a non-trivial group element of its idempotent-generated part.
    pub witnesses: Vec<Option<ReesElt>>,
}

/// 1 iff every right-orbit monoid has an aperiodic idempotent-generated subsemigroup.
pub fn complexity_2j(m: &SmallMonoid) -> Complexity2J {
    let od = orbits(m);
    let witnesses: Vec<Option<ReesElt>> = od.orbits.iter().map(|o| ig_group_witness(&m.rees, o)).collect();
    let complexity = if witnesses.iter().all(Option::is_none) { 1 } else { 2 };
    Complexity2J { complexity, orbits: od, witnesses }
}

/// The flow over `RZ(k)^1`: state `i` is `G x B_i` partitioned by mutual reachability under
/// the idempotent-generated part of `A x G x B_i`; units cover to the identity letter and
/// `(a, g, b)` to the constant at the orbit of `b`.
pub fn canonical_2j_flow(m: &SmallMonoid) -> Result<FlowCandidate> {
    let c = complexity_2j(m);
    if c.complexity != 1 {
        return Err(Error::Input("canonical flow needs complexity 1".into()));
    }
    let od = c.orbits;
    let g = &m.system;
    let go = g.group.order();
    let mut assignment = Vec::with_capacity(od.k);
    for orbit in &od.orbits {
        let ig = orbit_ig(&m.rees, orbit);
        let mut edges = Vec::new();
        for x in ig.elements() {
            let mx = m.rees.as_matrix(*x);
            for &b in orbit {
                for h in g.group.elements() {
                    if let Some((h2, b2)) = mx.act(&g.group, (h, b)) {
                        edges.push((g.point(h, b), g.point(h2, b2)));
                    }
                }
            }
        }
        let labels = scc_labels(g.num_points(), edges.into_iter());
        let sp_labels: Vec<Option<u32>> =
            (0..g.num_points()).map(|p| orbit.contains(&(p / go)).then_some(labels[p] as u32)).collect();
        let e = SPElement::from_labels(go, g.dim, &sp_labels);
        let spc = cs_extract(&e, &g.group)
            .map_err(|err| Error::InternalInconsistency(format!("orbit partition is not a cross-section: {err}")))?;
        assignment.push(spc);
    }
    let first = m.first_ideal_letter();
    let cover: Vec<usize> = (0..g.s.num_generators())
        .map(|x| {
            if x < first {
                0
            } else {
                let ReesElt::T(_, _, b) = m.ideal_letters[x - first] else { unreachable!("ideal letters are triples") };
                Automaton::rz_constant(od.orbit_of[b as usize])
            }
        })
        .collect();
    let cand = FlowCandidate::new(Automaton::rz_one(od.k), cover, assignment)?;
    let v = verify_complete_flow(g, &cand);
    if !v.is_valid() {
        return Err(Error::InternalInconsistency(format!("canonical flow fails:\n{}", v.describe(g, &cand))));
    }
    Ok(cand)
}

fn z2_signs_c(rows: &[[i8; 4]]) -> Vec<Vec<Option<Gid>>> {
    rows.iter().map(|r| r.iter().map(|&e| match e { 0 => None, 1 => Some(0), _ => Some(1) }).collect()).collect()
}

/// Unit from `b -> sign * target` pairs over `{1, -1}`.
fn signed_unit(images: &[(usize, i8)]) -> RowMonomialMatrix {
    RowMonomialMatrix::from_rows(images.iter().map(|&(t, s)| Some((t as u32, Gid::from(s < 0)))).collect())
}

/// Units `Z4` rotating `B`, ideal over `Z2` with a `{0,1}` cycle matrix.
pub fn example1() -> SmallMonoid {
    let c = z2_signs_c(&[[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1], [1, 0, 0, 1]]);
    let rees = ReesMatrixSemigroup::new(GroupTable::z2_signs(), 4, 4, c).expect("4 x 4");
    let z = signed_unit(&[(1, 1), (2, 1), (3, 1), (0, 1)]);
    SmallMonoid::new(rees, vec![z], vec!["z".into()]).expect("example is a small monoid")
}

fn example23_rees() -> ReesMatrixSemigroup {
    let c = z2_signs_c(&[[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1], [1, 0, 0, -1]]);
    ReesMatrixSemigroup::new(GroupTable::z2_signs(), 4, 4, c).expect("4 x 4")
}

/// Same ideal with a `-1` corner; unit `s` of order 4 with two orbits on `B`.
pub fn example2() -> SmallMonoid {
    let s = signed_unit(&[(2, -1), (3, 1), (0, 1), (1, -1)]);
    SmallMonoid::new(example23_rees(), vec![s], vec!["s".into()]).expect("example is a small monoid")
}

/// Same ideal; unit `x` of order 8 with one orbit.
pub fn example3() -> SmallMonoid {
    let x = signed_unit(&[(3, 1), (0, 1), (1, 1), (2, -1)]);
    SmallMonoid::new(example23_rees(), vec![x], vec!["x".into()]).expect("example is a small monoid")
}

/// `M(H, k) = H^k ∪ S(H, k)` with `H^k` acting diagonally.
pub fn build_mhk(h: &GroupTable, k: usize) -> Result<SmallMonoid> {
    if h.is_trivial() || k == 0 {
        return Err(Error::Input("M(H,k) needs a non-trivial H and k >= 1".into()));
    }
    let mut units = Vec::new();
    let mut names = Vec::new();
    for i in 0..k {
        for x in h.elements().filter(|&x| x != h.id()) {
            let rows = (0..k).map(|j| Some((j as u32, if i == j { x } else { h.id() }))).collect();
            units.push(RowMonomialMatrix::from_rows(rows));
            names.push(format!("u{}_{}", i + 1, x));
        }
    }
    SmallMonoid::new(shk_rees(h, k), units, names)
}

/// Coordinates of the ideal letters by `(a, g, b)`.
pub fn ideal_letter_index(m: &SmallMonoid) -> HashMap<ReesElt, usize> {
    let first = m.first_ideal_letter();
    m.ideal_letters.iter().enumerate().map(|(i, &x)| (x, first + i)).collect()
}
