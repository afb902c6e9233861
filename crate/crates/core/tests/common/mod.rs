//! Independent oracles shared by the acceptance and property suites.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use gmflow::chartab::build_shk;
use gmflow::corpus::{random_gm, random_small_monoid};
use gmflow::gm::{gm_from_generators, gwr_sim, GMSystem};
use gmflow::smallmonoid::{build_mhk, example1, example2, example3};
use gmflow::typeii::is_injective_congruence;
use gmflow::{Element, FinSemigroup, GreenData, GroupTable, RowMonomialMatrix};

/// All set partitions of `0..n` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn rec(i: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for l in 0..=m {
            cur[i] = l;
            rec(i + 1, m.max(l + 1), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(1, 1, &mut cur, &mut out);
    out
}

/// `a` refines `b`.
pub fn refines(a: &[usize], b: &[usize]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| a[i] != a[j] || b[i] == b[j]))
}

pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    refines(a, b) && refines(b, a)
}

/// Intersection of every injective congruence on `G x B`, by enumerating all partitions.
/// The second value counts the injective congruences seen.
pub fn minimal_injective_congruence(g: &GMSystem) -> (Vec<usize>, usize) {
    let n = g.num_points();
    let all: Vec<Vec<usize>> = set_partitions(n).into_iter().filter(|p| is_injective_congruence(g, p)).collect();
    // Points are identified when every congruence identifies them.
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for p in 0..n {
        if label[p] != usize::MAX {
            continue;
        }
        for q in p..n {
            if label[q] == usize::MAX && all.iter().all(|c| c[p] == c[q]) {
                label[q] = next;
            }
        }
        next += 1;
    }
    (label, all.len())
}

/// Green's relations from principal ideals, by set comparison.
pub struct GreenOracle {
    pub r: Vec<BTreeSet<usize>>,
    pub l: Vec<BTreeSet<usize>>,
    pub j: Vec<BTreeSet<usize>>,
}

pub fn principal_ideals<E: Element>(s: &FinSemigroup<E>) -> GreenOracle {
    let n = s.len();
    let t: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| s.product(i, j)).collect()).collect();
    let r: Vec<BTreeSet<usize>> =
        (0..n).map(|x| std::iter::once(x).chain((0..n).map(|y| t[x][y])).collect()).collect();
    let l: Vec<BTreeSet<usize>> =
        (0..n).map(|x| std::iter::once(x).chain((0..n).map(|y| t[y][x])).collect()).collect();
    let j = (0..n)
        .map(|x| {
            let mut set = r[x].clone();
            for &y in &r[x] {
                set.extend(l[y].iter().copied());
            }
            set
        })
        .collect();
    GreenOracle { r, l, j }
}

/// Number of disagreements between `gd` and the principal-ideal oracle over all pairs.
pub fn green_discrepancies<E: Element>(s: &FinSemigroup<E>, gd: &GreenData) -> usize {
    let o = principal_ideals(s);
    let n = s.len();
    let mut bad = 0;
    for x in 0..n {
        for y in 0..n {
            let (r, l, j) = (o.r[x] == o.r[y], o.l[x] == o.l[y], o.j[x] == o.j[y]);
            bad += usize::from((gd.r_of[x] == gd.r_of[y]) != r);
            bad += usize::from((gd.l_of[x] == gd.l_of[y]) != l);
            bad += usize::from((gd.j_of[x] == gd.j_of[y]) != j);
            bad += usize::from((gd.h_of[x] == gd.h_of[y]) != (r && l));
        }
    }
    bad
}

/// Every partial injection of `0..n` with weights in `group`.
pub fn weighted_partial_injections(group: &GroupTable, n: usize) -> HashSet<RowMonomialMatrix> {
    let mut out = HashSet::new();
    let mut rows = vec![None; n];
    let mut used = vec![false; n];
    fn rec(
        i: usize,
        rows: &mut Vec<Option<(u32, gmflow::Gid)>>,
        used: &mut Vec<bool>,
        group: &GroupTable,
        out: &mut HashSet<RowMonomialMatrix>,
    ) {
        if i == rows.len() {
            out.insert(RowMonomialMatrix::from_rows(rows.clone()));
            return;
        }
        rows[i] = None;
        rec(i + 1, rows, used, group, out);
        for c in 0..rows.len() {
            if used[c] {
                continue;
            }
            used[c] = true;
            for w in group.elements() {
                rows[i] = Some((c as u32, w));
                rec(i + 1, rows, used, group, out);
            }
            used[c] = false;
        }
        rows[i] = None;
    }
    rec(0, &mut rows, &mut used, group, &mut out);
    out
}

/// Named GM systems used across the oracle checks: seeded random systems, `S(H,k)`,
/// `G wr SIM(n)`, the three small monoids and `M(H,k)`.
pub fn corpus() -> Vec<(String, GMSystem)> {
    let mut out = Vec::new();
    for seed in 0..40 {
        out.push((format!("random-{seed}"), random_gm(seed, 8)));
    }
    for seed in 0..12 {
        out.push((format!("random-small-{seed}"), random_small_monoid(seed, 4).system));
    }
    for (h, k) in [(2, 1), (2, 2), (3, 2), (2, 3)] {
        let group = GroupTable::cyclic(h);
        let s = build_shk(&group, k).expect("S(H,k) generates");
        let gens = s.generators().to_vec();
        out.push((format!("shk-z{h}-{k}"), gm_from_generators(&group, k, &gens).expect("S(H,k) is GM")));
    }
    for n in 1..=3 {
        out.push((format!("gwr-z2-{n}"), gwr_sim(&GroupTable::cyclic(2), n).expect("G wr SIM is GM")));
    }
    out.push(("example1".into(), example1().system));
    out.push(("example2".into(), example2().system));
    out.push(("example3".into(), example3().system));
    out.push(("mhk-z2-2".into(), build_mhk(&GroupTable::cyclic(2), 2).expect("M(H,k)").system));
    out.push(("mhk-z3-2".into(), build_mhk(&GroupTable::cyclic(3), 2).expect("M(H,k)").system));
    out
}
