//! Finite semigroups by closure of a generating set, Green's relations, aperiodicity.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::matrix::RowMonomialMatrix;

/// Anything that can be multiplied given a shared context.
pub trait Element: Clone + Eq + Hash + Debug {
    type Ctx: Clone + Debug;
    fn mul(&self, other: &Self, ctx: &Self::Ctx) -> Self;
}

impl Element for RowMonomialMatrix {
    type Ctx = GroupTable;
    fn mul(&self, other: &Self, ctx: &GroupTable) -> Self {
        self.compose(other, ctx)
    }
}

const NONE: u32 = u32::MAX;

/// A finite semigroup with elements in canonical shortlex order of their generator words.
#[derive(Clone, Debug)]
pub struct FinSemigroup<E: Element> {
    ctx: E::Ctx,
    gens: Vec<E>,
    elements: Vec<E>,
    index: HashMap<E, u32>,
    gen_ids: Vec<u32>,
    /// Word of element `i` is `word(prefix[i])` followed by `last[i]`; `prefix` is `NONE` for generators.
    prefix: Vec<u32>,
    last: Vec<u32>,
    /// `right[i * ngens + k]` is the id of `elements[i] * gens[k]`.
    right: Vec<u32>,
    left: Vec<u32>,
}

impl<E: Element> FinSemigroup<E> {
    /// Breadth-first closure of `gens`; fails once more than `cap` elements appear.
    pub fn generate(gens: Vec<E>, ctx: E::Ctx, cap: usize) -> Result<Self> {
        assert!(cap >= 1, "cap must be positive");
        let ng = gens.len();
        let mut s = FinSemigroup {
            ctx,
            gens,
            elements: Vec::new(),
            index: HashMap::new(),
            gen_ids: Vec::with_capacity(ng),
            prefix: Vec::new(),
            last: Vec::new(),
            right: Vec::new(),
            left: Vec::new(),
        };
        for k in 0..ng {
            let e = s.gens[k].clone();
            let id = match s.index.get(&e) {
                Some(&id) => id,
                None => s.push(e, NONE, k as u32, cap)?,
            };
            s.gen_ids.push(id);
        }
        let mut i = 0;
        while i < s.elements.len() {
            for k in 0..ng {
                let p = s.elements[i].mul(&s.gens[k], &s.ctx);
                let id = match s.index.get(&p) {
                    Some(&id) => id,
                    None => s.push(p, i as u32, k as u32, cap)?,
                };
                s.right.push(id);
            }
            i += 1;
        }
        Ok(s)
    }

    fn push(&mut self, e: E, prefix: u32, last: u32, cap: usize) -> Result<u32> {
        if self.elements.len() >= cap {
            return Err(Error::CapExceeded { cap });
        }
        let id = self.elements.len() as u32;
        self.index.insert(e.clone(), id);
        self.elements.push(e);
        self.prefix.push(prefix);
        self.last.push(last);
        Ok(id)
    }

    pub fn ctx(&self) -> &E::Ctx {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &E {
        &self.elements[i]
    }

    pub fn generators(&self) -> &[E] {
        &self.gens
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    /// Element id of generator `k`.
    pub fn gen_id(&self, k: usize) -> usize {
        self.gen_ids[k] as usize
    }

    pub fn id_of(&self, e: &E) -> Option<usize> {
        self.index.get(e).map(|&i| i as usize)
    }

    /// Shortest generator word (shortlex-least among shortest) that evaluates to element `i`.
    pub fn word(&self, i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        let mut cur = i as u32;
        loop {
            w.push(self.last[cur as usize] as usize);
            let p = self.prefix[cur as usize];
            if p == NONE {
                break;
            }
            cur = p;
        }
        w.reverse();
        w
    }

    pub fn evaluate(&self, word: &[usize]) -> Option<usize> {
        let (&first, rest) = word.split_first()?;
        let mut cur = self.gen_id(first);
        for &k in rest {
            cur = self.right_mul(cur, k);
        }
        Some(cur)
    }

    /// Id of `element(i) * generator(k)`.
    #[inline]
    pub fn right_mul(&self, i: usize, k: usize) -> usize {
        self.right[i * self.gens.len() + k] as usize
    }

    /// Id of `generator(k) * element(i)`.
    pub fn left_mul(&self, i: usize, k: usize) -> usize {
        if self.left.is_empty() {
            let p = self.gens[k].mul(&self.elements[i], &self.ctx);
            return self.index[&p] as usize;
        }
        self.left[i * self.gens.len() + k] as usize
    }

    /// Fills the left Cayley table; needed once before heavy use of `left_mul`.
    pub fn ensure_left(&mut self) {
        if !self.left.is_empty() || self.elements.is_empty() {
            return;
        }
        let ng = self.gens.len();
        let mut left = Vec::with_capacity(self.elements.len() * ng);
        for i in 0..self.elements.len() {
            for k in 0..ng {
                let p = self.gens[k].mul(&self.elements[i], &self.ctx);
                left.push(self.index[&p]);
            }
        }
        self.left = left;
    }

    /// Id of `element(i) * element(j)`.
    pub fn product(&self, i: usize, j: usize) -> usize {
        let p = self.elements[i].mul(&self.elements[j], &self.ctx);
        self.index[&p] as usize
    }

    /// Full multiplication table, row-major; each entry costs one right-table lookup.
    pub fn cayley_table(&self) -> Vec<u32> {
        let n = self.len();
        let mut t = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let p = self.prefix[j];
                let base = if p == NONE { i } else { t[i * n + p as usize] as usize };
                t[i * n + j] = self.right_mul(base, self.last[j] as usize) as u32;
            }
        }
        t
    }

    pub fn is_idempotent(&self, i: usize) -> bool {
        self.product(i, i) == i
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_idempotent(i)).collect()
    }

    /// Two-sided zero, if present.
    pub fn zero(&self) -> Option<usize> {
        (0..self.len()).find(|&z| {
            (0..self.gens.len()).all(|k| self.right_mul(z, k) == z && self.left_mul(z, k) == z)
        })
    }

    /// Identity element, if present.
    pub fn identity(&self) -> Option<usize> {
        (0..self.len()).find(|&e| {
            (0..self.gens.len()).all(|k| {
                let g = self.gen_id(k);
                self.right_mul(e, k) == g && self.left_mul(e, k) == g
            })
        })
    }

    /// Closure of `seeds` under multiplication, sorted by id.
    pub fn closure_of(&self, seeds: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.len()];
        let mut gens: Vec<usize> = Vec::new();
        for &s in seeds {
            if !std::mem::replace(&mut inside[s], true) {
                gens.push(s);
            }
        }
        let mut list = gens.clone();
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &g in &gens {
                let p = self.product(x, g);
                if !std::mem::replace(&mut inside[p], true) {
                    list.push(p);
                }
            }
            i += 1;
        }
        list.sort_unstable();
        list
    }

    /// Checks that `subset` is closed under multiplication; returns an escaping product otherwise.
    pub fn check_closed(&self, subset: &[usize]) -> Result<()> {
        let mut inside = vec![false; self.len()];
        for &s in subset {
            inside[s] = true;
        }
        for &x in subset {
            for &y in subset {
                let p = self.product(x, y);
                if !inside[p] {
                    return Err(Error::NotClosed(format!(
                        "product of elements {x} and {y} is {p}, outside the subset"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Smallest `(index, period)` with `x^(index+period) = x^index`.
    pub fn index_period(&self, x: usize) -> (usize, usize) {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut p = x;
        let mut k = 1;
        loop {
            if let Some(&m) = seen.get(&p) {
                return (m, k - m);
            }
            seen.insert(p, k);
            p = self.product(p, x);
            k += 1;
        }
    }

    /// Idempotent power `x^omega`.
    pub fn omega(&self, x: usize) -> usize {
        let (m, p) = self.index_period(x);
        let k = m.div_ceil(p) * p;
        let mut r = x;
        for _ in 1..k {
            r = self.product(r, x);
        }
        r
    }

    pub fn green(&self) -> GreenData {
        green_relations(self)
    }
}

/// Closure of a set of row-monomial matrices; all generators must share `dim`.
pub fn generate_semigroup(
    gens: &[RowMonomialMatrix],
    group: &GroupTable,
    cap: usize,
) -> Result<FinSemigroup<RowMonomialMatrix>> {
    if let Some(first) = gens.first() {
        for m in gens {
            if m.dim() != first.dim() {
                return Err(Error::DimMismatch { expected: first.dim(), found: m.dim() });
            }
            if m.weights().any(|w| w as usize >= group.order()) {
                return Err(Error::Input("matrix weight outside the group".into()));
            }
        }
    }
    FinSemigroup::generate(gens.to_vec(), group.clone(), cap)
}

/// Green's relations as class labels per element plus per-J-class data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreenData {
    pub r_of: Vec<usize>,
    pub l_of: Vec<usize>,
    pub j_of: Vec<usize>,
    pub h_of: Vec<usize>,
    pub r_classes: Vec<Vec<usize>>,
    pub l_classes: Vec<Vec<usize>>,
    pub j_classes: Vec<Vec<usize>>,
    pub h_classes: Vec<Vec<usize>>,
    pub j_regular: Vec<bool>,
    /// Order of the maximal subgroup of each regular J-class.
    pub j_max_subgroup: Vec<Option<usize>>,
}

impl GreenData {
    pub fn num_r(&self) -> usize {
        self.r_classes.len()
    }
    pub fn num_l(&self) -> usize {
        self.l_classes.len()
    }
    pub fn num_j(&self) -> usize {
        self.j_classes.len()
    }
    pub fn num_h(&self) -> usize {
        self.h_classes.len()
    }
    pub fn r_classes_in_j(&self, j: usize) -> Vec<usize> {
        sorted_distinct(self.j_classes[j].iter().map(|&x| self.r_of[x]))
    }
    pub fn l_classes_in_j(&self, j: usize) -> Vec<usize> {
        sorted_distinct(self.j_classes[j].iter().map(|&x| self.l_of[x]))
    }
}

fn sorted_distinct(it: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = it.collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Strongly connected components; class ids numbered by their least member.
pub(crate) fn scc_labels(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    for (a, b) in edges {
        if a != b {
            g.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
        }
    }
    let comps = tarjan_scc(&g);
    let mut raw = vec![0usize; n];
    for (c, comp) in comps.iter().enumerate() {
        for v in comp {
            raw[v.index()] = c;
        }
    }
    relabel(&raw)
}

/// Renumbers labels in order of first occurrence.
pub(crate) fn relabel(raw: &[usize]) -> Vec<usize> {
    let mut map: HashMap<usize, usize> = HashMap::new();
    raw.iter()
        .map(|r| {
            let next = map.len();
            *map.entry(*r).or_insert(next)
        })
        .collect()
}

pub(crate) fn classes_from_labels(labels: &[usize]) -> Vec<Vec<usize>> {
    let n = labels.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); n];
    for (i, &l) in labels.iter().enumerate() {
        out[l].push(i);
    }
    out
}

/// Green's relations from the right and left Cayley graphs of `s`.
pub fn green_relations<E: Element>(s: &FinSemigroup<E>) -> GreenData {
    let n = s.len();
    let ng = s.num_generators();
    let right_edges = (0..n).flat_map(|i| (0..ng).map(move |k| (i, s.right_mul(i, k))));
    let left: Vec<usize> = (0..n).flat_map(|i| (0..ng).map(move |k| s.left_mul(i, k))).collect();
    let r_of = scc_labels(n, right_edges.clone());
    let left = &left;
    let left_edges = (0..n).flat_map(move |i| (0..ng).map(move |k| (i, left[i * ng + k])));
    let l_of = scc_labels(n, left_edges.clone());
    let j_of = scc_labels(n, right_edges.chain(left_edges));
    let mut hmap: HashMap<(usize, usize), usize> = HashMap::new();
    let h_of: Vec<usize> = (0..n)
        .map(|i| {
            let next = hmap.len();
            *hmap.entry((r_of[i], l_of[i])).or_insert(next)
        })
        .collect();
    let r_classes = classes_from_labels(&r_of);
    let l_classes = classes_from_labels(&l_of);
    let j_classes = classes_from_labels(&j_of);
    let h_classes = classes_from_labels(&h_of);
    let mut j_regular = vec![false; j_classes.len()];
    let mut j_max_subgroup = vec![None; j_classes.len()];
    for (j, members) in j_classes.iter().enumerate() {
        if let Some(&e) = members.iter().find(|&&x| s.is_idempotent(x)) {
            j_regular[j] = true;
            j_max_subgroup[j] = Some(h_classes[h_of[e]].len());
        }
    }
    GreenData { r_of, l_of, j_of, h_of, r_classes, l_classes, j_classes, h_classes, j_regular, j_max_subgroup }
}

/// True iff every element of `subset` (or of `s`) has period 1.
pub fn is_aperiodic<E: Element>(s: &FinSemigroup<E>, subset: Option<&[usize]>) -> Result<bool> {
    match subset {
        Some(sub) => {
            s.check_closed(sub)?;
            Ok(sub.iter().all(|&x| s.index_period(x).1 == 1))
        }
        None => Ok((0..s.len()).all(|x| s.index_period(x).1 == 1)),
    }
}

/// First element of `subset` with non-trivial period, if any.
pub fn aperiodicity_witness<E: Element>(s: &FinSemigroup<E>, subset: &[usize]) -> Option<usize> {
    subset.iter().copied().find(|&x| s.index_period(x).1 != 1)
}

/// Idempotent-generated subsemigroup, with words over the idempotents.
pub fn ig_subsemigroup<E: Element>(s: &FinSemigroup<E>) -> FinSemigroup<E> {
    let gens: Vec<E> = s.idempotents().into_iter().map(|i| s.element(i).clone()).collect();
    let cap = s.len().max(1);
    FinSemigroup::generate(gens, s.ctx().clone(), cap).expect("a subsemigroup is no larger than its parent")
}

/// Ids in `s` of the elements of the idempotent-generated subsemigroup.
pub fn ig_ids<E: Element>(s: &FinSemigroup<E>) -> Vec<usize> {
    s.closure_of(&s.idempotents())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shk_z2_2() -> (GroupTable, Vec<RowMonomialMatrix>) {
        let g = GroupTable::cyclic(2);
        // every row sent to column i with weights h_j
        let mut gens = Vec::new();
        for i in 0..2 {
            for h0 in 0..2 {
                for h1 in 0..2 {
                    gens.push(RowMonomialMatrix::from_entries(2, &[(0, i, h0), (1, i, h1)]));
                }
            }
        }
        (g, gens)
    }

    #[test]
    fn shk_counts() {
        let (g, gens) = shk_z2_2();
        let s = generate_semigroup(&gens, &g, 100).unwrap();
        assert_eq!(s.len(), 8);
        let gd = green_relations(&s);
        assert_eq!(gd.num_j(), 1);
        assert_eq!(gd.num_l(), 2);
        assert_eq!(gd.num_r(), 2);
        assert_eq!(gd.j_max_subgroup[0], Some(2));
        assert!(!is_aperiodic(&s, None).unwrap());
    }

    #[test]
    fn identity_alone() {
        let g = GroupTable::cyclic(3);
        let s = generate_semigroup(&[RowMonomialMatrix::identity(3, &g)], &g, 10).unwrap();
        assert_eq!(s.len(), 1);
        let gd = green_relations(&s);
        assert_eq!((gd.num_j(), gd.num_r(), gd.num_l(), gd.num_h()), (1, 1, 1, 1));
    }

    #[test]
    fn cap_and_dims() {
        let g = GroupTable::cyclic(5);
        let x = RowMonomialMatrix::from_entries(1, &[(0, 0, 1)]);
        assert_eq!(generate_semigroup(&[x.clone()], &g, 3).unwrap_err(), Error::CapExceeded { cap: 3 });
        let y = RowMonomialMatrix::zero(2);
        assert!(matches!(generate_semigroup(&[x, y], &g, 10), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn words_evaluate() {
        let (g, gens) = shk_z2_2();
        let s = generate_semigroup(&gens[..3], &g, 100).unwrap();
        for i in 0..s.len() {
            assert_eq!(s.evaluate(&s.word(i)), Some(i));
        }
    }

    #[test]
    fn right_zero_is_aperiodic() {
        let g = GroupTable::trivial();
        let gens: Vec<_> = (0..3).map(|i| RowMonomialMatrix::from_entries(3, &[(0, i, 0), (1, i, 0), (2, i, 0)])).collect();
        let s = generate_semigroup(&gens, &g, 10).unwrap();
        assert_eq!(s.len(), 3);
        assert!(is_aperiodic(&s, None).unwrap());
        assert_eq!(ig_subsemigroup(&s).len(), 3);
    }

    #[test]
    fn not_closed_subset() {
        let g = GroupTable::cyclic(3);
        let x = RowMonomialMatrix::from_entries(1, &[(0, 0, 1)]);
        let s = generate_semigroup(&[x], &g, 10).unwrap();
        assert!(matches!(is_aperiodic(&s, Some(&[0])), Err(Error::NotClosed(_))));
    }
}
