//! Row-monomial matrices over a group: partial maps on `B` with a group weight per row.

use std::fmt;

use crate::group::{Gid, GroupTable};

/// Row `b` holds `Some((b', w))` when `(g, b)` is sent to `(g w, b')`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowMonomialMatrix {
    rows: Vec<Option<(u32, Gid)>>,
}

impl RowMonomialMatrix {
    pub fn zero(dim: usize) -> Self {
        RowMonomialMatrix { rows: vec![None; dim] }
    }

    pub fn identity(dim: usize, g: &GroupTable) -> Self {
        RowMonomialMatrix { rows: (0..dim).map(|b| Some((b as u32, g.id()))).collect() }
    }

    /// Builds from `(row, col, weight)` triples; later entries for the same row overwrite earlier ones.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, Gid)]) -> Self {
        let mut rows = vec![None; dim];
        for &(r, c, w) in entries {
            assert!(r < dim && c < dim, "entry outside matrix");
            rows[r] = Some((c as u32, w));
        }
        RowMonomialMatrix { rows }
    }

    pub fn from_rows(rows: Vec<Option<(u32, Gid)>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().flatten().all(|&(c, _)| (c as usize) < dim), "column outside matrix");
        RowMonomialMatrix { rows }
    }

    /// Permutation matrix (weights 1) of `perm`, where `perm[b]` is the image of `b`.
    pub fn permutation(perm: &[usize], g: &GroupTable) -> Self {
        RowMonomialMatrix { rows: perm.iter().map(|&c| Some((c as u32, g.id()))).collect() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn row(&self, b: usize) -> Option<(usize, Gid)> {
        self.rows[b].map(|(c, w)| (c as usize, w))
    }

    pub fn rows(&self) -> &[Option<(u32, Gid)>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Option::is_none)
    }

    /// Right action on `G x B`.
    #[inline]
    pub fn act(&self, g: &GroupTable, p: (Gid, usize)) -> Option<(Gid, usize)> {
        self.rows[p.1].map(|(c, w)| (g.mul(p.0, w), c as usize))
    }

    /// Matrix product `self * other`: first apply `self`, then `other`.
    pub fn compose(&self, other: &Self, g: &GroupTable) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        let rows = self
            .rows
            .iter()
            .map(|e| {
                e.and_then(|(c, w)| other.rows[c as usize].map(|(c2, w2)| (c2, g.mul(w, w2))))
            })
            .collect();
        RowMonomialMatrix { rows }
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().enumerate().filter_map(|(b, e)| e.map(|_| b))
    }

    pub fn rank(&self) -> usize {
        let mut cols: Vec<u32> = self.rows.iter().flatten().map(|&(c, _)| c).collect();
        cols.sort_unstable();
        cols.dedup();
        cols.len()
    }

    /// At most one nonzero entry per column as well as per row.
    pub fn is_column_monomial(&self) -> bool {
        let mut seen = vec![false; self.dim()];
        for &(c, _) in self.rows.iter().flatten() {
            if std::mem::replace(&mut seen[c as usize], true) {
                return false;
            }
        }
        true
    }

    /// Same support with every weight replaced by the identity.
    pub fn erase_weights(&self, g: &GroupTable) -> Self {
        RowMonomialMatrix { rows: self.rows.iter().map(|e| e.map(|(c, _)| (c, g.id()))).collect() }
    }

    /// Underlying partial function on `B`.
    pub fn support_map(&self) -> Vec<Option<usize>> {
        self.rows.iter().map(|e| e.map(|(c, _)| c as usize)).collect()
    }

    pub fn weights(&self) -> impl Iterator<Item = Gid> + '_ {
        self.rows.iter().flatten().map(|&(_, w)| w)
    }

    /// Paper-style text `1->2, 2->x*4`, using 1-based indices.
    pub fn display<'a>(&'a self, g: &'a GroupTable) -> MatrixDisplay<'a> {
        MatrixDisplay { m: self, g }
    }
}

impl fmt::Debug for RowMonomialMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        let mut first = true;
        for (b, e) in self.rows.iter().enumerate() {
            if let Some((c, w)) = e {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "{}->{}:{}", b + 1, c + 1, w)?;
            }
        }
        write!(f, "]")
    }
}

pub struct MatrixDisplay<'a> {
    m: &'a RowMonomialMatrix,
    g: &'a GroupTable,
}

impl fmt::Display for MatrixDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (b, e) in self.m.rows.iter().enumerate() {
            if let Some((c, w)) = e {
                if *w == self.g.id() {
                    parts.push(format!("{} -> {}", b + 1, c + 1));
                } else {
                    parts.push(format!("{} -> {}*{}", b + 1, self.g.label(*w), c + 1));
                }
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_matrices(dim: usize, g: &GroupTable) -> Vec<RowMonomialMatrix> {
        let per_row: Vec<Option<(u32, Gid)>> = std::iter::once(None)
            .chain((0..dim as u32).flat_map(|c| g.elements().map(move |w| Some((c, w)))))
            .collect();
        let mut out = vec![Vec::new()];
        for _ in 0..dim {
            let mut next = Vec::new();
            for prefix in &out {
                for e in &per_row {
                    let mut p = prefix.clone();
                    p.push(*e);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(RowMonomialMatrix::from_rows).collect()
    }

    #[test]
    fn associativity_exhaustive_small() {
        let g = GroupTable::cyclic(2);
        let ms = all_matrices(2, &g);
        for a in &ms {
            for b in &ms {
                let ab = a.compose(b, &g);
                for c in &ms {
                    assert_eq!(ab.compose(c, &g), a.compose(&b.compose(c, &g), &g));
                }
            }
        }
    }

    #[test]
    fn action_matches_composition() {
        let g = GroupTable::cyclic(3);
        let ms = all_matrices(2, &g);
        for a in ms.iter().step_by(7) {
            for b in ms.iter().step_by(5) {
                let ab = a.compose(b, &g);
                for h in g.elements() {
                    for p in 0..2 {
                        let lhs = a.act(&g, (h, p)).and_then(|q| b.act(&g, q));
                        assert_eq!(lhs, ab.act(&g, (h, p)));
                    }
                }
            }
        }
    }

    #[test]
    fn display_compact_style() {
        let g = GroupTable::cyclic(4);
        let s = RowMonomialMatrix::from_entries(8, &[(0, 1, 0), (1, 3, 1), (2, 5, 2)]);
        assert_eq!(s.display(&g).to_string(), "1 -> 2, 2 -> x*4, 3 -> x^2*6");
        assert_eq!(RowMonomialMatrix::zero(3).display(&g).to_string(), "0");
    }
}
