//! Rees matrix semigroups `M0(G, A, B, C)` with `C` a `B x A` matrix over `G ∪ {0}`.

use crate::error::{Error, Result};
use crate::group::{Gid, GroupTable};
use crate::matrix::RowMonomialMatrix;
use crate::semigroup::{Element, FinSemigroup};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReesMatrixSemigroup {
    pub group: GroupTable,
    pub a_size: usize,
    pub b_size: usize,
    /// `c[b][a]`; `None` is the zero entry.
    pub c: Vec<Vec<Option<Gid>>>,
}

/// Element of a Rees matrix semigroup; triples are 0-based `(a, g, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReesElt {
    Zero,
    T(u32, Gid, u32),
}

impl Element for ReesElt {
    type Ctx = ReesMatrixSemigroup;
    fn mul(&self, other: &Self, r: &ReesMatrixSemigroup) -> Self {
        r.mul(*self, *other)
    }
}

impl ReesMatrixSemigroup {
    pub fn new(group: GroupTable, a_size: usize, b_size: usize, c: Vec<Vec<Option<Gid>>>) -> Result<Self> {
        if c.len() != b_size || c.iter().any(|row| row.len() != a_size) {
            return Err(Error::Input(format!("structure matrix must be {b_size} x {a_size}")));
        }
        if c.iter().flatten().flatten().any(|&g| g as usize >= group.order()) {
            return Err(Error::Input("structure matrix entry outside the group".into()));
        }
        Ok(ReesMatrixSemigroup { group, a_size, b_size, c })
    }

    #[inline]
    pub fn entry(&self, b: usize, a: usize) -> Option<Gid> {
        self.c[b][a]
    }

    pub fn mul(&self, x: ReesElt, y: ReesElt) -> ReesElt {
        match (x, y) {
            (ReesElt::T(a, g, b), ReesElt::T(a2, g2, b2)) => match self.c[b as usize][a2 as usize] {
                Some(c) => ReesElt::T(a, self.group.mul(self.group.mul(g, c), g2), b2),
                None => ReesElt::Zero,
            },
            _ => ReesElt::Zero,
        }
    }

    /// Every row and every column of `C` has a nonzero entry.
    pub fn is_regular(&self) -> bool {
        let rows = self.c.iter().all(|row| row.iter().any(Option::is_some));
        let cols = (0..self.a_size).all(|a| (0..self.b_size).any(|b| self.c[b][a].is_some()));
        rows && cols
    }

    pub fn has_zero_entry(&self) -> bool {
        self.c.iter().flatten().any(Option::is_none)
    }

    pub fn elements(&self) -> Vec<ReesElt> {
        let mut v = Vec::with_capacity(self.a_size * self.b_size * self.group.order() + 1);
        for a in 0..self.a_size {
            for g in self.group.elements() {
                for b in 0..self.b_size {
                    v.push(ReesElt::T(a as u32, g, b as u32));
                }
            }
        }
        if self.has_zero_entry() {
            v.push(ReesElt::Zero);
        }
        v
    }

    pub fn idempotents(&self) -> Vec<ReesElt> {
        let mut v = Vec::new();
        for a in 0..self.a_size {
            for b in 0..self.b_size {
                if let Some(c) = self.c[b][a] {
                    v.push(ReesElt::T(a as u32, self.group.inv(c), b as u32));
                }
            }
        }
        v
    }

    /// The whole semigroup, closed from all elements.
    pub fn semigroup(&self) -> FinSemigroup<ReesElt> {
        let els = self.elements();
        let cap = els.len() + 1;
        FinSemigroup::generate(els, self.clone(), cap).expect("Rees matrix semigroup is finite")
    }

    /// Right action of `(a, g, b)` on the distinguished R-class `G x B`: row `b'` goes to `b`
    /// with weight `C(b', a) g`.
    pub fn as_matrix(&self, x: ReesElt) -> RowMonomialMatrix {
        let mut rows = vec![None; self.b_size];
        if let ReesElt::T(a, g, b) = x {
            for (b2, row) in rows.iter_mut().enumerate() {
                if let Some(c) = self.c[b2][a as usize] {
                    *row = Some((b, self.group.mul(c, g)));
                }
            }
        }
        RowMonomialMatrix::from_rows(rows)
    }

    /// Restriction to the index subset `bs` of `B` (rows of `C`), keeping `A`.
    pub fn restrict_b(&self, bs: &[usize]) -> ReesMatrixSemigroup {
        ReesMatrixSemigroup {
            group: self.group.clone(),
            a_size: self.a_size,
            b_size: bs.len(),
            c: bs.iter().map(|&b| self.c[b].clone()).collect(),
        }
    }

    pub fn format_elt(&self, x: ReesElt) -> String {
        match x {
            ReesElt::Zero => "0".into(),
            ReesElt::T(a, g, b) => format!("({},{},{})", a + 1, self.group.label(g), b + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let g = GroupTable::cyclic(2);
        let r = ReesMatrixSemigroup::new(g, 2, 2, vec![vec![Some(0), None], vec![Some(0), Some(1)]]).unwrap();
        assert_eq!(r.mul(ReesElt::T(0, 0, 1), ReesElt::T(1, 0, 0)), ReesElt::T(0, 1, 0));
        assert_eq!(r.mul(ReesElt::T(0, 0, 0), ReesElt::T(1, 0, 0)), ReesElt::Zero);
        assert!(r.is_regular());
        assert_eq!(r.semigroup().len(), 9);
    }

    #[test]
    fn matrix_action_agrees_with_product() {
        let g = GroupTable::cyclic(3);
        let c = vec![vec![Some(0), Some(1), None], vec![None, Some(2), Some(0)]];
        let r = ReesMatrixSemigroup::new(g.clone(), 3, 2, c).unwrap();
        for &x in &r.elements() {
            for &y in &r.elements() {
                let lhs = r.as_matrix(x).compose(&r.as_matrix(y), &g);
                assert_eq!(lhs, r.as_matrix(r.mul(x, y)));
            }
        }
    }
}
