//! Seeded random instances: GM systems with small `|G x B|` and small monoids whose units act
//! compatibly with the ideal.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gm::{gm_from_generators, GMSystem};
use crate::group::{Gid, GroupTable};
use crate::matrix::RowMonomialMatrix;
use crate::rees::ReesMatrixSemigroup;
use crate::smallmonoid::SmallMonoid;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Row-monomial matrix with each row defined with probability `density`.
pub fn random_matrix<R: Rng>(r: &mut R, group: &GroupTable, dim: usize, density: f64) -> RowMonomialMatrix {
    let rows = (0..dim)
        .map(|_| r.gen_bool(density).then(|| (r.gen_range(0..dim) as u32, r.gen_range(0..group.order()) as Gid)))
        .collect();
    RowMonomialMatrix::from_rows(rows)
}

/// Invertible monomial matrix.
pub fn random_unit<R: Rng>(r: &mut R, group: &GroupTable, dim: usize) -> RowMonomialMatrix {
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(r);
    RowMonomialMatrix::from_rows(perm.iter().map(|&c| Some((c as u32, r.gen_range(0..group.order()) as Gid))).collect())
}

/// A GM system with `|G x B| <= max_points`, non-trivial `G`, one to three generators, one
/// of which is a rank-one map so that a 0-minimal ideal exists. Draws until valid and until
/// `B` is exactly the L-class index set of the ideal.
pub fn random_gm(seed: u64, max_points: usize) -> GMSystem {
    let mut r = rng(seed);
    loop {
        let go = r.gen_range(2..=3usize);
        let max_b = (max_points / go).max(1);
        let b = r.gen_range(1..=max_b.min(4));
        let group = GroupTable::cyclic(go);
        let mut gens = Vec::new();
        let rank_one = {
            let target = r.gen_range(0..b) as u32;
            let rows = (0..b)
                .map(|_| r.gen_bool(0.7).then(|| (target, r.gen_range(0..go) as Gid)))
                .collect::<Vec<_>>();
            RowMonomialMatrix::from_rows(rows)
        };
        gens.push(rank_one);
        for _ in 0..r.gen_range(0..=2) {
            if r.gen_bool(0.5) {
                gens.push(random_unit(&mut r, &group, b));
            } else {
                gens.push(random_matrix(&mut r, &group, b, 0.7));
            }
        }
        match gm_from_generators(&group, b, &gens) {
            Ok(s) if s.ideal.rees.b_size == b => return s,
            _ => {}
        }
    }
}

/// A small monoid with `|G| <= 4`, `|B| <= max_b`: columns of `C` are closed under the left
/// action of one random unit and kept up to right scalars.
pub fn random_small_monoid(seed: u64, max_b: usize) -> SmallMonoid {
    let mut r = rng(seed);
    loop {
        let go = r.gen_range(2..=4usize);
        let b = r.gen_range(2..=max_b.max(2));
        let group = GroupTable::cyclic(go);
        let u = random_unit(&mut r, &group, b);
        let mut cols: Vec<Vec<Option<Gid>>> = Vec::new();
        for _ in 0..r.gen_range(1..=2) {
            let mut col: Vec<Option<Gid>> =
                (0..b).map(|_| r.gen_bool(0.6).then(|| r.gen_range(0..go) as Gid)).collect();
            if col.iter().all(Option::is_none) {
                col[0] = Some(0);
            }
            // orbit of the column under col -> u col, with col(b) = w_b col(u(b))
            for _ in 0..4 * b * go {
                let norm = normalize(&col, &group);
                if cols.contains(&norm) {
                    break;
                }
                cols.push(norm);
                col = (0..b)
                    .map(|i| {
                        let (t, w) = u.row(i).expect("unit");
                        col[t].map(|c| group.mul(w, c))
                    })
                    .collect();
            }
        }
        let a = cols.len();
        let c: Vec<Vec<Option<Gid>>> = (0..b).map(|i| cols.iter().map(|col| col[i]).collect()).collect();
        let Ok(rees) = ReesMatrixSemigroup::new(group.clone(), a, b, c) else { continue };
        if !rees.is_regular() || a * b * go > 200 {
            continue;
        }
        if let Ok(m) = SmallMonoid::new(rees, vec![u], vec!["u".into()]) {
            return m;
        }
    }
}

/// Column scaled on the right so that its first nonzero entry is the identity.
fn normalize(col: &[Option<Gid>], g: &GroupTable) -> Vec<Option<Gid>> {
    let first = col.iter().flatten().next().copied().unwrap_or(g.id());
    let c = g.inv(first);
    col.iter().map(|e| e.map(|v| g.mul(v, c))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = random_gm(7, 8);
        let b = random_gm(7, 8);
        assert_eq!(a.generators(), b.generators());
        assert!(a.num_points() <= 8);
        let m = random_small_monoid(3, 4);
        assert!(m.rees.b_size <= 4);
    }
}
