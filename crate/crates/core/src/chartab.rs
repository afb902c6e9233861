//! Abstract character tables, cycle incidence structure matrices, translational-hull
//! membership, the largest GM simple semigroups `S(H,k)` and the family `S_n`.

use crate::error::{Error, Result};
use crate::eval::{Evaluator, Wff};
use crate::flow::{assignment_from_rh, verify_complete_flow, Automaton, FlowCandidate};
use crate::gm::{gm_from_generators_capped, GMSystem, DEFAULT_CAP};
use crate::group::{Gid, GroupTable};
use crate::matrix::RowMonomialMatrix;
use crate::rees::{ReesElt, ReesMatrixSemigroup};
use crate::semigroup::{generate_semigroup, FinSemigroup};

/// `C_n(k, l) = x^{kl}` over `Z_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharTable {
    pub n: usize,
    pub group: GroupTable,
    pub c: Vec<Vec<Gid>>,
}

pub fn char_table(n: usize) -> CharTable {
    assert!(n >= 1);
    let group = GroupTable::cyclic(n);
    let c = (0..n).map(|k| (0..n).map(|l| ((k * l) % n) as Gid).collect()).collect();
    CharTable { n, group, c }
}

/// A full matrix over `G ∪ {0}`.
pub type GMatrix = Vec<Vec<Option<Gid>>>;

/// `m * c` for a row-monomial `m`.
pub fn monomial_times(m: &RowMonomialMatrix, c: &GMatrix, g: &GroupTable) -> GMatrix {
    let cols = c.first().map_or(0, Vec::len);
    (0..m.dim())
        .map(|r| match m.row(r) {
            Some((j, w)) => c[j].iter().map(|e| e.map(|v| g.mul(w, v))).collect(),
            None => vec![None; cols],
        })
        .collect()
}

/// `c * m` for a column-monomial `m`; `None` when some column of `m` has two entries.
pub fn times_monomial(c: &GMatrix, m: &RowMonomialMatrix, g: &GroupTable) -> Option<GMatrix> {
    if !m.is_column_monomial() {
        return None;
    }
    let n = m.dim();
    let mut out = vec![vec![None; n]; c.len()];
    for (r, row) in c.iter().enumerate() {
        for j in 0..n {
            if let (Some(v), Some((l, w))) = (row[j], m.row(j)) {
                out[r][l] = Some(g.mul(v, w));
            }
        }
    }
    Some(out)
}

/// Checks `X C_n = C_n Y` with `X` the cyclic shift and `Y = diag(1, x, ..., x^{n-1})`.
pub fn verify_intertwine(n: usize) -> bool {
    let t = char_table(n);
    let g = &t.group;
    let shift = RowMonomialMatrix::permutation(&(0..n).map(|k| (k + 1) % n).collect::<Vec<_>>(), g);
    let y = RowMonomialMatrix::from_rows((0..n).map(|l| Some((l as u32, l as Gid))).collect());
    let c: GMatrix = t.c.iter().map(|r| r.iter().map(|&v| Some(v)).collect()).collect();
    Some(monomial_times(&shift, &c, g)) == times_monomial(&c, &y, g)
}

/// The `m`-cycle with vertices and edges both named `0..m`; edge `i` joins `i` and `i+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleStructure {
    pub m: usize,
    /// `gamma[v][e]`.
    pub gamma: Vec<Vec<bool>>,
}

impl CycleStructure {
    pub fn new(m: usize) -> Self {
        assert!(m >= 3, "a cycle needs three vertices");
        let gamma = (0..m).map(|v| (0..m).map(|e| v == e || v == (e + 1) % m).collect()).collect();
        CycleStructure { m, gamma }
    }

    /// Support of column `a` of `[Γ | I]`: edges first, then vertices.
    pub fn column(&self, a: usize) -> Vec<usize> {
        if a < self.m {
            let mut v = vec![a, (a + 1) % self.m];
            v.sort_unstable();
            v
        } else {
            vec![a - self.m]
        }
    }

    pub fn column_of(&self, support: &[usize]) -> Option<usize> {
        (0..2 * self.m).find(|&a| self.column(a) == support)
    }

    /// `M^0(G, 2m, m, [Γ | I])`.
    pub fn rees(&self, group: &GroupTable) -> ReesMatrixSemigroup {
        let c = (0..self.m)
            .map(|v| (0..2 * self.m).map(|a| self.column(a).contains(&v).then_some(group.id())).collect())
            .collect();
        ReesMatrixSemigroup::new(group.clone(), 2 * self.m, self.m, c).expect("well-formed incidence matrix")
    }
}

/// Left multiplication by `f` maps every column of `[Γ | I]` to a multiple of a column:
/// each nonempty preimage is a vertex or an edge and carries a constant weight.
pub fn hull_member(c: &CycleStructure, f: &RowMonomialMatrix) -> bool {
    if f.dim() != c.m {
        return false;
    }
    (0..2 * c.m).all(|a| {
        let col = c.column(a);
        let pre: Vec<(usize, Gid)> = (0..c.m)
            .filter_map(|v| f.row(v).filter(|(t, _)| col.contains(t)).map(|(_, w)| (v, w)))
            .collect();
        if pre.is_empty() {
            return true;
        }
        let support: Vec<usize> = pre.iter().map(|&(v, _)| v).collect();
        c.column_of(&support).is_some() && pre.iter().all(|&(_, w)| w == pre[0].1)
    })
}

/// `S(H,k)`: row `j` goes to column `i` with weight `h_j`, for every `i` and `h in H^k`.
pub fn shk_generators(h: &GroupTable, k: usize) -> Vec<RowMonomialMatrix> {
    let n = h.order();
    let mut out = Vec::with_capacity(k * n.pow(k as u32));
    for i in 0..k {
        for code in 0..n.pow(k as u32) {
            let mut c = code;
            let rows = (0..k)
                .map(|_| {
                    let w = (c % n) as Gid;
                    c /= n;
                    Some((i as u32, w))
                })
                .collect();
            out.push(RowMonomialMatrix::from_rows(rows));
        }
    }
    out
}

pub fn build_shk(h: &GroupTable, k: usize) -> Result<FinSemigroup<RowMonomialMatrix>> {
    let gens = shk_generators(h, k);
    let cap = gens.len() + 1;
    generate_semigroup(&gens, h, cap)
}

/// Rees form of `S(H,k)`: `A` = functions `f: B -> H` with `f(0) = 1`, `C(i, f) = f(i)`.
pub fn shk_rees(h: &GroupTable, k: usize) -> ReesMatrixSemigroup {
    let n = h.order();
    let a_size = n.pow(k.saturating_sub(1) as u32);
    let c = (0..k)
        .map(|i| {
            (0..a_size)
                .map(|code| {
                    if i == 0 {
                        Some(h.id())
                    } else {
                        Some(((code / n.pow((i - 1) as u32)) % n) as Gid)
                    }
                })
                .collect()
        })
        .collect();
    ReesMatrixSemigroup::new(h.clone(), a_size, k, c).expect("well-formed")
}

/// How `s_i` places its weights. `Literal` sends `j -> 2j` for `j = 1..2^n`; `Odd` sends the
/// `j`-th odd point `2j-1 -> 2j`. Both use the weight `x^{i(j-1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SxConvention {
    Literal,
    #[default]
    Odd,
}

/// Generators and letter names of `S_n`.
#[derive(Clone, Debug)]
pub struct SnData {
    pub n: usize,
    pub cycle: CycleStructure,
    pub group: GroupTable,
    pub ideal: ReesMatrixSemigroup,
    pub gens: Vec<RowMonomialMatrix>,
    pub names: Vec<String>,
    /// Number of leading non-ideal generators (`a`, `b`, `s_1..`).
    pub hull_letters: usize,
}

pub const SN_DEFAULT_MAX: usize = 2;

pub fn sn_generators(n: usize, conv: SxConvention) -> Result<SnData> {
    if n == 0 {
        return Err(Error::Input("S_n needs n >= 1".into()));
    }
    let order = 1usize << n;
    let m = 2 * order;
    let group = GroupTable::cyclic(order);
    let cycle = CycleStructure::new(m);
    let ideal = cycle.rees(&group);
    let mut gens = Vec::new();
    let mut names = Vec::new();
    let a: Vec<usize> = (0..m).map(|j| (j + 2) % m).collect();
    gens.push(RowMonomialMatrix::permutation(&a, &group));
    names.push("a".to_string());
    gens.push(RowMonomialMatrix::from_entries(m, &[(m - 1, 0, 0), (m - 2, 1, 0)]));
    names.push("b".to_string());
    for i in 1..order {
        let entries: Vec<(usize, usize, Gid)> = (1..=order)
            .map(|j| {
                let w = ((i * (j - 1)) % order) as Gid;
                let src = match conv {
                    SxConvention::Literal => j - 1,
                    SxConvention::Odd => 2 * j - 2,
                };
                (src, 2 * j - 1, w)
            })
            .collect();
        gens.push(RowMonomialMatrix::from_entries(m, &entries));
        names.push(format!("s{i}"));
    }
    let hull_letters = gens.len();
    for (k, g) in gens.iter().enumerate() {
        if !hull_member(&cycle, g) {
            return Err(Error::HullViolation(format!("generator {} is outside the translational hull", names[k])));
        }
    }
    // All (a', 1, b) together with one non-trivial weight generate the ideal.
    for a2 in 0..ideal.a_size {
        for b in 0..ideal.b_size {
            gens.push(ideal.as_matrix(ReesElt::T(a2 as u32, group.id(), b as u32)));
            names.push(format!("i{}_{}", a2 + 1, b + 1));
        }
    }
    gens.push(ideal.as_matrix(ReesElt::T(0, 1, 0)));
    names.push("i1_x_1".to_string());
    Ok(SnData { n, cycle, group, ideal, gens, names, hull_letters })
}

/// `S_n` as a GM system; `n` above `max_n` is refused.
pub fn build_sn(n: usize, conv: SxConvention, max_n: usize) -> Result<(SnData, GMSystem)> {
    if n > max_n {
        return Err(Error::Input(format!("S_{n} exceeds the configured bound n <= {max_n}")));
    }
    let data = sn_generators(n, conv)?;
    let sys = gm_from_generators_capped(&data.group, data.cycle.m, &data.gens, DEFAULT_CAP * 10)?
        .with_names(data.names.clone());
    Ok((data, sys))
}

/// The flow of `S_n` over `RZ(2^n)^1`. The top state is `(1/<1>) a^w* (b a^w*)^w*`, state `i`
/// is its image under `s_i`, and the top state comes last. Covers: `a` to the identity,
/// `s_i` to constant `i`, everything else to the constant at the top state.
pub fn sn_flow(data: &SnData, sys: &GMSystem) -> Result<FlowCandidate> {
    let order = 1usize << data.n;
    let mut ev = Evaluator::new(sys, 100_000)?;
    let top = ev.forward_text("a^w* (b a^w*)^w*", "1/<1>")?;
    let mut states = Vec::with_capacity(order);
    for i in 1..order {
        let w = Wff::Letter(sys.letter(&format!("s{i}")).expect("s_i is a letter"));
        states.push(ev.forward(&w, &top)?);
    }
    states.push(top);
    let assignment = assignment_from_rh(&states)?;
    let cover = data
        .names
        .iter()
        .map(|nm| match nm.as_str() {
            "a" => 0,
            s if s.starts_with('s') => s[1..].parse::<usize>().expect("s_i"),
            _ => order,
        })
        .collect();
    let cand = FlowCandidate::new(Automaton::rz_one(order), cover, assignment)?;
    let v = verify_complete_flow(sys, &cand);
    if !v.is_valid() {
        return Err(Error::FlowVerificationFailed(v.describe(sys, &cand)));
    }
    Ok(cand)
}
