//! Finite groups given by Cayley tables.

use crate::error::{Error, Result};

/// Element id inside a [`GroupTable`].
pub type Gid = u32;

/// A finite group on ids `0..order` with an explicit multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupTable {
    order: usize,
    mul: Vec<Gid>,
    id: Gid,
    inv: Vec<Gid>,
    labels: Vec<String>,
    /// Generator name used when parsing and printing words, if the group is cyclic.
    cyclic_gen: Option<String>,
}

impl GroupTable {
    /// Cyclic group `Z_n` written multiplicatively with generator `x`; id `k` is `x^k`.
    pub fn cyclic(n: usize) -> Self {
        Self::cyclic_named(n, "x")
    }

    pub fn cyclic_named(n: usize, gen: &str) -> Self {
        assert!(n >= 1, "cyclic group needs positive order");
        let mut mul = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                mul.push(((i + j) % n) as Gid);
            }
        }
        let inv = (0..n).map(|i| ((n - i) % n) as Gid).collect();
        let labels = (0..n)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => gen.to_string(),
                _ => format!("{gen}^{k}"),
            })
            .collect();
        GroupTable { order: n, mul, id: 0, inv, labels, cyclic_gen: Some(gen.to_string()) }
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Group from a full Cayley table; validates the group axioms.
    pub fn from_table(table: Vec<Vec<Gid>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n) {
            return Err(Error::Input("group table must be square and nonempty".into()));
        }
        if table.iter().flatten().any(|&v| v as usize >= n) {
            return Err(Error::Input("group table entry out of range".into()));
        }
        let mul: Vec<Gid> = table.into_iter().flatten().collect();
        let at = |a: usize, b: usize| mul[a * n + b] as usize;
        let id = (0..n)
            .find(|&e| (0..n).all(|a| at(e, a) == a && at(a, e) == a))
            .ok_or_else(|| Error::Input("group table has no identity".into()))?;
        let mut inv = vec![0; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| at(a, b) == id && at(b, a) == id)
                .ok_or_else(|| Error::Input(format!("element {a} has no inverse")))?;
            inv[a] = b as Gid;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::Input("group table is not associative".into()));
                    }
                }
            }
        }
        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(_) => return Err(Error::Input("label count differs from group order".into())),
            None => (0..n).map(|i| if i == id { "1".into() } else { format!("g{i}") }).collect(),
        };
        Ok(GroupTable { order: n, mul, id: id as Gid, inv, labels, cyclic_gen: None })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn id(&self) -> Gid {
        self.id
    }

    #[inline]
    pub fn mul(&self, a: Gid, b: Gid) -> Gid {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Gid) -> Gid {
        self.inv[a as usize]
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn elements(&self) -> impl Iterator<Item = Gid> {
        0..self.order as Gid
    }

    pub fn label(&self, a: Gid) -> &str {
        &self.labels[a as usize]
    }

    pub fn cyclic_generator(&self) -> Option<&str> {
        self.cyclic_gen.as_deref()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// `a^k` for a non-negative exponent.
    pub fn pow(&self, a: Gid, k: usize) -> Gid {
        let mut r = self.id;
        for _ in 0..k {
            r = self.mul(r, a);
        }
        r
    }

    pub fn element_order(&self, a: Gid) -> usize {
        let mut r = a;
        let mut k = 1;
        while r != self.id {
            r = self.mul(r, a);
            k += 1;
        }
        k
    }

    pub fn table(&self) -> Vec<Vec<Gid>> {
        (0..self.order).map(|i| self.mul[i * self.order..(i + 1) * self.order].to_vec()).collect()
    }

    /// Parses a group word: `1`, a label, `-1` style labels, or `x^k` products such as `x x^2`.
    pub fn parse_word(&self, s: &str) -> Result<Gid> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(self.id);
        }
        if let Some(i) = self.labels.iter().position(|l| l == s) {
            return Ok(i as Gid);
        }
        let mut acc = self.id;
        for tok in s.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let v = self.parse_factor(tok)?;
            acc = self.mul(acc, v);
        }
        Ok(acc)
    }

    fn parse_factor(&self, tok: &str) -> Result<Gid> {
        if let Some(i) = self.labels.iter().position(|l| l == tok) {
            return Ok(i as Gid);
        }
        if tok == "-1" && self.order == 2 {
            return Ok(1 - self.id);
        }
        if let Some(gen) = &self.cyclic_gen {
            let base = gen.as_str();
            if tok == base {
                return Ok(self.pow(1, 1));
            }
            if let Some(rest) = tok.strip_prefix(base).and_then(|r| r.strip_prefix('^')) {
                let rest = rest.trim_start_matches('{').trim_end_matches('}');
                let k: i64 = rest
                    .parse()
                    .map_err(|_| Error::Input(format!("bad exponent in group word '{tok}'")))?;
                let n = self.order as i64;
                return Ok(k.rem_euclid(n) as Gid);
            }
        }
        if let Ok(k) = tok.parse::<usize>() {
            if k < self.order {
                return Ok(k as Gid);
            }
        }
        Err(Error::Input(format!("unknown group element '{tok}'")))
    }

    /// Cyclic group of order 2 with labels `1`, `-1`.
    pub fn z2_signs() -> Self {
        let mut g = Self::cyclic(2);
        g.labels = vec!["1".into(), "-1".into()];
        g
    }

    /// Direct power `self^k` with componentwise multiplication; ids are mixed-radix.
    pub fn power(&self, k: usize) -> Self {
        let n = self.order;
        let total = n.pow(k as u32);
        let decode = |mut v: usize| {
            let mut d = vec![0usize; k];
            for slot in d.iter_mut() {
                *slot = v % n;
                v /= n;
            }
            d
        };
        let encode = |d: &[usize]| d.iter().rev().fold(0usize, |acc, &x| acc * n + x);
        let mut table = vec![vec![0 as Gid; total]; total];
        for (a, row) in table.iter_mut().enumerate() {
            let da = decode(a);
            for (b, cell) in row.iter_mut().enumerate() {
                let db = decode(b);
                let dc: Vec<usize> =
                    da.iter().zip(&db).map(|(&x, &y)| self.mul(x as Gid, y as Gid) as usize).collect();
                *cell = encode(&dc) as Gid;
            }
        }
        let labels = (0..total)
            .map(|v| {
                let d = decode(v);
                format!("({})", d.iter().map(|&x| self.label(x as Gid)).collect::<Vec<_>>().join(","))
            })
            .collect();
        GroupTable::from_table(table, Some(labels)).expect("direct power of a group is a group")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_axioms() {
        for n in 1..8 {
            let g = GroupTable::cyclic(n);
            let t = GroupTable::from_table(g.table(), None).unwrap();
            assert_eq!(t.id(), 0);
            for a in g.elements() {
                assert_eq!(g.mul(a, g.inv(a)), g.id());
            }
        }
    }

    #[test]
    fn words() {
        let g = GroupTable::cyclic(4);
        assert_eq!(g.parse_word("x^3").unwrap(), 3);
        assert_eq!(g.parse_word("x x^2").unwrap(), 3);
        assert_eq!(g.parse_word("1").unwrap(), 0);
        assert_eq!(g.parse_word("x^{-1}").unwrap(), 3);
        let s = GroupTable::z2_signs();
        assert_eq!(s.parse_word("-1").unwrap(), 1);
    }

    #[test]
    fn rejects_non_group() {
        assert!(GroupTable::from_table(vec![vec![0, 0], vec![0, 1]], None).is_err());
    }

    #[test]
    fn direct_power_order() {
        let g = GroupTable::cyclic(2).power(3);
        assert_eq!(g.order(), 8);
        assert!(g.elements().all(|a| g.mul(a, a) == g.id()));
    }
}
