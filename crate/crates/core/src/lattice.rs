//! The set-partition lattice `SP(G x B)` and the Rhodes lattice `Rh_B(G)`.
//!
//! Points of `G x B` are indexed `b * |G| + g`. An SPC keeps one normalized weight
//! representative per block: the least `b` of a block carries the identity.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::group::{Gid, GroupTable};

const NO: u32 = u32::MAX;

/// `(Y, Π)`: `label[p]` is the block of `p`, or `NO` outside `Y`. Blocks are numbered in
/// order of their least point, which makes equality structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SPElement {
    g_order: usize,
    b_size: usize,
    label: Vec<u32>,
}

fn canonical(label: &mut [u32]) {
    let mut map: Vec<u32> = Vec::new();
    let mut remap = std::collections::HashMap::new();
    for l in label.iter_mut() {
        if *l == NO {
            continue;
        }
        let next = map.len() as u32;
        let v = *remap.entry(*l).or_insert_with(|| {
            map.push(next);
            next
        });
        *l = v;
    }
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut c = x;
    while p[c] != r {
        let n = p[c];
        p[c] = r;
        c = n;
    }
    r
}

impl SPElement {
    pub fn bottom(g_order: usize, b_size: usize) -> Self {
        SPElement { g_order, b_size, label: vec![NO; g_order * b_size] }
    }

    pub fn from_labels(g_order: usize, b_size: usize, labels: &[Option<u32>]) -> Self {
        assert_eq!(labels.len(), g_order * b_size);
        let mut label: Vec<u32> = labels.iter().map(|l| l.unwrap_or(NO)).collect();
        canonical(&mut label);
        SPElement { g_order, b_size, label }
    }

    /// Blocks given as lists of point indices; they must be disjoint and nonempty.
    pub fn from_blocks(g_order: usize, b_size: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let n = g_order * b_size;
        let mut label = vec![NO; n];
        for (i, bl) in blocks.iter().enumerate() {
            if bl.is_empty() {
                return Err(Error::Input("empty block".into()));
            }
            for &p in bl {
                if p >= n || label[p] != NO {
                    return Err(Error::Input(format!("point {p} repeated or outside G x B")));
                }
                label[p] = i as u32;
            }
        }
        canonical(&mut label);
        Ok(SPElement { g_order, b_size, label })
    }

    pub fn g_order(&self) -> usize {
        self.g_order
    }

    pub fn b_size(&self) -> usize {
        self.b_size
    }

    pub fn num_points(&self) -> usize {
        self.label.len()
    }

    #[inline]
    pub fn block_of(&self, p: usize) -> Option<usize> {
        (self.label[p] != NO).then(|| self.label[p] as usize)
    }

    pub fn contains(&self, p: usize) -> bool {
        self.label[p] != NO
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.label.len()).filter(|&p| self.label[p] != NO).collect()
    }

    pub fn num_blocks(&self) -> usize {
        self.label.iter().filter(|&&l| l != NO).map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (p, &l) in self.label.iter().enumerate() {
            if l != NO {
                out[l as usize].push(p);
            }
        }
        out
    }

    pub fn is_bottom(&self) -> bool {
        self.label.iter().all(|&l| l == NO)
    }

    fn same_universe(&self, o: &Self) -> Result<()> {
        if self.g_order != o.g_order || self.b_size != o.b_size {
            return Err(Error::UniverseMismatch);
        }
        Ok(())
    }

    pub fn leq(&self, o: &Self) -> Result<bool> {
        self.same_universe(o)?;
        let mut map = vec![NO; self.num_blocks()];
        for p in 0..self.label.len() {
            let l = self.label[p];
            if l == NO {
                continue;
            }
            let m = o.label[p];
            if m == NO {
                return Ok(false);
            }
            let slot = &mut map[l as usize];
            if *slot == NO {
                *slot = m;
            } else if *slot != m {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn meet(&self, o: &Self) -> Result<Self> {
        self.same_universe(o)?;
        let nb = o.num_blocks().max(1) as u64;
        let mut keyed: Vec<u64> = self
            .label
            .iter()
            .zip(&o.label)
            .map(|(&a, &b)| if a == NO || b == NO { u64::MAX } else { a as u64 * nb + b as u64 })
            .collect();
        let mut remap = std::collections::HashMap::new();
        let label = keyed
            .iter_mut()
            .map(|k| {
                if *k == u64::MAX {
                    NO
                } else {
                    let next = remap.len() as u32;
                    *remap.entry(*k).or_insert(next)
                }
            })
            .collect();
        Ok(SPElement { g_order: self.g_order, b_size: self.b_size, label })
    }

    pub fn join(&self, o: &Self) -> Result<Self> {
        self.same_universe(o)?;
        let n = self.label.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for lab in [&self.label, &o.label] {
            let mut first = std::collections::HashMap::new();
            for p in 0..n {
                if lab[p] != NO {
                    let f = *first.entry(lab[p]).or_insert(p);
                    let (a, b) = (find(&mut parent, f), find(&mut parent, p));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut label: Vec<u32> = (0..n)
            .map(|p| if self.label[p] == NO && o.label[p] == NO { NO } else { find(&mut parent, p) as u32 })
            .collect();
        canonical(&mut label);
        Ok(SPElement { g_order: self.g_order, b_size: self.b_size, label })
    }

    /// `h · (Y, Π)` with `h(g, b) = (hg, b)`.
    pub fn act_left(&self, group: &GroupTable, h: Gid) -> Self {
        let go = self.g_order;
        let mut label = vec![NO; self.label.len()];
        for (p, &l) in self.label.iter().enumerate() {
            if l != NO {
                let (g, b) = ((p % go) as Gid, p / go);
                label[b * go + group.mul(h, g) as usize] = l;
            }
        }
        canonical(&mut label);
        SPElement { g_order: go, b_size: self.b_size, label }
    }

    pub fn is_invariant(&self, group: &GroupTable) -> bool {
        group.elements().all(|h| self.act_left(group, h) == *self)
    }

    /// No block holds two points over the same `b`.
    pub fn is_cross_section(&self) -> bool {
        let go = self.g_order;
        (0..self.b_size).all(|b| {
            let ls: Vec<u32> = (0..go).map(|g| self.label[b * go + g]).filter(|&l| l != NO).collect();
            let mut s = ls.clone();
            s.sort_unstable();
            s.dedup();
            s.len() == ls.len()
        })
    }
}

pub fn sp_leq(a: &SPElement, b: &SPElement) -> Result<bool> {
    a.leq(b)
}

pub fn sp_meet(a: &SPElement, b: &SPElement) -> Result<SPElement> {
    a.meet(b)
}

pub fn sp_join(a: &SPElement, b: &SPElement) -> Result<SPElement> {
    a.join(b)
}

pub fn is_cross_section_sp(e: &SPElement) -> bool {
    e.is_cross_section()
}

/// Every SP element over a universe of at most 8 points, for exhaustive checks.
pub fn all_sp_elements(g_order: usize, b_size: usize) -> Vec<SPElement> {
    let n = g_order * b_size;
    assert!(n <= 8, "exhaustive enumeration is for tiny universes");
    // Restricted growth strings with an extra "absent" symbol.
    let mut out = Vec::new();
    let mut cur = vec![NO; n];
    fn rec(i: usize, cur: &mut Vec<u32>, maxb: u32, g: usize, b: usize, out: &mut Vec<SPElement>) {
        if i == cur.len() {
            out.push(SPElement { g_order: g, b_size: b, label: cur.clone() });
            return;
        }
        cur[i] = NO;
        rec(i + 1, cur, maxb, g, b, out);
        for l in 0..=maxb {
            cur[i] = l;
            rec(i + 1, cur, maxb.max(l + 1), g, b, out);
        }
        cur[i] = NO;
    }
    rec(0, &mut cur, 0, g_order, b_size, &mut out);
    out
}

/// `(I, Θ, [f])` with `entries[b] = (block, weight)`; blocks numbered by least `b`, and the
/// least `b` of each block has the identity weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SPCElement {
    entries: Vec<Option<(u32, Gid)>>,
}

impl SPCElement {
    pub fn bottom(b_size: usize) -> Self {
        SPCElement { entries: vec![None; b_size] }
    }

    /// Normalizes arbitrary `(block, weight)` data.
    pub fn from_entries(group: &GroupTable, entries: &[Option<(u32, Gid)>]) -> Self {
        let mut block_map = std::collections::HashMap::new();
        let mut lead: Vec<Gid> = Vec::new();
        let out = entries
            .iter()
            .map(|e| {
                e.map(|(bl, w)| {
                    let next = block_map.len() as u32;
                    let nb = *block_map.entry(bl).or_insert_with(|| {
                        lead.push(group.inv(w));
                        next
                    });
                    (nb, group.mul(lead[nb as usize], w))
                })
            })
            .collect();
        SPCElement { entries: out }
    }

    /// Blocks as `(b, weight)` lists.
    pub fn from_blocks(group: &GroupTable, b_size: usize, blocks: &[Vec<(usize, Gid)>]) -> Result<Self> {
        let mut entries = vec![None; b_size];
        for (i, bl) in blocks.iter().enumerate() {
            if bl.is_empty() {
                return Err(Error::Input("empty block".into()));
            }
            for &(b, w) in bl {
                if b >= b_size || entries[b].is_some() {
                    return Err(Error::Input(format!("index {} repeated or outside B", b + 1)));
                }
                if w as usize >= group.order() {
                    return Err(Error::Input("weight outside the group".into()));
                }
                entries[b] = Some((i as u32, w));
            }
        }
        Ok(Self::from_entries(group, &entries))
    }

    /// The point state `{b}/<1>`.
    pub fn point(b_size: usize, b: usize) -> Self {
        let mut entries = vec![None; b_size];
        entries[b] = Some((0, 0));
        SPCElement { entries }
    }

    pub fn b_size(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn entry(&self, b: usize) -> Option<(usize, Gid)> {
        self.entries[b].map(|(bl, w)| (bl as usize, w))
    }

    pub fn entries(&self) -> &[Option<(u32, Gid)>] {
        &self.entries
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.entries.len()).filter(|&b| self.entries[b].is_some()).collect()
    }

    pub fn is_bottom(&self) -> bool {
        self.entries.iter().all(Option::is_none)
    }

    pub fn num_blocks(&self) -> usize {
        self.entries.iter().flatten().map(|&(bl, _)| bl as usize + 1).max().unwrap_or(0)
    }

    pub fn blocks(&self) -> Vec<Vec<(usize, Gid)>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (b, e) in self.entries.iter().enumerate() {
            if let Some((bl, w)) = e {
                out[*bl as usize].push((b, *w));
            }
        }
        out
    }

    /// Text literal `{2,4,6,8}/<1 x x^2 x^3>` with 1-based indices.
    pub fn to_literal(&self, group: &GroupTable) -> String {
        let dom: Vec<String> = self.domain().iter().map(|b| (b + 1).to_string()).collect();
        format!("{{{}}}/{}", dom.join(","), self.weights_text(group))
    }

    /// Compact form `2468/<1 x x^2 x^3>`; falls back to the literal when some index exceeds 9.
    pub fn compact(&self, group: &GroupTable) -> String {
        if self.entries.len() > 9 {
            return self.to_literal(group);
        }
        let dom: String = self.domain().iter().map(|b| (b + 1).to_string()).collect();
        format!("{}/{}", dom, self.weights_text(group))
    }

    fn contiguous(&self) -> bool {
        let concat: Vec<usize> = self.blocks().iter().flat_map(|bl| bl.iter().map(|&(b, _)| b)).collect();
        concat == self.domain()
    }

    fn weights_text(&self, group: &GroupTable) -> String {
        let explicit = !self.contiguous();
        let mut s = String::from("<");
        for (i, bl) in self.blocks().iter().enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            for (j, &(b, w)) in bl.iter().enumerate() {
                if j > 0 {
                    s.push(' ');
                }
                s.push_str(group.label(w));
                if explicit {
                    let _ = write!(s, "@{}", b + 1);
                }
            }
        }
        s.push('>');
        s
    }

    /// Parses either literal form. Plain blocks take the domain in ascending order;
    /// `w@b` tags place weights explicitly.
    pub fn parse(text: &str, group: &GroupTable, b_size: usize) -> Result<Self> {
        let perr = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
        let text = text.trim();
        let slash = text.find('/').ok_or_else(|| perr(0, "expected '/'"))?;
        let (set_txt, rest) = (text[..slash].trim(), text[slash + 1..].trim());
        let dom: Vec<usize> = if let Some(inner) = set_txt.strip_prefix('{') {
            let inner = inner.strip_suffix('}').ok_or_else(|| perr(slash, "unclosed '{'"))?;
            inner
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| perr(0, "bad index")))
                .collect::<Result<_>>()?
        } else {
            set_txt
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| perr(0, "bad compact index")))
                .collect::<Result<_>>()?
        };
        let mut dom_sorted = dom.clone();
        dom_sorted.sort_unstable();
        dom_sorted.dedup();
        if dom_sorted.len() != dom.len() || dom_sorted.iter().any(|&b| b == 0 || b > b_size) {
            return Err(perr(0, "indices must be distinct and within 1..|B|"));
        }
        let inner = rest
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .ok_or_else(|| perr(slash + 1, "expected <...>"))?;
        let mut blocks: Vec<Vec<(usize, Gid)>> = Vec::new();
        let mut next = dom_sorted.iter();
        let mut used = Vec::new();
        if !inner.trim().is_empty() {
            for part in inner.split('|') {
                let mut bl = Vec::new();
                for tok in part.split_whitespace() {
                    let (w, b) = match tok.split_once('@') {
                        Some((w, b)) => {
                            let b: usize = b.parse().map_err(|_| perr(slash, "bad @index"))?;
                            (w, b)
                        }
                        None => (tok, *next.next().ok_or_else(|| perr(slash, "more weights than indices"))?),
                    };
                    let w = group.parse_word(w).map_err(|e| perr(slash, &e.to_string()))?;
                    bl.push((b - 1, w));
                    used.push(b);
                }
                if bl.is_empty() {
                    return Err(perr(slash, "empty block"));
                }
                blocks.push(bl);
            }
        }
        used.sort_unstable();
        if used != dom_sorted {
            return Err(perr(slash, "weights do not match the index set"));
        }
        Self::from_blocks(group, b_size, &blocks)
    }
}

/// Element of `Rh_B(G)`: an SPC or the contradiction on top.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RhElement {
    Spc(SPCElement),
    Contradiction,
}

impl RhElement {
    pub fn spc(&self) -> Option<&SPCElement> {
        match self {
            RhElement::Spc(s) => Some(s),
            RhElement::Contradiction => None,
        }
    }

    pub fn display(&self, group: &GroupTable) -> String {
        match self {
            RhElement::Spc(s) => s.compact(group),
            RhElement::Contradiction => "=><=".to_string(),
        }
    }
}

/// `θ̂ = {(f(b), b)}` and its left translates, one SP block each.
pub fn cs_embedding(a: &SPCElement, group: &GroupTable) -> SPElement {
    let go = group.order();
    let nb = a.num_blocks();
    let mut label = vec![NO; go * a.b_size()];
    for (b, e) in a.entries.iter().enumerate() {
        if let Some((bl, w)) = e {
            for h in group.elements() {
                label[b * go + group.mul(h, *w) as usize] = (h as usize * nb + *bl as usize) as u32;
            }
        }
    }
    canonical(&mut label);
    SPElement { g_order: go, b_size: a.b_size(), label }
}

pub fn cs_extract(e: &SPElement, group: &GroupTable) -> Result<SPCElement> {
    if e.g_order != group.order() {
        return Err(Error::UniverseMismatch);
    }
    if !e.is_invariant(group) {
        return Err(Error::NotInvariant("SP element is not invariant under left multiplication".into()));
    }
    if !e.is_cross_section() {
        return Err(Error::NotCrossSection("a block meets some fibre twice".into()));
    }
    let go = e.g_order;
    let id = group.id() as usize;
    let mut entries = vec![None; e.b_size];
    for b in 0..e.b_size {
        if entries[b].is_some() || e.label[b * go + id] == NO {
            continue;
        }
        // The block through (1, b) fixes the weights of its whole B-projection.
        let l = e.label[b * go + id];
        for b2 in b..e.b_size {
            for g in 0..go {
                if e.label[b2 * go + g] == l {
                    entries[b2] = Some((b as u32, g as Gid));
                }
            }
        }
    }
    Ok(SPCElement::from_entries(group, &entries))
}

fn extract_or_top(e: &SPElement, group: &GroupTable) -> RhElement {
    match cs_extract(e, group) {
        Ok(s) => RhElement::Spc(s),
        Err(_) => RhElement::Contradiction,
    }
}

pub fn rh_leq(a: &RhElement, b: &RhElement, group: &GroupTable) -> bool {
    match (a, b) {
        (_, RhElement::Contradiction) => true,
        (RhElement::Contradiction, _) => false,
        (RhElement::Spc(x), RhElement::Spc(y)) => spc_leq(x, y, group),
    }
}

pub fn spc_leq(x: &SPCElement, y: &SPCElement, group: &GroupTable) -> bool {
    // Direct form of the order: domain, block refinement, and proportional cross-sections.
    let mut ratio: Vec<Option<(u32, Gid)>> = vec![None; x.num_blocks()];
    for b in 0..x.b_size() {
        if let Some((bx, wx)) = x.entries[b] {
            let Some((by, wy)) = y.entries[b] else { return false };
            // wy = r * wx for a per-block constant r
            let r = group.mul(wy, group.inv(wx));
            match ratio[bx as usize] {
                None => ratio[bx as usize] = Some((by, r)),
                Some(v) if v == (by, r) => {}
                Some(_) => return false,
            }
        }
    }
    true
}

pub fn rh_meet(a: &RhElement, b: &RhElement, group: &GroupTable) -> RhElement {
    match (a, b) {
        (RhElement::Contradiction, x) | (x, RhElement::Contradiction) => x.clone(),
        (RhElement::Spc(x), RhElement::Spc(y)) => {
            let m = cs_embedding(x, group).meet(&cs_embedding(y, group)).expect("same universe");
            extract_or_top(&m, group)
        }
    }
}

pub fn rh_join(a: &RhElement, b: &RhElement, group: &GroupTable) -> RhElement {
    match (a, b) {
        (RhElement::Contradiction, _) | (_, RhElement::Contradiction) => RhElement::Contradiction,
        (RhElement::Spc(x), RhElement::Spc(y)) => spc_join(x, y, group),
    }
}

pub fn spc_join(x: &SPCElement, y: &SPCElement, group: &GroupTable) -> RhElement {
    let j = cs_embedding(x, group).join(&cs_embedding(y, group)).expect("same universe");
    extract_or_top(&j, group)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4() -> GroupTable {
        GroupTable::cyclic(4)
    }

    #[test]
    fn literal_round_trip() {
        let g = z4();
        let s = SPCElement::parse("{2,4,6,8}/<1 x x^2 x^3>", &g, 8).unwrap();
        assert_eq!(s.compact(&g), "2468/<1 x x^2 x^3>");
        assert_eq!(SPCElement::parse("2468/<1 x x^2 x^3>", &g, 8).unwrap(), s);
        let t = SPCElement::parse("1357/<1|1|1|1>", &g, 8).unwrap();
        assert_eq!(t.num_blocks(), 4);
        assert_eq!(t.to_literal(&g), "{1,3,5,7}/<1 | 1 | 1 | 1>");
        let u = SPCElement::parse("{1,2,3}/<1@1 x@3 | 1@2>", &g, 8).unwrap();
        assert_eq!(SPCElement::parse(&u.to_literal(&g), &g, 8).unwrap(), u);
        // the cross-section class is taken mod left multiplication
        assert_eq!(SPCElement::parse("2468/<x^3 1 x x^2>", &g, 8).unwrap(), s);
    }

    #[test]
    fn embedding_of_sigma4() {
        let g = z4();
        let s4 = SPCElement::parse("12345678/<11111111>", &g, 8);
        assert!(s4.is_err(), "compact weights need separators");
        let s4 = SPCElement::parse("12345678/<1 1 1 1 1 1 1 1>", &g, 8).unwrap();
        let e = cs_embedding(&s4, &g);
        assert_eq!(e.num_blocks(), 4);
        assert!(e.blocks().iter().all(|b| b.len() == 8));
        assert_eq!(cs_extract(&e, &g).unwrap(), s4);
    }

    #[test]
    fn disagreeing_cross_sections_contradict() {
        let g = GroupTable::cyclic(2);
        let a = SPCElement::parse("12/<1 1>", &g, 2).unwrap();
        let b = SPCElement::parse("12/<1 x>", &g, 2).unwrap();
        assert_eq!(spc_join(&a, &b, &g), RhElement::Contradiction);
        let bot = RhElement::Spc(SPCElement::bottom(2));
        assert_eq!(rh_join(&RhElement::Spc(a.clone()), &bot, &g), RhElement::Spc(a));
    }

    #[test]
    fn enumeration_count() {
        // sum over subsets of Bell numbers: 1 + 4*1 + 6*2 + 4*5 + 15
        assert_eq!(all_sp_elements(2, 2).len(), 52);
    }
}
