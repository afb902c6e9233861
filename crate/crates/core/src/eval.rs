//! Well-formed formulae, forward flows over an explored universe of states, Boolean
//! closure-operator relations, and bounded flow search.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::flow::{check_pair, Automaton, FlowCandidate};
use crate::gm::GMSystem;
use crate::group::{Gid, GroupTable};
use crate::lattice::{cs_embedding, cs_extract, rh_join, RhElement, SPCElement, SPElement};
use crate::matrix::RowMonomialMatrix;
use crate::semigroup::{scc_labels, FinSemigroup};

/// Formula over generator letters (by index).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wff {
    Empty,
    Letter(usize),
    Concat(Vec<Wff>),
    Loop(Box<Wff>),
}

impl Wff {
    /// Flattens nested concatenations and extracts roots of loop bodies.
    pub fn normalize(self) -> Wff {
        match self {
            Wff::Concat(items) => {
                let mut flat = Vec::new();
                for it in items {
                    match it.normalize() {
                        Wff::Concat(inner) => flat.extend(inner),
                        Wff::Empty => {}
                        w => flat.push(w),
                    }
                }
                match flat.len() {
                    0 => Wff::Empty,
                    1 => flat.pop().unwrap(),
                    _ => Wff::Concat(flat),
                }
            }
            Wff::Loop(body) => match body.normalize() {
                Wff::Empty => Wff::Empty,
                Wff::Concat(items) => {
                    let r = primitive_root(&items);
                    if r.len() == 1 {
                        Wff::Loop(Box::new(r[0].clone()))
                    } else {
                        Wff::Loop(Box::new(Wff::Concat(r.to_vec())))
                    }
                }
                w => Wff::Loop(Box::new(w)),
            },
            w => w,
        }
    }

    pub fn loop_of(body: Wff) -> Wff {
        Wff::Loop(Box::new(body)).normalize()
    }

    pub fn concat(items: Vec<Wff>) -> Wff {
        Wff::Concat(items).normalize()
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> WffDisplay<'a> {
        WffDisplay { w: self, names }
    }
}

fn primitive_root<T: PartialEq>(items: &[T]) -> &[T] {
    let n = items.len();
    for d in 1..n {
        if n % d == 0 && (d..n).all(|i| items[i] == items[i % d]) {
            return &items[..d];
        }
    }
    items
}

pub struct WffDisplay<'a> {
    w: &'a Wff,
    names: &'a [String],
}

impl fmt::Display for WffDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.w {
            Wff::Empty => write!(f, "1"),
            Wff::Letter(x) => write!(f, "{}", self.names.get(*x).map_or("?", String::as_str)),
            Wff::Concat(items) => {
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{}", it.display(self.names))?;
                }
                Ok(())
            }
            Wff::Loop(body) => match **body {
                Wff::Letter(_) => write!(f, "{}^w*", body.display(self.names)),
                _ => write!(f, "({})^w*", body.display(self.names)),
            },
        }
    }
}

/// Parses `b a^w*`, `(b a^{w+*})^{w+*}`, `(aa)^w*`. Letters are one alphabetic character
/// followed by digits and `_`-suffixes (`s1`, `i3_4`), or a `{name}` in braces.
pub fn parse_wff(text: &str, names: &[String]) -> Result<Wff> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let w = parse_seq(&chars, &mut pos, names)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(Error::Parse { pos, msg: format!("unexpected '{}'", chars[pos]) });
    }
    Ok(w.normalize())
}

fn skip_ws(c: &[char], pos: &mut usize) {
    while *pos < c.len() && c[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_seq(c: &[char], pos: &mut usize, names: &[String]) -> Result<Wff> {
    let mut items = Vec::new();
    loop {
        skip_ws(c, pos);
        if *pos >= c.len() || c[*pos] == ')' {
            break;
        }
        let mut atom = parse_atom(c, pos, names)?;
        while parse_loop_suffix(c, pos)? {
            atom = Wff::Loop(Box::new(atom));
        }
        items.push(atom);
    }
    Ok(Wff::Concat(items))
}

fn parse_atom(c: &[char], pos: &mut usize, names: &[String]) -> Result<Wff> {
    let start = *pos;
    match c[*pos] {
        '(' => {
            *pos += 1;
            let inner = parse_seq(c, pos, names)?;
            if *pos >= c.len() || c[*pos] != ')' {
                return Err(Error::Parse { pos: *pos, msg: "expected ')'".into() });
            }
            *pos += 1;
            Ok(inner)
        }
        '1' | 'ε' => {
            *pos += 1;
            Ok(Wff::Empty)
        }
        '{' => {
            let end = c[*pos..].iter().position(|&ch| ch == '}').ok_or(Error::Parse { pos: start, msg: "unclosed '{'".into() })?;
            let name: String = c[*pos + 1..*pos + end].iter().collect();
            *pos += end + 1;
            lookup(&name, names, start)
        }
        ch if ch.is_ascii_alphabetic() => {
            *pos += 1;
            loop {
                if *pos < c.len() && c[*pos].is_ascii_digit() {
                    *pos += 1;
                } else if *pos + 1 < c.len() && c[*pos] == '_' && c[*pos + 1].is_ascii_alphanumeric() {
                    *pos += 1;
                    while *pos < c.len() && c[*pos].is_ascii_alphanumeric() {
                        *pos += 1;
                    }
                } else {
                    break;
                }
            }
            let name: String = c[start..*pos].iter().collect();
            lookup(&name, names, start)
        }
        ch => Err(Error::Parse { pos: start, msg: format!("unexpected '{ch}'") }),
    }
}

fn lookup(name: &str, names: &[String], pos: usize) -> Result<Wff> {
    names
        .iter()
        .position(|n| n == name)
        .map(Wff::Letter)
        .ok_or(Error::Parse { pos, msg: format!("unknown letter '{name}'") })
}

/// Accepts `^w*`, `^w+*`, `^{w+*}`, `^{ω+*}` and the like.
fn parse_loop_suffix(c: &[char], pos: &mut usize) -> Result<bool> {
    if *pos >= c.len() || c[*pos] != '^' {
        return Ok(false);
    }
    let start = *pos;
    *pos += 1;
    let braced = *pos < c.len() && c[*pos] == '{';
    if braced {
        *pos += 1;
    }
    let mut body = String::new();
    while *pos < c.len() && matches!(c[*pos], 'w' | 'ω' | '+' | '*') {
        body.push(c[*pos]);
        *pos += 1;
    }
    if braced {
        if *pos >= c.len() || c[*pos] != '}' {
            return Err(Error::Parse { pos: *pos, msg: "expected '}'".into() });
        }
        *pos += 1;
    }
    let body = body.replace('ω', "w");
    if body == "w*" || body == "w+*" {
        Ok(true)
    } else {
        Err(Error::Parse { pos: start, msg: "expected a loop exponent ^w* or ^{w+*}".into() })
    }
}

/// Boolean relation on `n` indices, one bitset row per source.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CRel {
    pub rows: Vec<FixedBitSet>,
}

impl CRel {
    pub fn empty(n: usize) -> Self {
        CRel { rows: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.rows[i].insert(i);
        }
        r
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.rows[i].insert(j);
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.rows[i].is_clear()).collect()
    }
}

/// Boolean product: first `f`, then `g`.
pub fn rel_compose(f: &CRel, g: &CRel) -> CRel {
    let n = f.dim();
    let mut out = CRel::empty(n);
    for i in 0..n {
        for j in f.rows[i].ones() {
            out.rows[i].union_with(&g.rows[j]);
        }
    }
    out
}

/// Back flow: the identity on `Dom(f)`.
pub fn rel_backflow(f: &CRel) -> CRel {
    let mut out = CRel::empty(f.dim());
    for i in f.domain() {
        out.insert(i, i);
    }
    out
}

/// Kleene closure: `f ∩ Δ`.
pub fn rel_star(f: &CRel) -> CRel {
    let mut out = CRel::empty(f.dim());
    for i in 0..f.dim() {
        if f.contains(i, i) {
            out.insert(i, i);
        }
    }
    out
}

/// Idempotent power of `f` in the Boolean matrix monoid.
pub fn rel_omega(f: &CRel) -> CRel {
    let mut pows = vec![f.clone()];
    loop {
        let next = rel_compose(pows.last().unwrap(), f);
        if let Some(i) = pows.iter().position(|p| *p == next) {
            // f^(i+1) = f^(len+1): index i+1, period len-i
            let (index, period) = (i + 1, pows.len() - i);
            let k = index.div_ceil(period) * period;
            return pows[k - 1].clone();
        }
        pows.push(next);
    }
}

/// Loop: `f^ω f^*`.
pub fn rel_loop(f: &CRel) -> CRel {
    rel_compose(&rel_omega(f), &rel_star(f))
}

/// Relation on the points of `G x B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointRel {
    pub succ: Vec<FixedBitSet>,
}

impl PointRel {
    fn identity(n: usize) -> Self {
        let mut succ = vec![FixedBitSet::with_capacity(n); n];
        for (p, s) in succ.iter_mut().enumerate() {
            s.insert(p);
        }
        PointRel { succ }
    }

    fn of_matrix(g: &GMSystem, m: &RowMonomialMatrix) -> Self {
        let n = g.num_points();
        let mut succ = vec![FixedBitSet::with_capacity(n); n];
        for (p, s) in succ.iter_mut().enumerate() {
            if let Some((h, b)) = m.act(&g.group, g.unpoint(p)) {
                s.insert(g.point(h, b));
            }
        }
        PointRel { succ }
    }

    fn then(&self, o: &PointRel) -> PointRel {
        let succ = self
            .succ
            .iter()
            .map(|row| {
                let mut r = FixedBitSet::with_capacity(row.len());
                for q in row.ones() {
                    r.union_with(&o.succ[q]);
                }
                r
            })
            .collect();
        PointRel { succ }
    }

    /// Reflexive-transitive closure.
    fn closure(&self) -> PointRel {
        let n = self.succ.len();
        let mut out = PointRel::identity(n);
        for p in 0..n {
            let mut stack = vec![p];
            while let Some(q) = stack.pop() {
                for r in self.succ[q].ones() {
                    if !out.succ[p].contains(r) {
                        out.succ[p].insert(r);
                        stack.push(r);
                    }
                }
            }
        }
        out
    }
}

/// Indexed states, excluding the contradiction; grows up to `bound`.
#[derive(Clone, Debug)]
pub struct StateUniverse {
    pub states: Vec<SPCElement>,
    index: HashMap<SPCElement, usize>,
    pub bound: usize,
}

impl StateUniverse {
    /// Seeded with the points `b/<1>` in order of `b`.
    pub fn with_points(b_size: usize, bound: usize) -> Result<Self> {
        let mut u = StateUniverse { states: Vec::new(), index: HashMap::new(), bound };
        for b in 0..b_size {
            u.intern(&SPCElement::point(b_size, b))?;
        }
        Ok(u)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, s: &SPCElement) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn intern(&mut self, s: &SPCElement) -> Result<usize> {
        if let Some(&i) = self.index.get(s) {
            return Ok(i);
        }
        if self.states.len() >= self.bound {
            return Err(Error::UniverseOverflow { bound: self.bound });
        }
        let i = self.states.len();
        self.states.push(s.clone());
        self.index.insert(s.clone(), i);
        Ok(i)
    }
}

/// Image of an SPC under one letter: block images, merged where they overlap.
pub fn letter_image(group: &GroupTable, m: &RowMonomialMatrix, l: &SPCElement) -> RhElement {
    let n = l.b_size();
    let mut acc = RhElement::Spc(SPCElement::bottom(n));
    for block in l.blocks() {
        let mut entries: Vec<Option<(u32, Gid)>> = vec![None; n];
        for (b, f) in block {
            if let Some((b2, w)) = m.row(b) {
                let v = group.mul(f, w);
                match entries[b2] {
                    None => entries[b2] = Some((0, v)),
                    Some((_, v0)) if v0 == v => {}
                    Some(_) => return RhElement::Contradiction,
                }
            }
        }
        if entries.iter().any(Option::is_some) {
            let img = RhElement::Spc(SPCElement::from_entries(group, &entries));
            acc = rh_join(&acc, &img, group);
            if acc == RhElement::Contradiction {
                return acc;
            }
        }
    }
    acc
}

/// Forward flows of formulae on a GM system, memoizing point relations.
pub struct Evaluator<'a> {
    pub g: &'a GMSystem,
    pub universe: StateUniverse,
    point_rels: HashMap<Wff, Rc<PointRel>>,
    images: HashMap<(usize, usize), RhElement>,
}

impl<'a> Evaluator<'a> {
    pub fn new(g: &'a GMSystem, bound: usize) -> Result<Self> {
        if bound < g.dim {
            return Err(Error::UniverseOverflow { bound });
        }
        Ok(Evaluator { g, universe: StateUniverse::with_points(g.dim, bound)?, point_rels: HashMap::new(), images: HashMap::new() })
    }

    pub fn parse(&self, text: &str) -> Result<Wff> {
        parse_wff(text, &self.g.names)
    }

    fn note(&mut self, r: &RhElement) -> Result<()> {
        if let RhElement::Spc(s) = r {
            self.universe.intern(s)?;
        }
        Ok(())
    }

    /// `P_w`: letters act by their graphs, concatenation composes, loops close reflexively
    /// and transitively, the empty word is the identity.
    pub fn point_rel(&mut self, w: &Wff) -> Rc<PointRel> {
        if let Some(r) = self.point_rels.get(w) {
            return r.clone();
        }
        let r = match w {
            Wff::Empty => PointRel::identity(self.g.num_points()),
            Wff::Letter(x) => PointRel::of_matrix(self.g, &self.g.generators()[*x]),
            Wff::Concat(items) => {
                let mut acc = PointRel::identity(self.g.num_points());
                for it in items {
                    acc = acc.then(&self.point_rel(it));
                }
                acc
            }
            Wff::Loop(body) => self.point_rel(body).closure(),
        };
        let r = Rc::new(r);
        self.point_rels.insert(w.clone(), r.clone());
        r
    }

    pub fn forward(&mut self, w: &Wff, l: &RhElement) -> Result<RhElement> {
        let RhElement::Spc(s) = l else { return Ok(RhElement::Contradiction) };
        let out = match w {
            Wff::Empty => l.clone(),
            Wff::Letter(x) => {
                let li = self.universe.intern(s)?;
                if let Some(r) = self.images.get(&(*x, li)) {
                    return Ok(r.clone());
                }
                let r = letter_image(&self.g.group, &self.g.generators()[*x], s);
                self.images.insert((*x, li), r.clone());
                r
            }
            Wff::Concat(items) => {
                let mut cur = l.clone();
                for it in items {
                    cur = self.forward(it, &cur)?;
                    if cur == RhElement::Contradiction {
                        break;
                    }
                }
                cur
            }
            Wff::Loop(body) => self.loop_forward(body, s)?,
        };
        self.note(&out)?;
        Ok(out)
    }

    /// Ascending fixpoint `m <- m ∨ m·σ`, then block merging until stable: (i) the image of
    /// each block under `P_σ` joins one block; (ii) each strongly connected set of points
    /// of `P_σ` inside the support that contains a point with two or more images becomes
    /// one block. Weight clashes give the contradiction.
    fn loop_forward(&mut self, body: &Wff, l: &SPCElement) -> Result<RhElement> {
        let group = self.g.group.clone();
        let p = self.point_rel(body);
        let mut m = RhElement::Spc(l.clone());
        loop {
            loop {
                let f = self.forward(body, &m)?;
                let j = rh_join(&m, &f, &group);
                if j == m {
                    break;
                }
                m = j;
                if m == RhElement::Contradiction {
                    return Ok(m);
                }
                self.note(&m)?;
            }
            let RhElement::Spc(cur) = &m else { return Ok(m) };
            let merged = merge_blocks(&cs_embedding(cur, &group), &p);
            let next = match cs_extract(&merged, &group) {
                Ok(s) => RhElement::Spc(s),
                Err(_) => return Ok(RhElement::Contradiction),
            };
            if next == m {
                return Ok(m);
            }
            m = next;
            self.note(&m)?;
        }
    }

    pub fn forward_text(&mut self, w: &str, l: &str) -> Result<RhElement> {
        let w = self.parse(w)?;
        let l = SPCElement::parse(l, &self.g.group, self.g.dim)?;
        self.forward(&w, &RhElement::Spc(l))
    }

    /// `(l, m) ∈ f_x` on the current universe.
    pub fn free_flow_rel(&self, x: usize) -> CRel {
        free_flow_rel(self.g, x, &self.universe)
    }

    /// States not fixed by the product of the back flows of all letter relations.
    pub fn vacuum_diagnostic(&self) -> Vec<usize> {
        let n = self.universe.len();
        let mut dom = FixedBitSet::with_capacity(n);
        dom.insert_range(..);
        for x in 0..self.g.s.num_generators() {
            let f = self.free_flow_rel(x);
            let mut d = FixedBitSet::with_capacity(n);
            for i in f.domain() {
                d.insert(i);
            }
            dom.intersect_with(&d);
        }
        (0..n).filter(|&i| !dom.contains(i)).collect()
    }

    /// Transformation of the universe induced by `w` (states leaving the universe map to `None`).
    pub fn transformation(&mut self, w: &Wff) -> Result<Vec<Option<usize>>> {
        let n = self.universe.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let s = RhElement::Spc(self.universe.states[i].clone());
            let r = self.forward(w, &s)?;
            out.push(r.spc().and_then(|s| self.universe.get(s)));
        }
        Ok(out)
    }
}

fn merge_blocks(e: &SPElement, p: &PointRel) -> SPElement {
    let n = e.num_points();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    fn unite(p: &mut [usize], a: usize, b: usize) {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            p[ra.max(rb)] = ra.min(rb);
        }
    }
    for bl in e.blocks() {
        for w in bl.windows(2) {
            unite(&mut parent, w[0], w[1]);
        }
        // (i) the image of one block lies in one block
        let mut first = None;
        for &q in &bl {
            for r in p.succ[q].ones().filter(|&r| e.contains(r)) {
                match first {
                    None => first = Some(r),
                    Some(f) => unite(&mut parent, f, r),
                }
            }
        }
    }
    // (ii) return paths through spreading points
    let edges: Vec<(usize, usize)> = (0..n)
        .filter(|&q| e.contains(q))
        .flat_map(|q| p.succ[q].ones().filter(|&r| e.contains(r)).map(move |r| (q, r)).collect::<Vec<_>>())
        .collect();
    let labels = scc_labels(n, edges.into_iter());
    let mut comps: HashMap<usize, Vec<usize>> = HashMap::new();
    for q in (0..n).filter(|&q| e.contains(q)) {
        comps.entry(labels[q]).or_default().push(q);
    }
    for comp in comps.values() {
        if comp.len() >= 2 && comp.iter().any(|&q| p.succ[q].count_ones(..) >= 2) {
            for w in comp.windows(2) {
                unite(&mut parent, w[0], w[1]);
            }
        }
    }
    let labels: Vec<Option<u32>> =
        (0..n).map(|q| e.contains(q).then(|| find(&mut parent, q) as u32)).collect();
    SPElement::from_labels(e.g_order(), e.b_size(), &labels)
}

fn domain_set(s: &SPCElement) -> FixedBitSet {
    let mut d = FixedBitSet::with_capacity(s.b_size());
    for b in s.domain() {
        d.insert(b);
    }
    d
}

/// `(l, m) ∈ f_x` for all pairs of the universe. Pairs whose target misses part of the
/// image support are skipped before the full check.
pub fn free_flow_rel(g: &GMSystem, x: usize, u: &StateUniverse) -> CRel {
    let domains: Vec<FixedBitSet> = u.states.iter().map(domain_set).collect();
    free_flow_rel_with(g, x, u, &domains)
}

fn free_flow_rel_with(g: &GMSystem, x: usize, u: &StateUniverse, domains: &[FixedBitSet]) -> CRel {
    let n = u.len();
    let m = &g.generators()[x];
    let mut r = CRel::empty(n);
    for i in 0..n {
        let mut img = FixedBitSet::with_capacity(g.dim);
        for b in domains[i].ones() {
            if let Some((b2, _)) = m.row(b) {
                img.insert(b2);
            }
        }
        for j in 0..n {
            if img.is_subset(&domains[j]) && check_pair(&g.group, m, &u.states[i], &u.states[j]).is_ok() {
                r.insert(i, j);
            }
        }
    }
    r
}

/// Letters outside `I(S)`.
pub fn hull_letters(g: &GMSystem) -> Vec<usize> {
    (0..g.s.num_generators()).filter(|&k| !g.generator_in_ideal(k)).collect()
}

/// Exploration formulae: every letter, then loops of primitive non-ideal words of length up to
/// `word_length`, then (when `nested`) `(x y^w*)^w*` for distinct non-ideal `x, y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExploreOptions {
    pub bound: usize,
    pub word_length: usize,
    pub nested: bool,
    /// Maximum number of formula applications from a point; `None` closes fully.
    pub depth: Option<usize>,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { bound: 100_000, word_length: 2, nested: true, depth: Some(3) }
    }
}

pub fn exploration_wffs(g: &GMSystem, word_length: usize, nested: bool) -> Vec<Wff> {
    let mut out: Vec<Wff> = (0..g.s.num_generators()).map(Wff::Letter).collect();
    let hl = hull_letters(g);
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..word_length {
        words = words.iter().flat_map(|w| hl.iter().map(move |&x| [w.clone(), vec![x]].concat())).collect();
        for w in &words {
            if primitive_root(w).len() == w.len() {
                out.push(Wff::loop_of(Wff::concat(w.iter().map(|&x| Wff::Letter(x)).collect())));
            }
        }
    }
    if nested {
        for &x in &hl {
            for &y in hl.iter().filter(|&&y| y != x) {
                out.push(Wff::loop_of(Wff::concat(vec![Wff::Letter(x), Wff::loop_of(Wff::Letter(y))])));
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|w| seen.insert(w.clone()));
    out
}

/// Closure of the points under the exploration formulae, breadth first.
pub fn explore_states(g: &GMSystem, opts: &ExploreOptions) -> Result<StateUniverse> {
    let mut ev = Evaluator::new(g, opts.bound)?;
    let wffs = exploration_wffs(g, opts.word_length, opts.nested);
    // Depth of a state: formula applications needed to reach it. Intermediate states met
    // during an application get the depth of its result.
    let mut depth: Vec<usize> = vec![0; ev.universe.len()];
    let mut i = 0;
    while i < ev.universe.len() {
        if opts.depth.is_some_and(|d| depth[i] >= d) {
            i += 1;
            continue;
        }
        let s = RhElement::Spc(ev.universe.states[i].clone());
        for w in &wffs {
            ev.forward(w, &s)?;
            depth.resize(ev.universe.len(), depth[i] + 1);
        }
        i += 1;
    }
    Ok(ev.universe)
}

/// Evaluation transformation semigroup generated by the letters on the explored states.
pub fn evaluation_semigroup(g: &GMSystem, u: &StateUniverse) -> Result<FinSemigroup<RowMonomialMatrix>> {
    let mut ev = Evaluator { g, universe: u.clone(), point_rels: HashMap::new(), images: HashMap::new() };
    let mut gens = Vec::new();
    for x in 0..g.s.num_generators() {
        let t = ev.transformation(&Wff::Letter(x))?;
        gens.push(RowMonomialMatrix::from_rows(t.iter().map(|q| q.map(|q| (q as u32, 0))).collect()));
    }
    FinSemigroup::generate(gens, GroupTable::trivial(), 1 << 22)
}

/// Family of automata searched by [`flow_search`].
#[derive(Clone, Debug)]
pub enum Family {
    /// `RZ(k)^1` for `k = 1..=K`.
    RzUpTo(usize),
    /// A user automaton; covers range over all of its letters.
    Given(Automaton),
}

impl Family {
    pub fn parse(text: &str) -> Result<Self> {
        let k = text
            .strip_prefix("rz:")
            .and_then(|k| k.parse::<usize>().ok())
            .ok_or_else(|| Error::Input(format!("family '{text}' is not of the form rz:K")))?;
        Ok(Family::RzUpTo(k))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub universe: usize,
    pub viable: usize,
    pub distinct_letters: usize,
    pub nodes: u64,
    pub automata_tried: usize,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found { candidate: FlowCandidate, stats: SearchStats },
    Exhausted { stats: SearchStats },
}

/// Letter key: the matrix with weights normalized by a global right factor; letters with the
/// same key have the same flow relation when `G` is abelian.
fn letter_key(m: &RowMonomialMatrix, g: &GroupTable) -> RowMonomialMatrix {
    match m.weights().next() {
        Some(w0) if g.is_abelian() => {
            let c = g.inv(w0);
            RowMonomialMatrix::from_rows(m.rows().iter().map(|e| e.map(|(col, w)| (col, g.mul(w, c)))).collect())
        }
        _ => m.clone(),
    }
}

struct SearchCtx {
    n: usize,
    /// Flow relation per distinct letter.
    rels: Vec<CRel>,
    /// `l·x` flows into the bottom.
    kills: Vec<FixedBitSet>,
    /// Transposed relations: sources flowing into each state.
    cols: Vec<Vec<FixedBitSet>>,
    /// States stable under each letter.
    diag: Vec<FixedBitSet>,
    /// States with a target (or the sink) under every letter, to a fixpoint.
    viable: FixedBitSet,
    domains: Vec<FixedBitSet>,
    b_size: usize,
}

/// First assignment in canonical order passing [`verify_complete_flow`] over the family.
pub fn flow_search(g: &GMSystem, family: &Family, opts: &ExploreOptions) -> Result<SearchOutcome> {
    let u = explore_states(g, opts)?;
    flow_search_in(g, family, &u)
}

pub fn flow_search_in(g: &GMSystem, family: &Family, u: &StateUniverse) -> Result<SearchOutcome> {
    let mut key_of: HashMap<RowMonomialMatrix, usize> = HashMap::new();
    let mut letter_class = Vec::new();
    let mut reps = Vec::new();
    for (x, m) in g.generators().iter().enumerate() {
        let k = letter_key(m, &g.group);
        let next = key_of.len();
        let c = *key_of.entry(k).or_insert_with(|| {
            reps.push(x);
            next
        });
        letter_class.push(c);
    }
    let n = u.len();
    let bottom = SPCElement::bottom(g.dim);
    let domains: Vec<FixedBitSet> = u.states.iter().map(domain_set).collect();
    // Letters with equal relations are interchangeable in the search.
    let mut rel_of: HashMap<(CRel, FixedBitSet), usize> = HashMap::new();
    let mut rels = Vec::new();
    let mut kills = Vec::new();
    let mut class_rel = Vec::with_capacity(reps.len());
    for &x in &reps {
        let rel = free_flow_rel_with(g, x, u, &domains);
        let mut k = FixedBitSet::with_capacity(n);
        for i in 0..n {
            if check_pair(&g.group, &g.generators()[x], &u.states[i], &bottom).is_ok() {
                k.insert(i);
            }
        }
        let next = rel_of.len();
        let id = *rel_of.entry((rel.clone(), k.clone())).or_insert_with(|| {
            rels.push(rel);
            kills.push(k);
            next
        });
        class_rel.push(id);
    }
    let letter_class: Vec<usize> = letter_class.iter().map(|&c| class_rel[c]).collect();
    let cols = rels
        .iter()
        .map(|r| {
            let mut t = vec![FixedBitSet::with_capacity(n); n];
            for (i, row) in r.rows.iter().enumerate() {
                for j in row.ones() {
                    t[j].insert(i);
                }
            }
            t
        })
        .collect();
    let diag = rels.iter().map(|r| rel_star(r).domain().into_iter().collect()).collect();
    let mut viable = FixedBitSet::with_capacity(n);
    viable.insert_range(..);
    loop {
        let before = viable.count_ones(..);
        for l in 0..n {
            let ok = (0..rels.len()).all(|c| kills[c].contains(l) || !rels[c].rows[l].is_disjoint(&viable));
            viable.set(l, ok);
        }
        if viable.count_ones(..) == before {
            break;
        }
    }
    let ctx = SearchCtx { n, rels, kills, cols, diag, viable, domains, b_size: g.dim };
    let mut stats = SearchStats { universe: n, viable: ctx.viable.count_ones(..), distinct_letters: ctx.rels.len(), ..Default::default() };
    let automata: Vec<(Automaton, bool)> = match family {
        Family::RzUpTo(k) => (1..=*k).map(|k| (Automaton::rz_one(k), true)).collect(),
        Family::Given(a) => vec![(a.clone(), false)],
    };
    for (aut, symmetric) in automata {
        stats.automata_tried += 1;
        let mut assign = Vec::new();
        if let Some(covers) = search_rec(&ctx, &aut, symmetric, &mut assign, &mut stats.nodes) {
            let cover = letter_class.iter().map(|&c| covers[c]).collect();
            let assignment = assign.iter().map(|&i| u.states[i].clone()).collect();
            let candidate = FlowCandidate::new(aut, cover, assignment)?;
            debug_assert!(crate::flow::verify_complete_flow(g, &candidate).is_valid());
            return Ok(SearchOutcome::Found { candidate, stats });
        }
    }
    Ok(SearchOutcome::Exhausted { stats })
}

/// Feasible cover letters for a distinct letter under a partial assignment. A transition to
/// an unassigned state needs a common target for every assigned source.
fn feasible_covers(ctx: &SearchCtx, aut: &Automaton, assign: &[usize], c: usize) -> Vec<usize> {
    let rel = &ctx.rels[c];
    (0..aut.letters.len())
        .filter(|&t| {
            let mut pending: Vec<(usize, FixedBitSet)> = Vec::new();
            for (q, &l) in assign.iter().enumerate() {
                match aut.step(q, t) {
                    None => {
                        if !ctx.kills[c].contains(l) {
                            return false;
                        }
                    }
                    Some(q2) if q2 < assign.len() => {
                        if !rel.contains(l, assign[q2]) {
                            return false;
                        }
                    }
                    Some(q2) => {
                        match pending.iter_mut().find(|(t, _)| *t == q2) {
                            Some((_, e)) => {
                                e.intersect_with(&rel.rows[l]);
                                if e.is_clear() {
                                    return false;
                                }
                            }
                            None if rel.rows[l].is_clear() => return false,
                            None => pending.push((q2, rel.rows[l].clone())),
                        }
                    }
                }
            }
            true
        })
        .collect()
}

fn search_rec(ctx: &SearchCtx, aut: &Automaton, symmetric: bool, assign: &mut Vec<usize>, nodes: &mut u64) -> Option<Vec<usize>> {
    *nodes += 1;
    let alive: Vec<Vec<usize>> = (0..ctx.rels.len()).map(|c| feasible_covers(ctx, aut, assign, c)).collect();
    if alive.iter().any(Vec::is_empty) {
        return None;
    }
    let j = assign.len();
    if j == aut.num_states() {
        let mut cov = FixedBitSet::with_capacity(ctx.b_size);
        for &i in assign.iter() {
            cov.union_with(&ctx.domains[i]);
        }
        return (cov.count_ones(..) == ctx.b_size).then(|| alive.iter().map(|a| a[0]).collect());
    }
    // Next states admissible for some surviving cover of every letter, ignoring constraints
    // toward states assigned later.
    let mut cand = ctx.viable.clone();
    if symmetric {
        cand.remove_range(..assign.last().copied().unwrap_or(0));
    }
    for (c, covers) in alive.iter().enumerate() {
        let mut any = FixedBitSet::with_capacity(ctx.n);
        for &t in covers {
            let mut ok = FixedBitSet::with_capacity(ctx.n);
            match aut.step(j, t) {
                None => ok.union_with(&ctx.kills[c]),
                Some(q2) if q2 < j => ok.union_with(&ctx.cols[c][assign[q2]]),
                Some(q2) if q2 == j => ok.union_with(&ctx.diag[c]),
                Some(q2) => {
                    // l must share a target with the earlier sources of the same transition
                    let mut common: Option<FixedBitSet> = None;
                    for (q, &l) in assign.iter().enumerate() {
                        if aut.step(q, t) == Some(q2) {
                            let r = &ctx.rels[c].rows[l];
                            common = Some(common.map_or_else(|| r.clone(), |mut x| {
                                x.intersect_with(r);
                                x
                            }));
                        }
                    }
                    match common {
                        Some(m) if m.count_ones(..) <= 64 => {
                            for t2 in m.ones() {
                                ok.union_with(&ctx.cols[c][t2]);
                            }
                        }
                        _ => ok.union_with(&ctx.viable),
                    }
                }
            }
            for (q, &l) in assign.iter().enumerate() {
                if aut.step(q, t) == Some(j) {
                    ok.intersect_with(&ctx.rels[c].rows[l]);
                }
            }
            any.union_with(&ok);
        }
        cand.intersect_with(&any);
        if cand.is_clear() {
            return None;
        }
    }
    for i in cand.ones() {
        assign.push(i);
        if let Some(r) = search_rec(ctx, aut, symmetric, assign, nodes) {
            return Some(r);
        }
        assign.pop();
    }
    None
}
