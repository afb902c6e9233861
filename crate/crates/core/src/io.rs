//! Line-oriented input format.
//!
//! ```text
//! # comment
//! [group]
//! cyclic 4 x            # or `signs`, or `table` followed by rows of 0-based ids
//! [action dim=8]
//! [gen a]
//! 1 -> 3, 2 -> 4, 7 -> 1, 8 -> 2
//! [gen s1]
//! 1 -> 2, 3 -> x*4, 5 -> x^2*6, 7 -> x^3*8
//! [ideal]               # rows b of C over group words and 0; adds every (a, g, b)
//! 1 1 0 0
//! [automaton]
//! rz 4                  # or `one-state`, or `states ...`, `letters ...`, `LETTER: p -> q, ...`
//! [flow]
//! cover a=1, s1=c1, *=c4
//! 1 = 2468/<1 x x^2 x^3>
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::flow::{Automaton, FlowCandidate};
use crate::gm::{gm_from_generators, gm_from_generators_capped, GMSystem, DEFAULT_CAP};
use crate::group::{Gid, GroupTable};
use crate::lattice::SPCElement;
use crate::matrix::RowMonomialMatrix;
use crate::rees::{ReesElt, ReesMatrixSemigroup};
use crate::smallmonoid::SmallMonoid;

#[derive(Clone, Debug, Default)]
pub struct FlowSpec {
    /// `(letter of S, automaton letter)`; `*` is the default.
    pub cover: Vec<(String, String)>,
    /// `(automaton state, SPC literal)`.
    pub states: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct Document {
    pub group: GroupTable,
    pub dim: usize,
    pub gens: Vec<(String, RowMonomialMatrix)>,
    pub ideal: Option<ReesMatrixSemigroup>,
    pub automaton: Option<Automaton>,
    pub flow: Option<FlowSpec>,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Input(format!("line {}: {}", line + 1, msg.into()))
}

#[derive(PartialEq)]
enum Section {
    None,
    Group,
    Action,
    Gen,
    Ideal,
    Automaton,
    Flow,
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut section = Section::None;
    let mut group_lines: Vec<(usize, String)> = Vec::new();
    let mut dim: Option<usize> = None;
    let mut gen_text: Vec<(usize, String, String)> = Vec::new();
    let mut ideal_rows: Vec<(usize, String)> = Vec::new();
    let mut aut_lines: Vec<(usize, String)> = Vec::new();
    let mut flow_lines: Vec<(usize, String)> = Vec::new();
    let mut seen_ideal = false;
    let mut seen_flow = false;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(head) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let mut parts = head.split_whitespace();
            section = match parts.next() {
                Some("group") => Section::Group,
                Some("action") => {
                    let d = parts
                        .next()
                        .and_then(|p| p.strip_prefix("dim="))
                        .and_then(|d| d.parse().ok())
                        .ok_or_else(|| err(ln, "expected [action dim=N]"))?;
                    dim = Some(d);
                    Section::Action
                }
                Some("gen") => {
                    let name = parts.next().ok_or_else(|| err(ln, "expected [gen NAME]"))?;
                    gen_text.push((ln, name.to_string(), String::new()));
                    Section::Gen
                }
                Some("ideal") => {
                    seen_ideal = true;
                    Section::Ideal
                }
                Some("automaton") => Section::Automaton,
                Some("flow") => {
                    seen_flow = true;
                    Section::Flow
                }
                _ => return Err(err(ln, format!("unknown section [{head}]"))),
            };
            continue;
        }
        match section {
            Section::None | Section::Action => return Err(err(ln, "content outside a section")),
            Section::Group => group_lines.push((ln, line.to_string())),
            Section::Gen => {
                let g = gen_text.last_mut().expect("inside [gen]");
                if !g.2.is_empty() {
                    g.2.push(',');
                }
                g.2.push_str(line);
            }
            Section::Ideal => ideal_rows.push((ln, line.to_string())),
            Section::Automaton => aut_lines.push((ln, line.to_string())),
            Section::Flow => flow_lines.push((ln, line.to_string())),
        }
    }
    let group = parse_group(&group_lines)?;
    let dim = dim.ok_or_else(|| Error::Input("missing [action dim=N]".into()))?;
    let mut gens = Vec::new();
    for (ln, name, body) in gen_text {
        if gens.iter().any(|(n, _)| *n == name) {
            return Err(err(ln, format!("duplicate generator '{name}'")));
        }
        gens.push((name, parse_matrix(&body, &group, dim).map_err(|e| err(ln, e.to_string()))?));
    }
    let ideal = if seen_ideal { Some(parse_ideal(&ideal_rows, &group, dim)?) } else { None };
    let automaton = if aut_lines.is_empty() { None } else { Some(parse_automaton(&aut_lines)?) };
    let flow = if seen_flow { Some(parse_flow(&flow_lines)?) } else { None };
    Ok(Document { group, dim, gens, ideal, automaton, flow })
}

fn parse_group(lines: &[(usize, String)]) -> Result<GroupTable> {
    let Some((ln, first)) = lines.first() else { return Err(Error::Input("missing [group]".into())) };
    let words: Vec<&str> = first.split_whitespace().collect();
    match words.as_slice() {
        ["signs"] => Ok(GroupTable::z2_signs()),
        ["cyclic", n] | ["cyclic", n, _] => {
            let n: usize = n.parse().map_err(|_| err(*ln, "cyclic order must be a number"))?;
            if n == 0 {
                return Err(err(*ln, "cyclic order must be positive"));
            }
            Ok(GroupTable::cyclic_named(n, words.get(2).copied().unwrap_or("x")))
        }
        ["table"] | ["table", ..] => {
            let labels = words.iter().position(|w| *w == "labels").map(|i| words[i + 1..].iter().map(|s| s.to_string()).collect());
            let table = lines[1..]
                .iter()
                .map(|(ln, l)| {
                    l.split_whitespace()
                        .map(|t| t.parse::<Gid>().map_err(|_| err(*ln, "table entries are element ids")))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            GroupTable::from_table(table, labels)
        }
        _ => Err(err(*ln, "expected `cyclic N [GEN]`, `signs` or `table [labels ...]`")),
    }
}

/// `b -> w*b'` transitions, comma separated, 1-based; `-b'` abbreviates `-1*b'`.
pub fn parse_matrix(body: &str, group: &GroupTable, dim: usize) -> Result<RowMonomialMatrix> {
    let mut rows: Vec<Option<(u32, Gid)>> = vec![None; dim];
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty() && *p != "0") {
        let (src, dst) = part.split_once("->").ok_or_else(|| Error::Input(format!("expected 'b -> w*c' in '{part}'")))?;
        let b = parse_index(src.trim(), dim)?;
        let dst = dst.trim();
        let (w, c) = match dst.rsplit_once('*') {
            Some((w, c)) => (group.parse_word(w)?, c.trim()),
            None => match dst.strip_prefix('-') {
                Some(c) => (group.parse_word("-1")?, c.trim()),
                None => (group.id(), dst),
            },
        };
        let c = parse_index(c, dim)?;
        if rows[b].is_some() {
            return Err(Error::Input(format!("row {} given twice", b + 1)));
        }
        rows[b] = Some((c as u32, w));
    }
    Ok(RowMonomialMatrix::from_rows(rows))
}

fn parse_index(s: &str, dim: usize) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(i) if (1..=dim).contains(&i) => Ok(i - 1),
        _ => Err(Error::Input(format!("'{s}' is not an index in 1..={dim}"))),
    }
}

fn parse_ideal(rows: &[(usize, String)], group: &GroupTable, dim: usize) -> Result<ReesMatrixSemigroup> {
    if rows.len() != dim {
        return Err(Error::Input(format!("[ideal] needs {dim} rows, found {}", rows.len())));
    }
    let c = rows
        .iter()
        .map(|(ln, l)| {
            l.split_whitespace()
                .map(|t| if t == "0" { Ok(None) } else { group.parse_word(t).map(Some).map_err(|e| err(*ln, e.to_string())) })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let a_size = c.first().map_or(0, Vec::len);
    ReesMatrixSemigroup::new(group.clone(), a_size, dim, c)
}

fn parse_automaton(lines: &[(usize, String)]) -> Result<Automaton> {
    let (ln, first) = &lines[0];
    let words: Vec<&str> = first.split_whitespace().collect();
    match words.as_slice() {
        ["one-state"] => return Ok(Automaton::one_state()),
        ["rz", k] => {
            let k: usize = k.parse().map_err(|_| err(*ln, "rz needs a number"))?;
            return Ok(Automaton::rz_one(k));
        }
        _ => {}
    }
    let mut states: Vec<String> = Vec::new();
    let mut letters: Vec<String> = Vec::new();
    let mut rows: Vec<(usize, String, String)> = Vec::new();
    for (ln, l) in lines {
        if let Some(r) = l.strip_prefix("states") {
            states = r.split_whitespace().map(String::from).collect();
        } else if let Some(r) = l.strip_prefix("letters") {
            letters = r.split_whitespace().map(String::from).collect();
        } else if let Some((x, body)) = l.split_once(':') {
            rows.push((*ln, x.trim().to_string(), body.to_string()));
        } else {
            return Err(err(*ln, "expected `states`, `letters` or `LETTER: p -> q, ...`"));
        }
    }
    let idx = |names: &[String], s: &str, ln: usize| names.iter().position(|n| n == s).ok_or_else(|| err(ln, format!("unknown name '{s}'")));
    let mut delta = vec![vec![None; states.len()]; letters.len()];
    for (ln, x, body) in rows {
        let xi = idx(&letters, &x, ln)?;
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (p, q) = part.split_once("->").ok_or_else(|| err(ln, format!("expected 'p -> q' in '{part}'")))?;
            delta[xi][idx(&states, p.trim(), ln)?] = Some(idx(&states, q.trim(), ln)?);
        }
    }
    Automaton::new(states, letters, delta)
}

fn parse_flow(lines: &[(usize, String)]) -> Result<FlowSpec> {
    let mut spec = FlowSpec::default();
    for (ln, l) in lines {
        if let Some(r) = l.strip_prefix("cover") {
            for part in r.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (x, t) = part.split_once('=').ok_or_else(|| err(*ln, format!("expected 'x=letter' in '{part}'")))?;
                spec.cover.push((x.trim().to_string(), t.trim().to_string()));
            }
        } else if let Some((q, lit)) = l.split_once('=') {
            spec.states.push((q.trim().to_string(), lit.trim().to_string()));
        } else {
            return Err(err(*ln, "expected `cover ...` or `STATE = SPC`"));
        }
    }
    Ok(spec)
}

/// Letter names of the ideal triple `(a, g, b)`, 1-based.
pub fn ideal_letter_name(group: &GroupTable, x: ReesElt) -> String {
    match x {
        ReesElt::T(a, g, b) if g == group.id() => format!("i{}_{}", a + 1, b + 1),
        ReesElt::T(a, g, b) => format!("i{}_{}_g{}", a + 1, b + 1, g),
        ReesElt::Zero => "0".into(),
    }
}

impl Document {
    /// Generators, then every ideal triple when an `[ideal]` section is present.
    pub fn letters(&self) -> (Vec<String>, Vec<RowMonomialMatrix>) {
        let mut names: Vec<String> = self.gens.iter().map(|(n, _)| n.clone()).collect();
        let mut mats: Vec<RowMonomialMatrix> = self.gens.iter().map(|(_, m)| m.clone()).collect();
        if let Some(r) = &self.ideal {
            for x in r.elements() {
                if matches!(x, ReesElt::T(..)) {
                    names.push(ideal_letter_name(&self.group, x));
                    mats.push(r.as_matrix(x));
                }
            }
        }
        (names, mats)
    }

    pub fn system(&self) -> Result<GMSystem> {
        self.system_capped(DEFAULT_CAP)
    }

    pub fn system_capped(&self, cap: usize) -> Result<GMSystem> {
        let (names, mats) = self.letters();
        if mats.is_empty() {
            return Err(Error::Input("no generators".into()));
        }
        let s = if cap == DEFAULT_CAP { gm_from_generators(&self.group, self.dim, &mats)? } else { gm_from_generators_capped(&self.group, self.dim, &mats, cap)? };
        Ok(s.with_names(names))
    }

    /// The `[gen]` sections are the units, `[ideal]` the structure matrix.
    pub fn small_monoid(&self) -> Result<SmallMonoid> {
        let r = self.ideal.clone().ok_or_else(|| Error::Input("a small monoid needs an [ideal] section".into()))?;
        SmallMonoid::new(r, self.gens.iter().map(|(_, m)| m.clone()).collect(), self.gens.iter().map(|(n, _)| n.clone()).collect())
    }

    pub fn flow_candidate(&self, g: &GMSystem) -> Result<FlowCandidate> {
        let aut = self.automaton.clone().ok_or_else(|| Error::Input("missing [automaton]".into()))?;
        let spec = self.flow.as_ref().ok_or_else(|| Error::Input("missing [flow]".into()))?;
        flow_from_spec(g, aut, spec)
    }
}

pub fn flow_from_spec(g: &GMSystem, aut: Automaton, spec: &FlowSpec) -> Result<FlowCandidate> {
    let letter = |t: &str| aut.letter(t).ok_or_else(|| Error::Input(format!("unknown automaton letter '{t}'")));
    let default = spec.cover.iter().find(|(x, _)| x == "*").map(|(_, t)| letter(t)).transpose()?;
    for (x, _) in &spec.cover {
        if x != "*" && g.letter(x).is_none() {
            return Err(Error::Input(format!("cover names unknown generator '{x}'")));
        }
    }
    let cover = g
        .names
        .iter()
        .map(|x| match spec.cover.iter().find(|(y, _)| y == x) {
            Some((_, t)) => letter(t),
            None => default.ok_or_else(|| Error::Input(format!("no cover for generator '{x}'"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut assignment = vec![None; aut.num_states()];
    for (q, lit) in &spec.states {
        let qi = aut.state_names.iter().position(|n| n == q).ok_or_else(|| Error::Input(format!("unknown state '{q}'")))?;
        assignment[qi] = Some(SPCElement::parse(lit, &g.group, g.dim)?);
    }
    let assignment = assignment
        .into_iter()
        .enumerate()
        .map(|(q, a)| a.ok_or_else(|| Error::Input(format!("state '{}' has no SPC", aut.state_names[q]))))
        .collect::<Result<Vec<_>>>()?;
    FlowCandidate::new(aut, cover, assignment)
}

fn write_group(out: &mut String, group: &GroupTable) {
    out.push_str("[group]\n");
    if group.order() == 2 && group.label(1) == "-1" {
        out.push_str("signs\n");
    } else if let Some(x) = group.cyclic_generator() {
        let _ = writeln!(out, "cyclic {} {x}", group.order());
    } else {
        let labels: Vec<&str> = group.elements().map(|e| group.label(e)).collect();
        let _ = writeln!(out, "table labels {}", labels.join(" "));
        for row in group.table() {
            let r: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", r.join(" "));
        }
    }
}

/// Writes a system as `[gen]` sections, with an `[ideal]` section when given; ideal letters
/// are then omitted from the `[gen]` list.
pub fn write_document(group: &GroupTable, dim: usize, gens: &[(String, RowMonomialMatrix)], ideal: Option<&ReesMatrixSemigroup>) -> String {
    let mut out = String::new();
    write_group(&mut out, group);
    let _ = writeln!(out, "[action dim={dim}]");
    for (name, m) in gens {
        let _ = writeln!(out, "[gen {name}]\n{}", m.display(group));
    }
    if let Some(r) = ideal {
        out.push_str("[ideal]\n");
        for row in &r.c {
            let cells: Vec<String> = row.iter().map(|e| e.map_or("0".to_string(), |g| group.label(g).to_string())).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
    }
    out
}

/// `[automaton]` and `[flow]` sections for a candidate.
pub fn write_flow(g: &GMSystem, c: &FlowCandidate) -> String {
    let mut out = String::from("[automaton]\n");
    let a = &c.automaton;
    if *a == Automaton::rz_one(a.num_states()) {
        let _ = writeln!(out, "rz {}", a.num_states());
    } else {
        let _ = writeln!(out, "states {}", a.state_names.join(" "));
        let _ = writeln!(out, "letters {}", a.letters.join(" "));
        for (x, row) in a.delta.iter().enumerate() {
            let parts: Vec<String> =
                row.iter().enumerate().filter_map(|(p, q)| q.map(|q| format!("{} -> {}", a.state_names[p], a.state_names[q]))).collect();
            let _ = writeln!(out, "{}: {}", a.letters[x], parts.join(", "));
        }
    }
    out.push_str("[flow]\n");
    let cover: Vec<String> = g.names.iter().zip(&c.cover).map(|(x, &t)| format!("{x}={}", a.letters[t])).collect();
    let _ = writeln!(out, "cover {}", cover.join(", "));
    for (q, s) in c.assignment.iter().enumerate() {
        let _ = writeln!(out, "{} = {}", a.state_names[q], s.to_literal(&g.group));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_small_document() {
        let text = "[group]\nsigns\n[action dim=2]\n[gen s]\n1 -> -2, 2 -> 1\n[gen e]\n1 -> 1\n";
        let d = parse_document(text).unwrap();
        assert_eq!(d.gens[0].1.row(0), Some((1, 1)));
        assert_eq!(d.gens[1].1.row(1), None);
        let again = parse_document(&write_document(&d.group, d.dim, &d.gens, None)).unwrap();
        assert_eq!(again.gens, d.gens);
    }

    #[test]
    fn input_errors_carry_lines() {
        let e = parse_document("[group]\ncyclic 2\n[action dim=2]\n[gen a]\n1 -> 3\n").unwrap_err();
        assert!(e.to_string().contains("line 4"), "{e}");
        assert!(parse_document("[action dim=2]\n").is_err());
    }
}
