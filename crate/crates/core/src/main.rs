use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gmflow::chartab::{build_shk, build_sn, char_table, shk_generators, sn_flow, SxConvention};
use gmflow::eval::{explore_states, flow_search_in, Evaluator, ExploreOptions, Family, SearchOutcome};
use gmflow::flow::{flow_to_division, set_trivial_flow, verify_complete_flow, FlowCandidate};
use gmflow::gm::{GMSystem, DEFAULT_CAP};
use gmflow::io::{parse_document, write_document, write_flow, Document};
use gmflow::lattice::SPCElement;
use gmflow::rees::ReesMatrixSemigroup;
use gmflow::report::RunReport;
use gmflow::smallmonoid::{build_mhk, canonical_2j_flow, complexity_2j, example1, example2, example3, SmallMonoid};
use gmflow::typeii::{ap_star_gp_member, one_point_flow, tilson_tau, type_ii};
use gmflow::{corpus, green_relations, Error, GroupTable};

#[derive(Parser)]
#[command(name = "gmflow", version, about = "Flows on group-mapping semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// System file in the sectioned text format.
    file: PathBuf,
    /// Element cap for semigroup enumeration.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Omit the timing field.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Clone)]
struct ExploreArgs {
    /// Maximum number of explored states.
    #[arg(long, default_value_t = 100_000)]
    bound: usize,
    /// Longest letter word whose loop is explored.
    #[arg(long, default_value_t = 2)]
    word_length: usize,
    /// Formula applications from a point; 0 closes fully.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Skip the nested loops `(x y^w*)^w*`.
    #[arg(long)]
    flat: bool,
}

impl ExploreArgs {
    fn options(&self) -> ExploreOptions {
        ExploreOptions {
            bound: self.bound,
            word_length: self.word_length,
            nested: !self.flat,
            depth: (self.depth > 0).then_some(self.depth),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Green's relations.
    Green(Input),
    /// Validate the GM conditions and locate the 0-minimal ideal.
    GmCheck(Input),
    /// The right letter mapping image and the set-trivial flow.
    Rlm(Input),
    /// The type-II subsemigroup; fails when it is not aperiodic.
    Type2(Input),
    /// The Tilson congruence; fails when it is not a cross-section.
    Tau(Input),
    /// One-point flow; fails when none exists.
    Onepoint(Input),
    /// Verify the `[automaton]`/`[flow]` sections as a complete flow.
    VerifyFlow {
        #[command(flatten)]
        input: Input,
        /// Separate file holding the `[automaton]` and `[flow]` sections.
        #[arg(long)]
        flow: Option<PathBuf>,
    },
    /// Forward flow of a formula from a state.
    Eval {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        wff: String,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 100_000)]
        bound: usize,
    },
    /// Explore states reachable from the points.
    Explore {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        explore: ExploreArgs,
    },
    /// Search for a flow over `rz:K` or the file's automaton.
    SearchFlow {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        explore: ExploreArgs,
        /// `rz:K` searches `RZ(k)^1` for `k = 1..=K`.
        #[arg(long)]
        family: Option<String>,
    },
    /// Orbits, 2J complexity and the canonical flow of a small monoid.
    SmallMonoid(Input),
    /// Division certificate from a complete flow, with the exhaustive slice check.
    SliceCheck {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        flow: Option<PathBuf>,
    },
    /// Emit an example system in the input format.
    GenExample {
        #[command(subcommand)]
        which: Example,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Odd,
    Literal,
}

#[derive(Subcommand)]
enum Example {
    /// `S(H,k)`; `H` is `signs`, `zN` or `cyclic:N`.
    Shk { h: String, k: usize },
    /// `M(H,k)` as a small monoid.
    Mhk { h: String, k: usize },
    /// `M(Z_n, n, n, C_n)` from the character table.
    Chn { n: usize },
    /// `S_n`, optionally with its flow.
    Sn {
        n: usize,
        #[arg(long, value_enum, default_value_t = Convention::Odd)]
        convention: Convention,
        #[arg(long)]
        with_flow: bool,
        #[arg(long, default_value_t = 2)]
        max_n: usize,
    },
    /// The three small monoids with units `Z4`, `Z4` and `Z8`.
    Small { which: usize },
    /// A random GM system.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        points: usize,
    },
    /// A random small monoid.
    RandomSmall {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_b: usize,
    },
}

/// Exit status: 0 holds, 1 fails with a witness, 2 input error.
enum Outcome {
    Holds,
    Fails,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

struct Loaded {
    text: String,
    doc: Document,
    input: Input,
}

fn load(input: &Input, extra: Option<&PathBuf>) -> Result<Loaded, Error> {
    let mut text = read(&input.file)?;
    if let Some(p) = extra {
        text.push('\n');
        text.push_str(&read(p)?);
    }
    let doc = parse_document(&text)?;
    Ok(Loaded { text, doc, input: input.clone() })
}

impl Loaded {
    fn system(&self) -> Result<GMSystem, Error> {
        self.doc.system_capped(self.input.cap)
    }
}

fn emit(mut r: RunReport, start: Instant, no_timing: bool, o: Outcome) -> ExitCode {
    if !no_timing {
        r.timing_ms = Some(start.elapsed().as_millis());
    }
    print!("{}", r.to_text());
    match o {
        Outcome::Holds => ExitCode::SUCCESS,
        Outcome::Fails => ExitCode::from(1),
    }
}

fn point_text(g: &GMSystem, (h, b): (u32, usize)) -> String {
    format!("({},{})", g.group.label(h), b + 1)
}

fn flow_report(r: &mut RunReport, g: &GMSystem, c: &FlowCandidate) {
    r.push_lines("flow", &write_flow(g, c));
}

fn run(cmd: Command) -> Result<ExitCode, Error> {
    let start = Instant::now();
    match cmd {
        Command::Green(i) => {
            let l = load(&i, None)?;
            let g = l.system()?;
            let gd = green_relations(&g.s);
            let mut r = RunReport::new("green", l.text.as_bytes());
            r.push("order", g.s.len());
            r.push("r_classes", gd.num_r());
            r.push("l_classes", gd.num_l());
            r.push("h_classes", gd.num_h());
            r.push("j_classes", gd.num_j());
            for (j, cl) in gd.j_classes.iter().enumerate() {
                let sub = gd.j_max_subgroup[j].map_or("-".to_string(), |o| o.to_string());
                r.push(
                    &format!("j[{j}]"),
                    format!(
                        "size={} regular={} r={} l={} subgroup={sub}",
                        cl.len(),
                        gd.j_regular[j],
                        gd.r_classes_in_j(j).len(),
                        gd.l_classes_in_j(j).len()
                    ),
                );
            }
            Ok(emit(r, start, i.no_timing, Outcome::Holds))
        }
        Command::GmCheck(i) => {
            let l = load(&i, None)?;
            let mut r = RunReport::new("gm-check", l.text.as_bytes());
            match l.system() {
                Ok(g) => {
                    r.push("verdict", "gm");
                    r.push("order", g.s.len());
                    r.push("group.order", g.group.order());
                    r.push("ideal.size", g.ideal.members.len());
                    r.push("ideal.has_zero", g.ideal.zero.is_some());
                    r.push("ideal.a", g.ideal.rees.a_size);
                    r.push("ideal.b", g.ideal.rees.b_size);
                    let c = &g.certificate;
                    r.push("certificate.right_faithful_on_r_class", c.right_faithful_on_r_class);
                    r.push("certificate.left_faithful_on_l_class", c.left_faithful_on_l_class);
                    r.push("certificate.zero_minimal_candidates", c.zero_minimal_candidates);
                    Ok(emit(r, start, i.no_timing, Outcome::Holds))
                }
                Err(Error::NotGM(w)) => {
                    r.push("verdict", "not-gm");
                    r.push("witness", w);
                    Ok(emit(r, start, i.no_timing, Outcome::Fails))
                }
                Err(e) => Err(e),
            }
        }
        Command::Rlm(i) => {
            let l = load(&i, None)?;
            let g = l.system()?;
            let mut r = RunReport::new("rlm", l.text.as_bytes());
            r.push("order", g.s.len());
            r.push("rlm.order", g.rlm.len());
            match set_trivial_flow(&g) {
                Ok(c) => {
                    r.push("rlm.aperiodic", true);
                    r.push("set_trivial_flow", "present");
                    flow_report(&mut r, &g, &c);
                }
                Err(w) => {
                    r.push("rlm.aperiodic", false);
                    r.push("set_trivial_flow", "absent");
                    r.push("witness", g.rlm.element(w).display(&GroupTable::trivial()));
                }
            }
            Ok(emit(r, start, i.no_timing, Outcome::Holds))
        }
        Command::Type2(i) => {
            let l = load(&i, None)?;
            let g = l.system()?;
            let t = type_ii(&g.s);
            let (ap, w) = ap_star_gp_member(&g.s);
            let mut r = RunReport::new("type2", l.text.as_bytes());
            r.push("order", g.s.len());
            r.push("type2.size", t.members.len());
            r.push("type2.includes_empty_middle", t.includes_empty_middle);
            r.push("type2.aperiodic", ap);
            if let Some(x) = w {
                r.push("witness", g.s.element(x).display(&g.group));
                if let Some(c) = g.ideal.coords.get(&x) {
                    r.push("witness.rees", g.ideal.rees.format_elt(*c));
                }
            }
            Ok(emit(r, start, i.no_timing, if ap { Outcome::Holds } else { Outcome::Fails }))
        }
        Command::Tau(i) => {
            let l = load(&i, None)?;
            let g = l.system()?;
            let t = tilson_tau(&g);
            let mut r = RunReport::new("tau", l.text.as_bytes());
            r.push("classes", t.classes.len());
            r.push("injective", t.injective);
            let blocks: Vec<String> = t.b_blocks().iter().map(|b| b.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(" ")).collect();
            r.push("tau_b", blocks.join(" | "));
            for (k, cl) in t.classes.iter().enumerate() {
                let pts: Vec<String> = cl.iter().map(|&p| point_text(&g, g.unpoint(p))).collect();
                r.push(&format!("class[{k}]"), pts.join(" "));
            }
            match t.cross_section_witness() {
                None => {
                    r.push("verdict", "cross-section");
                    Ok(emit(r, start, i.no_timing, Outcome::Holds))
                }
                Some((p, q)) => {
                    r.push("verdict", "not-cross-section");
                    r.push("witness", format!("{} {}", point_text(&g, p), point_text(&g, q)));
                    Ok(emit(r, start, i.no_timing, Outcome::Fails))
                }
            }
        }
        Command::Onepoint(i) => {
            let l = load(&i, None)?;
            let g = l.system()?;
            let o = one_point_flow(&g)?;
            let mut r = RunReport::new("onepoint", l.text.as_bytes());
            r.push("ideal_type2_aperiodic", o.ideal_aperiodic);
            r.push("tau_cross_section", o.tau_cross);
            r.push("flow_found", o.flow_found);
            if let Some(w) = o.period_witness {
                r.push("witness.element", g.s.element(w).display(&g.group));
                if let Some(c) = g.ideal.coords.get(&w) {
                    r.push("witness.rees", g.ideal.rees.format_elt(*c));
                }
            }
            if let Some((p, q)) = o.tau_witness {
                r.push("witness.tau", format!("{} {}", point_text(&g, p), point_text(&g, q)));
            }
            match o.state() {
                Some(s) => {
                    r.push("verdict", "present");
                    r.push("state", s.to_literal(&g.group));
                    Ok(emit(r, start, i.no_timing, Outcome::Holds))
                }
                None => {
                    r.push("verdict", "absent");
                    Ok(emit(r, start, i.no_timing, Outcome::Fails))
                }
            }
        }
        Command::VerifyFlow { input, flow } => {
            let l = load(&input, flow.as_ref())?;
            let g = l.system()?;
            let c = l.doc.flow_candidate(&g)?;
            let v = verify_complete_flow(&g, &c);
            let mut r = RunReport::new("verify-flow", l.text.as_bytes());
            r.push("states", c.automaton.num_states());
            r.push("violations", v.violations.len());
            r.push_lines("violation", &v.describe(&g, &c));
            let ok = v.is_valid();
            r.push("verdict", if ok { "flow" } else { "not-a-flow" });
            Ok(emit(r, start, input.no_timing, if ok { Outcome::Holds } else { Outcome::Fails }))
        }
        Command::Eval { input, wff, state, bound } => {
            let l = load(&input, None)?;
            let g = l.system()?;
            let mut ev = Evaluator::new(&g, bound)?;
            let res = ev.forward_text(&wff, &state)?;
            let mut r = RunReport::new("eval", l.text.as_bytes());
            r.push("wff", &wff);
            r.push("state", SPCElement::parse(&state, &g.group, g.dim)?.compact(&g.group));
            r.push("result", res.spc().map_or("=><=".to_string(), |s| s.compact(&g.group)));
            r.push("universe", ev.universe.len());
            Ok(emit(r, start, input.no_timing, Outcome::Holds))
        }
        Command::Explore { input, explore } => {
            let l = load(&input, None)?;
            let g = l.system()?;
            let u = explore_states(&g, &explore.options())?;
            let mut r = RunReport::new("explore", l.text.as_bytes());
            r.push("states", u.len());
            for (k, s) in u.states.iter().enumerate() {
                r.push(&format!("state[{k}]"), s.compact(&g.group));
            }
            Ok(emit(r, start, input.no_timing, Outcome::Holds))
        }
        Command::SearchFlow { input, explore, family } => {
            let l = load(&input, None)?;
            let g = l.system()?;
            let fam = match (&family, &l.doc.automaton) {
                (Some(f), _) => Family::parse(f)?,
                (None, Some(a)) => Family::Given(a.clone()),
                (None, None) => Family::RzUpTo(4),
            };
            let u = explore_states(&g, &explore.options())?;
            let mut r = RunReport::new("search-flow", l.text.as_bytes());
            let (stats, found) = match flow_search_in(&g, &fam, &u)? {
                SearchOutcome::Found { candidate, stats } => (stats, Some(candidate)),
                SearchOutcome::Exhausted { stats } => (stats, None),
            };
            r.push("universe", stats.universe);
            r.push("viable", stats.viable);
            r.push("distinct_letters", stats.distinct_letters);
            r.push("nodes", stats.nodes);
            r.push("automata_tried", stats.automata_tried);
            match found {
                Some(c) => {
                    r.push("verdict", "found");
                    flow_report(&mut r, &g, &c);
                    Ok(emit(r, start, input.no_timing, Outcome::Holds))
                }
                None => {
                    r.push("verdict", "exhausted");
                    Ok(emit(r, start, input.no_timing, Outcome::Fails))
                }
            }
        }
        Command::SmallMonoid(i) => {
            let l = load(&i, None)?;
            let m = l.doc.small_monoid()?;
            let mut r = RunReport::new("small-monoid", l.text.as_bytes());
            small_monoid_report(&mut r, &m)?;
            Ok(emit(r, start, i.no_timing, Outcome::Holds))
        }
        Command::SliceCheck { input, flow } => {
            let l = load(&input, flow.as_ref())?;
            let g = l.system()?;
            let c = l.doc.flow_candidate(&g)?;
            let mut r = RunReport::new("slice-check", l.text.as_bytes());
            match flow_to_division(&g, &c) {
                Ok(d) => {
                    r.push_lines("certificate", &d.to_text(&g));
                    r.push("verdict", "division");
                    Ok(emit(r, start, input.no_timing, Outcome::Holds))
                }
                Err(Error::FlowVerificationFailed(w) | Error::SliceViolation(w)) => {
                    r.push("verdict", "no-division");
                    r.push_lines("witness", &w);
                    Ok(emit(r, start, input.no_timing, Outcome::Fails))
                }
                Err(e) => Err(e),
            }
        }
        Command::GenExample { which } => {
            print!("{}", gen_example(which)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn small_monoid_report(r: &mut RunReport, m: &SmallMonoid) -> Result<(), Error> {
    let g = &m.system;
    let c = complexity_2j(m);
    r.push("order", g.s.len());
    r.push("units.order", m.h_order);
    r.push("k", c.orbits.k);
    for (i, o) in c.orbits.orbits.iter().enumerate() {
        let bs: Vec<String> = o.iter().map(|b| (b + 1).to_string()).collect();
        r.push(&format!("orbit[{i}]"), bs.join(" "));
        if let Some(w) = c.witnesses[i] {
            r.push(&format!("orbit[{i}].ig_witness"), m.rees.format_elt(w));
        }
    }
    r.push("complexity", c.complexity);
    let o = one_point_flow(g)?;
    r.push("one_point_flow", if o.exists() { "present" } else { "absent" });
    if let Some(w) = gmflow::smallmonoid::ig_group_witness(&m.rees, &(0..m.rees.b_size).collect::<Vec<_>>()) {
        r.push("ideal.ig_witness", m.rees.format_elt(w));
    }
    if c.complexity == 1 {
        let f = canonical_2j_flow(m)?;
        let d = flow_to_division(g, &f)?;
        r.push("division.slice_ok", d.slice.ok);
        flow_report(r, g, &f);
    }
    Ok(())
}

fn parse_h(h: &str) -> Result<GroupTable, Error> {
    if h == "signs" {
        return Ok(GroupTable::z2_signs());
    }
    let n = h
        .strip_prefix("cyclic:")
        .or_else(|| h.strip_prefix('z'))
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Input(format!("group '{h}' is not signs, zN or cyclic:N")))?;
    Ok(GroupTable::cyclic(n))
}

fn gen_example(which: Example) -> Result<String, Error> {
    Ok(match which {
        Example::Shk { h, k } => {
            let h = parse_h(&h)?;
            build_shk(&h, k)?;
            let gens: Vec<_> = shk_generators(&h, k).into_iter().enumerate().map(|(i, m)| (format!("f{}", i + 1), m)).collect();
            write_document(&h, k, &gens, None)
        }
        Example::Mhk { h, k } => {
            let m = build_mhk(&parse_h(&h)?, k)?;
            small_doc(&m)
        }
        Example::Chn { n } => {
            let t = char_table(n);
            let group = GroupTable::cyclic(n);
            let c = t.c.iter().map(|row| row.iter().map(|&v| Some(v)).collect()).collect();
            let r = ReesMatrixSemigroup::new(group.clone(), n, n, c)?;
            write_document(&group, n, &[], Some(&r))
        }
        Example::Sn { n, convention, with_flow, max_n } => {
            let conv = match convention {
                Convention::Odd => SxConvention::Odd,
                Convention::Literal => SxConvention::Literal,
            };
            let (d, sys) = build_sn(n, conv, max_n)?;
            let gens: Vec<_> = d.names.iter().cloned().zip(d.gens.iter().cloned()).collect();
            let mut out = write_document(&d.group, d.cycle.m, &gens, None);
            if with_flow {
                out.push_str(&write_flow(&sys, &sn_flow(&d, &sys)?));
            }
            out
        }
        Example::Small { which } => match which {
            1 => small_doc(&example1()),
            2 => small_doc(&example2()),
            3 => small_doc(&example3()),
            _ => return Err(Error::Input("small examples are 1, 2 and 3".into())),
        },
        Example::Random { seed, points } => {
            let g = corpus::random_gm(seed, points);
            let gens: Vec<_> = g.names.iter().cloned().zip(g.generators().iter().cloned()).collect();
            write_document(&g.group, g.dim, &gens, None)
        }
        Example::RandomSmall { seed, max_b } => small_doc(&corpus::random_small_monoid(seed, max_b)),
    })
}

fn small_doc(m: &SmallMonoid) -> String {
    let units: Vec<_> = m.unit_names.iter().cloned().zip(m.units.iter().cloned()).collect();
    write_document(&m.group, m.rees.b_size, &units, Some(&m.rees))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
