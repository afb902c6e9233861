//! Acceptance suite: nine criteria, one PASS/FAIL line each.

mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use gmflow::chartab::{build_shk, build_sn, sn_flow, verify_intertwine, SxConvention};
use gmflow::corpus::rng;
use gmflow::eval::{flow_search, Evaluator, ExploreOptions, Family, SearchOutcome};
use gmflow::flow::{flow_to_division, verify_complete_flow, Automaton, FlowCandidate};
use gmflow::gm::{e_unitary_cover, gwr_sim, GMSystem};
use gmflow::lattice::{
    all_sp_elements, cs_embedding, cs_extract, is_cross_section_sp, spc_join, RhElement, SPCElement,
};
use gmflow::rees::ReesElt;
use gmflow::smallmonoid::{canonical_2j_flow, complexity_2j, example1, example2, example3};
use gmflow::typeii::{one_point_flow, tilson_tau, type_ii};
use gmflow::{green_relations, GroupTable};

const EVAL_BUDGET: Duration = Duration::from_secs(10);
const FLOW_BUDGET: Duration = Duration::from_secs(60);
const TRICHOTOMY_BUDGET: Duration = Duration::from_secs(120);
const CHARTAB_BUDGET: Duration = Duration::from_secs(30);

/// Universe bound for the exhaustive search over `RZ(k)^1` on the third small monoid.
const EX3_UNIVERSE: usize = 5000;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(t: Instant, budget: Duration) -> Outcome {
    let e = t.elapsed();
    ensure!(e < budget, "took {:.1}s, budget {}s", e.as_secs_f64(), budget.as_secs());
    Ok(format!("{:.2}s", e.as_secs_f64()))
}

fn s2() -> GMSystem {
    build_sn(2, SxConvention::Odd, 2).expect("S_2 builds").1
}

fn spc(g: &GMSystem, text: &str) -> SPCElement {
    SPCElement::parse(text, &g.group, g.dim).expect("golden literal parses")
}

const SIGMA: [&str; 4] =
    ["2468/<1 x x^2 x^3>", "2468/<1 x^2 1 x^2>", "2468/<1 x^3 x^2 x>", "12345678/<1 1 1 1 1 1 1 1>"];

/// The four-state flow on `S_2` over `RZ(4)^1`.
const S2_FLOW: &str = "\
[automaton]
rz 4
[flow]
cover a=1, s1=c1, s2=c2, s3=c3, *=c4
1 = 2468/<1 x x^2 x^3>
2 = 2468/<1 x^2 1 x^2>
3 = 2468/<1 x^3 x^2 x>
4 = 12345678/<1 1 1 1 1 1 1 1>
";

fn paper_flow(g: &GMSystem) -> FlowCandidate {
    let cover = g
        .names
        .iter()
        .map(|n| match n.as_str() {
            "a" => 0,
            "s1" => 1,
            "s2" => 2,
            "s3" => 3,
            _ => 4,
        })
        .collect();
    let states = SIGMA.iter().map(|s| spc(g, s)).collect();
    FlowCandidate::new(Automaton::rz_one(4), cover, states).expect("well-formed candidate")
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let g = s2();
    let mut ev = Evaluator::new(&g, 100_000).map_err(|e| e.to_string())?;
    let d = "(b a^w*)^w*";
    let goldens = [
        ("a^w*", "1/<1>", "1357/<1|1|1|1>"),
        ("b", "1357/<1|1|1|1>", "2/<1>"),
        ("a^w*", "2/<1>", "2468/<1|1|1|1>"),
        (&format!("a^w* {d}"), "1/<1>", "12345678/<1 1 1 1 1 1 1 1>"),
        ("s1", SIGMA[3], SIGMA[0]),
        ("s2", SIGMA[3], SIGMA[1]),
        ("s3", SIGMA[3], SIGMA[2]),
        ("a", SIGMA[0], SIGMA[0]),
        ("a", SIGMA[1], SIGMA[1]),
        ("a", SIGMA[2], SIGMA[2]),
        ("a", SIGMA[3], SIGMA[3]),
    ];
    for (w, from, want) in goldens {
        let got = ev.forward_text(w, from).map_err(|e| e.to_string())?;
        ensure!(
            got.spc() == Some(&spc(&g, want)),
            "({from}) {w} = {}, expected {want}",
            got.display(&g.group)
        );
    }
    within(t, EVAL_BUDGET)
}

fn write_temp(name: &str, text: &str) -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("gmflow-acceptance-{}-{name}", std::process::id()));
    std::fs::write(&p, text).expect("temp file is writable");
    p
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let exe = env!("CARGO_BIN_EXE_gmflow");
    let doc = Command::new(exe).args(["gen-example", "sn", "2"]).output().map_err(|e| e.to_string())?;
    ensure!(doc.status.success(), "gen-example sn 2 failed");
    let sys = write_temp("s2.txt", &String::from_utf8_lossy(&doc.stdout));
    let flow = write_temp("s2-flow.txt", S2_FLOW);
    let out = Command::new(exe)
        .arg("verify-flow")
        .arg(&sys)
        .arg("--flow")
        .arg(&flow)
        .output()
        .map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&sys);
    let _ = std::fs::remove_file(&flow);
    ensure!(out.status.success(), "verify-flow rejected the flow:\n{}", String::from_utf8_lossy(&out.stdout));

    let g = s2();
    let f = paper_flow(&g);
    let found = match flow_search(&g, &Family::RzUpTo(4), &ExploreOptions::default()).map_err(|e| e.to_string())? {
        SearchOutcome::Found { candidate, .. } => candidate,
        SearchOutcome::Exhausted { stats } => return Err(format!("search over rz:4 exhausted: {stats:?}")),
    };
    ensure!(verify_complete_flow(&g, &found).is_valid(), "found flow does not verify");
    // The search returns states in universe order, so compare up to relabelling.
    let want: HashSet<&SPCElement> = f.assignment.iter().collect();
    let got: HashSet<&SPCElement> = found.assignment.iter().collect();
    ensure!(
        want == got && found.automaton.num_states() == 4,
        "found {:?}",
        found.assignment.iter().map(|s| s.compact(&g.group)).collect::<Vec<_>>()
    );

    let d = flow_to_division(&g, &f).map_err(|e| e.to_string())?;
    ensure!(d.slice.ok && d.slice.surjective, "slice check failed: {:?}", d.slice);
    ensure!(d.group_order == 4 && d.dim == 8, "division target is not Z4 wr Sym(8)");
    ensure!(d.seeds.iter().all(|s| s.t.len() == 5), "wreath factor is not RZ(4)^1 with sink");
    let timing = within(t, FLOW_BUDGET)?;
    Ok(format!("{timing}, relation {}", d.slice.relation_size))
}

fn criterion_3() -> Outcome {
    let (data, g) = build_sn(2, SxConvention::Odd, 2).map_err(|e| e.to_string())?;
    let x3 = g.group.parse_word("x^3").map_err(|e| e.to_string())?;
    let m = data.ideal.as_matrix(ReesElt::T(3, x3, 3));
    let id = g.s.id_of(&m).ok_or("(4,x^3,4) is not an element of S_2")?;
    let t2 = type_ii(&g.s);
    ensure!(t2.contains(id), "(4,x^3,4) is not type II");
    let tau = tilson_tau(&g);
    ensure!(tau.cross_section_witness().is_some(), "tau is a cross-section");
    let o = one_point_flow(&g).map_err(|e| e.to_string())?;
    ensure!(!o.exists(), "one-point flow reported on S_2");
    Ok(format!("|S_II| = {}", t2.members.len()))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let e1 = example1();
    ensure!(complexity_2j(&e1).complexity == 1, "example 1 complexity");
    ensure!(one_point_flow(&e1.system).map_err(|e| e.to_string())?.exists(), "example 1 has no one-point flow");

    let e2 = example2();
    let c2 = complexity_2j(&e2);
    ensure!(c2.complexity == 1 && c2.orbits.k == 2, "example 2: complexity {} k {}", c2.complexity, c2.orbits.k);
    ensure!(!one_point_flow(&e2.system).map_err(|e| e.to_string())?.exists(), "example 2 has a one-point flow");
    let w = gmflow::smallmonoid::ig_group_witness(&e2.rees, &(0..e2.rees.b_size).collect::<Vec<_>>())
        .ok_or("example 2 IG is aperiodic")?;
    ensure!(e2.rees.format_elt(w) == "(1,-1,1)", "IG witness {}", e2.rees.format_elt(w));
    let f = canonical_2j_flow(&e2).map_err(|e| e.to_string())?;
    ensure!(f.automaton.num_states() == 2, "canonical flow is not over RZ(2)^1");
    ensure!(verify_complete_flow(&e2.system, &f).is_valid(), "example 2 canonical flow");

    let e3 = example3();
    let c3 = complexity_2j(&e3);
    ensure!(c3.complexity == 2 && c3.orbits.k == 1, "example 3: complexity {} k {}", c3.complexity, c3.orbits.k);
    // Full closure: the evaluation universe is finite and small here.
    let opts = ExploreOptions { bound: EX3_UNIVERSE, depth: None, ..ExploreOptions::default() };
    match flow_search(&e3.system, &Family::RzUpTo(4), &opts).map_err(|e| e.to_string())? {
        SearchOutcome::Exhausted { stats } => {
            ensure!(stats.universe <= EX3_UNIVERSE, "universe {}", stats.universe);
            let timing = within(t, TRICHOTOMY_BUDGET)?;
            Ok(format!("{timing}, example 3 universe {}", stats.universe))
        }
        SearchOutcome::Found { candidate, .. } => Err(format!("example 3 flow found: {:?}", candidate.cover)),
    }
}

fn criterion_5() -> Outcome {
    let mut groups: Vec<GroupTable> = (1..=4).map(GroupTable::cyclic).collect();
    groups.push(GroupTable::cyclic(2).power(2));
    for h in &groups {
        let n = h.order();
        for k in 1..=3 {
            let s = build_shk(h, k).map_err(|e| e.to_string())?;
            let gd = green_relations(&s);
            ensure!(gd.num_l() == k, "S(H,{k}), |H| = {n}: {} L-classes", gd.num_l());
            ensure!(gd.num_r() == n.pow(k as u32 - 1), "S(H,{k}), |H| = {n}: {} R-classes", gd.num_r());
            ensure!(s.len() == n.pow(k as u32) * k, "S(H,{k}), |H| = {n}: order {}", s.len());
        }
    }
    let z2 = GroupTable::cyclic(2);
    let g = gwr_sim(&z2, 3).map_err(|e| e.to_string())?;
    let oracle = common::weighted_partial_injections(&z2, 3);
    let got: HashSet<_> = g.s.elements().iter().cloned().collect();
    ensure!(g.s.len() == 139 && got == oracle, "order {} vs oracle {}", g.s.len(), oracle.len());
    let idem = g.s.idempotents().len();
    let units = g.s.elements().iter().filter(|m| m.rank() == 3).count();
    ensure!(idem == 8 && units == 48, "idempotents {idem}, units {units}");
    Ok(format!("{} S(H,k) instances", groups.len() * 3))
}

fn criterion_6() -> Outcome {
    let corpus = common::corpus();
    let mut tau_instances = 0;
    let mut seen = HashSet::new();
    let mut green_checked = 0;
    for (name, g) in &corpus {
        if g.num_points() <= 8 && seen.insert(g.generators().to_vec()) {
            let (min, _) = common::minimal_injective_congruence(g);
            let tau = tilson_tau(g);
            ensure!(
                common::same_partition(&min, &tau.class_of),
                "{name}: tau {:?}, oracle {min:?}",
                tau.class_of
            );
            tau_instances += 1;
        }
        if g.s.len() <= 200 {
            let bad = common::green_discrepancies(&g.s, &g.green);
            ensure!(bad == 0, "{name}: {bad} Green discrepancies");
            green_checked += 1;
        }
        let o = one_point_flow(g).map_err(|e| format!("{name}: {e}"))?;
        ensure!(
            o.ideal_aperiodic == o.tau_cross && o.tau_cross == o.flow_found,
            "{name}: conditions {} {} {}",
            o.ideal_aperiodic,
            o.tau_cross,
            o.flow_found
        );
    }
    ensure!(tau_instances >= 20, "only {tau_instances} tau instances");
    Ok(format!("tau {tau_instances}, green {green_checked}, one-point {}", corpus.len()))
}

fn random_spc<R: Rng>(r: &mut R, group: &GroupTable, b: usize) -> SPCElement {
    let entries: Vec<Option<(u32, gmflow::Gid)>> = (0..b)
        .map(|_| r.gen_bool(0.7).then(|| (r.gen_range(0..3), r.gen_range(0..group.order()) as gmflow::Gid)))
        .collect();
    SPCElement::from_entries(group, &entries)
}

fn criterion_7() -> Outcome {
    let mut checked = 0usize;
    for (go, b) in [(1, 1), (1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (3, 1), (4, 1)] {
        let all = all_sp_elements(go, b);
        let leq = |x: &gmflow::lattice::SPElement, y: &gmflow::lattice::SPElement| x.leq(y).expect("same universe");
        for x in &all {
            for y in &all {
                let m = x.meet(y).expect("same universe");
                let j = x.join(y).expect("same universe");
                ensure!(leq(&m, x) && leq(&m, y) && leq(x, &j) && leq(y, &j), "bounds fail at |G|={go} |B|={b}");
                for z in &all {
                    if leq(z, x) && leq(z, y) {
                        ensure!(leq(z, &m), "meet is not greatest at |G|={go} |B|={b}");
                    }
                    if leq(x, z) && leq(y, z) {
                        ensure!(leq(&j, z), "join is not least at |G|={go} |B|={b}");
                    }
                }
                checked += 1;
            }
        }
    }
    let group = GroupTable::cyclic(4);
    let mut r = rng(20);
    let mut contradictions = 0;
    for _ in 0..200 {
        let x = random_spc(&mut r, &group, 6);
        let back = cs_extract(&cs_embedding(&x, &group), &group).map_err(|e| e.to_string())?;
        ensure!(back == x, "round trip changed {}", x.to_literal(&group));
        let y = random_spc(&mut r, &group, 6);
        let sp = cs_embedding(&x, &group).join(&cs_embedding(&y, &group)).expect("same universe");
        let top = matches!(spc_join(&x, &y, &group), RhElement::Contradiction);
        ensure!(top != is_cross_section_sp(&sp), "join contradiction mismatch");
        contradictions += usize::from(top);
    }
    Ok(format!("{checked} pairs, {contradictions}/200 contradictions"))
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    for n in 1..=16 {
        ensure!(verify_intertwine(n), "X C_{n} != C_{n} Y");
    }
    for n in 1..=2 {
        let (d, g) = build_sn(n, SxConvention::Odd, 2).map_err(|e| e.to_string())?;
        let f = sn_flow(&d, &g).map_err(|e| e.to_string())?;
        ensure!(verify_complete_flow(&g, &f).is_valid(), "sn_flow({n}) does not verify");
    }
    within(t, CHARTAB_BUDGET)
}

fn criterion_9() -> Outcome {
    let z2 = GroupTable::cyclic(2);
    let fact = |k: usize| (1..=k).product::<usize>();
    for n in 2..=3usize {
        let c = e_unitary_cover(&gwr_sim(&z2, n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure!(c.surjective && c.idempotent_separating, "n = {n}: cover checks fail");
        let ranks: Vec<usize> = c.max_subgroups.iter().map(|&(k, _)| k).collect();
        ensure!(ranks == (0..=n).collect::<Vec<_>>(), "n = {n}: ranks {ranks:?}");
        for &(k, order) in &c.max_subgroups {
            let want = 2usize.pow(k as u32) * fact(k) * 2usize.pow((n - k) as u32) * fact(n - k);
            ensure!(order == want, "n = {n}, rank {k}: subgroup order {order}, expected {want}");
        }
    }
    Ok("Z2 wr SIM(2), Z2 wr SIM(3)".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("evaluation goldens", criterion_1),
        ("S_2 flow and division", criterion_2),
        ("type II goldens", criterion_3),
        ("small monoid trichotomy", criterion_4),
        ("structure counts", criterion_5),
        ("oracle equivalences", criterion_6),
        ("lattice laws", criterion_7),
        ("character identities", criterion_8),
        ("E-unitary cover", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
