//! Structural invariants checked over the shared corpus.

mod common;

use std::collections::HashSet;

use gmflow::chartab::{build_sn, hull_member, sn_flow, SxConvention};
use gmflow::corpus::random_small_monoid;
use gmflow::eval::{flow_search, ExploreOptions, Family, SearchOutcome};
use gmflow::flow::{flow_to_division, set_trivial_flow, verify_complete_flow, FlowCandidate};
use gmflow::gm::{e_unitary_cover, gwr_sim, GMSystem};
use gmflow::lattice::SPCElement;
use gmflow::rees::ReesElt;
use gmflow::smallmonoid::{canonical_2j_flow, complexity_2j, example1, example2, example3, SmallMonoid};
use gmflow::typeii::{is_injective_congruence, one_point_flow, one_state_candidate, tilson_tau, type_ii};
use gmflow::{green_relations, GroupTable};

#[test]
fn gm_systems_shrink_under_rlm_and_match_rees_products() {
    for (name, g) in common::corpus() {
        assert!(g.rlm.len() < g.s.len(), "{name}: |RLM| = {} is not below |S| = {}", g.rlm.len(), g.s.len());
        let distinct: HashSet<_> = g.s.elements().iter().collect();
        assert_eq!(distinct.len(), g.s.len(), "{name}: action is not faithful");
        if g.num_points() > 16 {
            continue;
        }
        let coord = |i: usize| if Some(i) == g.ideal.zero { ReesElt::Zero } else { g.ideal.coords[&i] };
        for x in g.ideal.ids() {
            for y in g.ideal.ids() {
                let want = g.ideal.rees.mul(coord(x), coord(y));
                assert_eq!(coord(g.s.product(x, y)), want, "{name}: Rees product of {x} and {y}");
            }
        }
    }
}

#[test]
fn gwr_sim_green_counts() {
    let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
    let fact = |k: usize| (1..=k).product::<usize>();
    for go in 2..=3 {
        for n in 1..=4 {
            let g = gwr_sim(&GroupTable::cyclic(go), n).unwrap();
            let gd = &g.green;
            assert_eq!(gd.num_j(), n + 1);
            for j in 0..gd.num_j() {
                let k = g.s.element(gd.j_classes[j][0]).rank();
                let size = binom(n, k).pow(2) * fact(k) * go.pow(k as u32);
                assert_eq!(gd.j_classes[j].len(), size, "|G|={go} n={n} rank {k}");
                assert_eq!(gd.r_classes_in_j(j).len(), binom(n, k));
                assert_eq!(gd.j_max_subgroup[j], Some(fact(k) * go.pow(k as u32)));
            }
        }
    }
}

#[test]
fn e_unitary_cover_projection_is_a_homomorphism() {
    for n in 1..=3 {
        let g = gwr_sim(&GroupTable::cyclic(2), n).unwrap();
        let c = e_unitary_cover(&g).unwrap();
        assert!(c.surjective && c.idempotent_separating && c.second_projection_is_group);
        assert_eq!(c.idempotents, 1 << n);
        for i in 0..c.cover.len() {
            for j in 0..c.cover.len() {
                assert_eq!(c.proj[c.cover.product(i, j)], g.s.product(c.proj[i], c.proj[j]));
            }
        }
    }
}

fn pairs_classes_b(g: &GMSystem, labels: &[usize]) -> bool {
    // (g,b) ~ (g',b') implies (hg,b) ~ (hg',b').
    let n = g.num_points();
    (0..n).all(|p| {
        (0..n).all(|q| {
            if labels[p] != labels[q] {
                return true;
            }
            let ((gp, bp), (gq, bq)) = (g.unpoint(p), g.unpoint(q));
            g.group.elements().all(|h| {
                labels[g.point(g.group.mul(h, gp), bp)] == labels[g.point(g.group.mul(h, gq), bq)]
            })
        })
    })
}

#[test]
fn tau_is_a_left_invariant_injective_congruence() {
    let mut systems = common::corpus();
    systems.push(("s2".into(), build_sn(2, SxConvention::Odd, 2).unwrap().1));
    for (name, g) in systems {
        let t = tilson_tau(&g);
        assert!(t.injective && is_injective_congruence(&g, &t.class_of), "{name}");
        assert!(pairs_classes_b(&g, &t.class_of), "{name}: tau is not left G-invariant");
    }
}

#[test]
fn type_ii_is_a_closed_fixpoint() {
    for (name, g) in common::corpus().into_iter().filter(|(_, g)| g.s.len() <= 200) {
        let s = &g.s;
        let t = type_ii(s);
        let members: HashSet<usize> = t.members.iter().copied().collect();
        assert!(s.idempotents().iter().all(|e| members.contains(e)), "{name}: idempotent missing");
        assert_eq!(s.closure_of(&t.members), t.members, "{name}: not closed");
        for x in 0..s.len() {
            for y in 0..s.len() {
                if s.product(s.product(x, y), x) != x {
                    continue;
                }
                for &m in &t.members {
                    assert!(members.contains(&s.product(s.product(x, m), y)), "{name}: x m y escapes");
                    assert!(members.contains(&s.product(s.product(y, m), x)), "{name}: y m x escapes");
                }
            }
        }
        for &i in &t.members {
            assert_eq!(t.replay(s, i), Some(i), "{name}: derivation of {i} does not replay");
        }
    }
}

fn small_monoids() -> Vec<(String, SmallMonoid)> {
    let mut out = vec![("example1".into(), example1()), ("example2".into(), example2()), ("example3".into(), example3())];
    for seed in 0..12 {
        out.push((format!("random-small-{seed}"), random_small_monoid(seed, 6)));
    }
    out
}

#[test]
fn small_monoid_complexity_consistency() {
    for (name, m) in small_monoids() {
        let c = complexity_2j(&m);
        let o = one_point_flow(&m.system).unwrap();
        if o.exists() {
            assert_eq!(c.complexity, 1, "{name}: one-point flow with complexity 2");
        }
        let covered: usize = c.orbits.orbits.iter().map(Vec::len).sum();
        assert_eq!(covered, m.rees.b_size, "{name}: orbits do not partition B");
        if c.complexity == 1 {
            let f = canonical_2j_flow(&m).unwrap();
            assert!(verify_complete_flow(&m.system, &f).is_valid(), "{name}");
        } else {
            let opts = ExploreOptions { bound: 5000, ..ExploreOptions::default() };
            let fam = Family::RzUpTo(c.orbits.k + 2);
            let r = flow_search(&m.system, &fam, &opts).unwrap();
            assert!(matches!(r, SearchOutcome::Exhausted { .. }), "{name}: flow found at complexity 2");
        }
    }
}

/// Every valid complete flow in the corpus yields a slice-certified division.
#[test]
fn valid_flows_give_divisions() {
    let mut flows: Vec<(String, GMSystem, FlowCandidate)> = Vec::new();
    for (name, m) in small_monoids() {
        if complexity_2j(&m).complexity == 1 {
            let f = canonical_2j_flow(&m).unwrap();
            flows.push((name, m.system.clone(), f));
        }
    }
    for (name, g) in common::corpus() {
        if let Ok(f) = set_trivial_flow(&g) {
            flows.push((format!("{name}/set-trivial"), g.clone(), f));
        }
        if let Some(state) = one_point_flow(&g).unwrap().state().cloned() {
            flows.push((format!("{name}/one-point"), g.clone(), one_state_candidate(&g, state)));
        }
    }
    for n in 1..=2 {
        let (d, g) = build_sn(n, SxConvention::Odd, 2).unwrap();
        let f = sn_flow(&d, &g).unwrap();
        flows.push((format!("s{n}"), g, f));
    }
    assert!(flows.len() >= 20);
    for (name, g, f) in flows {
        if !verify_complete_flow(&g, &f).is_valid() {
            continue;
        }
        let d = flow_to_division(&g, &f).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(d.slice.ok && d.slice.surjective, "{name}");
        for row in &d.block_matrices {
            for m in row {
                assert!(m.is_column_monomial(), "{name}: block matrix is not monomial");
            }
        }
    }
}

#[test]
fn s2_generators_and_flow() {
    let (d, g) = build_sn(2, SxConvention::Odd, 2).unwrap();
    for m in &d.gens[..d.hull_letters] {
        assert!(hull_member(&d.cycle, m));
    }
    assert_eq!((g.ideal.rees.a_size, g.ideal.rees.b_size, g.group.order()), (16, 8, 4));
    let f = sn_flow(&d, &g).unwrap();
    let want = ["2468/<1 x x^2 x^3>", "2468/<1 x^2 1 x^2>", "2468/<1 x^3 x^2 x>", "12345678/<1 1 1 1 1 1 1 1>"];
    let want: Vec<SPCElement> = want.iter().map(|s| SPCElement::parse(s, &g.group, 8).unwrap()).collect();
    assert_eq!(f.assignment, want);
    assert_eq!(green_relations(&g.s).num_j(), g.green.num_j());
}

#[test]
fn flow_verdict_is_recomputed_after_mutation() {
    let (d, g) = build_sn(2, SxConvention::Odd, 2).unwrap();
    let f = sn_flow(&d, &g).unwrap();
    let mut bigger = f.clone();
    bigger.assignment[0] = SPCElement::parse("12345678/<1 x x^2 x^3 1 x x^2 x^3>", &g.group, 8).unwrap();
    let fresh = FlowCandidate::new(f.automaton.clone(), f.cover.clone(), bigger.assignment.clone()).unwrap();
    assert_eq!(verify_complete_flow(&g, &bigger).is_valid(), verify_complete_flow(&g, &fresh).is_valid());
    assert_eq!(verify_complete_flow(&g, &bigger).violations.len(), verify_complete_flow(&g, &fresh).violations.len());
}
