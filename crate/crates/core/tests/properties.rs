//! Randomized properties of the lattices, relation operators, matrices and the evaluator.

use std::collections::HashSet;

use proptest::prelude::*;

use gmflow::chartab::{build_sn, SxConvention};
use gmflow::eval::{rel_backflow, rel_compose, rel_loop, rel_omega, rel_star, CRel, Evaluator, Wff};
use gmflow::lattice::{
    cs_embedding, cs_extract, is_cross_section_sp, rh_leq, rh_meet, spc_join, RhElement, SPCElement, SPElement,
};
use gmflow::smallmonoid::example2;
use gmflow::{generate_semigroup, green_relations, is_aperiodic, Gid, GroupTable, RowMonomialMatrix};

fn sp(go: usize, b: usize) -> impl Strategy<Value = SPElement> {
    prop::collection::vec(prop::option::of(0u32..4), go * b)
        .prop_map(move |labels| SPElement::from_labels(go, b, &labels))
}

fn spc(go: usize, b: usize) -> impl Strategy<Value = SPCElement> {
    prop::collection::vec(prop::option::of((0u32..3, 0..go as Gid)), b)
        .prop_map(move |e| SPCElement::from_entries(&GroupTable::cyclic(go), &e))
}

fn matrix(dim: usize, go: usize) -> impl Strategy<Value = RowMonomialMatrix> {
    prop::collection::vec(prop::option::of((0..dim as u32, 0..go as Gid)), dim).prop_map(RowMonomialMatrix::from_rows)
}

fn rel(n: usize) -> impl Strategy<Value = CRel> {
    prop::collection::vec(prop::collection::vec(any::<bool>(), n), n).prop_map(move |bits| {
        let mut r = CRel::empty(n);
        for (i, row) in bits.iter().enumerate() {
            for (j, &on) in row.iter().enumerate() {
                if on {
                    r.insert(i, j);
                }
            }
        }
        r
    })
}

fn leq(a: &SPElement, b: &SPElement) -> bool {
    a.leq(b).expect("same universe")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sp_lattice_laws_sampled_above_four_points(a in sp(3, 2), b in sp(3, 2), c in sp(3, 2)) {
        let m = |x: &SPElement, y: &SPElement| x.meet(y).unwrap();
        let j = |x: &SPElement, y: &SPElement| x.join(y).unwrap();
        prop_assert_eq!(m(&a, &b), m(&b, &a));
        prop_assert_eq!(j(&a, &b), j(&b, &a));
        prop_assert_eq!(m(&m(&a, &b), &c), m(&a, &m(&b, &c)));
        prop_assert_eq!(j(&j(&a, &b), &c), j(&a, &j(&b, &c)));
        prop_assert_eq!(m(&a, &a), a.clone());
        prop_assert_eq!(j(&a, &a), a.clone());
        prop_assert_eq!(m(&a, &j(&a, &b)), a.clone());
        prop_assert_eq!(j(&a, &m(&a, &b)), a.clone());
    }

    #[test]
    fn cross_sections_meet_closed_contradictions_join_closed(a in sp(2, 3), b in sp(2, 3)) {
        if is_cross_section_sp(&a) && is_cross_section_sp(&b) {
            prop_assert!(is_cross_section_sp(&a.meet(&b).unwrap()));
        }
        if !is_cross_section_sp(&a) {
            prop_assert!(!is_cross_section_sp(&a.join(&b).unwrap()));
        }
    }

    #[test]
    fn group_action_is_order_automorphism(a in sp(3, 2), b in sp(3, 2), h in 0..3 as Gid) {
        let g = GroupTable::cyclic(3);
        prop_assert_eq!(leq(&a, &b), leq(&a.act_left(&g, h), &b.act_left(&g, h)));
        let fixed = g.elements().all(|k| a.act_left(&g, k) == a);
        prop_assert_eq!(fixed, a.is_invariant(&g));
    }

    #[test]
    fn embedding_is_meet_homomorphism(x in spc(4, 5), y in spc(4, 5)) {
        let g = GroupTable::cyclic(4);
        let (ex, ey) = (cs_embedding(&x, &g), cs_embedding(&y, &g));
        prop_assert!(is_cross_section_sp(&ex) && ex.is_invariant(&g));
        match rh_meet(&RhElement::Spc(x.clone()), &RhElement::Spc(y.clone()), &g) {
            RhElement::Spc(m) => prop_assert_eq!(cs_embedding(&m, &g), ex.meet(&ey).unwrap()),
            RhElement::Contradiction => prop_assert!(false, "meet of SPCs is never the top"),
        }
        if let RhElement::Spc(jn) = spc_join(&x, &y, &g) {
            prop_assert_eq!(cs_embedding(&jn, &g), ex.join(&ey).unwrap());
        }
    }

    #[test]
    fn embedding_round_trip(x in spc(4, 6)) {
        let g = GroupTable::cyclic(4);
        prop_assert_eq!(cs_extract(&cs_embedding(&x, &g), &g).unwrap(), x);
    }

    #[test]
    fn matrix_composition_associative(a in matrix(4, 3), b in matrix(4, 3), c in matrix(4, 3)) {
        let g = GroupTable::cyclic(3);
        prop_assert_eq!(a.compose(&b, &g).compose(&c, &g), a.compose(&b.compose(&c, &g), &g));
    }

    #[test]
    fn regeneration_is_idempotent(gens in prop::collection::vec(matrix(3, 2), 1..4)) {
        let g = GroupTable::cyclic(2);
        let s = generate_semigroup(&gens, &g, 100_000).unwrap();
        let again = generate_semigroup(s.elements(), &g, 100_000).unwrap();
        let a: HashSet<_> = s.elements().iter().collect();
        let b: HashSet<_> = again.elements().iter().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn aperiodic_iff_trivial_group_h_classes(gens in prop::collection::vec(matrix(3, 2), 1..4)) {
        let g = GroupTable::cyclic(2);
        let s = generate_semigroup(&gens, &g, 100_000).unwrap();
        let gd = green_relations(&s);
        let trivial = gd.h_classes.iter().all(|h| h.len() == 1 || !h.iter().any(|&e| s.is_idempotent(e)));
        prop_assert_eq!(is_aperiodic(&s, None).unwrap(), trivial);
    }

    #[test]
    fn relation_operators(f in (1usize..=64).prop_flat_map(rel)) {
        let n = f.dim();
        let l = rel_loop(&f);
        prop_assert_eq!(rel_compose(&rel_backflow(&f), &f), f.clone());
        prop_assert_eq!(rel_loop(&l), l.clone());
        prop_assert_eq!(rel_backflow(&rel_backflow(&f)), rel_backflow(&f));
        prop_assert_eq!(rel_star(&rel_star(&f)), rel_star(&f));
        let w = rel_omega(&f);
        prop_assert_eq!(rel_compose(&w, &w), w);
        for i in 0..n {
            for m in l.rows[i].ones() {
                prop_assert!(f.contains(m, m), "loop target {} is not fixed", m);
            }
        }
    }
}

fn s2() -> gmflow::gm::GMSystem {
    build_sn(2, SxConvention::Odd, 2).unwrap().1
}

#[test]
fn vacuum_fixes_points() {
    for g in [s2(), example2().system] {
        let mut ev = Evaluator::new(&g, 10_000).unwrap();
        for b in 0..g.dim {
            let p = RhElement::Spc(SPCElement::point(g.dim, b));
            assert_eq!(ev.forward(&Wff::Empty, &p).unwrap(), p);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_flow_is_monotone(x in spc(4, 8), y in spc(4, 8), word in prop::collection::vec(0usize..5, 1..4), looped in any::<bool>()) {
        let g = s2();
        let grp = &g.group;
        let mut ev = Evaluator::new(&g, 100_000).unwrap();
        let body = Wff::concat(word.into_iter().map(Wff::Letter).collect());
        let w = if looped { Wff::loop_of(body) } else { body };
        let lo = RhElement::Spc(x.clone());
        let hi = match spc_join(&x, &y, grp) {
            RhElement::Spc(s) => RhElement::Spc(s),
            RhElement::Contradiction => return Ok(()),
        };
        let (fl, fh) = (ev.forward(&w, &lo).unwrap(), ev.forward(&w, &hi).unwrap());
        prop_assert!(rh_leq(&fl, &fh, grp));
    }
}
