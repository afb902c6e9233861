//! Resolution semigroups of certified divisions.

use gmflow::chartab::{build_sn, sn_flow, SxConvention};
use gmflow::flow::{flow_to_division, resolution_semigroup};
use gmflow::gm::gwr_sim;
use gmflow::typeii::{one_point_flow, one_state_candidate};
use gmflow::{green_relations, GroupTable};

#[test]
fn one_point_flow_on_inverse_semigroup_resolves_to_a_group() {
    for n in 1..=3 {
        let g = gwr_sim(&GroupTable::cyclic(2), n).unwrap();
        let state = one_point_flow(&g).unwrap().state().cloned().expect("inverse semigroups have one-point flows");
        let d = flow_to_division(&g, &one_state_candidate(&g, state)).unwrap();
        let r = resolution_semigroup(&d, &g.group).unwrap();
        let gd = green_relations(&r.semigroup);
        assert_eq!(r.minimal_ideal.len(), r.semigroup.len(), "n = {n}");
        assert_eq!((gd.num_h(), r.semigroup.idempotents().len()), (1, 1), "n = {n}");
    }
}

#[test]
fn sn_resolution_is_completely_regular_with_cyclic_units() {
    for n in 1..=2 {
        let (data, g) = build_sn(n, SxConvention::Odd, 2).unwrap();
        let d = flow_to_division(&g, &sn_flow(&data, &g).unwrap()).unwrap();
        let r = resolution_semigroup(&d, &g.group).unwrap();
        let s = &r.semigroup;
        let gd = green_relations(s);
        assert!((0..s.len()).all(|x| s.index_period(x).0 == 1), "n = {n}: not completely regular");
        let e = s.identity().expect("Res_n is a monoid");
        let units = &gd.h_classes[gd.h_of[e]];
        let order = 1usize << n;
        assert_eq!(units.len(), order, "n = {n}");
        assert!(units.iter().any(|&u| s.index_period(u).1 == order), "n = {n}: units are not cyclic");
        assert_eq!(r.minimal_ideal.len() + order, s.len(), "n = {n}: more than two J-classes");
    }
}
