mod common;

use common::*;
use proptest::prelude::*;
use snforge_core::certificates::{choi_map, detector_on_operator, Tolerances};
use snforge_core::constructions::{
    build_z, concrete_family, concrete_xy, embed_zero, max_entangled, minus_i, plus_i,
    pt_invariant_family, pt_invariant_lift, scaling_state, A2,
};
use snforge_core::tensor::{partial_transpose, psd_check, DenseHermitian, TensorSpace};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn psd_components_give_psd_z(d1 in 1usize..4, d2 in 1usize..4, rx in 1usize..10, ry in 1usize..10, seed in any::<u64>()) {
        let mut r = rng(seed);
        let n1 = d1 * d1;
        let x = random_psd(&mut r, n1, rx.min(n1));
        let y = random_psd(&mut r, n1, ry.min(n1));
        let z = build_z(&x, &y, d2).unwrap();
        prop_assert!(z.reconstruction_residual() <= 1e-12);
        // Oracle: assemble from the definition with naive Kronecker products.
        let one_minus = DenseHermitian::identity(d2 * d2).matrix() - &naive_omega(d2);
        let want = &naive_kron(x.matrix(), &one_minus) + &naive_kron(y.matrix(), &naive_omega(d2));
        prop_assert!(z.z().matrix().max_abs_diff(&want) <= 1e-14 * (1.0 + want.max_abs()));
        prop_assert!(oracle_psd(z.z(), 1e-9));
    }

    #[test]
    fn lift_is_pt_invariant_for_any_base(da in 1usize..4, db in 1usize..4, seed in any::<u64>()) {
        let base = random_hermitian(&mut rng(seed), da * db)
            .with_space(TensorSpace::bipartite(da, db).unwrap())
            .unwrap();
        let lift = pt_invariant_lift(&base).unwrap();
        prop_assert!(lift.pt_invariance_residual() <= 1e-12);
        prop_assert!((lift.lifted.trace() - 2.0 * base.trace()).abs() <= 1e-12 * (1.0 + base.max_abs()));
        prop_assert!(lift.compress(&plus_i()).unwrap().max_abs_diff(&base) <= 1e-12);
        let gamma = naive_pt_second(base.matrix(), da, db);
        prop_assert!(lift.compress(&minus_i()).unwrap().matrix().max_abs_diff(&gamma) <= 1e-12);
    }
}

#[test]
fn normalized_family_trace_and_hypothesis() {
    for d1 in 2..4 {
        for d2 in d1..6 {
            let z = concrete_family(d1, d2).unwrap().normalized().unwrap();
            assert!((z.z().trace() - 1.0).abs() <= 1e-12);
            let (x, y) = concrete_xy(d1, d2).unwrap();
            let omega = max_entangled(d1).vector;
            assert!(x.expectation(omega.amplitudes()).abs() <= 1e-14);
            let want = ((d1 - 1) * (d2 + 1)) as f64;
            assert!((y.expectation(omega.amplitudes()) - want).abs() <= 1e-12);
        }
    }
}

#[test]
fn concrete_family_is_ppt_by_direct_check() {
    for (d1, d2) in [(2, 2), (2, 4), (3, 3), (2, 8)] {
        let z = concrete_family(d1, d2).unwrap();
        assert!(oracle_psd(z.z(), 1e-9));
        let zg = herm(naive_pt_b1b2(z.z().matrix(), d1, d2));
        assert!(oracle_psd(&zg, 1e-9), "d1={d1} d2={d2}");
    }
}

#[test]
fn detector_value_survives_zero_embedding() {
    let z = concrete_family(2, 4).unwrap();
    let tol = Tolerances::default();
    let p = choi_map(4).unwrap();
    let before = detector_on_operator(z.z(), z.space(), A2, &p, &tol).unwrap();
    let padded = embed_zero(z.z(), z.space(), &[2, 3, 4, 6]).unwrap();
    let after = detector_on_operator(&padded, padded.space().unwrap(), A2, &p, &tol).unwrap();
    assert!(before.violated && after.violated);
    assert!((before.min_eigenvalue - after.min_eigenvalue).abs() <= 1e-12);
}

#[test]
fn embedding_keeps_negative_minimum_and_zeroes_positive_one() {
    let s = TensorSpace::bipartite(2, 2).unwrap();
    let f = snforge_core::constructions::flip(2);
    let e = embed_zero(&f, &s, &[3, 3]).unwrap();
    assert!((oracle_min_eig(&e) + 1.0).abs() < 1e-12);
    let id = DenseHermitian::identity(4);
    let e = embed_zero(&id, &s, &[3, 2]).unwrap();
    assert!(oracle_min_eig(&e).abs() < 1e-15);
}

#[test]
fn scaling_states_are_ppt_states() {
    for d in [4, 5, 8, 9] {
        let s = scaling_state(d).unwrap();
        assert!((s.state.trace() - 1.0).abs() < 1e-12);
        assert!(psd_check(&s.state, 1e-9).unwrap().psd);
        let g = herm(naive_pt_second(s.state.matrix(), d, d));
        assert!(oracle_psd(&g, 1e-9), "d={d}");
    }
}

#[test]
fn pt_invariant_family_is_invariant_and_ppt() {
    for d in [8, 9, 10] {
        let f = pt_invariant_family(d).unwrap();
        let space = f.state.space().unwrap().clone();
        let g = partial_transpose(&f.state, &space, &[1]).unwrap();
        assert!(g.max_abs_diff(&f.state) <= 1e-14, "d={d}");
        assert!(oracle_psd(&f.state, 1e-9));
        assert!((f.state.trace() - 1.0).abs() < 1e-12);
    }
}
