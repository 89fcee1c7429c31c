mod common;

use duplex_core::lindblad::{unvectorize, vectorize};
use duplex_core::{build_superoperator, master_rhs, DriveParams, Operator};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use std::f64::consts::TAU;

fn params() -> impl Strategy<Value = DriveParams> {
    (0.0..20.0, 0.0..20.0, 0.0..TAU, -5.0..5.0, 0.1..3.0)
        .prop_map(|(s, p, phi, d, g)| DriveParams::new(s, p, phi, d).with_gamma(g))
}

fn hermitian() -> impl Strategy<Value = Operator> {
    any::<u64>().prop_map(|seed| {
        common::random_hermitian(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    })
}

fn defect(a: &Operator, b: &Operator) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rhs_is_hermitian_and_traceless(p in params(), rho in hermitian()) {
        let d = master_rhs(&rho, &p).unwrap();
        prop_assert!(defect(&d, &d.adjoint()) < 1e-11);
        prop_assert!(d.trace().norm() < 1e-11);
    }

    #[test]
    fn rhs_is_linear(p in params(), a in hermitian(), b in hermitian(), x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let (cx, cy) = (Complex64::new(x, 0.0), Complex64::new(y, 0.0));
        let lhs = master_rhs(&(a * cx + b * cy), &p).unwrap();
        let rhs = master_rhs(&a, &p).unwrap() * cx + master_rhs(&b, &p).unwrap() * cy;
        prop_assert!(defect(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn superoperator_matches_rhs(p in params(), rho in hermitian()) {
        let l = build_superoperator(&p).unwrap();
        let direct = master_rhs(&rho, &p).unwrap();
        let via_vec = unvectorize(&(l.matrix() * vectorize(&rho)));
        prop_assert!(defect(&direct, &via_vec) < 1e-11);
        prop_assert!(defect(&l.apply(&rho), &direct) < 1e-11);
    }

    #[test]
    fn phase_is_two_pi_periodic(p in params()) {
        let a = build_superoperator(&p).unwrap();
        let b = build_superoperator(&p.with_phi(p.phi + TAU)).unwrap();
        let worst = (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12 * (1.0 + p.max_rate()));
    }
}

#[test]
fn generic_drive_has_one_dimensional_kernel() {
    let mut rng = common::rng(3);
    for _ in 0..50 {
        let p = common::random_resonant(&mut rng, 0.5, 10.0);
        assert_eq!(
            build_superoperator(&p).unwrap().kernel_dimension(1e-10),
            1,
            "{p:?}"
        );
    }
}

#[test]
fn undriven_kernel_is_degenerate() {
    let l = build_superoperator(&DriveParams::resonant(0.0, 0.0, 0.0)).unwrap();
    assert!(l.kernel_dimension(1e-10) >= 2);
}
