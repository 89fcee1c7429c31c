#![allow(dead_code)]

use duplex_core::{DensityMatrix, DriveParams, Operator};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// ρ = G G† / Tr(G G†) with uniformly random complex G.
pub fn random_state(rng: &mut impl Rng) -> DensityMatrix {
    let g = Operator::from_fn(|_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).expect("normalized Gram matrix is a state")
}

/// Any Hermitian matrix, not necessarily unit trace.
pub fn random_hermitian(rng: &mut impl Rng) -> Operator {
    let g = Operator::from_fn(|_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn random_resonant(rng: &mut impl Rng, lo: f64, hi: f64) -> DriveParams {
    DriveParams::resonant(
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(0.0..TAU),
    )
}

pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    duplex_core::scan::linspace(start, stop, n)
}
