//! Hamiltonian, spontaneous-decay relaxation and the master-equation generator
//! for the closed-loop four-level system.
//!
//! Conventions: ħ = 1, all rates and frequencies are in units of the excited
//! state decay rate γ, and the Rabi frequencies are real and non-negative so
//! that φ carries the only field phase. The π-polarized field couples
//! |1⟩↔|3⟩ and |2⟩↔|4⟩, the σ-polarized field couples |2⟩↔|3⟩ and |1⟩↔|4⟩.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::density::Operator;
use crate::error::{Error, Result};

/// Driving fields and decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    /// Rabi frequency of the σ-polarized field.
    pub omega_sigma: f64,
    /// Rabi frequency of the π-polarized field.
    pub omega_pi: f64,
    /// Relative phase between the two fields, radians.
    pub phi: f64,
    /// Detuning ω₀ − ω.
    pub delta: f64,
    /// Decay rate of each excited state; 1 unless testing scale invariance.
    pub gamma: f64,
}

impl DriveParams {
    pub fn new(omega_sigma: f64, omega_pi: f64, phi: f64, delta: f64) -> Self {
        Self {
            omega_sigma,
            omega_pi,
            phi,
            delta,
            gamma: 1.0,
        }
    }

    /// Δ = 0, γ = 1.
    pub fn resonant(omega_sigma: f64, omega_pi: f64, phi: f64) -> Self {
        Self::new(omega_sigma, omega_pi, phi, 0.0)
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self { phi, ..self }
    }

    /// Exchanges the two Rabi frequencies.
    pub fn swapped(self) -> Self {
        Self {
            omega_sigma: self.omega_pi,
            omega_pi: self.omega_sigma,
            ..self
        }
    }

    /// Multiplies every rate (Ω_σ, Ω_π, Δ, γ) by `s`.
    pub fn scaled(self, s: f64) -> Self {
        Self {
            omega_sigma: self.omega_sigma * s,
            omega_pi: self.omega_pi * s,
            delta: self.delta * s,
            gamma: self.gamma * s,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_sigma", self.omega_sigma),
            ("omega_pi", self.omega_pi),
            ("phi", self.phi),
            ("delta", self.delta),
            ("gamma", self.gamma),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite, got {value}"
                )));
            }
        }
        if self.omega_sigma < 0.0 || self.omega_pi < 0.0 {
            return Err(Error::InvalidInput(format!(
                "Rabi frequencies must be non-negative, got omega_sigma = {}, omega_pi = {}",
                self.omega_sigma, self.omega_pi
            )));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Fastest rate in the problem, floored at γ.
    pub fn max_rate(&self) -> f64 {
        self.gamma
            .max(self.omega_sigma)
            .max(self.omega_pi)
            .max(self.delta.abs())
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Interaction-picture Hamiltonian in the rotating frame.
pub fn build_hamiltonian(p: &DriveParams) -> Result<Operator> {
    p.validate()?;
    Ok(closed_loop_hamiltonian(
        p.omega_sigma,
        p.omega_pi,
        p.phi,
        p.delta,
    ))
}

/// The same matrix without validation, so signed Rabi frequencies can be
/// probed directly.
pub fn closed_loop_hamiltonian(omega_sigma: f64, omega_pi: f64, phi: f64, delta: f64) -> Operator {
    let pi = c(omega_pi);
    // −Ω_σ e^{−iφ}
    let sigma_down = -Complex64::from_polar(omega_sigma, -phi);
    let mut h = Operator::zeros();
    h[(0, 2)] = pi;
    h[(0, 3)] = sigma_down;
    h[(1, 2)] = sigma_down;
    h[(1, 3)] = -pi;
    h[(2, 0)] = pi;
    h[(2, 1)] = sigma_down.conj();
    h[(3, 0)] = sigma_down.conj();
    h[(3, 1)] = -pi;
    h[(2, 2)] = c(delta);
    h[(3, 3)] = c(delta);
    h
}

/// Relaxation rate applied to element (i, j), 0-based, before repopulation.
fn damping_rate(i: usize, j: usize, gamma: f64) -> f64 {
    match (i >= 2, j >= 2) {
        (false, false) => 0.0,
        (true, true) => -2.0 * gamma,
        _ => -gamma,
    }
}

/// Spontaneous-decay part L[ρ] of the master equation.
///
/// Each excited state decays at 2γ in total, feeding γ(ρ₃₃ + ρ₄₄) into each
/// ground state. The ground coherence ρ₁₂ is left undamped.
pub fn apply_relaxation(rho: &Operator, gamma: f64) -> Operator {
    let mut out = Operator::zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] = rho[(i, j)] * damping_rate(i, j, gamma);
        }
    }
    let feed = (rho[(2, 2)] + rho[(3, 3)]) * gamma;
    out[(0, 0)] = feed;
    out[(1, 1)] = feed;
    out
}

/// The master-equation generator for fixed drive parameters, so that
/// repeated evaluations (time stepping) reuse the Hamiltonian.
#[derive(Debug, Clone, Copy)]
pub struct Generator {
    hamiltonian: Operator,
    gamma: f64,
}

impl Generator {
    pub fn new(p: &DriveParams) -> Result<Self> {
        Ok(Self {
            hamiltonian: build_hamiltonian(p)?,
            gamma: p.gamma,
        })
    }

    /// −i[H, ρ] + L[ρ].
    pub fn apply(&self, rho: &Operator) -> Operator {
        let h = &self.hamiltonian;
        let commutator = h * rho - rho * h;
        commutator * Complex64::new(0.0, -1.0) + apply_relaxation(rho, self.gamma)
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }
}

/// dρ/dt = −i[H, ρ] + L[ρ].
pub fn master_rhs(rho: &Operator, p: &DriveParams) -> Result<Operator> {
    Ok(Generator::new(p)?.apply(rho))
}

pub type SuperMatrix = SMatrix<Complex64, 16, 16>;
pub type StateVector = SVector<Complex64, 16>;

/// Row-major vectorization: `vec(ρ)[4i + j] = ρ[i][j]`.
pub fn vectorize(rho: &Operator) -> StateVector {
    StateVector::from_fn(|k, _| rho[(k / 4, k % 4)])
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &StateVector) -> Operator {
    Operator::from_fn(|i, j| v[4 * i + j])
}

/// Index of `ρ_ij` (0-based) in the row-major vectorization.
pub const fn vec_index(i: usize, j: usize) -> usize {
    4 * i + j
}

/// The master equation as a linear map on row-major vectorized states.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    matrix: SuperMatrix,
}

impl SuperOperator {
    /// Assembles the Liouvillian from an arbitrary Hamiltonian and the
    /// standard relaxation. Entries are written directly from the Kronecker
    /// structure `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)` rather than by probing
    /// [`master_rhs`], so the two stay independent.
    pub fn from_hamiltonian(h: &Operator, gamma: f64) -> Self {
        let minus_i = Complex64::new(0.0, -1.0);
        let mut a = SuperMatrix::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let row = vec_index(i, j);
                for k in 0..4 {
                    // Hρ: (H ⊗ I), coefficient of ρ[k][j].
                    a[(row, vec_index(k, j))] += minus_i * h[(i, k)];
                    // −ρH: (I ⊗ Hᵀ), coefficient of ρ[i][k].
                    a[(row, vec_index(i, k))] -= minus_i * h[(k, j)];
                }
                a[(row, row)] += c(damping_rate(i, j, gamma));
            }
        }
        for ground in 0..2 {
            let row = vec_index(ground, ground);
            a[(row, vec_index(2, 2))] += c(gamma);
            a[(row, vec_index(3, 3))] += c(gamma);
        }
        Self { matrix: a }
    }

    pub fn matrix(&self) -> &SuperMatrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &Operator) -> Operator {
        unvectorize(&(self.matrix * vectorize(rho)))
    }

    /// Singular values in ascending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.matrix.singular_values().iter().copied().collect();
        s.sort_by(f64::total_cmp);
        s
    }

    /// Number of singular values above `rel_tol` times the largest.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let s = self.singular_values();
        let cutoff = rel_tol * s.last().copied().unwrap_or(0.0);
        s.iter().filter(|&&v| v > cutoff).count()
    }

    pub fn kernel_dimension(&self, rel_tol: f64) -> usize {
        16 - self.numerical_rank(rel_tol)
    }
}

/// Flattened master equation for `p`.
pub fn build_superoperator(p: &DriveParams) -> Result<SuperOperator> {
    Ok(SuperOperator::from_hamiltonian(
        &build_hamiltonian(p)?,
        p.gamma,
    ))
}
