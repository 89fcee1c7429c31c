//! Steady states three ways: resonant closed forms, the Liouvillian null
//! space, and long-time integration.

use std::fmt;

use num_complex::Complex64;

use crate::density::{max_abs, DensityMatrix, Operator};
use crate::dynamics::{evolve_to_steady, IntegrationSpec};
use crate::error::{Error, Result};
use crate::lindblad::{
    build_superoperator, unvectorize, vec_index, DriveParams, StateVector, SuperOperator,
};

/// Both Rabi frequencies below this (in units of γ) count as no drive.
pub const NEAR_ZERO_DRIVE: f64 = 1e-6;

/// A second singular value below this fraction of the largest means the
/// steady state is not unique.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Row of the flattened generator replaced by the trace constraint (dρ₄₄/dt).
pub const TRACE_ROW: usize = vec_index(3, 3);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Analytic,
    NumericNullspace,
    NumericTime,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::NumericNullspace => "numeric-nullspace",
            Provenance::NumericTime => "numeric-time",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateSolution {
    /// Parameters the solution belongs to.
    pub params: DriveParams,
    pub n_e: f64,
    pub n_g: f64,
    /// ρ₃₂ + ρ₄₁.
    pub rho_sigma: Complex64,
    /// ρ₄₂ − ρ₃₁.
    pub rho_pi: Complex64,
    /// Full state; absent for the closed forms.
    pub rho_full: Option<DensityMatrix>,
    pub provenance: Provenance,
}

impl SteadyStateSolution {
    pub fn from_state(params: DriveParams, state: DensityMatrix, provenance: Provenance) -> Self {
        Self {
            params,
            n_e: state.excited_population(),
            n_g: state.ground_population(),
            rho_sigma: state.rho_sigma(),
            rho_pi: state.rho_pi(),
            rho_full: Some(state),
            provenance,
        }
    }

    /// Largest difference in n_e, ρ_σ, ρ_π between two solutions.
    pub fn deviation(&self, other: &Self) -> f64 {
        (self.n_e - other.n_e)
            .abs()
            .max((self.rho_sigma - other.rho_sigma).norm())
            .max((self.rho_pi - other.rho_pi).norm())
    }
}

/// Terms shared by the resonant closed forms, in units where γ = 1.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ResonantTerms {
    pub omega_sigma: f64,
    pub omega_pi: f64,
    /// Ω_σ² + Ω_π².
    pub drive_power: f64,
    /// 2(Ω_σ² − Ω_π²)² + 4Ω_σ²Ω_π²(cos 2φ + 1).
    pub excess: f64,
}

impl ResonantTerms {
    pub fn new(p: &DriveParams) -> Result<Self> {
        p.validate()?;
        if p.delta != 0.0 {
            return Err(Error::UnsupportedRegime(p.delta));
        }
        if p.omega_sigma < NEAR_ZERO_DRIVE * p.gamma && p.omega_pi < NEAR_ZERO_DRIVE * p.gamma {
            return Err(Error::DegenerateInput(format!(
                "both Rabi frequencies are below {NEAR_ZERO_DRIVE} (omega_sigma = {}, omega_pi = {})",
                p.omega_sigma, p.omega_pi
            )));
        }
        let omega_sigma = p.omega_sigma / p.gamma;
        let omega_pi = p.omega_pi / p.gamma;
        let s2 = omega_sigma * omega_sigma;
        let p2 = omega_pi * omega_pi;
        // cos 2φ + 1 = 2cos²φ, which keeps full relative precision near φ = π/2.
        let cos_phi = p.phi.cos();
        let excess = 2.0 * (s2 - p2).powi(2) + 8.0 * s2 * p2 * cos_phi * cos_phi;
        Ok(Self {
            omega_sigma,
            omega_pi,
            drive_power: s2 + p2,
            excess,
        })
    }

    pub fn denominator(&self) -> f64 {
        self.drive_power + self.excess
    }

    /// n_e = ½[1 − (Ω_σ² + Ω_π²)/D], written without the cancellation.
    pub fn excited_population(&self) -> f64 {
        0.5 * self.excess / self.denominator()
    }

    /// V = ½(Ω_σ² + Ω_π²)/D.
    pub fn visibility(&self) -> f64 {
        0.5 * self.drive_power / self.denominator()
    }
}

/// Resonant closed-form steady state. Refuses Δ ≠ 0 and vanishing drives.
pub fn analytic_steady_state(p: &DriveParams) -> Result<SteadyStateSolution> {
    let terms = ResonantTerms::new(p)?;
    let d = terms.denominator();
    let s2 = terms.omega_sigma * terms.omega_sigma;
    let p2 = terms.omega_pi * terms.omega_pi;
    let (sin_phi, cos_phi) = p.phi.sin_cos();
    let (sin_2phi, cos_2phi) = (2.0 * p.phi).sin_cos();

    let rho_sigma =
        Complex64::new((p2 - s2) * sin_phi, (p2 + s2) * cos_phi) * (terms.omega_sigma / d);
    let rho_pi = Complex64::new(-s2 * sin_2phi, p2 + s2 * cos_2phi) * (terms.omega_pi / d);
    let n_e = terms.excited_population();
    Ok(SteadyStateSolution {
        params: *p,
        n_e,
        n_g: 1.0 - n_e,
        rho_sigma,
        rho_pi,
        rho_full: None,
        provenance: Provenance::Analytic,
    })
}

/// Output of [`solve_nullspace`].
#[derive(Debug, Clone, PartialEq)]
pub struct NullspaceSolve {
    pub state: DensityMatrix,
    /// ‖𝓛 vec(ρ)‖_∞ over every row of the original generator.
    pub residual: f64,
    /// All 16 singular values of the generator, ascending.
    pub singular_values: Vec<f64>,
}

/// Solves 𝓛 vec(ρ) = 0 with Tr ρ = 1 by replacing [`TRACE_ROW`] with the
/// trace functional.
pub fn solve_nullspace(generator: &SuperOperator) -> Result<NullspaceSolve> {
    let singular_values = generator.singular_values();
    let largest = singular_values[15];
    if !(largest.is_finite()) || singular_values[1] < DEGENERACY_THRESHOLD * largest {
        return Err(Error::DegenerateSteadyState {
            singular_values: singular_values[..4].to_vec(),
        });
    }

    let mut system = *generator.matrix();
    for col in 0..16 {
        system[(TRACE_ROW, col)] = Complex64::new(0.0, 0.0);
    }
    for d in 0..4 {
        system[(TRACE_ROW, vec_index(d, d))] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = StateVector::zeros();
    rhs[TRACE_ROW] = Complex64::new(1.0, 0.0);

    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::DegenerateSteadyState {
            singular_values: singular_values[..4].to_vec(),
        })?;
    let raw = unvectorize(&solution);
    let rho: Operator = (raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    let residual = max_abs(&generator.apply(&rho));
    Ok(NullspaceSolve {
        state: DensityMatrix::from_matrix_unchecked(rho),
        residual,
        singular_values,
    })
}

/// Steady state from the null space of the flattened generator. Works at
/// any detuning.
pub fn numeric_steady_state(p: &DriveParams) -> Result<SteadyStateSolution> {
    let solve = solve_nullspace(&build_superoperator(p)?)?;
    Ok(SteadyStateSolution::from_state(
        *p,
        solve.state,
        Provenance::NumericNullspace,
    ))
}

/// Steady state by integrating from the unpolarized ground state.
pub fn time_steady_state(p: &DriveParams, spec: &IntegrationSpec) -> Result<SteadyStateSolution> {
    let run = evolve_to_steady(&DensityMatrix::ground_mixture(), p, spec)?;
    Ok(SteadyStateSolution::from_state(
        *p,
        run.state,
        Provenance::NumericTime,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub analytic: SteadyStateSolution,
    pub nullspace: SteadyStateSolution,
    pub time: SteadyStateSolution,
    pub analytic_vs_nullspace: f64,
    pub analytic_vs_time: f64,
    pub nullspace_vs_time: f64,
    pub max_abs_deviation: f64,
    pub pass: bool,
}

/// Compares all three routes pairwise on (n_e, ρ_σ, ρ_π).
pub fn cross_validate(p: &DriveParams, tol: f64) -> Result<CrossValidation> {
    let analytic = analytic_steady_state(p)?;
    let nullspace = numeric_steady_state(p)?;
    let time = time_steady_state(p, &IntegrationSpec::for_params(p))?;
    let analytic_vs_nullspace = analytic.deviation(&nullspace);
    let analytic_vs_time = analytic.deviation(&time);
    let nullspace_vs_time = nullspace.deviation(&time);
    let max_abs_deviation = analytic_vs_nullspace
        .max(analytic_vs_time)
        .max(nullspace_vs_time);
    Ok(CrossValidation {
        analytic,
        nullspace,
        time,
        analytic_vs_nullspace,
        analytic_vs_time,
        nullspace_vs_time,
        max_abs_deviation,
        pass: max_abs_deviation < tol,
    })
}
