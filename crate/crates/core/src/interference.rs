//! Far-field interference of the fluorescence from two independent,
//! identically driven atoms.
//!
//! The screen lies in the x–z plane, so the detected light is the sum of the
//! x (σ) and z (π) dipole channels. With the atoms treated independently the
//! intensity at detection phase δ = ω(τ₁ − τ₂) is
//!
//! ```text
//! I(δ) ∝ 4 n_e [1 + V cos δ],   V = (|ρ_σ|² + |ρ_π|²) / (2 n_e)
//! ```
//!
//! and on resonance V + n_e = 1/2 exactly.

use num_complex::Complex64;

use crate::density::{DensityMatrix, Operator};
use crate::error::{Error, Result};
use crate::lindblad::DriveParams;
use crate::steady_state::{Provenance, ResonantTerms, SteadyStateSolution};

/// Below this excited population the ratio form of V is 0/0 and the
/// closed form takes over.
pub const DARK_POPULATION: f64 = 1e-12;

/// Excited population below which no fluorescence is considered detectable.
pub const DETECTABILITY_FLOOR: f64 = 1e-9;

/// Lowering parts of the atomic dipole operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleSet {
    pub scale: f64,
    /// μ(|1⟩⟨4| + |2⟩⟨3|)
    pub x: Operator,
    /// −iμ(|1⟩⟨4| − |2⟩⟨3|)
    pub y: Operator,
    /// μ(|2⟩⟨4| − |1⟩⟨3|)
    pub z: Operator,
}

impl DipoleSet {
    pub fn new(scale: f64) -> Self {
        let mu = Complex64::new(scale, 0.0);
        let i_mu = Complex64::new(0.0, scale);
        let mut x = Operator::zeros();
        x[(0, 3)] = mu;
        x[(1, 2)] = mu;
        let mut y = Operator::zeros();
        y[(0, 3)] = -i_mu;
        y[(1, 2)] = i_mu;
        let mut z = Operator::zeros();
        z[(1, 3)] = mu;
        z[(0, 2)] = -mu;
        Self { scale, x, y, z }
    }

    /// Raising components, the conjugate transposes of the lowering ones.
    pub fn raising(&self) -> [Operator; 3] {
        [self.x.adjoint(), self.y.adjoint(), self.z.adjoint()]
    }

    /// Tr(ρ A).
    pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Complex64 {
        (rho.matrix() * op).trace()
    }
}

impl Default for DipoleSet {
    fn default() -> Self {
        Self::new(1.0)
    }
}

/// Single-atom auto-correlations and two-atom cross-correlations, μ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTerms {
    /// ⟨u_x↑ u_x↓⟩ = n_e
    pub auto_x: Complex64,
    /// ⟨u_z↑ u_z↓⟩ = n_e
    pub auto_z: Complex64,
    /// ⟨u_x↑ 𝒰_x↓⟩ = ρ_σ ρ_σ*
    pub cross_x: Complex64,
    /// ⟨u_z↑ 𝒰_z↓⟩ = ρ_π ρ_π*
    pub cross_z: Complex64,
}

pub fn cross_terms(s: &SteadyStateSolution) -> CrossTerms {
    let n_e = Complex64::new(s.n_e, 0.0);
    CrossTerms {
        auto_x: n_e,
        auto_z: n_e,
        cross_x: s.rho_sigma * s.rho_sigma.conj(),
        cross_z: s.rho_pi * s.rho_pi.conj(),
    }
}

/// V from a steady state. Uses the ratio (|ρ_σ|² + |ρ_π|²)/(2n_e) unless the
/// state is dark, in which case the resonant closed form decides.
pub fn fringe_visibility(s: &SteadyStateSolution) -> f64 {
    if s.n_e >= DARK_POPULATION {
        return (s.rho_sigma.norm_sqr() + s.rho_pi.norm_sqr()) / (2.0 * s.n_e);
    }
    match ResonantTerms::new(&s.params) {
        Ok(terms) => terms.visibility(),
        // Dark and off resonance: no closed form, and no light to make fringes.
        Err(_) => 0.0,
    }
}

/// Intensity 4n_e(1 + V cos δ), arbitrary units.
pub fn intensity_at(s: &SteadyStateSolution, delta: f64) -> f64 {
    4.0 * s.n_e * (1.0 + fringe_visibility(s) * delta.cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityReport {
    pub visibility: f64,
    pub n_e: f64,
    /// |V + n_e − 1/2|
    pub sum_rule_residual: f64,
    pub detectable: bool,
    pub provenance: Provenance,
}

impl VisibilityReport {
    fn new(visibility: f64, n_e: f64, provenance: Provenance) -> Self {
        Self {
            visibility,
            n_e,
            sum_rule_residual: (visibility + n_e - 0.5).abs(),
            detectable: n_e >= DETECTABILITY_FLOOR,
            provenance,
        }
    }
}

/// Visibility of any steady-state solution (ratio form, closed form at the dark point).
pub fn visibility_report(s: &SteadyStateSolution) -> VisibilityReport {
    VisibilityReport::new(fringe_visibility(s), s.n_e, s.provenance)
}

/// Resonant closed form V = ½(Ω_σ² + Ω_π²)/D.
pub fn visibility_closed_form(p: &DriveParams) -> Result<VisibilityReport> {
    let terms = ResonantTerms::new(p)?;
    Ok(VisibilityReport::new(
        terms.visibility(),
        terms.excited_population(),
        Provenance::Analytic,
    ))
}

/// |V + n_e − 1/2| from the closed forms.
pub fn sum_rule_residual(p: &DriveParams) -> Result<f64> {
    Ok(visibility_closed_form(p)?.sum_rule_residual)
}

/// Maximum visibility and minimum excited population over φ, both reached at
/// φ = π/2 (mod π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseExtremes {
    pub v_max: f64,
    pub n_e_min: f64,
}

pub fn extremes_at_phase_pi_half(omega_sigma: f64, omega_pi: f64) -> Result<PhaseExtremes> {
    let p = DriveParams::resonant(omega_sigma, omega_pi, 0.0);
    p.validate()?;
    // cos 2φ = −1 removes the phase term from the denominator.
    let s2 = omega_sigma * omega_sigma;
    let p2 = omega_pi * omega_pi;
    let power = s2 + p2;
    if omega_sigma < crate::steady_state::NEAR_ZERO_DRIVE
        && omega_pi < crate::steady_state::NEAR_ZERO_DRIVE
    {
        return Err(Error::DegenerateInput(
            "both Rabi frequencies vanish".into(),
        ));
    }
    let imbalance = 2.0 * (s2 - p2).powi(2);
    let d = power + imbalance;
    Ok(PhaseExtremes {
        v_max: 0.5 * power / d,
        n_e_min: 0.5 * imbalance / d,
    })
}

/// How detection points map to the phase δ.
#[derive(Debug, Clone, PartialEq)]
pub enum FringeSpec {
    /// δ given directly, radians.
    DirectPhase { phases: Vec<f64> },
    /// Screen coordinates x at distance L from atoms separated by d, with
    /// δ = k d x / L. Assumes L ≫ d; that is the caller's responsibility.
    Geometric {
        separation: f64,
        screen_distance: f64,
        wave_number: f64,
        screen_x: Vec<f64>,
    },
}

impl FringeSpec {
    /// `points` phases evenly covering one period [0, 2π).
    pub fn uniform(points: usize) -> Self {
        let step = std::f64::consts::TAU / points as f64;
        FringeSpec::DirectPhase {
            phases: (0..points).map(|k| k as f64 * step).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let coords = match self {
            FringeSpec::DirectPhase { phases } => phases,
            FringeSpec::Geometric {
                separation,
                screen_distance,
                wave_number,
                screen_x,
            } => {
                if !(separation.is_finite() && *separation > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "separation must be positive, got {separation}"
                    )));
                }
                if !(screen_distance.is_finite() && *screen_distance > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "screen distance must be positive, got {screen_distance}"
                    )));
                }
                if !wave_number.is_finite() {
                    return Err(Error::InvalidInput("wave number must be finite".into()));
                }
                screen_x
            }
        };
        if coords.is_empty() {
            return Err(Error::InvalidInput("fringe grid is empty".into()));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "fringe grid contains non-finite values".into(),
            ));
        }
        Ok(())
    }

    /// (screen coordinate, δ) pairs. The coordinate is δ itself in direct mode.
    pub fn points(&self) -> Vec<(f64, f64)> {
        match self {
            FringeSpec::DirectPhase { phases } => phases.iter().map(|&d| (d, d)).collect(),
            FringeSpec::Geometric {
                separation,
                screen_distance,
                wave_number,
                screen_x,
            } => screen_x
                .iter()
                .map(|&x| (x, wave_number * separation * x / screen_distance))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringePoint {
    pub coordinate: f64,
    pub phase: f64,
    pub intensity: f64,
}

pub fn fringe_pattern(s: &SteadyStateSolution, spec: &FringeSpec) -> Result<Vec<FringePoint>> {
    spec.validate()?;
    Ok(spec
        .points()
        .into_iter()
        .map(|(coordinate, phase)| FringePoint {
            coordinate,
            phase,
            intensity: intensity_at(s, phase),
        })
        .collect())
}

/// (I_max − I_min)/(I_max + I_min) over the sampled pattern.
///
/// A completely dark pattern has no contrast to measure and falls back to
/// [`fringe_visibility`].
pub fn visibility_from_pattern(s: &SteadyStateSolution, spec: &FringeSpec) -> Result<f64> {
    let pattern = fringe_pattern(s, spec)?;
    let (lo, hi) = pattern
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), pt| {
            (lo.min(pt.intensity), hi.max(pt.intensity))
        });
    if hi + lo <= f64::MIN_POSITIVE {
        return Ok(fringe_visibility(s));
    }
    Ok((hi - lo) / (hi + lo))
}
