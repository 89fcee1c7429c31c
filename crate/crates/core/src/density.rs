//! Four-level density matrices over the basis |1⟩, |2⟩, |3⟩, |4⟩.
//!
//! States |1⟩ and |2⟩ are the degenerate ground sublevels, |3⟩ and |4⟩ the
//! degenerate excited sublevels. Storage is 0-based, so `ρ₃₂` lives at
//! `[(2, 1)]`.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A 4×4 complex operator on the atomic state space.
pub type Operator = Matrix4<Complex64>;

/// Tolerance for the Hermiticity and unit-trace checks in [`DensityMatrix::new`].
pub const STATE_TOLERANCE: f64 = 1e-12;

/// Largest entrywise deviation of `m` from its conjugate transpose.
pub fn hermiticity_defect(m: &Operator) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in i..4 {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry modulus.
pub fn max_abs(m: &Operator) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// A Hermitian, unit-trace state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    /// Validates Hermiticity and unit trace to [`STATE_TOLERANCE`].
    ///
    /// Positivity is not checked here; see [`DensityMatrix::min_eigenvalue`].
    pub fn new(m: Operator) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput(
                "density matrix has non-finite entries".into(),
            ));
        }
        let defect = hermiticity_defect(&m);
        if defect > STATE_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "density matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let trace = m.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > STATE_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix without checks. Used for integrator output, whose
    /// defects are reported rather than rejected.
    pub(crate) fn from_matrix_unchecked(m: Operator) -> Self {
        Self(m)
    }

    /// Diagonal state with the given populations of |1⟩..|4⟩.
    pub fn from_populations(populations: [f64; 4]) -> Result<Self> {
        let m = Operator::from_diagonal(&nalgebra::Vector4::from_iterator(
            populations.iter().map(|&p| Complex64::new(p, 0.0)),
        ));
        Self::new(m)
    }

    /// The unpolarized ground state diag(1/2, 1/2, 0, 0).
    pub fn ground_mixture() -> Self {
        let mut m = Operator::zeros();
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        Self(m)
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn into_inner(self) -> Operator {
        self.0
    }

    /// Element `ρ_ij` with 1-based indices matching the state labels.
    ///
    /// Panics if an index is outside 1..=4.
    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        assert!(
            (1..=4).contains(&i) && (1..=4).contains(&j),
            "state labels are 1..=4"
        );
        self.0[(i - 1, j - 1)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.0)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let hermitian = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(hermitian)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// n_g = ρ₁₁ + ρ₂₂.
    pub fn ground_population(&self) -> f64 {
        (self.0[(0, 0)] + self.0[(1, 1)]).re
    }

    /// n_e = ρ₃₃ + ρ₄₄.
    pub fn excited_population(&self) -> f64 {
        (self.0[(2, 2)] + self.0[(3, 3)]).re
    }

    /// ρ_σ = ρ₃₂ + ρ₄₁, the source of the σ-polarized (x) scattered field.
    pub fn rho_sigma(&self) -> Complex64 {
        self.0[(2, 1)] + self.0[(3, 0)]
    }

    /// ρ_π = ρ₄₂ − ρ₃₁, the source of the π-polarized (z) scattered field.
    pub fn rho_pi(&self) -> Complex64 {
        self.0[(3, 1)] - self.0[(2, 0)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_mixture_is_valid() {
        let rho = DensityMatrix::ground_mixture();
        assert!(DensityMatrix::new(*rho.matrix()).is_ok());
        assert_eq!(rho.ground_population(), 1.0);
        assert_eq!(rho.excited_population(), 0.0);
        assert!((rho.min_eigenvalue() - 0.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = *DensityMatrix::ground_mixture().matrix();
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rejects_wrong_trace() {
        assert!(DensityMatrix::from_populations([0.5, 0.5, 0.5, 0.0]).is_err());
        assert!(DensityMatrix::from_populations([f64::NAN, 0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn coherence_views_use_one_based_labels() {
        let mut m = *DensityMatrix::ground_mixture().matrix();
        m[(2, 1)] = Complex64::new(0.0, 0.1); // ρ₃₂
        m[(1, 2)] = Complex64::new(0.0, -0.1);
        m[(2, 0)] = Complex64::new(0.05, 0.0); // ρ₃₁
        m[(0, 2)] = Complex64::new(0.05, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        assert_eq!(rho.element(3, 2), Complex64::new(0.0, 0.1));
        assert_eq!(rho.rho_sigma(), Complex64::new(0.0, 0.1));
        assert_eq!(rho.rho_pi(), Complex64::new(-0.05, 0.0));
    }
}
