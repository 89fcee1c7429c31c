//! Fixed-step fourth-order Runge–Kutta integration of the master equation.
//!
//! The integrator is an oracle for the steady-state solvers: it only ever
//! evaluates [`Generator::apply`], never the closed forms or the Liouvillian
//! null space.

use num_complex::Complex64;

use crate::density::{hermiticity_defect, max_abs, DensityMatrix, Operator};
use crate::error::{Error, Result};
use crate::lindblad::{build_superoperator, unvectorize, vectorize, DriveParams, Generator};

/// Trace drift beyond which integration is aborted.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Largest admissible step is `STEP_SAFETY / max(γ, Ω_σ, Ω_π, |Δ|)`.
pub const STEP_SAFETY: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSpec {
    /// Time step, units of 1/γ.
    pub step: f64,
    /// Integration horizon, units of 1/γ.
    pub t_max: f64,
    /// Steady state is declared once ‖dρ/dt‖_∞ drops below this.
    pub convergence_tol: f64,
    /// Emit (and check) a sample every this many steps.
    pub sample_every: usize,
}

impl IntegrationSpec {
    pub fn step_ceiling(p: &DriveParams) -> f64 {
        STEP_SAFETY / p.max_rate()
    }

    /// Largest admissible step, a horizon of 2000/γ, derivative tolerance 1e-11·γ.
    pub fn for_params(p: &DriveParams) -> Self {
        Self {
            step: Self::step_ceiling(p),
            t_max: 2000.0 / p.gamma,
            convergence_tol: 1e-11 * p.gamma,
            sample_every: 10,
        }
    }

    pub fn with_step(self, step: f64) -> Self {
        Self { step, ..self }
    }

    pub fn with_t_max(self, t_max: f64) -> Self {
        Self { t_max, ..self }
    }

    pub fn with_tolerance(self, convergence_tol: f64) -> Self {
        Self {
            convergence_tol,
            ..self
        }
    }

    pub fn with_sample_every(self, sample_every: usize) -> Self {
        Self {
            sample_every,
            ..self
        }
    }

    pub fn validate(&self, p: &DriveParams) -> Result<()> {
        for (name, v) in [
            ("step", self.step),
            ("t_max", self.t_max),
            ("convergence_tol", self.convergence_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidSpec("sample_every must be at least 1".into()));
        }
        let ceiling = Self::step_ceiling(p);
        if self.step > ceiling * (1.0 + 1e-12) {
            return Err(Error::InvalidSpec(format!(
                "step {} exceeds the stability ceiling {ceiling}",
                self.step
            )));
        }
        Ok(())
    }

    fn step_count(&self) -> usize {
        // Tolerate t_max/step landing a hair above an integer.
        ((self.t_max / self.step) - 1e-9).ceil().max(1.0) as usize
    }

    fn time_after(&self, k: usize, n: usize) -> f64 {
        if k == n {
            self.t_max
        } else {
            k as f64 * self.step
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub state: DensityMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples
            .last()
            .expect("a trajectory always holds the initial sample")
    }
}

/// One classical RK4 step of length `h`.
pub fn rk4_step(generator: &Generator, rho: &Operator, h: f64) -> Operator {
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let k1 = generator.apply(rho);
    let k2 = generator.apply(&(rho + k1 * half));
    let k3 = generator.apply(&(rho + k2 * half));
    let k4 = generator.apply(&(rho + k3 * full));
    rho + (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0)
}

fn check_trace(rho: &Operator, time: f64) -> Result<()> {
    let drift = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
    if drift > TRACE_DRIFT_LIMIT || !drift.is_finite() {
        return Err(Error::NumericalInstability { time, drift });
    }
    Ok(())
}

/// Integrates from `rho0` to `spec.t_max`, emitting the initial state, every
/// `spec.sample_every`-th step and the final state.
pub fn integrate(
    rho0: &DensityMatrix,
    p: &DriveParams,
    spec: &IntegrationSpec,
) -> Result<Trajectory> {
    spec.validate(p)?;
    let generator = Generator::new(p)?;
    let n = spec.step_count();
    let mut samples = Vec::with_capacity(n / spec.sample_every + 2);
    samples.push(Sample {
        time: 0.0,
        state: *rho0,
    });
    let mut rho = *rho0.matrix();
    for k in 1..=n {
        let t_prev = (k - 1) as f64 * spec.step;
        let h = spec.step.min(spec.t_max - t_prev);
        rho = rk4_step(&generator, &rho, h);
        if k % spec.sample_every == 0 || k == n {
            let time = spec.time_after(k, n);
            check_trace(&rho, time)?;
            samples.push(Sample {
                time,
                state: DensityMatrix::from_matrix_unchecked(rho),
            });
        }
    }
    Ok(Trajectory { samples })
}

/// Result of [`evolve_to_steady`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyEvolution {
    pub state: DensityMatrix,
    /// Time at which the derivative norm first fell below tolerance.
    pub time: f64,
    pub derivative_norm: f64,
}

/// Integrates until ‖dρ/dt‖_∞ < `spec.convergence_tol` at a sample point.
pub fn evolve_to_steady(
    rho0: &DensityMatrix,
    p: &DriveParams,
    spec: &IntegrationSpec,
) -> Result<SteadyEvolution> {
    spec.validate(p)?;
    let generator = Generator::new(p)?;
    let n = spec.step_count();
    let mut rho = *rho0.matrix();
    let mut derivative_norm = max_abs(&generator.apply(&rho));
    if derivative_norm < spec.convergence_tol {
        return Ok(SteadyEvolution {
            state: *rho0,
            time: 0.0,
            derivative_norm,
        });
    }
    for k in 1..=n {
        let t_prev = (k - 1) as f64 * spec.step;
        let h = spec.step.min(spec.t_max - t_prev);
        rho = rk4_step(&generator, &rho, h);
        if k % spec.sample_every == 0 || k == n {
            let time = spec.time_after(k, n);
            check_trace(&rho, time)?;
            derivative_norm = max_abs(&generator.apply(&rho));
            if derivative_norm < spec.convergence_tol {
                return Ok(SteadyEvolution {
                    state: DensityMatrix::from_matrix_unchecked(rho),
                    time,
                    derivative_norm,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        t_max: spec.t_max,
        derivative_norm,
    })
}

/// ρ(t) = exp(𝓛t) ρ₀ through the matrix exponential of the flattened
/// generator. Serves as the exact reference for integrator error.
pub fn exact_evolution(rho0: &Operator, p: &DriveParams, t: f64) -> Result<Operator> {
    let a = build_superoperator(p)?;
    let propagator = (a.matrix() * Complex64::new(t, 0.0)).exp();
    Ok(unvectorize(&(propagator * vectorize(rho0))))
}

/// Integrator error at one time for a step and its half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderCheck {
    pub coarse_error: f64,
    pub fine_error: f64,
    /// `coarse_error / fine_error`; ≈ 16 for a fourth-order method.
    pub ratio: f64,
}

/// Compares RK4 at `step` and `step / 2` against [`exact_evolution`] at `t`.
///
/// `t` should be an integer multiple of `step`.
pub fn rk4_order_check(
    rho0: &DensityMatrix,
    p: &DriveParams,
    t: f64,
    step: f64,
) -> Result<OrderCheck> {
    let exact = exact_evolution(rho0.matrix(), p, t)?;
    let spec = IntegrationSpec::for_params(p).with_t_max(t);
    let error_at = |h: f64| -> Result<f64> {
        let run = integrate(rho0, p, &spec.with_step(h).with_sample_every(usize::MAX))?;
        Ok(max_abs(&(run.last().state.matrix() - exact)))
    };
    let coarse_error = error_at(step)?;
    let fine_error = error_at(0.5 * step)?;
    Ok(OrderCheck {
        coarse_error,
        fine_error,
        ratio: coarse_error / fine_error,
    })
}

/// Largest Hermiticity defect, trace drift and most negative eigenvalue seen
/// along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityReport {
    pub max_trace_drift: f64,
    pub max_hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

pub fn physicality(trajectory: &Trajectory) -> PhysicalityReport {
    let mut report = PhysicalityReport {
        max_trace_drift: 0.0,
        max_hermiticity_defect: 0.0,
        min_eigenvalue: f64::INFINITY,
    };
    for s in &trajectory.samples {
        let m = s.state.matrix();
        report.max_trace_drift = report
            .max_trace_drift
            .max((m.trace() - Complex64::new(1.0, 0.0)).norm());
        report.max_hermiticity_defect = report.max_hermiticity_defect.max(hermiticity_defect(m));
        report.min_eigenvalue = report.min_eigenvalue.min(s.state.min_eigenvalue());
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_ceiling_is_enforced() {
        let p = DriveParams::resonant(10.0, 2.0, 0.0);
        let spec = IntegrationSpec::for_params(&p);
        assert!((spec.step - 0.005).abs() < 1e-15);
        assert!(spec.validate(&p).is_ok());
        let err =
            integrate(&DensityMatrix::ground_mixture(), &p, &spec.with_step(0.01)).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)));
        assert!(spec.with_t_max(-1.0).validate(&p).is_err());
        assert!(spec.with_tolerance(0.0).validate(&p).is_err());
        assert!(spec.with_sample_every(0).validate(&p).is_err());
    }

    #[test]
    fn drive_free_ground_mixture_is_stationary() {
        let p = DriveParams::resonant(0.0, 0.0, 0.0);
        let rho0 = DensityMatrix::ground_mixture();
        let spec = IntegrationSpec::for_params(&p).with_t_max(5.0);
        let traj = integrate(&rho0, &p, &spec).unwrap();
        assert!(traj.samples.len() > 2);
        for s in &traj.samples {
            assert_eq!(s.state, rho0);
        }
        assert_eq!(traj.last().time, 5.0);
    }

    #[test]
    fn relaxes_to_resonant_population() {
        let p = DriveParams::resonant(1.0, 1.0, 0.0);
        let rho0 = DensityMatrix::from_populations([1.0, 0.0, 0.0, 0.0]).unwrap();
        let spec = IntegrationSpec::for_params(&p).with_t_max(40.0);
        let traj = integrate(&rho0, &p, &spec).unwrap();
        assert!((traj.last().state.excited_population() - 0.4).abs() < 1e-6);
    }

    #[test]
    fn partial_final_step_lands_on_t_max() {
        let p = DriveParams::resonant(1.0, 0.5, 0.3);
        let spec = IntegrationSpec::for_params(&p)
            .with_t_max(1.01)
            .with_step(0.02);
        let traj = integrate(&DensityMatrix::ground_mixture(), &p, &spec).unwrap();
        assert_eq!(traj.last().time, 1.01);
    }

    #[test]
    fn steady_evolution_tracks_population() {
        let p = DriveParams::resonant(1.0, 1.0, 0.0);
        let spec = IntegrationSpec::for_params(&p).with_tolerance(1e-8);
        let out = evolve_to_steady(&DensityMatrix::ground_mixture(), &p, &spec).unwrap();
        assert!((out.state.excited_population() - 0.4).abs() < 1e-6);
        assert!(out.derivative_norm < 1e-8);
        assert!(out.time > 0.0);
    }

    #[test]
    fn dark_drive_empties_excited_states() {
        let p = DriveParams::resonant(1.0, 1.0, std::f64::consts::FRAC_PI_2);
        let spec = IntegrationSpec::for_params(&p).with_tolerance(1e-10);
        let out = evolve_to_steady(&DensityMatrix::ground_mixture(), &p, &spec).unwrap();
        assert!(out.state.excited_population() < 1e-6);
    }

    #[test]
    fn ground_coherence_survives_without_drive() {
        let p = DriveParams::resonant(0.0, 0.0, 0.0);
        let mut m = *DensityMatrix::ground_mixture().matrix();
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        m[(1, 0)] = Complex64::new(0.5, 0.0);
        let rho0 = DensityMatrix::new(m).unwrap();
        let out = evolve_to_steady(&rho0, &p, &IntegrationSpec::for_params(&p)).unwrap();
        assert_eq!(out.state.element(1, 2), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn reports_non_convergence() {
        let p = DriveParams::resonant(1.0, 1.0, 0.0);
        let spec = IntegrationSpec::for_params(&p).with_t_max(0.5);
        match evolve_to_steady(&DensityMatrix::ground_mixture(), &p, &spec) {
            Err(Error::NonConvergence {
                t_max,
                derivative_norm,
            }) => {
                assert_eq!(t_max, 0.5);
                assert!(derivative_norm > 1e-3);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn exact_evolution_at_zero_time_is_identity() {
        let rho0 = *DensityMatrix::from_populations([0.2, 0.3, 0.4, 0.1])
            .unwrap()
            .matrix();
        let out = exact_evolution(&rho0, &DriveParams::resonant(2.0, 1.0, 0.5), 0.0).unwrap();
        assert!(max_abs(&(out - rho0)) < 1e-15);
    }
}
