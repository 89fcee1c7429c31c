//! User-facing self-test over a seeded random sample of resonant drives.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use duplex_core::dynamics::rk4_order_check;
use duplex_core::interference::{fringe_visibility, visibility_closed_form};
use duplex_core::lindblad::closed_loop_hamiltonian;
use duplex_core::steady_state::solve_nullspace;
use duplex_core::{
    analytic_steady_state, DensityMatrix, DriveParams, Provenance, SteadyStateSolution,
    SuperOperator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20_240_607;
pub const DEFAULT_SAMPLES: usize = 200;

const DRIVE_RANGE: std::ops::Range<f64> = 0.05..20.0;
const AGREEMENT_TOL: f64 = 1e-8;
const ANALYTIC_SUM_TOL: f64 = 1e-12;
const NUMERIC_SUM_TOL: f64 = 1e-6;
const SYMMETRY_TOL: f64 = 1e-9;
const ORDER_RANGE: std::ops::RangeInclusive<f64> = 8.0..=32.0;

/// Source of the generator the numeric path is checked against. Ω_π may be
/// negative.
pub trait GeneratorModel {
    fn superoperator(&self, omega_sigma: f64, omega_pi: f64, phi: f64) -> SuperOperator;
}

/// The simulator's own resonant generator with γ = 1.
pub struct ClosedLoop;

impl GeneratorModel for ClosedLoop {
    fn superoperator(&self, omega_sigma: f64, omega_pi: f64, phi: f64) -> SuperOperator {
        SuperOperator::from_hamiltonian(
            &closed_loop_hamiltonian(omega_sigma, omega_pi, phi, 0.0),
            1.0,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    /// (Ω_σ, Ω_π, φ) of the worst sample.
    pub worst_at: Option<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub samples: usize,
    pub seed: u64,
    pub families: Vec<FamilyResult>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.families.iter().all(|f| f.pass)
    }

    pub fn render(&self) -> String {
        let mut s = format!("validate: {} samples, seed {}\n", self.samples, self.seed);
        for f in &self.families {
            let verdict = if f.pass { "PASS" } else { "FAIL" };
            let _ = write!(s, "{verdict}  {:<17} {}", f.name, f.detail);
            if let Some((os, op, phi)) = f.worst_at {
                let _ = write!(
                    s,
                    "; worst at omega_sigma={os:.12} omega_pi={op:.12} phi={phi:.12}"
                );
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Default)]
struct Worst {
    value: f64,
    at: Option<(f64, f64, f64)>,
}

impl Worst {
    fn note(&mut self, value: f64, at: (f64, f64, f64)) {
        let value = if value.is_nan() { f64::INFINITY } else { value };
        if value > self.value || self.at.is_none() {
            self.value = value;
            self.at = Some(at);
        }
    }

    fn family(self, name: &'static str, what: &str, tol: f64) -> FamilyResult {
        FamilyResult {
            name,
            pass: self.value < tol,
            detail: format!("max {what} {:.3e} (tolerance {tol:e})", self.value),
            worst_at: self.at,
        }
    }
}

fn numeric(model: &dyn GeneratorModel, os: f64, op: f64, phi: f64) -> Option<SteadyStateSolution> {
    let solve = solve_nullspace(&model.superoperator(os, op, phi)).ok()?;
    let p = DriveParams::resonant(os.abs(), op.abs(), phi);
    Some(SteadyStateSolution::from_state(
        p,
        solve.state,
        Provenance::NumericNullspace,
    ))
}

pub fn run_validation(model: &dyn GeneratorModel, samples: usize, seed: u64) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agreement = Worst::default();
    let mut sum_numeric = Worst::default();
    let mut sum_analytic = Worst::default();
    let mut symmetry = Worst::default();
    for _ in 0..samples {
        let os = rng.random_range(DRIVE_RANGE);
        let op = rng.random_range(DRIVE_RANGE);
        let phi = rng.random_range(0.0..TAU);
        let at = (os, op, phi);
        let p = DriveParams::resonant(os, op, phi);
        let Some(base) = numeric(model, os, op, phi) else {
            for w in [&mut agreement, &mut sum_numeric, &mut symmetry] {
                w.note(f64::INFINITY, at);
            }
            continue;
        };
        let analytic = analytic_steady_state(&p).expect("sampled drives are nondegenerate");
        agreement.note(analytic.deviation(&base), at);

        let v = fringe_visibility(&base);
        let closed = visibility_closed_form(&p).expect("sampled drives are nondegenerate");
        sum_numeric.note((v + base.n_e - 0.5).abs(), at);
        sum_analytic.note(closed.sum_rule_residual, at);

        let mut defect = 0.0_f64;
        for (a, b, c) in [
            (op, os, phi),
            (os, op, -phi),
            (os, op, phi + PI),
            (os, -op, phi),
        ] {
            defect = match numeric(model, a, b, c) {
                Some(s) => defect
                    .max((fringe_visibility(&s) - v).abs())
                    .max((s.n_e - base.n_e).abs()),
                None => f64::INFINITY,
            };
        }
        symmetry.note(defect, at);
    }
    let mut families = vec![
        agreement.family("analytic-numeric", "deviation", AGREEMENT_TOL),
        sum_rule_family(sum_analytic, sum_numeric),
        symmetry.family("symmetries", "defect", SYMMETRY_TOL),
    ];
    families.push(order_family());
    ValidationReport {
        samples,
        seed,
        families,
    }
}

fn sum_rule_family(analytic: Worst, numeric: Worst) -> FamilyResult {
    let analytic_ok = analytic.value < ANALYTIC_SUM_TOL;
    let numeric_ok = numeric.value < NUMERIC_SUM_TOL;
    FamilyResult {
        name: "sum-rule",
        pass: analytic_ok && numeric_ok,
        detail: format!(
            "max residual analytic {:.3e} (tolerance {ANALYTIC_SUM_TOL:e}), numeric {:.3e} (tolerance {NUMERIC_SUM_TOL:e})",
            analytic.value, numeric.value
        ),
        worst_at: if numeric_ok { analytic.at } else { numeric.at },
    }
}

fn order_family() -> FamilyResult {
    let p = DriveParams::resonant(1.0, 1.0, 0.0);
    let rho0 = DensityMatrix::from_populations([1.0, 0.0, 0.0, 0.0]).expect("pure ground state");
    match rk4_order_check(&rho0, &p, 20.0, 0.05) {
        Ok(check) => FamilyResult {
            name: "rk4-order",
            pass: ORDER_RANGE.contains(&check.ratio),
            detail: format!(
                "step-halving error ratio {:.3} (want {}..{})",
                check.ratio,
                ORDER_RANGE.start(),
                ORDER_RANGE.end()
            ),
            worst_at: Some((1.0, 1.0, 0.0)),
        },
        Err(e) => FamilyResult {
            name: "rk4-order",
            pass: false,
            detail: e.to_string(),
            worst_at: Some((1.0, 1.0, 0.0)),
        },
    }
}
