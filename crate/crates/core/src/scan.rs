//! Parameter sweeps over drive strength, phase, intensity ratio and
//! standing-wave position.
//!
//! Points are evaluated in parallel; output rows are always in lexicographic
//! axis order (first axis slowest), independent of scheduling.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interference::{visibility_closed_form, visibility_report, VisibilityReport};
use crate::lindblad::DriveParams;
use crate::steady_state::{numeric_steady_state, NEAR_ZERO_DRIVE};

/// Upper bound on the number of points in one sweep.
pub const MAX_SWEEP_POINTS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SweepParam {
    OmegaSigma,
    OmegaPi,
    Phi,
    /// r = Ω_π / Ω_σ.
    RatioR,
    /// ky of the standing-wave π field, Ω_π = Ω_σ sin(ky).
    PositionKy,
}

impl SweepParam {
    pub const ALL: [SweepParam; 5] = [
        SweepParam::OmegaSigma,
        SweepParam::OmegaPi,
        SweepParam::Phi,
        SweepParam::RatioR,
        SweepParam::PositionKy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::OmegaSigma => "omega_sigma",
            SweepParam::OmegaPi => "omega_pi",
            SweepParam::Phi => "phi",
            SweepParam::RatioR => "ratio_r",
            SweepParam::PositionKy => "position_ky",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('-', "_");
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown sweep parameter `{s}`")))
    }
}

/// Inclusive, linearly spaced axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(param: SweepParam, start: f64, stop: f64, points: usize) -> Self {
        Self {
            param,
            start,
            stop,
            points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config(format!(
                "axis {} has non-finite bounds",
                self.param
            )));
        }
        if self.points < 2 {
            return Err(Error::Config(format!(
                "axis {} needs at least 2 points",
                self.param
            )));
        }
        if self.start >= self.stop {
            return Err(Error::Config(format!(
                "axis {} must have start < stop, got {} .. {}",
                self.param, self.start, self.stop
            )));
        }
        if matches!(self.param, SweepParam::OmegaSigma | SweepParam::OmegaPi) && self.start < 0.0 {
            return Err(Error::Config(format!(
                "axis {} must be non-negative",
                self.param
            )));
        }
        Ok(())
    }

    pub fn value(&self, index: usize) -> f64 {
        if index + 1 == self.points {
            self.stop
        } else {
            self.start + (self.stop - self.start) * index as f64 / (self.points - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => Axis::new(SweepParam::Phi, start, stop, points).values(),
    }
}

/// How a point is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Closed forms on resonance, null space otherwise.
    #[default]
    Auto,
    Analytic,
    Numeric,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Auto => "auto",
            Engine::Analytic => "analytic",
            Engine::Numeric => "numeric",
        }
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(Engine::Auto),
            "analytic" => Ok(Engine::Analytic),
            "numeric" => Ok(Engine::Numeric),
            other => Err(Error::Config(format!("unknown engine `{other}`"))),
        }
    }
}

/// Visibility at one parameter point.
pub fn evaluate_point(p: &DriveParams, engine: Engine) -> Result<VisibilityReport> {
    p.validate()?;
    if p.omega_sigma < NEAR_ZERO_DRIVE * p.gamma && p.omega_pi < NEAR_ZERO_DRIVE * p.gamma {
        return Err(Error::DegenerateInput("no drive".into()));
    }
    match engine {
        Engine::Analytic => visibility_closed_form(p),
        Engine::Auto if p.delta == 0.0 => visibility_closed_form(p),
        Engine::Auto | Engine::Numeric => Ok(visibility_report(&numeric_steady_state(p)?)),
    }
}

/// Values held constant across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FixedParams {
    pub omega_sigma: Option<f64>,
    pub omega_pi: Option<f64>,
    pub phi: Option<f64>,
    pub ratio_r: Option<f64>,
    pub position_ky: Option<f64>,
    pub delta: f64,
}

impl FixedParams {
    pub fn get(&self, param: SweepParam) -> Option<f64> {
        match param {
            SweepParam::OmegaSigma => self.omega_sigma,
            SweepParam::OmegaPi => self.omega_pi,
            SweepParam::Phi => self.phi,
            SweepParam::RatioR => self.ratio_r,
            SweepParam::PositionKy => self.position_ky,
        }
    }

    pub fn set(&mut self, param: SweepParam, value: f64) {
        let slot = match param {
            SweepParam::OmegaSigma => &mut self.omega_sigma,
            SweepParam::OmegaPi => &mut self.omega_pi,
            SweepParam::Phi => &mut self.phi,
            SweepParam::RatioR => &mut self.ratio_r,
            SweepParam::PositionKy => &mut self.position_ky,
        };
        *slot = Some(value);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub axes: Vec<Axis>,
    pub fixed: FixedParams,
    pub engine: Engine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// No drive, or no unique steady state; V and n_e are NaN.
    Degenerate,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// One value per axis, in axis order.
    pub coords: Vec<f64>,
    pub visibility: f64,
    pub n_e: f64,
    pub detectable: bool,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axes: Vec<SweepParam>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn axis_column(&self, axis: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.coords[axis]).collect()
    }

    pub fn visibilities(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.visibility).collect()
    }
}

impl SweepGrid {
    pub fn new(axes: Vec<Axis>, fixed: FixedParams) -> Self {
        Self {
            axes,
            fixed,
            engine: Engine::Auto,
        }
    }

    pub fn with_engine(self, engine: Engine) -> Self {
        Self { engine, ..self }
    }

    fn is_bound(&self, param: SweepParam) -> bool {
        self.axes.iter().any(|a| a.param == param) || self.fixed.get(param).is_some()
    }

    pub fn point_count(&self) -> Option<usize> {
        self.axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.points))
    }

    /// Checks the whole grid before anything is evaluated.
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::Config("sweep needs at least one axis".into()));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            axis.validate()?;
            if self.axes[..i].iter().any(|a| a.param == axis.param) {
                return Err(Error::Config(format!("axis {} given twice", axis.param)));
            }
            if self.fixed.get(axis.param).is_some() {
                return Err(Error::Config(format!(
                    "{} is both an axis and fixed",
                    axis.param
                )));
            }
        }
        match self.point_count() {
            Some(n) if n <= MAX_SWEEP_POINTS => {}
            _ => {
                return Err(Error::Config(format!(
                    "sweep exceeds {MAX_SWEEP_POINTS} points"
                )))
            }
        }
        for param in SweepParam::ALL {
            if let Some(v) = self.fixed.get(param) {
                if !v.is_finite() {
                    return Err(Error::Config(format!("fixed {param} must be finite")));
                }
                if matches!(param, SweepParam::OmegaSigma | SweepParam::OmegaPi) && v < 0.0 {
                    return Err(Error::Config(format!("fixed {param} must be non-negative")));
                }
            }
        }
        if !self.fixed.delta.is_finite() {
            return Err(Error::Config("delta must be finite".into()));
        }
        if !self.is_bound(SweepParam::OmegaSigma) {
            return Err(Error::Config(
                "omega_sigma is neither an axis nor fixed".into(),
            ));
        }
        if !self.is_bound(SweepParam::Phi) {
            return Err(Error::Config("phi is neither an axis nor fixed".into()));
        }
        let pi_sources: Vec<_> = [
            SweepParam::OmegaPi,
            SweepParam::RatioR,
            SweepParam::PositionKy,
        ]
        .into_iter()
        .filter(|&p| self.is_bound(p))
        .collect();
        match pi_sources.len() {
            1 => {}
            0 => {
                return Err(Error::Config(
                    "omega_pi needs a value, a ratio_r or a position_ky".into(),
                ))
            }
            _ => {
                let names: Vec<_> = pi_sources.iter().map(|p| p.name()).collect();
                return Err(Error::Config(format!(
                    "conflicting omega_pi sources: {}",
                    names.join(", ")
                )));
            }
        }
        if self.engine == Engine::Analytic && self.fixed.delta != 0.0 {
            return Err(Error::Config(
                "the analytic engine requires delta = 0".into(),
            ));
        }
        Ok(())
    }

    fn value(&self, coords: &[f64], param: SweepParam) -> Option<f64> {
        self.axes
            .iter()
            .position(|a| a.param == param)
            .map(|i| coords[i])
            .or_else(|| self.fixed.get(param))
    }

    /// Drive parameters at a grid point. Signed ratios enter through |Ω_π|.
    pub fn params_at(&self, coords: &[f64]) -> DriveParams {
        let omega_sigma = self.value(coords, SweepParam::OmegaSigma).unwrap_or(0.0);
        let phi = self.value(coords, SweepParam::Phi).unwrap_or(0.0);
        let omega_pi = if let Some(r) = self.value(coords, SweepParam::RatioR) {
            (r * omega_sigma).abs()
        } else if let Some(ky) = self.value(coords, SweepParam::PositionKy) {
            (ky.sin() * omega_sigma).abs()
        } else {
            self.value(coords, SweepParam::OmegaPi).unwrap_or(0.0)
        };
        DriveParams::new(omega_sigma, omega_pi, phi, self.fixed.delta)
    }

    fn coords_at(&self, mut index: usize) -> Vec<f64> {
        let mut coords = vec![0.0; self.axes.len()];
        for (slot, axis) in coords.iter_mut().zip(&self.axes).rev() {
            *slot = axis.value(index % axis.points);
            index /= axis.points;
        }
        coords
    }
}

fn row_from(coords: Vec<f64>, outcome: Result<VisibilityReport>) -> Result<SweepRow> {
    match outcome {
        Ok(report) => Ok(SweepRow {
            coords,
            visibility: report.visibility,
            n_e: report.n_e,
            detectable: report.detectable,
            status: RowStatus::Ok,
        }),
        Err(e) if e.is_degenerate() => Ok(SweepRow {
            coords,
            visibility: f64::NAN,
            n_e: f64::NAN,
            detectable: false,
            status: RowStatus::Degenerate,
        }),
        Err(e) => Err(e),
    }
}

/// Evaluates every grid point. Degenerate points yield flagged rows.
pub fn run_sweep(grid: &SweepGrid) -> Result<SweepTable> {
    grid.validate()?;
    let total = grid.point_count().unwrap_or(0);
    let rows = (0..total)
        .into_par_iter()
        .map(|index| {
            let coords = grid.coords_at(index);
            let p = grid.params_at(&coords);
            row_from(coords, evaluate_point(&p, grid.engine))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axes: grid.axes.iter().map(|a| a.param).collect(),
        rows,
    })
}

/// A π-polarized standing wave Ω_π(y) = Ω sin(ky) against a travelling σ field.
#[derive(Debug, Clone, PartialEq)]
pub struct StandingWaveSpec {
    /// Peak Rabi frequency Ω of the standing wave.
    pub omega: f64,
    pub ky_grid: Vec<f64>,
    /// Travelling-wave Rabi frequency, Ω by default.
    pub omega_sigma: f64,
    /// π/2 by default.
    pub phi: f64,
    pub engine: Engine,
}

impl StandingWaveSpec {
    pub fn new(omega: f64, ky_grid: Vec<f64>) -> Self {
        Self {
            omega,
            ky_grid,
            omega_sigma: omega,
            phi: FRAC_PI_2,
            engine: Engine::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::Config(format!(
                "standing-wave omega must be positive, got {}",
                self.omega
            )));
        }
        if !(self.omega_sigma.is_finite() && self.omega_sigma >= 0.0) {
            return Err(Error::Config(
                "omega_sigma must be finite and non-negative".into(),
            ));
        }
        if !self.phi.is_finite() {
            return Err(Error::Config("phi must be finite".into()));
        }
        if self.ky_grid.is_empty() {
            return Err(Error::Config("ky grid is empty".into()));
        }
        if self.ky_grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("ky grid contains non-finite values".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandingWaveRow {
    pub ky: f64,
    /// Signed sin(ky); V depends only on its square.
    pub r: f64,
    pub visibility: f64,
    pub n_e: f64,
    pub detectable: bool,
    pub status: RowStatus,
}

pub fn standing_wave_scan(spec: &StandingWaveSpec) -> Result<Vec<StandingWaveRow>> {
    spec.validate()?;
    spec.ky_grid
        .par_iter()
        .map(|&ky| {
            let r = ky.sin();
            let p = DriveParams::resonant(spec.omega_sigma, (spec.omega * r).abs(), spec.phi);
            let row = row_from(vec![ky], evaluate_point(&p, spec.engine))?;
            Ok(StandingWaveRow {
                ky,
                r,
                visibility: row.visibility,
                n_e: row.n_e,
                detectable: row.detectable,
                status: row.status,
            })
        })
        .collect()
}

/// Width of the region around the unique maximum of `values` where it stays
/// at or above `threshold · max`, with crossings linearly interpolated.
pub fn peak_width(coords: &[f64], values: &[f64], threshold: f64) -> Result<f64> {
    if coords.len() != values.len() || coords.len() < 3 {
        return Err(Error::InvalidInput(
            "peak_width needs matching scans of at least 3 points".into(),
        ));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidInput(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    if values.iter().chain(coords).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "scan contains non-finite values".into(),
        ));
    }
    let (peak, &max) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let ties = values
        .iter()
        .filter(|&&v| (v - max).abs() <= 1e-12 * max.abs())
        .count();
    if ties > 1 {
        return Err(Error::AmbiguousPeak(format!(
            "{ties} points share the maximum {max}"
        )));
    }
    if peak == 0 || peak + 1 == values.len() {
        return Err(Error::AmbiguousPeak("maximum lies on the grid edge".into()));
    }
    let level = threshold * max;
    let cross = |i: usize, j: usize| {
        // values[i] < level <= values[j]
        coords[i] + (level - values[i]) * (coords[j] - coords[i]) / (values[j] - values[i])
    };
    let left = (0..peak)
        .rev()
        .find(|&i| values[i] < level)
        .map(|i| cross(i, i + 1))
        .ok_or_else(|| Error::AmbiguousPeak("no threshold crossing left of the peak".into()))?;
    let right = (peak + 1..values.len())
        .find(|&i| values[i] < level)
        .map(|i| cross(i, i - 1))
        .ok_or_else(|| Error::AmbiguousPeak("no threshold crossing right of the peak".into()))?;
    Ok((right - left).abs())
}

/// Figure-reproduction presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// V over (Ω_σ, Ω_π) at φ = 0.
    Fig2a,
    /// V over (Ω_σ, Ω_π) at φ = π/2.
    Fig2b,
    /// V over (Ω, φ) with equal intensities.
    Fig2c,
    /// V(φ) at one equal intensity Ω.
    Fig2d,
    /// V over (r, Ω_σ) at φ = π/2.
    Fig3a,
    /// V(Ω_σ) at one ratio r, φ = π/2.
    Fig3b,
    /// V over (ky, Ω) with a standing-wave π field.
    Fig3c,
    /// V(Ω) at one standing-wave position ky.
    Fig3d,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig2c,
        Preset::Fig2d,
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig3c,
        Preset::Fig3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig2c => "fig2c",
            Preset::Fig2d => "fig2d",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig3c => "fig3c",
            Preset::Fig3d => "fig3d",
        }
    }

    /// Builds the grid. `omega` sets the equal drive of fig2d (default 10);
    /// `ratio` sets r for fig3b and ky = asin(r) for fig3d (default 0.9).
    pub fn grid(self, omega: Option<f64>, ratio: Option<f64>) -> SweepGrid {
        use SweepParam::*;
        let omega = omega.unwrap_or(10.0);
        let ratio = ratio.unwrap_or(0.9);
        let drive = |param| Axis::new(param, 0.0, 10.0, 201);
        let mut fixed = FixedParams::default();
        let axes = match self {
            Preset::Fig2a | Preset::Fig2b => {
                fixed.phi = Some(if self == Preset::Fig2a {
                    0.0
                } else {
                    FRAC_PI_2
                });
                vec![drive(OmegaSigma), drive(OmegaPi)]
            }
            Preset::Fig2c => {
                fixed.ratio_r = Some(1.0);
                vec![drive(OmegaSigma), Axis::new(Phi, 0.0, PI, 361)]
            }
            Preset::Fig2d => {
                fixed.ratio_r = Some(1.0);
                fixed.omega_sigma = Some(omega);
                vec![Axis::new(Phi, 0.0, PI, 721)]
            }
            Preset::Fig3a => {
                fixed.phi = Some(FRAC_PI_2);
                vec![Axis::new(RatioR, 0.5, 1.5, 201), drive(OmegaSigma)]
            }
            Preset::Fig3b => {
                fixed.phi = Some(FRAC_PI_2);
                fixed.ratio_r = Some(ratio);
                vec![drive(OmegaSigma)]
            }
            Preset::Fig3c => {
                fixed.phi = Some(FRAC_PI_2);
                vec![Axis::new(PositionKy, 0.0, TAU, 1000), drive(OmegaSigma)]
            }
            Preset::Fig3d => {
                fixed.phi = Some(FRAC_PI_2);
                fixed.position_ky = Some(ratio.clamp(-1.0, 1.0).asin());
                vec![drive(OmegaSigma)]
            }
        };
        SweepGrid::new(axes, fixed)
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown preset `{s}`")))
    }
}
