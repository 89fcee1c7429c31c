use thiserror::Error;

/// Everything that can go wrong inside the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid integration spec: {0}")]
    InvalidSpec(String),

    #[error("numerical instability: trace drifted by {drift:e} at t = {time}")]
    NumericalInstability { time: f64, drift: f64 },

    #[error("no steady state before t = {t_max}; final derivative norm {derivative_norm:e}")]
    NonConvergence { t_max: f64, derivative_norm: f64 },

    #[error("closed forms hold only on resonance, got delta = {0}")]
    UnsupportedRegime(f64),

    #[error("degenerate drive: {0}")]
    DegenerateInput(String),

    #[error("steady state is not unique; smallest singular values {singular_values:?}")]
    DegenerateSteadyState { singular_values: Vec<f64> },

    #[error("ambiguous peak: {0}")]
    AmbiguousPeak(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for failures caused by the physics (no unique steady state, no
    /// drive) rather than by malformed input.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateInput(_) | Error::DegenerateSteadyState { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
