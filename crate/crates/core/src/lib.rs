//! Resonance-fluorescence interference from two duplicated two-level atoms
//! driven in a closed loop by orthogonally polarized fields.
//!
//! Each atom is an F = 1/2 ↔ F = 1/2 transition: two degenerate ground states
//! |1⟩, |2⟩ and two degenerate excited states |3⟩, |4⟩. A π-polarized field
//! drives |1⟩↔|3⟩ and |2⟩↔|4⟩, a σ-polarized field drives |2⟩↔|3⟩ and
//! |1⟩↔|4⟩, and the relative phase φ between them closes the loop.
//!
//! * [`lindblad`] builds the Hamiltonian, relaxation and 16×16 generator.
//! * [`dynamics`] integrates the master equation with RK4.
//! * [`steady_state`] solves for the fixed point in closed form and numerically.
//! * [`interference`] turns a steady state into fringe intensity and visibility.
//! * [`scan`] sweeps parameters, including the standing-wave configuration.
//!
//! Everything is dimensionless in units of the excited-state decay rate γ.

pub mod density;
pub mod dynamics;
pub mod error;
pub mod interference;
pub mod lindblad;
pub mod scan;
pub mod steady_state;

pub use density::{DensityMatrix, Operator};
pub use error::{Error, Result};
pub use lindblad::{
    build_hamiltonian, build_superoperator, master_rhs, DriveParams, SuperOperator,
};
pub use steady_state::{
    analytic_steady_state, numeric_steady_state, Provenance, SteadyStateSolution,
};
