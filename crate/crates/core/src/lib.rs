//! Explicit convergent iteration for the ground state of the radial
//! Schroedinger equation with the N-dimensional sombrero potential
//!
//! ```text
//! V(r) = g^2/2 (r^2 - r0^2)^2 (r^2 + A r0^2),   r0^4 = (2 + N)/3
//! ```
//!
//! The ground state is written as `psi = phi * f`, where `phi` is a closed-form
//! trial function obeying a modified equation with perturbation `h`. The
//! correction factor `f` and the energy shift are then refined by alternating
//! an integral-ratio energy update with a nested-integral update of `f`.
//!
//! Modules:
//! - [`model`]: parameters, potential, residual probe and the exactly solvable case.
//! - [`trialfn`]: the trial function, its perturbation potential and zeroth energy.
//! - [`numerics`]: radial grid, Gauss-type panel rules and log-shifted integrals.
//! - [`iteration`]: the energy / correction-factor iteration and its report.
//! - [`oracle`]: an independent finite-difference ground-state solver.
//! - [`reference`]: published converged energies used for comparison.

pub mod error;
pub mod iteration;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod reference;
pub mod trialfn;

pub use error::{Error, Result};
pub use iteration::{solve, Anchor, Iteration, IterationState, SolveOptions, Solution, SolverReport};
pub use model::{exact_case, operator_residual, potential, ModelParams};
pub use numerics::grid::{build_grid, weighted_integral, GridSpec, RadialGrid};
pub use trialfn::{build_trial, EnergyZero, TrialConfig, TrialFunction};
