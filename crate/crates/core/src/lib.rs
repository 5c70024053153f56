//! Regularized planar two-satellite Hill-type problem.
//!
//! The crate covers the coordinate changes between body, Jacobi and
//! Levi-Civita variables, the perturbed resonant-oscillator flow with an
//! adaptive integrator, the collinear relative equilibria, and the shooting
//! search for collision orbits.

pub mod collision;
pub mod dynamics;
pub mod equilibria;
pub mod model;
pub mod transforms;

pub use dynamics::{ExtendedState, ToleranceSettings, Trajectory};
pub use model::ModelParams;
