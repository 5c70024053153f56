//! Vector fields and their integration.
//!
//! Trajectories may be integrated in a frame rotated by a fixed angle. The
//! perturbing potential is many orders of magnitude weaker than the
//! oscillator for small `ε`, so the transverse deviation of a nearly radial
//! ejection orbit is only resolvable in a frame aligned with it, where that
//! deviation starts from an exact zero.

pub mod dop853;
mod field;
mod oscillator;
mod trajectory;

pub use field::{rhs_frame, rhs_physical, rhs_regularized, Frame};
pub use oscillator::{
    ejection_frame_state, oscillator_clock, oscillator_flow, oscillator_flow_with_momentum,
    perturbation_residual, perturbation_sup, PerturbationSup,
};
pub use trajectory::{
    integrate, integrate_frame, integrate_physical, PhysicalTrajectory, ToleranceSettings,
    Trajectory, TrajectoryEvent, TrajectoryStatus,
};

use crate::model::ModelError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type StateVec = [f64; 6];

/// A point `(u, v, p_u, p_v, E, t)` of the extended regularized phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedState {
    pub u: f64,
    pub v: f64,
    pub p_u: f64,
    pub p_v: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub t: f64,
}

impl ExtendedState {
    pub fn new(u: f64, v: f64, p_u: f64, p_v: f64, e: f64, t: f64) -> Self {
        Self {
            u,
            v,
            p_u,
            p_v,
            e,
            t,
        }
    }

    pub fn to_array(&self) -> StateVec {
        [self.u, self.v, self.p_u, self.p_v, self.e, self.t]
    }

    pub fn from_array(y: &StateVec) -> Self {
        Self::new(y[0], y[1], y[2], y[3], y[4], y[5])
    }

    pub fn xi_norm2(&self) -> f64 {
        self.u * self.u + self.v * self.v
    }

    /// The reflection `(ξ, p, E, t) → (−ξ, −p, E, t)`.
    pub fn reflect(&self) -> Self {
        Self::new(-self.u, -self.v, -self.p_u, -self.p_v, self.e, self.t)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("{source} at state {state:?}")]
    Model {
        source: ModelError,
        state: ExtendedState,
    },
    #[error("operation requires E0 < 0 (got {e0})")]
    NotOscillatory { e0: f64 },
    #[error("operation requires epsilon > 0")]
    ZeroEpsilon,
    #[error("physical chart is singular at r = 0")]
    Collision,
    #[error("physical series outside its convergence domain (ratio {ratio:.6e})")]
    PhysicalDomain { ratio: f64 },
    #[error("integration failed: {0}")]
    Integration(String),
}
