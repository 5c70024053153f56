//! Parameter bookkeeping and the scalar functions of the regularized model.
//!
//! Everything here is a pure function of its inputs. The perturbation
//! potential [`potential_v`] is the bare Legendre series; callers apply the
//! `ε²` prefactor themselves (see [`hamiltonian_reg`]).

mod legendre;
mod potential;

pub use legendre::{legendre_all, legendre_deriv_all};
pub(crate) use legendre::clamp_unit;
pub(crate) use potential::{series_value_grad, CollinearForm};
pub use potential::{
    collinear_v, cos_half_theta, grad_v, hamiltonian_reg, lambda_n, potential_v, Alignment,
    PotentialVariant, SeriesPoint, SeriesValue,
};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Largest admissible convergence ratio `εΓ|ξ|²/4` of the Legendre series.
pub const CONVERGENCE_GUARD: f64 = 1.0 - 1e-6;

/// Slack allowed on the Legendre argument before it is rejected.
pub const UNIT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("Legendre argument {x} outside [-1, 1]")]
    LegendreDomain { x: f64 },
    #[error("angle undefined at the collision point |xi| = 0")]
    UndefinedAngle,
    #[error("series outside its convergence domain (ratio {ratio:.6e} >= {guard})")]
    ConvergenceDomain { ratio: f64, guard: f64 },
}

/// Physical and derived constants of the two-satellite model.
///
/// Only the primary fields are stored; every derived quantity is recomputed
/// on demand so the struct never carries inconsistent state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Mass ratio `m₂ / m₁`.
    pub lambda: f64,
    /// Reciprocal radius of the center-of-mass circular orbit.
    pub epsilon: f64,
    /// Scaled primary satellite mass, `m₁ = ε·μ̃`.
    pub mu_tilde: f64,
    /// Initial value of the energy variable `E`.
    #[serde(rename = "E0")]
    pub e0: f64,
    /// Initial physical time.
    #[serde(default)]
    pub t0: f64,
    /// Truncation order of the Legendre series.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_n_max() -> usize {
    8
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            epsilon: 1e-4,
            mu_tilde: 1.0,
            e0: -1.0,
            t0: 0.0,
            n_max: default_n_max(),
        }
    }
}

impl ModelParams {
    pub fn new(lambda: f64, epsilon: f64, mu_tilde: f64, e0: f64) -> Result<Self, ModelError> {
        let params = Self {
            lambda,
            epsilon,
            mu_tilde,
            e0,
            ..Self::default()
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        fn bad(field: &'static str, reason: &str) -> ModelError {
            ModelError::InvalidParameter {
                field,
                reason: reason.to_string(),
            }
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(bad("lambda", "must be finite and > 0"));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(bad("epsilon", "must be finite and >= 0"));
        }
        if !(self.mu_tilde.is_finite() && self.mu_tilde > 0.0) {
            return Err(bad("mu_tilde", "must be finite and > 0"));
        }
        if !self.e0.is_finite() {
            return Err(bad("E0", "must be finite"));
        }
        if !self.t0.is_finite() {
            return Err(bad("t0", "must be finite"));
        }
        if self.n_max < 1 {
            return Err(bad("n_max", "must be >= 1"));
        }
        Ok(())
    }

    /// `λ̄ = 1 + λ`.
    pub fn lambda_bar(&self) -> f64 {
        1.0 + self.lambda
    }

    /// Reduced-mass factor `Γ = λ / (1 + λ)`.
    pub fn gamma(&self) -> f64 {
        self.lambda / (1.0 + self.lambda)
    }

    /// `κ = λ·μ̃`, so that `λ·m₁ = ε·κ`.
    pub fn kappa(&self) -> f64 {
        self.lambda * self.mu_tilde
    }

    /// Primary satellite mass `m₁ = ε·μ̃`.
    pub fn m1(&self) -> f64 {
        self.epsilon * self.mu_tilde
    }

    /// Angular rate of the center of mass, `ω = ε^{3/2}`.
    pub fn omega(&self) -> f64 {
        self.epsilon * self.epsilon.sqrt()
    }

    /// Frequency of the resonant oscillator, `√(|E₀| / 2Γ)`.
    pub fn omega_osc(&self) -> f64 {
        (self.e0.abs() / (2.0 * self.gamma())).sqrt()
    }

    /// Oscillator period `T₀ = 2π√(2Γ)/√|E₀|` in fictitious time.
    pub fn period(&self) -> f64 {
        2.0 * PI * (2.0 * self.gamma()).sqrt() / self.e0.abs().sqrt()
    }

    /// Ejection amplitude `A = 2√(εκ/|E₀|)`.
    pub fn amplitude(&self) -> f64 {
        2.0 * (self.epsilon * self.kappa() / self.e0.abs()).sqrt()
    }

    /// Energy of the center of mass per unit `|ρ₀|⁻¹`.
    pub fn e_cm(&self) -> f64 {
        -self.lambda_bar() * self.epsilon
    }

    /// Value of the regularized Hamiltonian on the collision level set, `λ·m₁ = ε·κ`.
    pub fn level(&self) -> f64 {
        self.epsilon * self.kappa()
    }

    /// Momentum magnitude of an ejection state on the level set, `√(2Γεκ)`.
    pub fn ejection_momentum(&self) -> f64 {
        (2.0 * self.gamma() * self.level()).sqrt()
    }

    /// Whether `E₀ < 0`, i.e. the unperturbed flow is an oscillator.
    pub fn is_oscillatory(&self) -> bool {
        self.e0 < 0.0
    }

    /// Upper bound `4/(εΓ)` on `|ξ|²` imposed by series convergence.
    pub fn u_max(&self) -> f64 {
        4.0 / (self.epsilon * self.gamma())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derived_constants_are_consistent() {
        for &(lambda, eps, mu, e0) in &[(1.0, 1e-4, 1.0, -1.0), (2.5, 0.01, 0.3, -0.7)] {
            let p = ModelParams::new(lambda, eps, mu, e0).unwrap();
            let gamma = p.gamma();
            assert!(gamma > 0.0 && gamma < 1.0);
            assert_eq!(p.lambda_bar(), 1.0 + lambda);
            assert_relative_eq!(gamma * p.lambda_bar(), lambda, max_relative = 1e-15);
            assert_relative_eq!(p.omega(), eps.powf(1.5), max_relative = 1e-15);
            assert_relative_eq!(p.period() * p.omega_osc(), 2.0 * PI, max_relative = 1e-15);
            assert_relative_eq!(p.level(), lambda * p.m1(), max_relative = 1e-15);
        }
    }

    #[test]
    fn ejection_momentum_matches_amplitude() {
        let p = ModelParams::new(1.0, 1e-3, 1.0, -1.0).unwrap();
        let p0 = p.ejection_momentum();
        assert_relative_eq!(p0, p.gamma() * p.amplitude() * p.omega_osc(), max_relative = 1e-14);
    }

    #[test]
    fn validation_rejects_bad_fields() {
        assert!(ModelParams::new(0.0, 0.1, 1.0, -1.0).is_err());
        assert!(ModelParams::new(1.0, -0.1, 1.0, -1.0).is_err());
        assert!(ModelParams::new(1.0, 0.1, 0.0, -1.0).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 1.0, -1.0).is_err());
        let p = ModelParams::default().with_n_max(0);
        assert!(matches!(
            p.validate(),
            Err(ModelError::InvalidParameter { field: "n_max", .. })
        ));
    }
}
