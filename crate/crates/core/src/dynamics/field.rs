use super::{DynamicsError, ExtendedState, StateVec};
use crate::model::{clamp_unit, lambda_n, series_value_grad, ModelParams};

/// A fixed rotation of the `ξ`-plane. Frame coordinates `(a, b)` relate to
/// lab coordinates by `ξ = R(angle)·(a, b)`; momenta rotate the same way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub angle: f64,
    cos: f64,
    sin: f64,
}

impl Frame {
    pub fn lab() -> Self {
        Self {
            angle: 0.0,
            cos: 1.0,
            sin: 0.0,
        }
    }

    pub fn new(angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        Self { angle, cos, sin }
    }

    fn rot(&self, a: f64, b: f64) -> (f64, f64) {
        (self.cos * a - self.sin * b, self.sin * a + self.cos * b)
    }

    fn unrot(&self, x: f64, y: f64) -> (f64, f64) {
        (self.cos * x + self.sin * y, -self.sin * x + self.cos * y)
    }

    pub fn to_lab(&self, y: &StateVec) -> StateVec {
        let (u, v) = self.rot(y[0], y[1]);
        let (pu, pv) = self.rot(y[2], y[3]);
        [u, v, pu, pv, y[4], y[5]]
    }

    pub fn from_lab(&self, y: &StateVec) -> StateVec {
        let (a, b) = self.unrot(y[0], y[1]);
        let (pa, pb) = self.unrot(y[2], y[3]);
        [a, b, pa, pb, y[4], y[5]]
    }

    /// Weights `w` with `w·y = u_lab` for a frame state `y`.
    pub fn lab_u_weights(&self) -> StateVec {
        [self.cos, -self.sin, 0.0, 0.0, 0.0, 0.0]
    }

    /// Weights `w` with `w·y = v_lab` for a frame state `y`.
    pub fn lab_v_weights(&self) -> StateVec {
        [self.sin, self.cos, 0.0, 0.0, 0.0, 0.0]
    }
}

/// Vector field of the regularized flow for a state expressed in `frame`.
pub fn rhs_frame(y: &StateVec, frame: &Frame, params: &ModelParams) -> Result<StateVec, DynamicsError> {
    let [a, b, pa, pb, e, t] = *y;
    let (u, v) = frame.rot(a, b);
    let (_, g) = series_value_grad(u, v, t, params).map_err(|source| DynamicsError::Model {
        source,
        state: ExtendedState::from_array(&frame.to_lab(y)),
    })?;
    let (ga, gb) = frame.unrot(g[0], g[1]);
    let gamma = params.gamma();
    let eps2 = params.epsilon * params.epsilon;
    let lin = 0.5 * (params.lambda_bar() * params.epsilon + e);
    Ok([
        pa / gamma,
        pb / gamma,
        lin * a + eps2 * ga,
        lin * b + eps2 * gb,
        -eps2 * g[2],
        0.25 * (a * a + b * b),
    ])
}

/// `d(state)/ds` derived from the regularized Hamiltonian with the `dt∧dE` orientation.
pub fn rhs_regularized(state: &ExtendedState, params: &ModelParams) -> Result<ExtendedState, DynamicsError> {
    rhs_frame(&state.to_array(), &Frame::lab(), params).map(|d| ExtendedState::from_array(&d))
}

/// `Σ Pₙ(cos θ)(ε|r|)ⁿΛₙ` with `θ` the angle between `r` and the center-of-mass direction.
fn physical_series(r: [f64; 2], t: f64, params: &ModelParams) -> Result<f64, DynamicsError> {
    let norm = r[0].hypot(r[1]);
    let (s, c) = (params.omega() * t).sin_cos();
    let cos_theta = clamp_unit((r[0] * c + r[1] * s) / norm)
        .map_err(|_| DynamicsError::Collision)?;
    let x = params.epsilon * norm;
    let (mut p_prev, mut p) = (1.0, cos_theta);
    let mut xn = x;
    let mut sum = 0.0;
    for n in 1..=params.n_max {
        sum += p * xn * lambda_n(n, params);
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * cos_theta * p - nf * p_prev) / (nf + 1.0);
        p_prev = p;
        p = next;
        xn *= x;
    }
    Ok(sum)
}

/// Relative-motion vector field in physical time, away from collision.
///
/// The tidal gradient is taken by central differences; this is a reference
/// flow for cross-checking, not a production path.
pub fn rhs_physical(
    r: [f64; 2],
    p_r: [f64; 2],
    t: f64,
    params: &ModelParams,
) -> Result<([f64; 2], [f64; 2]), DynamicsError> {
    let norm = r[0].hypot(r[1]);
    if norm == 0.0 {
        return Err(DynamicsError::Collision);
    }
    let ratio = params.epsilon * params.gamma() * norm;
    if !(ratio < 1.0 - 1e-6) {
        return Err(DynamicsError::PhysicalDomain { ratio });
    }
    let gamma = params.gamma();
    let mu = params.level();
    let k = -mu / norm.powi(3);
    let mut force = [k * r[0], k * r[1]];
    if params.epsilon > 0.0 {
        let h = 1e-5 * norm;
        for i in 0..2 {
            let mut fwd = r;
            let mut bwd = r;
            fwd[i] += h;
            bwd[i] -= h;
            let d = (physical_series(fwd, t, params)? - physical_series(bwd, t, params)?) / (2.0 * h);
            force[i] += params.epsilon * d;
        }
    }
    Ok(([p_r[0] / gamma, p_r[1] / gamma], force))
}
