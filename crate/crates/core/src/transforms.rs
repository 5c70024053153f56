//! Coordinate changes: body and Jacobi variables, the Levi-Civita square map
//! with its cotangent lift, and the symplectic scaling used by the
//! regularized Hamiltonian.
//!
//! The integrator works in the *scaled* chart, where the physical relative
//! position is `r = L(ξ)/4` with `L` the squaring map and `|p_ξ|² = |ξ|²|p_r|²/4`.

use crate::dynamics::{ExtendedState, Trajectory};
use crate::model::ModelParams;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec2 = [f64; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("momentum lift is singular at xi = 0")]
    SingularChart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyState {
    pub q1: Vec2,
    pub q2: Vec2,
    pub p1: Vec2,
    pub p2: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiState {
    pub rho: Vec2,
    pub r: Vec2,
    pub p_rho: Vec2,
    pub p_r: Vec2,
}

/// Sheet of the double cover `ξ ↦ ξ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegChart {
    pub xi: Vec2,
    pub p_xi: Vec2,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScaleDirection {
    /// `(ξ, p) → (ξ/2, 2p)`: scaled chart to the plain Levi-Civita chart.
    Forward,
    /// `(ξ, p) → (2ξ, p/2)`.
    Inverse,
}

fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

fn scale(k: f64, a: Vec2) -> Vec2 {
    [k * a[0], k * a[1]]
}

pub fn bodies_to_jacobi(state: &BodyState, params: &ModelParams) -> JacobiState {
    let lbar = params.lambda_bar();
    let gamma = params.gamma();
    JacobiState {
        rho: scale(1.0 / lbar, add(state.q1, scale(params.lambda, state.q2))),
        r: add(state.q2, scale(-1.0, state.q1)),
        p_rho: add(state.p1, state.p2),
        p_r: add(scale(-gamma, state.p1), scale(1.0 / lbar, state.p2)),
    }
}

pub fn jacobi_to_bodies(state: &JacobiState, params: &ModelParams) -> BodyState {
    let lbar = params.lambda_bar();
    let gamma = params.gamma();
    BodyState {
        q1: add(state.rho, scale(-gamma, state.r)),
        q2: add(state.rho, scale(1.0 / lbar, state.r)),
        p1: add(scale(1.0 / lbar, state.p_rho), scale(-1.0, state.p_r)),
        p2: add(scale(gamma, state.p_rho), state.p_r),
    }
}

/// `p₁²/2 + p₂²/(2λ)`.
pub fn body_kinetic(state: &BodyState, params: &ModelParams) -> f64 {
    let n1 = state.p1[0].powi(2) + state.p1[1].powi(2);
    let n2 = state.p2[0].powi(2) + state.p2[1].powi(2);
    0.5 * n1 + 0.5 * n2 / params.lambda
}

/// `p_ρ²/(2λ̄) + p_r²/(2Γ)`.
pub fn jacobi_kinetic(state: &JacobiState, params: &ModelParams) -> f64 {
    let nr = state.p_rho[0].powi(2) + state.p_rho[1].powi(2);
    let n = state.p_r[0].powi(2) + state.p_r[1].powi(2);
    0.5 * nr / params.lambda_bar() + 0.5 * n / params.gamma()
}

/// `(u + iv)²`.
pub fn levi_civita(xi: Vec2) -> Vec2 {
    let [u, v] = xi;
    [u * u - v * v, 2.0 * u * v]
}

/// Principal complex square root of `r`, multiplied by the branch sign.
pub fn levi_civita_inverse(r: Vec2, branch: Branch) -> Vec2 {
    let [x, y] = r;
    let m = x.hypot(y);
    let (a, b) = if m == 0.0 {
        (0.0, 0.0)
    } else if x >= 0.0 {
        let a = (0.5 * (m + x)).sqrt();
        (a, y / (2.0 * a))
    } else {
        let b = (0.5 * (m - x)).sqrt();
        let b = if y < 0.0 { -b } else { b };
        (y / (2.0 * b), b)
    };
    scale(branch.sign(), [a, b])
}

/// `p_ξ = Jᵀ p_r` with `J = ∂r/∂ξ = 2[[u, −v], [v, u]]`.
pub fn lift_momentum(xi: Vec2, p_r: Vec2) -> Vec2 {
    let [u, v] = xi;
    [2.0 * (u * p_r[0] + v * p_r[1]), 2.0 * (-v * p_r[0] + u * p_r[1])]
}

/// Inverse of [`lift_momentum`]; undefined at `ξ = 0`.
pub fn unlift_momentum(xi: Vec2, p_xi: Vec2) -> Result<Vec2, TransformError> {
    let [u, v] = xi;
    let n2 = u * u + v * v;
    if n2 == 0.0 {
        return Err(TransformError::SingularChart);
    }
    let k = 1.0 / (2.0 * n2);
    Ok([k * (u * p_xi[0] - v * p_xi[1]), k * (v * p_xi[0] + u * p_xi[1])])
}

pub fn symplectic_scale(state: &RegChart, direction: ScaleDirection) -> RegChart {
    let (kx, kp) = match direction {
        ScaleDirection::Forward => (0.5, 2.0),
        ScaleDirection::Inverse => (2.0, 0.5),
    };
    RegChart {
        xi: scale(kx, state.xi),
        p_xi: scale(kp, state.p_xi),
        branch: state.branch,
    }
}

/// Relative position and momentum from a scaled-chart regularized state.
pub fn regularized_to_relative(xi: Vec2, p_xi: Vec2) -> Result<(Vec2, Vec2), TransformError> {
    let plain = symplectic_scale(
        &RegChart {
            xi,
            p_xi,
            branch: Branch::Plus,
        },
        ScaleDirection::Forward,
    );
    let p_r = unlift_momentum(plain.xi, plain.p_xi)?;
    Ok((levi_civita(plain.xi), p_r))
}

/// Scaled-chart regularized coordinates of a relative state on the given sheet.
pub fn relative_to_regularized(r: Vec2, p_r: Vec2, branch: Branch) -> RegChart {
    let xi = levi_civita_inverse(r, branch);
    let plain = RegChart {
        xi,
        p_xi: lift_momentum(xi, p_r),
        branch,
    };
    symplectic_scale(&plain, ScaleDirection::Inverse)
}

/// Center-of-mass position `ρ(t) = (cos ωt, sin ωt)/ε`, or `None` when `ε = 0`.
pub fn center_of_mass(t: f64, params: &ModelParams) -> Option<Vec2> {
    if params.epsilon <= 0.0 {
        return None;
    }
    let (s, c) = (params.omega() * t).sin_cos();
    Some([c / params.epsilon, s / params.epsilon])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSample {
    pub t: f64,
    pub q1: Option<Vec2>,
    pub q2: Option<Vec2>,
    pub rho: Option<Vec2>,
    pub r: Vec2,
}

/// Physical positions for one regularized state.
pub fn physical_sample(state: &ExtendedState, params: &ModelParams) -> PhysicalSample {
    let r = scale(0.25, levi_civita([state.u, state.v]));
    let rho = center_of_mass(state.t, params);
    let (q1, q2) = match rho {
        Some(rho) => {
            let bodies = jacobi_to_bodies(
                &JacobiState {
                    rho,
                    r,
                    p_rho: [0.0; 2],
                    p_r: [0.0; 2],
                },
                params,
            );
            (Some(bodies.q1), Some(bodies.q2))
        }
        None => (None, None),
    };
    PhysicalSample {
        t: state.t,
        q1,
        q2,
        rho,
        r,
    }
}

/// Satellite positions along every stored sample of a trajectory.
pub fn reconstruct_physical(traj: &Trajectory, params: &ModelParams) -> Vec<PhysicalSample> {
    traj.samples
        .iter()
        .map(|(_, st)| physical_sample(st, params))
        .collect()
}
