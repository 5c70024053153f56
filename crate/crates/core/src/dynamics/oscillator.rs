use super::{integrate_frame, DynamicsError, ExtendedState, Frame, StateVec, ToleranceSettings};
use crate::model::ModelParams;
use serde::{Deserialize, Serialize};

fn require_oscillatory(params: &ModelParams) -> Result<(), DynamicsError> {
    if params.is_oscillatory() {
        Ok(())
    } else {
        Err(DynamicsError::NotOscillatory { e0: params.e0 })
    }
}

/// Ejection state `(0, 0, p0, 0, E₀, t₀)` in the frame aligned with the ejection direction.
pub fn ejection_frame_state(p0: f64, params: &ModelParams) -> StateVec {
    [0.0, 0.0, p0, 0.0, params.e0, params.t0]
}

/// Closed-form unperturbed ejection orbit with the level-set momentum.
pub fn oscillator_flow(alpha: f64, s: f64, params: &ModelParams) -> Result<ExtendedState, DynamicsError> {
    oscillator_flow_with_momentum(alpha, s, params.ejection_momentum(), params)
}

/// Closed-form unperturbed ejection orbit leaving the origin with momentum `p0`.
///
/// `E` and `t` are held at `(E₀, t₀)`; see [`oscillator_clock`] for the exact
/// physical time of the unperturbed flow.
pub fn oscillator_flow_with_momentum(
    alpha: f64,
    s: f64,
    p0: f64,
    params: &ModelParams,
) -> Result<ExtendedState, DynamicsError> {
    require_oscillatory(params)?;
    let w = params.omega_osc();
    let amp = p0 / (params.gamma() * w);
    let (sn, cs) = (w * s).sin_cos();
    let (sa, ca) = alpha.sin_cos();
    Ok(ExtendedState::new(
        amp * ca * sn,
        amp * sa * sn,
        p0 * ca * cs,
        p0 * sa * cs,
        params.e0,
        params.t0,
    ))
}

/// `t(s) = t₀ + ∫|ξ|²/4 ds` along the unperturbed ejection orbit.
pub fn oscillator_clock(s: f64, p0: f64, params: &ModelParams) -> Result<f64, DynamicsError> {
    require_oscillatory(params)?;
    let w = params.omega_osc();
    let amp = p0 / (params.gamma() * w);
    Ok(params.t0 + 0.25 * amp * amp * (0.5 * s - (2.0 * w * s).sin() / (4.0 * w)))
}

fn require_positive_epsilon(params: &ModelParams) -> Result<(), DynamicsError> {
    if params.epsilon > 0.0 {
        Ok(())
    } else {
        Err(DynamicsError::ZeroEpsilon)
    }
}

/// `(φ_ε(s) − φ_osc(s))/ε` for the ejection at angle `alpha`.
pub fn perturbation_residual(
    alpha: f64,
    s: f64,
    params: &ModelParams,
    control: &ToleranceSettings,
) -> Result<StateVec, DynamicsError> {
    require_positive_epsilon(params)?;
    require_oscillatory(params)?;
    if s == 0.0 {
        return Ok([0.0; 6]);
    }
    let frame = Frame::new(alpha);
    let p0 = params.ejection_momentum();
    let traj = integrate_frame(ejection_frame_state(p0, params), frame, 0.0, s, control, &[], params)
        .into_result()?;
    let exact = traj.final_state().to_array();
    let osc = oscillator_flow(alpha, s, params)?.to_array();
    let mut out = [0.0; 6];
    for i in 0..6 {
        out[i] = (exact[i] - osc[i]) / params.epsilon;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSup {
    /// `sup_s max_i |φ_ε − φ_osc|`.
    pub sup_norm: f64,
    /// Per-component sup over the grid.
    pub components: StateVec,
}

/// Sup over `[0, T₀]` of `|φ_ε − φ_osc|` sampled on `n + 1` grid points.
pub fn perturbation_sup(
    alpha: f64,
    params: &ModelParams,
    control: &ToleranceSettings,
    n: usize,
) -> Result<PerturbationSup, DynamicsError> {
    require_positive_epsilon(params)?;
    require_oscillatory(params)?;
    let t0 = params.period();
    let frame = Frame::new(alpha);
    let traj = integrate_frame(
        ejection_frame_state(params.ejection_momentum(), params),
        frame,
        0.0,
        t0,
        control,
        &[],
        params,
    )
    .into_result()?;
    let mut components = [0.0f64; 6];
    for k in 0..=n {
        let s = t0 * k as f64 / n as f64;
        let exact = traj
            .state_at(s)
            .ok_or_else(|| DynamicsError::Integration(format!("no dense output at s = {s}")))?
            .to_array();
        let osc = oscillator_flow(alpha, s, params)?.to_array();
        for i in 0..6 {
            components[i] = components[i].max((exact[i] - osc[i]).abs());
        }
    }
    Ok(PerturbationSup {
        sup_norm: components.iter().copied().fold(0.0, f64::max),
        components,
    })
}
