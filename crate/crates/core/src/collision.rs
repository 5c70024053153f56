//! Ejection orbits, their first return to the `u = 0` axis, and the
//! shooting search for an ejection angle whose orbit passes back through
//! the collision point.
//!
//! Each ejection is integrated in the frame aligned with its initial
//! momentum. The transverse miss at the return, `v(τ)`, is recovered from
//! the angular momentum `L = u·p_v − v·p_u`, which is frame independent and
//! keeps full relative precision even when the miss is far below the
//! orbit's amplitude times machine epsilon.

use crate::dynamics::dop853::{Direction, EventSpec};
use crate::dynamics::{
    ejection_frame_state, integrate_frame, DynamicsError, ExtendedState, Frame, StateVec,
    ToleranceSettings, Trajectory, TrajectoryStatus,
};
use crate::model::ModelParams;
use crate::transforms::physical_sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollisionSettings {
    /// Margin `δ` of the angle interval `[−π/2 + δ, π/2 − δ]`.
    pub delta: f64,
    pub grid: usize,
    pub bisect_tol: f64,
    /// Origin tolerance as a multiple of the amplitude `A`.
    pub origin_tol_factor: f64,
    pub n_passages: usize,
    /// Bisection starts from the bracket closest to this angle.
    pub target_alpha: f64,
}

impl Default for CollisionSettings {
    fn default() -> Self {
        Self {
            delta: 0.1,
            grid: 64,
            bisect_tol: 1e-12,
            origin_tol_factor: 1e-6,
            n_passages: 3,
            target_alpha: FRAC_PI_4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CollisionError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("regime violation: {reason}")]
    Regime {
        reason: String,
        table: Vec<ScanEntry>,
    },
    #[error(transparent)]
    Numeric(#[from] DynamicsError),
}

/// An ejection orbit: leaves `ξ = 0` at `s = 0` with momentum `p0·(cos α, sin α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EjectionSpec {
    pub alpha: f64,
    pub params: ModelParams,
    pub delta: f64,
    pub p0: f64,
}

impl EjectionSpec {
    /// Ejection on the collision level set, `|p|² = 2Γεκ`.
    pub fn new(alpha: f64, params: ModelParams) -> Self {
        Self {
            alpha,
            params,
            delta: CollisionSettings::default().delta,
            p0: params.ejection_momentum(),
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Overrides the momentum magnitude, e.g. for the `ε = 0` oscillator
    /// where the level-set momentum vanishes.
    pub fn with_p0(mut self, p0: f64) -> Self {
        self.p0 = p0;
        self
    }

    pub fn interval(&self) -> (f64, f64) {
        angle_interval(self.delta)
    }

    /// Oscillation amplitude `p0/(Γω_osc)`; equals `A` on the level set.
    pub fn amplitude(&self) -> f64 {
        self.p0 / (self.params.gamma() * self.params.omega_osc())
    }
}

pub fn angle_interval(delta: f64) -> (f64, f64) {
    (-FRAC_PI_2 + delta, FRAC_PI_2 - delta)
}

/// Lab-frame ejection state.
pub fn ejection_state(spec: &EjectionSpec) -> ExtendedState {
    let (s, c) = spec.alpha.sin_cos();
    let p = &spec.params;
    ExtendedState::new(0.0, 0.0, spec.p0 * c, spec.p0 * s, p.e0, p.t0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub alpha: f64,
    pub tau: f64,
    pub v_at_tau: f64,
    pub u_dot_at_tau: f64,
    /// `L = u·p_v − v·p_u` at the crossing.
    pub angular_momentum: f64,
    /// Distance of closest approach to the origin, `|L|/|p|`.
    pub closest_approach: f64,
    pub transversal: bool,
    pub state: ExtendedState,
}

fn require_crossing_regime(params: &ModelParams) -> Result<(), CollisionError> {
    if !params.is_oscillatory() {
        return Err(CollisionError::Invalid(format!(
            "E0 must be negative, got {}",
            params.e0
        )));
    }
    Ok(())
}

/// Runs the ejection orbit to its first `u = 0` crossing inside `(T₀/4, 3T₀/4)`.
pub fn crossing_with_trajectory(
    spec: &EjectionSpec,
    control: &ToleranceSettings,
) -> Result<(CrossingRecord, Trajectory), CollisionError> {
    let params = &spec.params;
    require_crossing_regime(params)?;
    if !(spec.p0 > 0.0) {
        return Err(CollisionError::Invalid(
            "ejection momentum must be positive".into(),
        ));
    }
    let t0 = params.period();
    let frame = Frame::new(spec.alpha);
    let events = [EventSpec::linear("u=0", frame.lab_u_weights(), 0.0)
        .window(0.25 * t0, 0.75 * t0)
        .terminal(true)];
    let traj = integrate_frame(
        ejection_frame_state(spec.p0, params),
        frame,
        0.0,
        0.75 * t0,
        control,
        &events,
        params,
    );
    if let TrajectoryStatus::Failed { message } = &traj.status {
        return Err(DynamicsError::Integration(message.clone()).into());
    }
    let Some((_, tau, y)) = traj.event_states().next().map(|(n, s, y)| (n, s, *y)) else {
        return Err(CollisionError::Regime {
            reason: format!(
                "no u = 0 crossing within (T0/4, 3T0/4) for alpha = {}",
                spec.alpha
            ),
            table: Vec::new(),
        });
    };
    let record = crossing_record(spec, &frame, tau, &y);
    Ok((record, traj))
}

fn crossing_record(spec: &EjectionSpec, frame: &Frame, tau: f64, y: &StateVec) -> CrossingRecord {
    let params = &spec.params;
    let [a, b, pa, pb, _, _] = *y;
    let l = a * pb - b * pa;
    let lab = frame.to_lab(y);
    let p_u = lab[2];
    let u_dot = p_u / params.gamma();
    let v = if p_u != 0.0 { -l / p_u } else { lab[1] };
    let p_norm = pa.hypot(pb);
    let threshold = 1e-10 * spec.amplitude() * params.omega_osc();
    CrossingRecord {
        alpha: spec.alpha,
        tau,
        v_at_tau: v,
        u_dot_at_tau: u_dot,
        angular_momentum: l,
        closest_approach: if p_norm > 0.0 { l.abs() / p_norm } else { 0.0 },
        transversal: u_dot.abs() > threshold,
        state: ExtendedState::new(0.0, v, lab[2], lab[3], lab[4], lab[5]),
    }
}

pub fn find_tau_crossing(
    spec: &EjectionSpec,
    control: &ToleranceSettings,
) -> Result<CrossingRecord, CollisionError> {
    crossing_with_trajectory(spec, control).map(|(r, _)| r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub alpha: f64,
    pub tau: Option<f64>,
    pub v_at_tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub table: Vec<ScanEntry>,
    /// Adjacent grid pairs with a sign change of `v(τ(α))`.
    pub brackets: Vec<(f64, f64)>,
}

impl ScanResult {
    /// The bracket whose midpoint is closest to `target`.
    pub fn nearest_bracket(&self, target: f64) -> Option<(f64, f64)> {
        self.brackets.iter().copied().min_by(|x, y| {
            let dx = (0.5 * (x.0 + x.1) - target).abs();
            let dy = (0.5 * (y.0 + y.1) - target).abs();
            dx.total_cmp(&dy)
        })
    }
}

fn v_of_alpha(
    alpha: f64,
    params: &ModelParams,
    control: &ToleranceSettings,
) -> Result<CrossingRecord, CollisionError> {
    find_tau_crossing(&EjectionSpec::new(alpha, *params), control)
}

/// Samples `v(τ(α))` on a uniform grid over the angle interval and reports
/// every adjacent pair with a sign change.
pub fn scan_sign_change(
    params: &ModelParams,
    delta: f64,
    grid_size: usize,
    control: &ToleranceSettings,
) -> Result<ScanResult, CollisionError> {
    if grid_size < 8 {
        return Err(CollisionError::Invalid(format!(
            "grid size must be at least 8, got {grid_size}"
        )));
    }
    if !(delta > 0.0 && delta < FRAC_PI_2) {
        return Err(CollisionError::Invalid(format!("delta {delta} outside (0, pi/2)")));
    }
    if !(params.epsilon > 0.0) {
        return Err(CollisionError::Invalid(
            "the angle scan needs epsilon > 0".into(),
        ));
    }
    require_crossing_regime(params)?;
    let (lo, hi) = angle_interval(delta);
    let alphas: Vec<f64> = (0..grid_size)
        .map(|i| lo + (hi - lo) * i as f64 / (grid_size - 1) as f64)
        .collect();
    let results: Vec<Result<CrossingRecord, CollisionError>> = alphas
        .par_iter()
        .map(|&a| v_of_alpha(a, params, control))
        .collect();

    let mut table = Vec::with_capacity(grid_size);
    let mut failure: Option<CollisionError> = None;
    for (alpha, res) in alphas.iter().zip(results) {
        match res {
            Ok(rec) => table.push(ScanEntry {
                alpha: *alpha,
                tau: Some(rec.tau),
                v_at_tau: Some(rec.v_at_tau),
            }),
            Err(e) => {
                table.push(ScanEntry {
                    alpha: *alpha,
                    tau: None,
                    v_at_tau: None,
                });
                if failure.is_none() {
                    failure = Some(e);
                }
            }
        }
    }
    if let Some(err) = failure {
        let reason = match err {
            CollisionError::Regime { reason, .. } => reason,
            other => other.to_string(),
        };
        return Err(CollisionError::Regime { reason, table });
    }
    let mut brackets = Vec::new();
    for w in table.windows(2) {
        let (va, vb) = (w[0].v_at_tau.unwrap(), w[1].v_at_tau.unwrap());
        if va == 0.0 || (va < 0.0) != (vb < 0.0) {
            brackets.push((w[0].alpha, w[1].alpha));
        }
    }
    if brackets.is_empty() {
        return Err(CollisionError::Regime {
            reason: "v(tau(alpha)) has no sign change on the grid".into(),
            table,
        });
    }
    Ok(ScanResult { table, brackets })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Passage {
    pub s: f64,
    pub t: f64,
    /// Distance from the origin at the passage.
    pub miss: f64,
    /// Direction of the momentum at the passage.
    pub direction: f64,
    /// `|q1 − q2|` after physical reconstruction.
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionOrbitResult {
    pub alpha_star: f64,
    pub tau_star: f64,
    pub v_at_tau: f64,
    pub origin_miss: f64,
    pub origin_tol: f64,
    pub amplitude: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// True when the sign change was lost during bisection; `bracket` then
    /// holds the finest conflicting pair.
    pub sign_change_lost: bool,
    /// Successive origin passages; the first is the crossing at `τ*`.
    pub passages: Vec<Passage>,
    pub interval_s: Vec<f64>,
    pub interval_t: Vec<f64>,
    /// `max − min` of the inter-passage `s` intervals.
    pub interval_s_spread: f64,
    /// Largest normalized deviation of the second arc from the reflected first arc.
    pub symmetry_error: f64,
    pub symmetric: bool,
    /// Normalized difference between integrating straight through the first
    /// passage and restarting from an exact ejection state.
    pub restart_consistency: f64,
    pub truncated: bool,
    pub note: Option<String>,
}

/// Bisects `α ↦ v(τ(α))` on a sign-change bracket.
pub fn bisect_alpha(
    bracket: (f64, f64),
    params: &ModelParams,
    settings: &CollisionSettings,
    control: &ToleranceSettings,
) -> Result<CollisionOrbitResult, CollisionError> {
    if !(params.epsilon > 0.0) {
        return Err(CollisionError::Invalid(
            "bisection is degenerate at epsilon = 0".into(),
        ));
    }
    let (mut lo, mut hi) = bracket;
    let mut rec_lo = v_of_alpha(lo, params, control)?;
    let mut rec_hi = v_of_alpha(hi, params, control)?;
    let sign = |v: f64| v < 0.0;
    if rec_lo.v_at_tau != 0.0 && rec_hi.v_at_tau != 0.0 && sign(rec_lo.v_at_tau) == sign(rec_hi.v_at_tau) {
        return Err(CollisionError::Invalid(format!(
            "bracket ({lo}, {hi}) has no sign change"
        )));
    }
    let mut iterations = 0;
    let mut best = if rec_lo.v_at_tau.abs() <= rec_hi.v_at_tau.abs() {
        rec_lo
    } else {
        rec_hi
    };
    while (hi - lo) > settings.bisect_tol && iterations < 200 {
        if best.v_at_tau == 0.0 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let rec = v_of_alpha(mid, params, control)?;
        if rec.v_at_tau.abs() < best.v_at_tau.abs() {
            best = rec;
        }
        if rec.v_at_tau == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if sign(rec.v_at_tau) == sign(rec_lo.v_at_tau) {
            lo = mid;
            rec_lo = rec;
        } else {
            hi = mid;
            rec_hi = rec;
        }
    }
    // Final pick: the endpoint with the smaller miss.
    let pick = [rec_lo, rec_hi, best]
        .into_iter()
        .min_by(|a, b| a.v_at_tau.abs().total_cmp(&b.v_at_tau.abs()))
        .unwrap();
    let amplitude = params.amplitude();
    let origin_tol = settings.origin_tol_factor * amplitude;
    let sign_change_lost = rec_lo.v_at_tau != 0.0
        && rec_hi.v_at_tau != 0.0
        && sign(rec_lo.v_at_tau) == sign(rec_hi.v_at_tau);
    Ok(CollisionOrbitResult {
        alpha_star: pick.alpha,
        tau_star: pick.tau,
        v_at_tau: pick.v_at_tau,
        origin_miss: pick.v_at_tau.abs(),
        origin_tol,
        amplitude,
        bracket: (lo, hi),
        iterations,
        sign_change_lost,
        passages: Vec::new(),
        interval_s: Vec::new(),
        interval_t: Vec::new(),
        interval_s_spread: 0.0,
        symmetry_error: f64::NAN,
        symmetric: false,
        restart_consistency: f64::NAN,
        truncated: false,
        note: None,
    })
}

/// An arc between consecutive origin passages.
struct Arc {
    traj: Trajectory,
    /// Closest approach at the end of the arc.
    end_s: f64,
    end_state: StateVec,
}

/// Integrates from an exact ejection state at `s_start` to the next closest approach.
fn next_arc(
    direction: f64,
    e: f64,
    t: f64,
    s_start: f64,
    params: &ModelParams,
    control: &ToleranceSettings,
) -> Result<Arc, CollisionError> {
    let t0 = params.period();
    let frame = Frame::new(direction);
    let y0 = [0.0, 0.0, params.ejection_momentum(), 0.0, e, t];
    let events = [EventSpec::custom("closest approach", |_, y: &StateVec| {
        y[0] * y[2] + y[1] * y[3]
    })
    .direction(Direction::Rising)
    .window(s_start + 0.25 * t0, s_start + 0.75 * t0)
    .terminal(true)];
    let traj = integrate_frame(y0, frame, s_start, s_start + 0.75 * t0, control, &events, params);
    if let TrajectoryStatus::Failed { message } = &traj.status {
        return Err(DynamicsError::Integration(message.clone()).into());
    }
    let Some((_, s, y)) = traj.event_states().next().map(|(n, s, y)| (n, s, *y)) else {
        return Err(CollisionError::Regime {
            reason: "no return to the origin within (T0/4, 3T0/4)".into(),
            table: Vec::new(),
        });
    };
    Ok(Arc {
        traj,
        end_s: s,
        end_state: y,
    })
}

fn passage_from(frame: &Frame, s: f64, y: &StateVec, params: &ModelParams) -> Passage {
    let [a, b, pa, pb, _, t] = *y;
    let l = a * pb - b * pa;
    let p_norm = pa.hypot(pb);
    let lab = frame.to_lab(y);
    let phys = physical_sample(&ExtendedState::from_array(&lab), params);
    let separation = match (phys.q1, phys.q2) {
        (Some(q1), Some(q2)) => (q1[0] - q2[0]).hypot(q1[1] - q2[1]),
        _ => phys.r[0].hypot(phys.r[1]),
    };
    Passage {
        s,
        t,
        miss: l.abs() / p_norm,
        direction: lab[3].atan2(lab[2]),
        separation,
    }
}

/// Follows the orbit found by [`bisect_alpha`] through successive origin
/// passages, restarting each arc from an exact ejection state carrying the
/// incoming momentum direction and the current `(E, t)`.
pub fn continue_through_collision(
    mut result: CollisionOrbitResult,
    params: &ModelParams,
    n_passages: usize,
    control: &ToleranceSettings,
) -> Result<CollisionOrbitResult, CollisionError> {
    if !(result.origin_miss < result.origin_tol) {
        result.truncated = true;
        result.note = Some(format!(
            "origin miss {:.3e} above tolerance {:.3e}; continuation skipped",
            result.origin_miss, result.origin_tol
        ));
        return Ok(result);
    }
    let spec = EjectionSpec::new(result.alpha_star, *params);
    let (rec, first_traj) = crossing_with_trajectory(&spec, control)?;
    let first_frame = first_traj.frame;

    // The first passage is the closest approach following the u = 0 crossing;
    // for a converged orbit the two coincide up to the miss distance.
    let mut passages = Vec::with_capacity(n_passages);
    let first_y = first_traj
        .frame_state_at(rec.tau)
        .ok_or_else(|| DynamicsError::Integration("missing dense output at tau".into()))?;
    passages.push(passage_from(&first_frame, rec.tau, &first_y, params));

    let mut arcs: Vec<Arc> = Vec::new();
    let mut truncated = false;
    let mut s = rec.tau;
    let mut y = first_y;
    let mut frame = first_frame;
    while passages.len() < n_passages {
        let lab = frame.to_lab(&y);
        let direction = lab[3].atan2(lab[2]);
        let arc = next_arc(direction, lab[4], lab[5], s, params, control)?;
        let p = passage_from(&arc.traj.frame, arc.end_s, &arc.end_state, params);
        s = arc.end_s;
        y = arc.end_state;
        frame = arc.traj.frame;
        passages.push(p);
        arcs.push(arc);
        if !(p.miss < result.origin_tol) {
            truncated = true;
            break;
        }
    }

    let interval_s: Vec<f64> = std::iter::once(passages[0].s)
        .chain(passages.windows(2).map(|w| w[1].s - w[0].s))
        .collect();
    let interval_t: Vec<f64> = std::iter::once(passages[0].t - params.t0)
        .chain(passages.windows(2).map(|w| w[1].t - w[0].t))
        .collect();
    let spread = interval_s.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - interval_s.iter().copied().fold(f64::INFINITY, f64::min);

    // Second arc against the reflected first arc, sampled on a common grid.
    let (symmetry_error, restart_consistency) = match arcs.first() {
        Some(second) => {
            let span = rec.tau.min(second.end_s - rec.tau);
            let amp = params.amplitude();
            let p0 = params.ejection_momentum();
            let mut worst = 0.0f64;
            let first_t0 = params.t0;
            let second_start = second.traj.state_at(rec.tau).unwrap();
            for k in 0..=64 {
                let sigma = span * k as f64 / 64.0;
                let a = first_traj.state_at(sigma).unwrap().reflect();
                let b = second.traj.state_at(rec.tau + sigma).unwrap();
                let errs = [
                    (a.u - b.u).abs() / amp,
                    (a.v - b.v).abs() / amp,
                    (a.p_u - b.p_u).abs() / p0,
                    (a.p_v - b.p_v).abs() / p0,
                    ((a.t - first_t0) - (b.t - second_start.t)).abs() / amp.powi(2),
                ];
                worst = errs.into_iter().fold(worst, f64::max);
            }
            let through = straight_through_gap(&first_traj, &spec, second, params, control)?;
            (worst, through)
        }
        None => (f64::NAN, f64::NAN),
    };

    result.passages = passages;
    result.interval_s_spread = if interval_s.len() > 1 { spread } else { 0.0 };
    result.interval_s = interval_s;
    result.interval_t = interval_t;
    result.symmetry_error = symmetry_error;
    result.symmetric = symmetry_error < 1e-8;
    result.restart_consistency = restart_consistency;
    result.truncated = truncated;
    if truncated {
        result.note = Some("a passage missed the origin beyond tolerance".into());
    }
    Ok(result)
}

/// Integrates the first arc straight through `τ*` without a restart and
/// compares the result with the restarted second arc at its end.
fn straight_through_gap(
    first: &Trajectory,
    spec: &EjectionSpec,
    second: &Arc,
    params: &ModelParams,
    control: &ToleranceSettings,
) -> Result<f64, CollisionError> {
    let frame = first.frame;
    let traj = integrate_frame(
        ejection_frame_state(spec.p0, params),
        frame,
        0.0,
        second.end_s,
        control,
        &[],
        params,
    )
    .into_result()?;
    let a = traj.final_state();
    let b = ExtendedState::from_array(&second.traj.frame.to_lab(&second.end_state));
    let amp = params.amplitude();
    let p0 = params.ejection_momentum();
    Ok([
        (a.u - b.u).abs() / amp,
        (a.v - b.v).abs() / amp,
        (a.p_u - b.p_u).abs() / p0,
        (a.p_v - b.p_v).abs() / p0,
        (a.e - b.e).abs().max((a.t - b.t).abs() / amp.powi(2)),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// Full pipeline: scan, bisect the bracket nearest the target angle, continue.
pub fn find_collision_orbit(
    params: &ModelParams,
    settings: &CollisionSettings,
    control: &ToleranceSettings,
) -> Result<(ScanResult, CollisionOrbitResult), CollisionError> {
    let scan = scan_sign_change(params, settings.delta, settings.grid, control)?;
    let bracket = scan
        .nearest_bracket(settings.target_alpha)
        .expect("scan guarantees at least one bracket");
    let partial = bisect_alpha(bracket, params, settings, control)?;
    let full = continue_through_collision(partial, params, settings.n_passages, control)?;
    Ok((scan, full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hamiltonian_reg;

    #[test]
    fn ejection_state_on_level_set() {
        let p = ModelParams::new(1.0, 1e-4, 1.0, -1.0).unwrap();
        assert!((p.ejection_momentum() - 1e-2).abs() < 1e-17);
        for k in 0..8 {
            let spec = EjectionSpec::new(k as f64 * 0.7, p);
            let st = ejection_state(&spec);
            let h = hamiltonian_reg(&st, &p).unwrap();
            assert!((h - p.level()).abs() <= 1e-15 * p.level());
        }
        let st = ejection_state(&EjectionSpec::new(0.0, p));
        assert_eq!((st.p_u, st.p_v), (p.ejection_momentum(), 0.0));
    }

    #[test]
    fn unperturbed_crossing_is_half_period() {
        let p = ModelParams::new(1.0, 0.0, 1.0, -1.0).unwrap();
        for &alpha in &[-1.2, 0.0, 0.5, 1.3] {
            let spec = EjectionSpec::new(alpha, p).with_p0((2.0 * p.gamma() * p.kappa()).sqrt());
            let rec = find_tau_crossing(&spec, &ToleranceSettings::default()).unwrap();
            assert!((rec.tau - 0.5 * p.period()).abs() < 1e-11 * p.period());
            assert!(rec.v_at_tau.abs() < 1e-14);
            assert!(rec.transversal);
        }
    }

    #[test]
    fn zero_momentum_is_rejected() {
        let p = ModelParams::new(1.0, 0.0, 1.0, -1.0).unwrap();
        assert!(matches!(
            find_tau_crossing(&EjectionSpec::new(0.1, p), &ToleranceSettings::default()),
            Err(CollisionError::Invalid(_))
        ));
        assert!(bisect_alpha((0.0, 1.0), &p, &CollisionSettings::default(), &ToleranceSettings::default()).is_err());
    }

    #[test]
    fn scan_rejects_small_grid() {
        let p = ModelParams::new(1.0, 1e-3, 1.0, -1.0).unwrap();
        assert!(matches!(
            scan_sign_change(&p, 0.1, 4, &ToleranceSettings::default()),
            Err(CollisionError::Invalid(_))
        ));
    }
}
