use super::dop853::{self, EventSpec, SolverOptions, Solution, Stats, Termination};
use super::{rhs_frame, rhs_physical, DynamicsError, ExtendedState, Frame, StateVec};
use crate::model::{potential_v, ModelParams, SeriesPoint};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step as a fraction of the oscillator period.
    pub max_step_fraction: f64,
}

impl Default for ToleranceSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_step_fraction: 0.05,
        }
    }
}

/// Natural time unit of the flow: `T₀`, or the `|E₀| = 1` period when the
/// flow is not oscillatory.
pub(crate) fn time_scale(params: &ModelParams) -> f64 {
    if params.is_oscillatory() {
        params.period()
    } else {
        2.0 * PI * (2.0 * params.gamma()).sqrt()
    }
}

impl ToleranceSettings {
    pub fn solver_options(&self, params: &ModelParams) -> SolverOptions {
        let scale = time_scale(params);
        SolverOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step_fraction * scale,
            min_step: 1e-15 * scale,
            initial_step: None,
            max_steps: 2_000_000,
            event_tol: 1e-12 * scale,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEvent {
    pub name: String,
    pub s: f64,
    pub state: ExtendedState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Completed,
    Terminated { event: String },
    Failed { message: String },
}

/// Dense solution of the regularized flow.
///
/// Samples and events are reported in lab coordinates; the underlying
/// interpolant lives in `frame`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub frame: Frame,
    pub samples: Vec<(f64, ExtendedState)>,
    pub events: Vec<TrajectoryEvent>,
    pub h0: f64,
    /// `H` at each sample.
    pub hamiltonian: Vec<f64>,
    /// `max |H − H₀| / |H₀|` over the samples (absolute when `H₀ = 0`).
    pub max_drift: f64,
    pub stats: Stats,
    pub status: TrajectoryStatus,
    solution: Solution<6, DynamicsError>,
}

fn hamiltonian_frame(y: &StateVec, frame: &Frame, params: &ModelParams) -> Result<f64, DynamicsError> {
    let lab = frame.to_lab(y);
    let v = potential_v(&SeriesPoint::new(lab[0], lab[1], lab[5]), params)
        .map_err(|source| DynamicsError::Model {
            source,
            state: ExtendedState::from_array(&lab),
        })?
        .value;
    let rho2 = y[0] * y[0] + y[1] * y[1];
    let eps = params.epsilon;
    Ok((y[2] * y[2] + y[3] * y[3]) / (2.0 * params.gamma())
        - 0.25 * (params.lambda_bar() * eps + y[4]) * rho2
        - eps * eps * v)
}

impl Trajectory {
    pub fn s_start(&self) -> f64 {
        self.solution.s[0]
    }

    pub fn s_end(&self) -> f64 {
        self.solution.s_end()
    }

    pub fn final_state(&self) -> ExtendedState {
        self.samples.last().expect("trajectory holds its initial state").1
    }

    /// Interpolated lab-frame state.
    pub fn state_at(&self, s: f64) -> Option<ExtendedState> {
        self.frame_state_at(s)
            .map(|y| ExtendedState::from_array(&self.frame.to_lab(&y)))
    }

    /// Interpolated state in the integration frame.
    pub fn frame_state_at(&self, s: f64) -> Option<StateVec> {
        self.solution.eval(s)
    }

    /// Accepted-step states in the integration frame.
    pub fn frame_samples(&self) -> impl Iterator<Item = (f64, &StateVec)> {
        self.solution.s.iter().copied().zip(self.solution.y.iter())
    }

    pub fn event_states(&self) -> impl Iterator<Item = (&str, f64, &StateVec)> {
        self.solution
            .events
            .iter()
            .map(|e| (e.name.as_str(), e.s, &e.y))
    }

    pub fn drift(&self, index: usize) -> f64 {
        relative_drift(self.hamiltonian[index], self.h0)
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.status, TrajectoryStatus::Failed { .. })
    }

    pub fn into_result(self) -> Result<Self, DynamicsError> {
        match &self.status {
            TrajectoryStatus::Failed { message } => Err(DynamicsError::Integration(message.clone())),
            _ => Ok(self),
        }
    }
}

fn relative_drift(h: f64, h0: f64) -> f64 {
    if h0 != 0.0 {
        (h - h0).abs() / h0.abs()
    } else {
        (h - h0).abs()
    }
}

/// Integrates a lab-frame initial state.
pub fn integrate(
    initial: &ExtendedState,
    s_end: f64,
    control: &ToleranceSettings,
    events: &[EventSpec<'_, 6>],
    params: &ModelParams,
) -> Trajectory {
    integrate_frame(initial.to_array(), Frame::lab(), 0.0, s_end, control, events, params)
}

/// Integrates a state given in the coordinates of `frame`, from `s0` to `s_end`.
pub fn integrate_frame(
    y0: StateVec,
    frame: Frame,
    s0: f64,
    s_end: f64,
    control: &ToleranceSettings,
    events: &[EventSpec<'_, 6>],
    params: &ModelParams,
) -> Trajectory {
    let opts = control.solver_options(params);
    let solution = dop853::solve(
        |_s, y: &StateVec| rhs_frame(y, &frame, params),
        s0,
        y0,
        s_end,
        &opts,
        events,
    );

    let mut status = match &solution.termination {
        Termination::Completed => TrajectoryStatus::Completed,
        Termination::Event(i) => TrajectoryStatus::Terminated {
            event: events[*i].name.clone(),
        },
        Termination::Failed(e) => TrajectoryStatus::Failed {
            message: e.to_string(),
        },
    };

    let mut samples = Vec::with_capacity(solution.s.len());
    let mut hamiltonian = Vec::with_capacity(solution.s.len());
    for (s, y) in solution.s.iter().zip(&solution.y) {
        match hamiltonian_frame(y, &frame, params) {
            Ok(h) => hamiltonian.push(h),
            Err(e) => {
                status = TrajectoryStatus::Failed {
                    message: e.to_string(),
                };
                break;
            }
        }
        samples.push((*s, ExtendedState::from_array(&frame.to_lab(y))));
    }
    let h0 = hamiltonian.first().copied().unwrap_or(f64::NAN);
    let max_drift = hamiltonian
        .iter()
        .map(|h| relative_drift(*h, h0))
        .fold(0.0, f64::max);
    let events_out = solution
        .events
        .iter()
        .map(|e| TrajectoryEvent {
            name: e.name.clone(),
            s: e.s,
            state: ExtendedState::from_array(&frame.to_lab(&e.y)),
        })
        .collect();

    Trajectory {
        frame,
        samples,
        events: events_out,
        h0,
        hamiltonian,
        max_drift,
        stats: solution.stats,
        status,
        solution,
    }
}

/// Relative motion integrated in physical time with the unregularized field.
#[derive(Debug, Clone)]
pub struct PhysicalTrajectory {
    pub status: TrajectoryStatus,
    solution: Solution<4, DynamicsError>,
}

impl PhysicalTrajectory {
    pub fn state_at(&self, t: f64) -> Option<([f64; 2], [f64; 2])> {
        self.solution.eval(t).map(|y| ([y[0], y[1]], [y[2], y[3]]))
    }

    pub fn t_end(&self) -> f64 {
        self.solution.s_end()
    }
}

pub fn integrate_physical(
    r0: [f64; 2],
    p0: [f64; 2],
    t0: f64,
    t_end: f64,
    control: &ToleranceSettings,
    params: &ModelParams,
) -> PhysicalTrajectory {
    let opts = SolverOptions {
        rel_tol: control.rel_tol,
        abs_tol: control.abs_tol,
        max_step: control.max_step_fraction * (t_end - t0).abs(),
        min_step: 1e-15 * (t_end - t0).abs(),
        ..SolverOptions::default()
    };
    let solution = dop853::solve(
        |t, y: &[f64; 4]| {
            let (dr, dp) = rhs_physical([y[0], y[1]], [y[2], y[3]], t, params)?;
            Ok([dr[0], dr[1], dp[0], dp[1]])
        },
        t0,
        [r0[0], r0[1], p0[0], p0[1]],
        t_end,
        &opts,
        &[],
    );
    let status = match &solution.termination {
        Termination::Failed(e) => TrajectoryStatus::Failed {
            message: e.to_string(),
        },
        _ => TrajectoryStatus::Completed,
    };
    PhysicalTrajectory { status, solution }
}
