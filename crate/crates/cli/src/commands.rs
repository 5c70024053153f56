//! The five subcommands. Each writes its files under the output directory
//! and returns the process exit code.

use crate::checks::{run_checks, CheckOutcome};
use crate::config::{ConfigError, RunConfig};
use crate::csvio::{write_table, PhysicalTable, TrajectoryTable, PHYSICAL_HEADER, TRAJECTORY_HEADER};
use crate::envelope::{EnvelopeError, ResultEnvelope};
use hill_core::collision::{crossing_with_trajectory, find_collision_orbit, CollisionError, EjectionSpec};
use hill_core::dynamics::{ejection_frame_state, integrate_frame, Frame, Trajectory, TrajectoryStatus};
use hill_core::equilibria::{
    build_equilibrium_polynomial, compare_degree_modes, solve_equilibria, verify_stationarity, DegreeMode,
    EquilibriumProblem,
};
use hill_core::model::hamiltonian_reg;
use hill_core::transforms::physical_sample;
use hill_core::ExtendedState;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_REGIME: i32 = 4;
pub const EXIT_SWEEP_FAILED: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<EnvelopeError> for CliError {
    fn from(e: EnvelopeError) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<crate::csvio::CsvError> for CliError {
    fn from(e: crate::csvio::CsvError) -> Self {
        CliError::Output(e.to_string())
    }
}

/// What a finished command left behind.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub envelope: ResultEnvelope,
    pub envelope_path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Simulate,
    Equilibria,
    Collide,
    Check,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Simulate => "simulate",
            Task::Equilibria => "equilibria",
            Task::Collide => "collide",
            Task::Check => "check",
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result serializes")
}

fn finish(
    command: &str,
    cfg: &RunConfig,
    out: &Path,
    payload: Value,
    checks: Vec<CheckOutcome>,
    exit_code: i32,
    started: Instant,
) -> Result<Outcome, CliError> {
    let envelope = ResultEnvelope::new(command, cfg, payload, checks, exit_code, started.elapsed().as_secs_f64());
    let envelope_path = out.join(format!("{command}.json"));
    envelope.write(&envelope_path, cfg.output.format)?;
    Ok(Outcome {
        exit_code,
        envelope,
        envelope_path,
    })
}

pub fn run_task(task: Task, cfg: &RunConfig, out: &Path, physical: bool) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(out)?;
    match task {
        Task::Simulate => simulate(cfg, out, physical),
        Task::Equilibria => equilibria(cfg, out),
        Task::Collide => collide(cfg, out),
        Task::Check => check(cfg, out),
    }
}

fn relative_drift(h: f64, h0: f64) -> f64 {
    if h0 != 0.0 {
        (h - h0).abs() / h0.abs()
    } else {
        (h - h0).abs()
    }
}

fn status_name(status: &TrajectoryStatus) -> Option<String> {
    match status {
        TrajectoryStatus::Failed { message } => Some(message.clone()),
        _ => None,
    }
}

/// Rows of the trajectory CSV: the accepted steps, or a uniform grid.
fn trajectory_rows(traj: &Trajectory, samples: usize, cfg: &RunConfig) -> Vec<(f64, ExtendedState, f64)> {
    if samples == 0 {
        return traj
            .samples
            .iter()
            .zip(&traj.hamiltonian)
            .map(|((s, st), h)| (*s, *st, *h))
            .collect();
    }
    let (a, b) = (traj.s_start(), traj.s_end());
    (0..samples)
        .map_while(|k| {
            let s = a + (b - a) * k as f64 / (samples - 1) as f64;
            let st = traj.state_at(s)?;
            let h = hamiltonian_reg(&st, &cfg.model).ok()?;
            Some((s, st, h))
        })
        .collect()
}

pub fn simulate(cfg: &RunConfig, out: &Path, physical: bool) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let p = &cfg.model;
    let sim = &cfg.simulate;
    let t0 = p.period();
    if !p.is_oscillatory() {
        return Err(ConfigError::Invalid {
            field: "model.E0".into(),
            reason: "simulate spans multiples of T0 and needs E0 < 0".into(),
        }
        .into());
    }
    let s_end = sim.periods * t0;
    let (y0, frame, p0) = match sim.initial {
        Some(st) => (st.to_array(), Frame::lab(), None),
        None => {
            // At ε = 0 the level set collapses; eject with the ε-free momentum √(2Γκ).
            let p0 = sim.p0.unwrap_or_else(|| {
                if p.epsilon == 0.0 {
                    (2.0 * p.gamma() * p.kappa()).sqrt()
                } else {
                    p.ejection_momentum()
                }
            });
            (ejection_frame_state(p0, p), Frame::new(sim.alpha), Some(p0))
        }
    };
    let traj = integrate_frame(y0, frame, 0.0, s_end, &cfg.integrator, &[], p);
    let failure = status_name(&traj.status);
    let rows = trajectory_rows(&traj, sim.samples, cfg);
    let h0 = traj.h0;
    let table = TrajectoryTable {
        rows: rows
            .iter()
            .map(|(s, st, h)| [*s, st.u, st.v, st.p_u, st.p_v, st.e, st.t, *h, relative_drift(*h, h0)])
            .collect(),
        truncated: failure.clone(),
    };
    let csv_path = out.join("simulate.csv");
    write_table(std::fs::File::create(&csv_path)?, &TRAJECTORY_HEADER, &table)?;

    let mut physical_file = None;
    if physical {
        let none = [f64::NAN; 2];
        let ptable = PhysicalTable {
            rows: rows
                .iter()
                .map(|(_, st, _)| {
                    let ph = physical_sample(st, p);
                    let (q1, q2) = (ph.q1.unwrap_or(none), ph.q2.unwrap_or(none));
                    [ph.t, q1[0], q1[1], q2[0], q2[1]]
                })
                .collect(),
            truncated: failure.clone(),
        };
        let path = out.join("simulate_physical.csv");
        write_table(std::fs::File::create(&path)?, &PHYSICAL_HEADER, &ptable)?;
        physical_file = Some("simulate_physical.csv");
    }

    let max_drift = table.rows.iter().map(|r| r[8]).fold(0.0, f64::max);
    let final_state = rows.last().map(|r| r.1);
    let payload = json!({
        "initial": ExtendedState::from_array(&frame.to_lab(&y0)),
        "ejection_angle": sim.initial.is_none().then_some(sim.alpha),
        "ejection_momentum": p0,
        "s_end": s_end,
        "period": t0,
        "status": to_value(&traj.status),
        "rows": table.rows.len(),
        "h0": h0,
        "max_drift": max_drift,
        "final_state": final_state,
        "steps": traj.stats.steps,
        "rejected_steps": traj.stats.rejected,
        "rhs_evals": traj.stats.rhs_evals,
        "trajectory_csv": "simulate.csv",
        "physical_csv": physical_file,
    });
    let code = if failure.is_some() { EXIT_NUMERIC } else { EXIT_OK };
    finish("simulate", cfg, out, payload, Vec::new(), code, started)
}

pub fn equilibria(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let eq = &cfg.equilibria;
    let base = EquilibriumProblem::new(cfg.model, eq.variant, eq.degree_mode).map_err(|e| ConfigError::Invalid {
        field: "model".into(),
        reason: e.to_string(),
    })?;
    let base = base.with_alignment(eq.alignment);
    let mut modes = Vec::new();
    for mode in [DegreeMode::Deg4DropCentrifugal, DegreeMode::Deg6Full] {
        let pr = base.with_degree_mode(mode);
        let roots: Vec<Value> = solve_equilibria(&pr)
            .iter()
            .map(|r| json!({ "result": r, "stationarity": verify_stationarity(r, &pr) }))
            .collect();
        modes.push(json!({
            "degree_mode": mode,
            "polynomial": build_equilibrium_polynomial(&pr),
            "roots": roots,
        }));
    }
    let payload = json!({
        "u_max": base.u_max,
        "variant": eq.variant,
        "alignment": eq.alignment,
        "primary_mode": eq.degree_mode,
        "modes": modes,
        "comparison": compare_degree_modes(&base),
    });
    finish("equilibria", cfg, out, payload, Vec::new(), EXIT_OK, started)
}

pub fn collide(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let p = &cfg.model;
    match find_collision_orbit(p, &cfg.collision, &cfg.integrator) {
        Ok((scan, result)) => {
            let mut arc_file = None;
            if cfg.output.trajectory_csv {
                let spec = EjectionSpec::new(result.alpha_star, *p).with_delta(cfg.collision.delta);
                let (_, traj) = crossing_with_trajectory(&spec, &cfg.integrator)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                let h0 = traj.h0;
                let table = TrajectoryTable {
                    rows: traj
                        .samples
                        .iter()
                        .zip(&traj.hamiltonian)
                        .map(|((s, st), h)| [*s, st.u, st.v, st.p_u, st.p_v, st.e, st.t, *h, relative_drift(*h, h0)])
                        .collect(),
                    truncated: status_name(&traj.status),
                };
                write_table(std::fs::File::create(out.join("collide_arc.csv"))?, &TRAJECTORY_HEADER, &table)?;
                arc_file = Some("collide_arc.csv");
            }
            let checks = vec![
                CheckOutcome {
                    id: "collision.origin_miss".into(),
                    measured: Some(result.origin_miss),
                    threshold: result.origin_tol,
                    relation: "le".into(),
                    passed: result.origin_miss <= result.origin_tol,
                    note: None,
                },
                CheckOutcome {
                    id: "collision.passages".into(),
                    measured: Some(result.passages.len() as f64),
                    threshold: cfg.collision.n_passages as f64,
                    relation: "ge".into(),
                    passed: result.passages.len() >= cfg.collision.n_passages,
                    note: None,
                },
            ];
            let payload = json!({ "scan": scan, "result": result, "arc_csv": arc_file });
            finish("collide", cfg, out, payload, checks, EXIT_OK, started)
        }
        Err(CollisionError::Regime { reason, table }) => {
            let payload = json!({ "error": "regime_violation", "reason": reason, "table": table });
            finish("collide", cfg, out, payload, Vec::new(), EXIT_REGIME, started)
        }
        Err(CollisionError::Invalid(reason)) => Err(ConfigError::Invalid {
            field: "collision".into(),
            reason,
        }
        .into()),
        Err(CollisionError::Numeric(e)) => {
            let payload = json!({ "error": "numeric_failure", "reason": e.to_string() });
            finish("collide", cfg, out, payload, Vec::new(), EXIT_NUMERIC, started)
        }
    }
}

pub fn check(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let checks = run_checks(cfg);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
    let payload = json!({ "total": checks.len(), "failed": failed });
    let code = if failed.is_empty() { EXIT_OK } else { EXIT_INVARIANT };
    finish("check", cfg, out, payload, checks, code, started)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRun {
    pub index: usize,
    pub value: Value,
    pub dir: String,
    pub exit_code: i32,
    pub payload_sha256: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepIndex {
    pub param: String,
    pub task: Task,
    pub runs: Vec<SweepRun>,
    pub succeeded: usize,
}

/// Parses a `--values` item: JSON when it parses, a plain string otherwise.
pub fn parse_sweep_value(s: &str) -> Value {
    serde_json::from_str(s.trim()).unwrap_or_else(|_| Value::String(s.trim().to_string()))
}

fn param_pointer(param: &str) -> String {
    format!("/{}", param.replace('.', "/"))
}

/// Fails unless `param` names a leaf field of the configuration schema.
pub fn check_param(cfg: &RunConfig, param: &str) -> Result<(), ConfigError> {
    let tree = to_value(cfg);
    match tree.pointer(&param_pointer(param)) {
        None => Err(ConfigError::Invalid {
            field: param.to_string(),
            reason: "not a configuration field".into(),
        }),
        Some(v) if v.is_object() => Err(ConfigError::Invalid {
            field: param.to_string(),
            reason: "names a section, not a field".into(),
        }),
        Some(_) => Ok(()),
    }
}

/// Returns `cfg` with the dotted field `param` replaced by `value`.
pub fn apply_param(cfg: &RunConfig, param: &str, value: &Value) -> Result<RunConfig, ConfigError> {
    check_param(cfg, param)?;
    let mut tree = to_value(cfg);
    *tree.pointer_mut(&param_pointer(param)).expect("checked above") = value.clone();
    let text = serde_json::to_string(&tree).expect("json value serializes");
    RunConfig::from_json(&text).map_err(|e| match e {
        ConfigError::Syntax { message, .. } => ConfigError::Invalid {
            field: param.to_string(),
            reason: message,
        },
        other => other,
    })
}

fn value_label(value: &Value) -> String {
    let raw = match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    raw.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "+-.e".contains(c) { c } else { '_' })
        .collect()
}

pub fn sweep(
    cfg: &RunConfig,
    out: &Path,
    param: &str,
    values: &[Value],
    jobs: usize,
    task: Task,
) -> Result<(i32, SweepIndex), CliError> {
    if values.is_empty() {
        return Err(ConfigError::Invalid {
            field: "--values".into(),
            reason: "at least one value is required".into(),
        }
        .into());
    }
    // Reject unknown parameter names before any run starts.
    check_param(cfg, param)?;
    std::fs::create_dir_all(out)?;

    let run_one = |(index, value): (usize, &Value)| -> SweepRun {
        let dir = format!("{index:03}_{}", value_label(value));
        let result = apply_param(cfg, param, value)
            .map_err(CliError::from)
            .and_then(|c| run_task(task, &c, &out.join(&dir), false));
        match result {
            Ok(o) => SweepRun {
                index,
                value: value.clone(),
                dir,
                exit_code: o.exit_code,
                payload_sha256: Some(o.envelope.payload_sha256),
                error: None,
            },
            Err(e) => SweepRun {
                index,
                value: value.clone(),
                dir,
                exit_code: e.exit_code(),
                payload_sha256: None,
                error: Some(e.to_string()),
            },
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Output(e.to_string()))?;
    let runs: Vec<SweepRun> = pool.install(|| values.par_iter().enumerate().map(run_one).collect());
    let succeeded = runs.iter().filter(|r| r.exit_code == EXIT_OK).count();
    let index = SweepIndex {
        param: param.to_string(),
        task,
        runs,
        succeeded,
    };
    let text = serde_json::to_string_pretty(&index).expect("index serializes");
    std::fs::write(out.join("index.json"), text + "\n")?;
    let code = if succeeded == 0 { EXIT_SWEEP_FAILED } else { EXIT_OK };
    Ok((code, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dotted_parameters() {
        let cfg = RunConfig::default();
        let c = apply_param(&cfg, "model.epsilon", &json!(1e-3)).unwrap();
        assert_eq!(c.model.epsilon, 1e-3);
        let c = apply_param(&cfg, "equilibria.degree_mode", &json!("deg4_drop_centrifugal")).unwrap();
        assert_eq!(c.equilibria.degree_mode, DegreeMode::Deg4DropCentrifugal);
        assert!(apply_param(&cfg, "model.nope", &json!(1)).is_err());
        assert!(apply_param(&cfg, "model", &json!(1)).is_err());
        assert!(matches!(
            apply_param(&cfg, "model.epsilon", &json!(-1.0)),
            Err(ConfigError::Invalid { ref field, .. }) if field == "model.epsilon"
        ));
    }

    #[test]
    fn sweep_values_parse() {
        assert_eq!(parse_sweep_value("1e-3"), json!(1e-3));
        assert_eq!(parse_sweep_value("paper"), json!("paper"));
        assert_eq!(value_label(&json!(0.001)), "0.001");
        assert_eq!(value_label(&json!("a/b")), "a_b");
    }
}
