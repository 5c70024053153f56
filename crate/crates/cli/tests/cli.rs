use hill_collide::csvio::{read_physical_csv, read_trajectory_csv, TRAJECTORY_HEADER};
use hill_collide::envelope::ResultEnvelope;
use hill_core::ModelParams;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hill-collide"))
}

fn write_config(dir: &Path, json: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, json).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const ZERO_EPS: &str = r#"{"model": {"lambda": 1, "epsilon": 0, "mu_tilde": 1, "E0": -1},
  "simulate": {"alpha": 0.4, "periods": 1, "samples": 201}}"#;

#[test]
fn simulate_at_zero_epsilon_matches_the_oscillator() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), ZERO_EPS);
    let out = dir.path().join("out");
    let o = run(&["simulate", "--physical"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let text = std::fs::read_to_string(out.join("simulate.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), TRAJECTORY_HEADER.join(","));
    let table = read_trajectory_csv(text.as_bytes()).unwrap();
    assert_eq!(table.rows.len(), 201);
    assert!(table.truncated.is_none());

    let p = ModelParams::new(1.0, 0.0, 1.0, -1.0).unwrap();
    let g = p.gamma();
    let p0 = (2.0 * g * p.kappa()).sqrt();
    let w = (1.0 / (2.0 * g)).sqrt();
    let amp = p0 / (g * w);
    let (sa, ca) = 0.4f64.sin_cos();
    let mut worst = 0.0f64;
    for r in &table.rows {
        let s = r[0];
        let want = [
            amp * ca * (w * s).sin(),
            amp * sa * (w * s).sin(),
            p0 * ca * (w * s).cos(),
            p0 * sa * (w * s).cos(),
            -1.0,
            0.25 * amp * amp * (0.5 * s - (2.0 * w * s).sin() / (4.0 * w)),
        ];
        for i in 0..6 {
            worst = worst.max((r[i + 1] - want[i]).abs());
        }
    }
    assert!(worst < 1e-9, "{worst}");

    let phys = read_physical_csv(std::fs::File::open(out.join("simulate_physical.csv")).unwrap()).unwrap();
    assert_eq!(phys.rows.len(), 201);
    // No center-of-mass orbit at ε = 0: positions are NaN.
    assert!(phys.rows[3][1].is_nan());

    let env = ResultEnvelope::read(&out.join("simulate.json")).unwrap();
    assert_eq!(env.exit_code, 0);
    assert_eq!(env.command, "simulate");
}

#[test]
fn simulate_reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"model": {"lambda": 2, "epsilon": 1e-3, "mu_tilde": 1, "E0": -1}, "simulate": {"alpha": 0.7, "periods": 2}}"#);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&run(&["simulate"], &cfg, &a)), 0);
    assert_eq!(code(&run(&["simulate"], &cfg, &b)), 0);
    assert_eq!(std::fs::read(a.join("simulate.csv")).unwrap(), std::fs::read(b.join("simulate.csv")).unwrap());
    let ea = ResultEnvelope::read(&a.join("simulate.json")).unwrap();
    let eb = ResultEnvelope::read(&b.join("simulate.json")).unwrap();
    assert_eq!(ea.payload_sha256, eb.payload_sha256);
    assert_eq!(ea.payload, eb.payload);
}

#[test]
fn numeric_failure_truncates_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    // Starts inside the convergence domain and runs out of it.
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"lambda": 1, "epsilon": 0.01, "mu_tilde": 1, "E0": -1},
            "simulate": {"initial": {"u": 27.0, "v": 0.0, "p_u": 20.0, "p_v": 0.0, "E": -1.0, "t": 0.0}}}"#,
    );
    let out = dir.path().join("out");
    let o = run(&["simulate"], &cfg, &out);
    assert_eq!(code(&o), 3);
    let table = read_trajectory_csv(std::fs::File::open(out.join("simulate.csv")).unwrap()).unwrap();
    assert!(table.truncated.is_some());
    assert!(!table.rows.is_empty());
    let text = std::fs::read_to_string(out.join("simulate.csv")).unwrap();
    assert!(text.lines().last().unwrap().starts_with("TRUNCATED"));
    assert_eq!(ResultEnvelope::read(&out.join("simulate.json")).unwrap().exit_code, 3);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\n  \"model\": {\"lambda\": 1, \"epsilon\": 1e-4, \"mu_tilde\": 1, \"E0\": -1},\n  \"bogus\": 1\n}");
    let o = run(&["collide"], &cfg, &dir.path().join("out"));
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");

    let cfg = write_config(dir.path(), r#"{"integrator": {"rel_tol": -1}}"#);
    let o = run(&["simulate"], &cfg, &dir.path().join("out"));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("integrator.rel_tol"));

    let o = bin().args(["simulate", "--config", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn equilibria_reports_unstable_roots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"model": {"lambda": 1, "epsilon": 0.01, "mu_tilde": 1, "E0": -1}}"#);
    let out = dir.path().join("out");
    assert_eq!(code(&run(&["equilibria"], &cfg, &out)), 0);
    let env = ResultEnvelope::read(&out.join("equilibria.json")).unwrap();
    let modes = env.payload["modes"].as_array().unwrap();
    assert_eq!(modes.len(), 2);
    for m in modes {
        let roots = m["roots"].as_array().unwrap();
        assert!(!roots.is_empty());
        for r in roots {
            assert!(r["result"]["d2v"].as_f64().unwrap() < 0.0);
            assert!(r["result"]["poly_residual"].as_f64().unwrap() < 1e-10);
        }
    }
    assert!(env.payload["comparison"]["max_relative_discrepancy"].is_number());
}

#[test]
fn equilibria_with_no_root_is_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    // Weak binding: the terms never balance inside the convergence domain.
    let cfg = write_config(dir.path(), r#"{"model": {"lambda": 1, "epsilon": 0.01, "mu_tilde": 1, "E0": -0.01}}"#);
    let out = dir.path().join("out");
    assert_eq!(code(&run(&["equilibria"], &cfg, &out)), 0);
    let env = ResultEnvelope::read(&out.join("equilibria.json")).unwrap();
    for m in env.payload["modes"].as_array().unwrap() {
        assert_eq!(m["roots"].as_array().unwrap().len(), 0);
    }
}

#[test]
fn collide_default_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{}");
    let out = dir.path().join("out");
    let o = run(&["collide"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let env = ResultEnvelope::read(&out.join("collide.json")).unwrap();
    let r = &env.payload["result"];
    let p = ModelParams::default();
    let amp = 2.0 * (p.epsilon * p.lambda * p.mu_tilde / p.e0.abs()).sqrt();
    assert!(r["origin_miss"].as_f64().unwrap() < 1e-6 * amp);
    assert!((r["alpha_star"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
    assert_eq!(r["passages"].as_array().unwrap().len(), 3);
    assert!(env.checks.iter().all(|c| c.passed));
    let arc = read_trajectory_csv(std::fs::File::open(out.join("collide_arc.csv")).unwrap()).unwrap();
    assert!(arc.rows.len() > 2);
}

#[test]
fn collide_regime_violation_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"lambda": 1, "epsilon": 0.5, "mu_tilde": 1, "E0": -0.05}, "collision": {"grid": 8}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(code(&run(&["collide"], &cfg, &out)), 4);
    let env = ResultEnvelope::read(&out.join("collide.json")).unwrap();
    assert_eq!(env.exit_code, 4);
    assert_eq!(env.payload["table"].as_array().unwrap().len(), 8);
}

#[test]
fn check_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "{}");
    let o = run(&["check"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let env = ResultEnvelope::read(&out.join("check.json")).unwrap();
    let ids: Vec<&str> = env.checks.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, hill_collide::checks::check_ids());
    let stdout = String::from_utf8_lossy(&o.stdout);
    for id in ids {
        assert!(stdout.contains(id));
    }

    let cfg = write_config(dir.path(), r#"{"integrator": {"rel_tol": 1}}"#);
    let o = run(&["check"], &cfg, &out);
    assert_eq!(code(&o), 1);
    let env = ResultEnvelope::read(&out.join("check.json")).unwrap();
    let drift = env.checks.iter().find(|c| c.id == "dynamics.drift").unwrap();
    assert!(!drift.passed);
}

fn sweep(dir: &Path, jobs: &str, values: &str) -> (Output, PathBuf) {
    let cfg = write_config(dir, "{}");
    let out = dir.join(format!("sweep-{jobs}"));
    let o = run(&["sweep", "--param", "model.epsilon", "--values", values, "--jobs", jobs], &cfg, &out);
    (o, out)
}

#[test]
fn sweep_is_ordered_and_job_independent() {
    let dir = tempfile::tempdir().unwrap();
    let values = "1e-3,1e-5,1e-4";
    let (o1, out1) = sweep(dir.path(), "1", values);
    let (o4, out4) = sweep(dir.path(), "4", values);
    assert_eq!(code(&o1), 0);
    assert_eq!(code(&o4), 0);
    let i1 = std::fs::read_to_string(out1.join("index.json")).unwrap();
    let i4 = std::fs::read_to_string(out4.join("index.json")).unwrap();
    assert_eq!(i1, i4);
    let index: serde_json::Value = serde_json::from_str(&i1).unwrap();
    let runs = index["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    let got: Vec<f64> = runs.iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert_eq!(got, vec![1e-3, 1e-5, 1e-4]);
    for r in runs {
        let d = r["dir"].as_str().unwrap();
        let a = ResultEnvelope::read(&out1.join(d).join("collide.json")).unwrap();
        let b = ResultEnvelope::read(&out4.join(d).join("collide.json")).unwrap();
        assert_eq!(a.payload, b.payload);
        assert_eq!(a.config.model.epsilon, r["value"].as_f64().unwrap());
    }
}

#[test]
fn sweep_failures() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = sweep(dir.path(), "2", "-1,0");
    assert_eq!(code(&o), 5);
    let index: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("index.json")).unwrap()).unwrap();
    for r in index["runs"].as_array().unwrap() {
        assert_ne!(r["exit_code"].as_i64().unwrap(), 0);
        assert!(r["error"].is_string());
    }

    let (o, _) = sweep(dir.path(), "1", "1e-4,-1");
    assert_eq!(code(&o), 0);

    let cfg = write_config(dir.path(), "{}");
    let o = run(&["sweep", "--param", "model.nope", "--values", "1"], &cfg, &dir.path().join("x"));
    assert_eq!(code(&o), 2);
}
