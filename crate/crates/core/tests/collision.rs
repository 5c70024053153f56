use hill_core::collision::*;
use hill_core::dynamics::perturbation_sup;
use hill_core::model::hamiltonian_reg;
use hill_core::{ModelParams, ToleranceSettings};
use std::f64::consts::FRAC_PI_4;

fn params(eps: f64) -> ModelParams {
    ModelParams::new(1.0, eps, 1.0, -1.0).unwrap()
}

#[test]
fn crossing_window_on_the_angle_grid() {
    let control = ToleranceSettings::default();
    for eps in [1e-3, 1e-4] {
        let p = params(eps);
        let scan = scan_sign_change(&p, 0.1, 64, &control).unwrap();
        let t0 = p.period();
        for e in &scan.table {
            let tau = e.tau.unwrap();
            assert!(tau > 0.25 * t0 && tau < 0.75 * t0);
            let rec = find_tau_crossing(&EjectionSpec::new(e.alpha, p), &control).unwrap();
            assert!(rec.transversal);
            assert!(rec.state.u == 0.0);
        }
    }
}

#[test]
fn crossing_near_half_period_for_small_epsilon() {
    let p = params(1e-4);
    let control = ToleranceSettings::default();
    let rec = find_tau_crossing(&EjectionSpec::new(0.0, p), &control).unwrap();
    let t0 = p.period();
    let sup = perturbation_sup(0.0, &p, &control, 100).unwrap();
    assert!((rec.tau - 0.5 * t0).abs() <= 10.0 * p.epsilon * t0);
    assert!(rec.v_at_tau.abs() <= sup.sup_norm);
    assert!(rec.v_at_tau.abs() <= p.epsilon * p.amplitude());
}

#[test]
fn sign_structure_matches_leading_term() {
    let control = ToleranceSettings::default();
    for eps in [1e-4, 1e-5] {
        let scan = scan_sign_change(&params(eps), 0.1, 64, &control).unwrap();
        let first = scan.table.first().unwrap();
        let last = scan.table.last().unwrap();
        assert!(first.v_at_tau.unwrap() < 0.0);
        assert!(last.v_at_tau.unwrap() > 0.0);
        let (a, b) = scan.nearest_bracket(FRAC_PI_4).unwrap();
        assert!(a <= FRAC_PI_4 && FRAC_PI_4 <= b);
    }
}

#[test]
fn refined_grid_has_no_jumps() {
    let p = params(1e-4);
    let control = ToleranceSettings::default();
    let coarse = scan_sign_change(&p, 0.1, 16, &control).unwrap();
    let fine = scan_sign_change(&p, 0.1, 61, &control).unwrap();
    let cv: Vec<f64> = coarse.table.iter().map(|e| e.v_at_tau.unwrap()).collect();
    let fv: Vec<f64> = fine.table.iter().map(|e| e.v_at_tau.unwrap()).collect();
    let local = |i: usize| {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(cv.len() - 2);
        (lo..=hi).map(|j| (cv[j + 1] - cv[j]).abs()).fold(0.0, f64::max)
    };
    for j in 0..fv.len() - 1 {
        let i = (j / 4).min(cv.len() - 2);
        assert!((fv[j + 1] - fv[j]).abs() <= 4.0 * local(i), "jump at {j}");
    }
}

#[test]
fn collision_angle_approaches_quarter_turn() {
    let control = ToleranceSettings::default();
    let settings = CollisionSettings::default();
    let offs: Vec<f64> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&e| {
            let (_, r) = find_collision_orbit(&params(e), &settings, &control).unwrap();
            assert!(r.origin_miss < r.origin_tol);
            assert!(r.iterations <= 50);
            (r.alpha_star - FRAC_PI_4).abs()
        })
        .collect();
    assert!(offs[0] > offs[1] && offs[1] > offs[2], "{offs:?}");
    assert!(offs[0] / offs[1] >= 2f64.sqrt());
}

#[test]
fn collision_orbit_is_stable_under_tolerance_change() {
    let p = params(1e-4);
    let settings = CollisionSettings::default();
    let control = ToleranceSettings::default();
    let (_, a) = find_collision_orbit(&p, &settings, &control).unwrap();
    let (_, b) = find_collision_orbit(&p, &settings, &control.scaled(0.5)).unwrap();
    assert!((a.alpha_star - b.alpha_star).abs() < 1e-11);
    assert!(a.origin_miss < a.origin_tol && b.origin_miss < b.origin_tol);
}

#[test]
fn continuation_records_passages() {
    let p = params(1e-4);
    let (_, r) = find_collision_orbit(&p, &CollisionSettings::default(), &ToleranceSettings::default()).unwrap();
    assert_eq!(r.passages.len(), 3);
    assert!(!r.truncated);
    for w in r.passages.windows(2) {
        assert!(w[1].s > w[0].s && w[1].t > w[0].t);
    }
    for ps in &r.passages {
        assert!(ps.miss < r.origin_tol);
        assert!(ps.separation <= 1e-12 / p.epsilon);
    }
    assert!(r.interval_s_spread <= p.epsilon * p.period());
    for ds in &r.interval_s {
        assert!((ds - 0.5 * p.period()).abs() <= 10.0 * p.epsilon * p.period());
    }
    assert!(r.symmetric && r.symmetry_error < 1e-8);
    assert!(r.restart_consistency < 1e-8);
}

#[test]
fn ejection_trajectories_stay_on_level_set() {
    let p = params(1e-3);
    for alpha in [-1.0, 0.2, 1.3] {
        let spec = EjectionSpec::new(alpha, p);
        let h = hamiltonian_reg(&ejection_state(&spec), &p).unwrap();
        assert!((h - p.level()).abs() <= 1e-15 * p.level());
        let (_, traj) = crossing_with_trajectory(&spec, &ToleranceSettings::default()).unwrap();
        assert!(traj.max_drift < 1e-9);
    }
}

#[test]
fn regime_violation_carries_table() {
    // Strong perturbation: the orbit no longer returns inside the window.
    let p = ModelParams::new(1.0, 0.5, 1.0, -0.05).unwrap();
    match scan_sign_change(&p, 0.1, 8, &ToleranceSettings::default()) {
        Err(CollisionError::Regime { table, .. }) => assert_eq!(table.len(), 8),
        other => panic!("expected a regime violation, got {other:?}"),
    }
}
