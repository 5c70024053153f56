//! Collinear relative equilibria: the stationarity condition of the
//! collinear potential, cleared into a polynomial in `u = l²`, solved via
//! companion-matrix eigenvalues and polished by Newton on the rational form.

use crate::model::{Alignment, CollinearForm, ModelParams, PotentialVariant};
use nalgebra::{DMatrix, Schur};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    /// Drops the `O(ε³)` centrifugal term; the cleared numerator is a quartic.
    Deg4DropCentrifugal,
    #[default]
    Deg6Full,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error("invalid equilibrium problem: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumProblem {
    pub params: ModelParams,
    pub variant: PotentialVariant,
    pub degree_mode: DegreeMode,
    pub alignment: Alignment,
    /// Convergence bound `4/(εΓ)` on `u`.
    pub u_max: f64,
}

impl EquilibriumProblem {
    pub fn new(
        params: ModelParams,
        variant: PotentialVariant,
        degree_mode: DegreeMode,
    ) -> Result<Self, EquilibriumError> {
        params
            .validate()
            .map_err(|e| EquilibriumError::Invalid(e.to_string()))?;
        if !(params.epsilon > 0.0) {
            return Err(EquilibriumError::Invalid("epsilon must be positive".into()));
        }
        if !params.is_oscillatory() {
            return Err(EquilibriumError::Invalid(format!(
                "E0 must be negative, got {}",
                params.e0
            )));
        }
        Ok(Self {
            params,
            variant,
            degree_mode,
            alignment: Alignment::Outer,
            u_max: params.u_max(),
        })
    }

    pub fn with_alignment(mut self, alignment: Alignment) -> Self {
        self.alignment = alignment;
        self
    }

    pub fn with_degree_mode(mut self, degree_mode: DegreeMode) -> Self {
        self.degree_mode = degree_mode;
        self
    }

    fn keeps_centrifugal(&self) -> bool {
        self.degree_mode == DegreeMode::Deg6Full
    }

    /// The closed form whose stationarity is solved; the centrifugal term is
    /// zeroed in degree-4 mode.
    pub(crate) fn form(&self) -> CollinearForm {
        let mut form = CollinearForm::new(&self.params, self.variant, self.alignment);
        if !self.keeps_centrifugal() {
            form.c3 = 0.0;
        }
        form
    }

    /// `dV/du` of the closed form.
    pub fn dv_du(&self, u: f64) -> f64 {
        self.form().d1(u)
    }

    pub fn d2v_du2(&self, u: f64) -> f64 {
        self.form().d2(u)
    }

    /// Magnitude scale of `dV/du` at `u`, the sum of its term magnitudes.
    pub fn dv_du_scale(&self, u: f64) -> f64 {
        let f = self.form();
        let d = f.denominator(u);
        let m = 32.0 * f.a0.abs() * u + 48.0 * f.a1.abs() * u * u + (f.a1 * f.b).abs() * u.powi(4);
        f.l0.abs() + 3.0 * f.c3.abs() * u * u + f.k.abs() * m / (d * d)
    }
}

/// Ascending coefficients of the numerator of `dV/du` after clearing
/// `(16 − ε²Γ²u²)²`, i.e. `(1 − x)²(1 + x)²` up to a constant with `x = εΓu/4`.
pub fn build_equilibrium_polynomial(problem: &EquilibriumProblem) -> Vec<f64> {
    CollinearForm::new(&problem.params, problem.variant, problem.alignment)
        .cleared_derivative(problem.keeps_centrifugal())
}

pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn poly_abs_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs())
}

/// Real roots of a polynomial in `(lo, hi)` from the eigenvalues of its
/// companion matrix. The variable is scaled by `scale` before the
/// eigenvalue solve to balance the coefficients.
pub fn polynomial_real_roots(coeffs: &[f64], lo: f64, hi: f64, scale: f64) -> Vec<f64> {
    let mut c: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &ci)| ci * scale.powi(i as i32))
        .collect();
    // A negligible leading coefficient only carries roots far outside the
    // scaled interval.
    let cmax = c.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    while c.last().is_some_and(|x| x.abs() <= 1e-15 * cmax) {
        c.pop();
    }
    // Zero roots are outside every open interval with lo ≥ 0 and are
    // factored out so the companion matrix stays well conditioned.
    let mut zero_roots = 0;
    while c.len() > 1 && c[0] == 0.0 {
        c.remove(0);
        zero_roots += 1;
    }
    let degree = c.len().saturating_sub(1);
    let mut roots = Vec::new();
    if zero_roots > 0 && lo < 0.0 && hi > 0.0 {
        roots.push(0.0);
    }
    if degree == 0 {
        return roots;
    }
    let lead = c[degree];
    let mut m = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        m[(i, degree - 1)] = -c[i] / lead;
    }
    match Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITER) {
        Some(schur) => {
            for z in schur.complex_eigenvalues().iter() {
                if z.im.abs() <= 1e-7 * z.re.abs().max(1.0) {
                    let u = z.re * scale;
                    if u > lo && u < hi {
                        roots.push(u);
                    }
                }
            }
        }
        None => roots.extend(sign_change_roots(&c, lo / scale, hi / scale).into_iter().map(|x| x * scale)),
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()));
    roots
}

const SCHUR_MAX_ITER: usize = 10_000;

/// Fallback when the eigenvalue iteration does not converge: bisection on
/// the sign changes over a uniform grid. Misses pairs of close roots.
fn sign_change_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    const N: usize = 20_000;
    let mut out = Vec::new();
    let at = |k: usize| lo + (hi - lo) * k as f64 / N as f64;
    let mut prev = poly_eval(c, at(1));
    for k in 2..N {
        let x = at(k);
        let f = poly_eval(c, x);
        if f == 0.0 {
            out.push(x);
        } else if f.signum() != prev.signum() && prev != 0.0 {
            let (mut a, mut b) = (at(k - 1), x);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if poly_eval(c, m).signum() == prev.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev = f;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootEstimate {
    pub u: f64,
    pub iterations: usize,
    /// Newton did not reach the residual target in 50 iterations.
    pub flagged: bool,
    pub residual: f64,
}

const NEWTON_MAX_ITER: usize = 50;

/// Safeguarded Newton on `dV/du`, kept inside `(0, u_max)`.
fn polish(problem: &EquilibriumProblem, u0: f64) -> RootEstimate {
    let form = problem.form();
    let target = |u: f64| 1e-14 * problem.dv_du_scale(u).max(1.0);
    let mut u = u0;
    let mut g = form.d1(u);
    let mut iterations = 0;
    while iterations < NEWTON_MAX_ITER && g.abs() > target(u) {
        iterations += 1;
        let dg = form.d2(u);
        if dg == 0.0 || !dg.is_finite() {
            break;
        }
        let mut step = g / dg;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = u - step;
            if trial > 0.0 && trial < problem.u_max {
                let gt = form.d1(trial);
                if gt.abs() < g.abs() {
                    u = trial;
                    g = gt;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted || step.abs() <= 1e-16 * u.abs() {
            break;
        }
    }
    let converged = g.abs() <= 1e-12 * problem.dv_du_scale(u).max(1.0);
    RootEstimate {
        u,
        iterations,
        flagged: !converged,
        residual: g,
    }
}

/// Real roots of `coeffs` in `(0, u_max)`, polished on the rational condition.
pub fn solve_roots(coeffs: &[f64], problem: &EquilibriumProblem) -> Vec<RootEstimate> {
    let raw = polynomial_real_roots(coeffs, 0.0, problem.u_max, problem.u_max);
    let mut out: Vec<RootEstimate> = raw.into_iter().map(|u| polish(problem, u)).collect();
    out.sort_by(|a, b| a.u.total_cmp(&b.u));
    out.dedup_by(|a, b| (a.u - b.u).abs() <= 1e-12 * a.u.max(b.u));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarState {
    pub l: f64,
    pub phi: f64,
    pub p_l: f64,
    pub p_phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub u_star: f64,
    pub l_star: f64,
    /// `ωΓl⁴/8`.
    pub p_phi_star: f64,
    /// `dV/du` at the root.
    pub residual: f64,
    /// `|dV/du|` relative to the magnitude of its terms.
    pub relative_residual: f64,
    /// Cleared polynomial at the root, relative to the sum of term magnitudes.
    pub poly_residual: f64,
    pub d2v: f64,
    pub d2v_fd: f64,
    pub stable: bool,
    pub degenerate: bool,
    /// Newton did not converge; the achieved residual is still reported.
    pub flagged: bool,
    pub polar: PolarState,
}

/// Second-derivative test at a polished root.
pub fn classify_stability(root: &RootEstimate, problem: &EquilibriumProblem) -> EquilibriumResult {
    let u = root.u;
    let form = problem.form();
    let coeffs = build_equilibrium_polynomial(problem);
    let p = &problem.params;
    let l = u.sqrt();
    let p_phi = p.omega() * p.gamma() * l.powi(4) / 8.0;
    let h = 1e-5 * u;
    let d2v = form.d2(u);
    let d2v_fd = (form.d1(u + h) - form.d1(u - h)) / (2.0 * h);
    let g = form.d1(u);
    EquilibriumResult {
        u_star: u,
        l_star: l,
        p_phi_star: p_phi,
        residual: g,
        relative_residual: g.abs() / problem.dv_du_scale(u),
        poly_residual: poly_eval(&coeffs, u).abs() / poly_abs_eval(&coeffs, u),
        d2v,
        d2v_fd,
        stable: d2v > 0.0,
        degenerate: d2v.abs() < 1e-12,
        flagged: root.flagged,
        polar: PolarState {
            l,
            phi: 0.5 * p.omega() * p.t0,
            p_l: 0.0,
            p_phi,
        },
    }
}

/// All collinear equilibria of `problem`.
pub fn solve_equilibria(problem: &EquilibriumProblem) -> Vec<EquilibriumResult> {
    let coeffs = build_equilibrium_polynomial(problem);
    solve_roots(&coeffs, problem)
        .iter()
        .map(|r| classify_stability(r, problem))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub l_dot: f64,
    pub p_l_dot: f64,
    pub p_phi_dot: f64,
    pub e_dot: f64,
    /// `φ̇/ṫ` at the recorded `p_φ`.
    pub rate: f64,
    /// `|φ̇/ṫ − ω/2| / (ω/2)`.
    pub rate_error: f64,
    pub ok: bool,
}

/// `Σ ε^{n−1}Λₙ Pₙ(c)(n+1)(l²/4)ⁿ(l/2)` with `c = ±1`, summed until the terms
/// stop contributing.
fn series_dl(l: f64, sign: f64, params: &ModelParams) -> f64 {
    let w = 0.25 * l * l;
    let x = params.epsilon * params.gamma() * w;
    // ε^{n−1}Γⁿwⁿ, advanced by x per term.
    let mut geom = params.gamma() * w;
    let mut pn = sign;
    let mut sum = 0.0;
    for n in 1..=100_000usize {
        let nf = n as f64;
        let lam = 1.0 + if n % 2 == 0 { params.lambda } else { -params.lambda };
        sum += geom * lam * pn * (nf + 1.0) * 0.5 * l;
        let bound = geom * (1.0 + params.lambda) * (nf + 1.0) * l;
        if n > 4 && bound <= 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        geom *= x;
        pn *= sign;
    }
    sum
}

/// Evaluates the polar equations of motion at the recorded collinear state.
///
/// `ṗ_l` is summed term by term from the series, independently of the closed
/// form. The angular equations are evaluated on the collinear ray, where
/// every Legendre term enters through `Pₙ′(±1)·sin(θ/2) = 0`.
pub fn verify_stationarity(result: &EquilibriumResult, problem: &EquilibriumProblem) -> StationarityReport {
    let p = &problem.params;
    let PolarState { l, p_l, p_phi, .. } = result.polar;
    let gamma = p.gamma();
    let eps = p.epsilon;
    let sign = match problem.alignment {
        Alignment::Outer => 1.0,
        Alignment::Inner => -1.0,
    };
    let l_dot = p_l / gamma;
    let centrifugal = p_phi * p_phi / (gamma * l.powi(3));
    let p_l_dot = centrifugal + 0.5 * (p.lambda_bar() * eps + p.e0) * l + eps * eps * series_dl(l, sign, p);
    // sin(θ/2) = 0 on the collinear ray.
    let sin_half = 0.0f64;
    let p_phi_dot = eps * eps * sin_half;
    let e_dot = -eps * eps * sin_half;
    let phi_dot = p_phi / (gamma * l * l);
    let t_dot = 0.25 * l * l;
    let rate = phi_dot / t_dot;
    let half_omega = 0.5 * p.omega();
    let rate_error = (rate - half_omega).abs() / half_omega;
    let scale = centrifugal.abs() + (0.5 * (p.lambda_bar() * eps + p.e0) * l).abs();
    StationarityReport {
        l_dot,
        p_l_dot,
        p_phi_dot,
        e_dot,
        rate,
        rate_error,
        ok: l_dot == 0.0 && p_l_dot.abs() < 1e-8 * scale.max(1.0) && rate_error < 1e-10,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeComparison {
    pub deg4: Vec<EquilibriumResult>,
    pub deg6: Vec<EquilibriumResult>,
    /// Largest relative distance from a degree-4 root to its nearest degree-6 root.
    pub max_relative_discrepancy: Option<f64>,
}

pub fn compare_degree_modes(problem: &EquilibriumProblem) -> DegreeComparison {
    let deg4 = solve_equilibria(&problem.with_degree_mode(DegreeMode::Deg4DropCentrifugal));
    let deg6 = solve_equilibria(&problem.with_degree_mode(DegreeMode::Deg6Full));
    let max_relative_discrepancy = if deg4.is_empty() || deg6.is_empty() {
        None
    } else {
        Some(
            deg4.iter()
                .map(|a| {
                    deg6.iter()
                        .map(|b| (a.u_star - b.u_star).abs() / a.u_star)
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max),
        )
    };
    DegreeComparison {
        deg4,
        deg6,
        max_relative_discrepancy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_problem() -> EquilibriumProblem {
        let p = ModelParams::new(1.0, 0.01, 1.0, -1.0).unwrap();
        EquilibriumProblem::new(p, PotentialVariant::Rederived, DegreeMode::Deg6Full).unwrap()
    }

    #[test]
    fn quartic_with_known_roots() {
        // (u−1)(u−2)(u−3)(u−4)
        let c = [24.0, -50.0, 35.0, -10.0, 1.0];
        let r = polynomial_real_roots(&c, 0.0, 10.0, 4.0);
        assert_eq!(r.len(), 4);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        assert_eq!(polynomial_real_roots(&c, 1.5, 3.5, 4.0).len(), 2);
    }

    #[test]
    fn roots_invariant_under_rescaling() {
        let pr = sample_problem();
        let c = build_equilibrium_polynomial(&pr);
        let a = polynomial_real_roots(&c, 0.0, pr.u_max, pr.u_max);
        let scaled: Vec<f64> = c.iter().map(|x| x * 1e7).collect();
        let b = polynomial_real_roots(&scaled, 0.0, pr.u_max, pr.u_max);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-9 * x.abs());
        }
    }

    #[test]
    fn degrees_match_modes() {
        let pr = sample_problem();
        assert_eq!(build_equilibrium_polynomial(&pr).len(), 7);
        let q = pr.with_degree_mode(DegreeMode::Deg4DropCentrifugal);
        assert_eq!(build_equilibrium_polynomial(&q).len(), 5);
    }

    #[test]
    fn sample_root_is_unstable() {
        let pr = sample_problem();
        let res = solve_equilibria(&pr);
        assert!(!res.is_empty());
        for r in &res {
            assert!(r.u_star > 0.0 && r.u_star < pr.u_max);
            assert!(r.relative_residual < 1e-12, "{}", r.relative_residual);
            assert!(r.poly_residual < 1e-10);
            assert!(!r.flagged);
            assert!(r.d2v < 0.0 && !r.stable);
            assert!((r.d2v - r.d2v_fd).abs() < 1e-6 * r.d2v.abs());
        }
    }

    #[test]
    fn endpoint_signs_bracket_a_root() {
        let pr = sample_problem();
        assert!((pr.u_max - 800.0).abs() < 1e-9);
        assert!((pr.dv_du(0.0) - 0.245).abs() < 1e-15);
        assert!(pr.dv_du(pr.u_max * (1.0 - 1e-9)) < 0.0);
    }

    #[test]
    fn bisection_oracle_brackets_every_root() {
        let pr = sample_problem();
        let roots = solve_equilibria(&pr);
        let n = 10_000;
        let g = |u: f64| pr.dv_du(u);
        let mut oracle = Vec::new();
        for i in 0..n {
            let (mut a, mut b) = (
                pr.u_max * i as f64 / n as f64,
                pr.u_max * (i + 1) as f64 / n as f64,
            );
            if i + 1 == n {
                b = pr.u_max * (1.0 - 1e-12);
            }
            if (g(a) < 0.0) != (g(b) < 0.0) {
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if (g(m) < 0.0) == (g(a) < 0.0) {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                oracle.push(0.5 * (a + b));
            }
        }
        assert_eq!(oracle.len(), roots.len());
        for (r, o) in roots.iter().zip(&oracle) {
            assert!((r.u_star - o).abs() <= 1e-8 * o);
            let (lo, hi) = (r.u_star * (1.0 - 1e-8), r.u_star * (1.0 + 1e-8));
            assert!((g(lo) < 0.0) != (g(hi) < 0.0));
        }
    }

    #[test]
    fn no_positive_root_at_tiny_epsilon() {
        // The quadratic term dominates: dV/du ≈ −E₀/4 > 0 away from the edge.
        let p = ModelParams::new(1.0, 1e-12, 1.0, -1.0).unwrap();
        let pr = EquilibriumProblem::new(p, PotentialVariant::Rederived, DegreeMode::Deg4DropCentrifugal).unwrap();
        let c = build_equilibrium_polynomial(&pr);
        for u in [1.0, 10.0, 1e3] {
            assert!(poly_eval(&c, u) > 0.0);
        }
        assert!(EquilibriumProblem::new(p.with_epsilon(0.0), PotentialVariant::Rederived, DegreeMode::Deg6Full).is_err());
    }

    #[test]
    fn pure_quadratic_is_unstable() {
        let p = ModelParams::new(1.0, 0.01, 1.0, -1.0).unwrap();
        let mut pr = EquilibriumProblem::new(p, PotentialVariant::Rederived, DegreeMode::Deg6Full).unwrap();
        pr.params.epsilon = 0.01;
        let mut form = pr.form();
        form.l0 = 0.0;
        form.k = 0.0;
        form.c3 = 0.0;
        // V = −u² has V″ = −2.
        let v = |u: f64| form.value(u) - u * u;
        let h = 1e-3;
        let d2 = (v(1.0 + h) - 2.0 * v(1.0) + v(1.0 - h)) / (h * h);
        assert!((d2 + 2.0).abs() < 1e-6);
    }

    #[test]
    fn stationarity_holds_at_root() {
        let pr = sample_problem();
        for r in solve_equilibria(&pr) {
            let rep = verify_stationarity(&r, &pr);
            assert_eq!(rep.l_dot, 0.0);
            assert_eq!(rep.p_phi_dot, 0.0);
            assert_eq!(rep.e_dot, 0.0);
            assert!(rep.p_l_dot.abs() < 1e-8, "{}", rep.p_l_dot);
            assert!(rep.ok);
        }
    }

    #[test]
    fn rate_condition_for_random_l() {
        let pr = sample_problem();
        for &l in &[0.3, 2.0, 17.0] {
            let r = EquilibriumResult {
                polar: PolarState {
                    l,
                    phi: 0.0,
                    p_l: 0.0,
                    p_phi: pr.params.omega() * pr.params.gamma() * l.powi(4) / 8.0,
                },
                ..solve_equilibria(&pr)[0]
            };
            assert!(verify_stationarity(&r, &pr).rate_error < 1e-12);
        }
    }

    #[test]
    fn polynomial_matches_cleared_finite_difference() {
        use crate::model::collinear_v;
        let p = ModelParams::new(1.7, 0.02, 1.0, -0.8).unwrap();
        let pr = EquilibriumProblem::new(p, PotentialVariant::Rederived, DegreeMode::Deg6Full).unwrap();
        let c = build_equilibrium_polynomial(&pr);
        for i in 1..=20 {
            let u = pr.u_max * 0.9 * i as f64 / 20.0;
            let h = 1e-5 * u;
            let fd = (collinear_v(u + h, &p, PotentialVariant::Rederived).unwrap()
                - collinear_v(u - h, &p, PotentialVariant::Rederived).unwrap())
                / (2.0 * h);
            let d = 16.0 - (p.epsilon * p.gamma() * u).powi(2);
            let want = fd * d * d;
            let got = poly_eval(&c, u);
            assert!((got - want).abs() <= 1e-8 * poly_abs_eval(&c, u), "u={u} {got} {want}");
        }
    }

    #[test]
    fn degree_discrepancy_shrinks() {
        let base = ModelParams::new(1.0, 0.01, 1.0, -1.0).unwrap();
        let disc: Vec<f64> = [0.01, 0.005, 0.0025]
            .iter()
            .map(|&e| {
                let pr = EquilibriumProblem::new(base.with_epsilon(e), PotentialVariant::Rederived, DegreeMode::Deg6Full)
                    .unwrap();
                compare_degree_modes(&pr).max_relative_discrepancy.unwrap()
            })
            .collect();
        assert!(disc[0] / disc[2] >= 6.0, "{disc:?}");
    }

    #[test]
    fn inner_alignment_mirrors_swapped_masses() {
        // With equal masses swapping the satellites maps θ = π onto θ = 0.
        let p = ModelParams::new(1.0, 0.01, 1.0, -1.0).unwrap();
        let outer = solve_equilibria(&EquilibriumProblem::new(p, PotentialVariant::Rederived, DegreeMode::Deg6Full).unwrap());
        let inner = solve_equilibria(
            &EquilibriumProblem::new(p, PotentialVariant::Rederived, DegreeMode::Deg6Full)
                .unwrap()
                .with_alignment(Alignment::Inner),
        );
        assert_eq!(outer.len(), inner.len());
        for (a, b) in outer.iter().zip(&inner) {
            assert!((a.u_star - b.u_star).abs() <= 1e-12 * a.u_star);
        }
    }
}
