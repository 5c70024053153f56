use super::{clamp_unit, ModelError, ModelParams, CONVERGENCE_GUARD};
use crate::dynamics::ExtendedState;
use serde::{Deserialize, Serialize};

/// A point `(ξ, t)` at which the Legendre series is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub xi: [f64; 2],
    pub t: f64,
}

impl SeriesPoint {
    pub fn new(u: f64, v: f64, t: f64) -> Self {
        Self { xi: [u, v], t }
    }

    pub fn xi_norm2(&self) -> f64 {
        self.xi[0] * self.xi[0] + self.xi[1] * self.xi[1]
    }

    /// Convergence ratio `εΓ|ξ|²/4` of the series at this point.
    pub fn ratio(&self, params: &ModelParams) -> f64 {
        params.epsilon * params.gamma() * self.xi_norm2() / 4.0
    }
}

/// Truncated series value together with a bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub ratio: f64,
}

/// Which closed form of the collinear potential to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PotentialVariant {
    /// The printed closed form, kept verbatim for comparison.
    Paper,
    /// Resummed from the series, with the centrifugal term taken from the
    /// radial momentum equation.
    #[default]
    Rederived,
}

/// `Λₙ = Γⁿ(1 + (−1)ⁿλ)`.
pub fn lambda_n(n: usize, params: &ModelParams) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    params.gamma().powi(n as i32) * (1.0 + sign * params.lambda)
}

/// Half-angle cosine between `ξ` and the rotating center-of-mass direction.
pub fn cos_half_theta(point: &SeriesPoint, params: &ModelParams) -> Result<f64, ModelError> {
    let rho2 = point.xi_norm2();
    if !(rho2 > 0.0) {
        return Err(ModelError::UndefinedAngle);
    }
    let [u, v] = point.xi;
    let (s, c) = (0.5 * params.omega() * point.t).sin_cos();
    clamp_unit(((u * u - v * v) * c + 2.0 * u * v * s) / rho2)
}

fn check_ratio(ratio: f64) -> Result<(), ModelError> {
    if !(ratio < CONVERGENCE_GUARD) {
        return Err(ModelError::ConvergenceDomain {
            ratio,
            guard: CONVERGENCE_GUARD,
        });
    }
    Ok(())
}

/// Series value and its partials with respect to `c = cos(θ/2)` and `w = |ξ|²/4`.
struct SeriesSum {
    value: f64,
    d_c: f64,
    d_w: f64,
}

fn sum_series(c: f64, w: f64, params: &ModelParams) -> SeriesSum {
    let eps = params.epsilon;
    let gamma = params.gamma();
    let lambda = params.lambda;
    let step = eps * gamma * w;

    // h = ε^{n−1}Γⁿwⁿ, so that the n-th term is Λ-factor·Pₙ·h·w.
    let mut h = gamma * w;
    let (mut p_prev, mut p) = (1.0, c);
    let (mut dp_prev, mut dp) = (0.0, 1.0);
    let mut out = SeriesSum {
        value: 0.0,
        d_c: 0.0,
        d_w: 0.0,
    };
    for n in 1..=params.n_max {
        let nf = n as f64;
        let fac = if n % 2 == 0 { 1.0 + lambda } else { 1.0 - lambda };
        let hw = h * w;
        out.value += fac * p * hw;
        out.d_c += fac * dp * hw;
        out.d_w += fac * p * (nf + 1.0) * h;

        let p_next = ((2.0 * nf + 1.0) * c * p - nf * p_prev) / (nf + 1.0);
        let dp_next = dp_prev + (2.0 * nf + 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        h *= step;
    }
    out
}

fn tail_bound(w: f64, ratio: f64, params: &ModelParams) -> f64 {
    // Each term is bounded by (1+λ)Γw²·xⁿ⁻¹ with x the convergence ratio.
    (1.0 + params.lambda) * params.gamma() * w * w * ratio.powi(params.n_max as i32)
        / (1.0 - ratio)
}

/// The bare series `V = Σ ε^{n−1} Pₙ(cos θ/2) (|ξ|²/4)^{n+1} Λₙ`.
///
/// The `ε²` prefactor of the Hamiltonian is not applied here.
pub fn potential_v(point: &SeriesPoint, params: &ModelParams) -> Result<SeriesValue, ModelError> {
    let ratio = point.ratio(params);
    check_ratio(ratio)?;
    let rho2 = point.xi_norm2();
    if rho2 == 0.0 {
        return Ok(SeriesValue {
            value: 0.0,
            tail_bound: 0.0,
            ratio,
        });
    }
    let c = cos_half_theta(point, params)?;
    let w = rho2 / 4.0;
    Ok(SeriesValue {
        value: sum_series(c, w, params).value,
        tail_bound: tail_bound(w, ratio, params),
        ratio,
    })
}

/// Value and analytic gradient `(∂V/∂u, ∂V/∂v, ∂V/∂t)` of the bare series.
pub(crate) fn series_value_grad(
    u: f64,
    v: f64,
    t: f64,
    params: &ModelParams,
) -> Result<(f64, [f64; 3]), ModelError> {
    let rho2 = u * u + v * v;
    check_ratio(params.epsilon * params.gamma() * rho2 / 4.0)?;
    if rho2 == 0.0 {
        return Ok((0.0, [0.0; 3]));
    }
    let half = 0.5 * params.omega();
    let (s, co) = (half * t).sin_cos();
    let a = u * u - v * v;
    let b = 2.0 * u * v;
    let c = clamp_unit((a * co + b * s) / rho2)?;
    let sum = sum_series(c, rho2 / 4.0, params);

    let dc_du = 2.0 * (u * co + v * s - u * c) / rho2;
    let dc_dv = 2.0 * (-v * co + u * s - v * c) / rho2;
    let dc_dt = half * (-a * s + b * co) / rho2;
    Ok((
        sum.value,
        [
            sum.d_c * dc_du + sum.d_w * 0.5 * u,
            sum.d_c * dc_dv + sum.d_w * 0.5 * v,
            sum.d_c * dc_dt,
        ],
    ))
}

/// Analytic gradient of [`potential_v`] with respect to `(u, v, t)`.
pub fn grad_v(point: &SeriesPoint, params: &ModelParams) -> Result<[f64; 3], ModelError> {
    let [u, v] = point.xi;
    series_value_grad(u, v, point.t, params).map(|(_, g)| g)
}

/// `H = |p|²/(2Γ) − ¼(λ̄ε+E)|ξ|² − ε²V`.
pub fn hamiltonian_reg(state: &ExtendedState, params: &ModelParams) -> Result<f64, ModelError> {
    let point = SeriesPoint::new(state.u, state.v, state.t);
    let rho2 = point.xi_norm2();
    let v = potential_v(&point, params)?.value;
    let kinetic = (state.p_u * state.p_u + state.p_v * state.p_v) / (2.0 * params.gamma());
    let eps = params.epsilon;
    Ok(kinetic - 0.25 * (params.lambda_bar() * eps + state.e) * rho2 - eps * eps * v)
}

/// Relative orientation of the satellites in a collinear configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    /// Satellite 2 outward of satellite 1 (`θ = 0`).
    #[default]
    Outer,
    /// Satellite 2 inward of satellite 1 (`θ = π`).
    Inner,
}

/// Coefficients of the collinear potential
/// `V(u) = l0·u + c3·u³ − k·u²(a0 + a1·u)/(16 − b·u²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CollinearForm {
    pub l0: f64,
    pub c3: f64,
    pub k: f64,
    pub a0: f64,
    pub a1: f64,
    pub b: f64,
}

impl CollinearForm {
    pub fn new(params: &ModelParams, variant: PotentialVariant, alignment: Alignment) -> Self {
        let eps = params.epsilon;
        let gamma = params.gamma();
        let lambda = params.lambda;
        let lbar = params.lambda_bar();
        let flip = match alignment {
            Alignment::Outer => 1.0,
            Alignment::Inner => -1.0,
        };
        let (c3, a0, a1) = match variant {
            PotentialVariant::Paper => (
                eps.powf(1.5) * gamma / 16.0,
                4.0 * lbar,
                flip * eps * gamma * (1.0 - lambda),
            ),
            PotentialVariant::Rederived => (
                -params.omega().powi(2) * gamma / 384.0,
                flip * 4.0 * (1.0 - lambda),
                lbar * eps * gamma,
            ),
        };
        Self {
            l0: -0.25 * (lbar * eps + params.e0),
            c3,
            k: eps * eps * gamma / 4.0,
            a0,
            a1,
            b: (eps * gamma).powi(2),
        }
    }

    pub fn denominator(&self, u: f64) -> f64 {
        16.0 - self.b * u * u
    }

    pub fn value(&self, u: f64) -> f64 {
        let d = self.denominator(u);
        self.l0 * u + self.c3 * u.powi(3) - self.k * u * u * (self.a0 + self.a1 * u) / d
    }

    fn m(&self, u: f64) -> f64 {
        32.0 * self.a0 * u + 48.0 * self.a1 * u * u - self.a1 * self.b * u.powi(4)
    }

    pub fn d1(&self, u: f64) -> f64 {
        let d = self.denominator(u);
        self.l0 + 3.0 * self.c3 * u * u - self.k * self.m(u) / (d * d)
    }

    pub fn d2(&self, u: f64) -> f64 {
        let d = self.denominator(u);
        let dd = -2.0 * self.b * u;
        let dm = 32.0 * self.a0 + 96.0 * self.a1 * u - 4.0 * self.a1 * self.b * u.powi(3);
        6.0 * self.c3 * u - self.k * (dm * d - 2.0 * self.m(u) * dd) / d.powi(3)
    }

    /// Ascending coefficients of `V′(u)·(16 − b·u²)²`.
    pub fn cleared_derivative(&self, keep_centrifugal: bool) -> Vec<f64> {
        let (l0, k, a0, a1, b) = (self.l0, self.k, self.a0, self.a1, self.b);
        let c3 = if keep_centrifugal { self.c3 } else { 0.0 };
        let mut coeffs = vec![
            256.0 * l0,
            -32.0 * k * a0,
            -32.0 * b * l0 + 768.0 * c3 - 48.0 * k * a1,
            0.0,
            b * b * l0 - 96.0 * c3 * b + k * a1 * b,
            0.0,
            3.0 * c3 * b * b,
        ];
        if !keep_centrifugal {
            coeffs.truncate(5);
        }
        coeffs
    }
}

/// Closed-form potential along the collinear `θ = 0` ray as a function of `u = l²`.
pub fn collinear_v(
    u_sq: f64,
    params: &ModelParams,
    variant: PotentialVariant,
) -> Result<f64, ModelError> {
    let form = CollinearForm::new(params, variant, Alignment::Outer);
    let d = form.denominator(u_sq);
    if !(d > 0.0) {
        return Err(ModelError::ConvergenceDomain {
            ratio: params.epsilon * params.gamma() * u_sq / 4.0,
            guard: 1.0,
        });
    }
    Ok(form.value(u_sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(lambda: f64, eps: f64, n_max: usize) -> ModelParams {
        ModelParams::new(lambda, eps, 1.0, -1.0)
            .unwrap()
            .with_n_max(n_max)
    }

    /// Direct term-by-term sum with explicit Legendre values.
    fn oracle_v(u: f64, v: f64, t: f64, p: &ModelParams) -> f64 {
        let rho2 = u * u + v * v;
        let wt = 0.5 * p.omega() * t;
        let c = ((u * u - v * v) * wt.cos() + 2.0 * u * v * wt.sin()) / rho2;
        let leg = crate::model::legendre_all(p.n_max, c).unwrap();
        (1..=p.n_max)
            .map(|n| {
                p.epsilon.powi(n as i32 - 1)
                    * leg[n]
                    * (rho2 / 4.0).powi(n as i32 + 1)
                    * p.gamma().powi(n as i32)
                    * (1.0 + (-1f64).powi(n as i32) * p.lambda)
            })
            .sum()
    }

    #[test]
    fn lambda_n_examples() {
        let p = params(1.0, 0.1, 8);
        assert_eq!(lambda_n(1, &p), 0.0);
        assert_eq!(lambda_n(3, &p), 0.0);
        assert!((lambda_n(2, &p) - 0.5).abs() < 1e-16);
        let p2 = params(2.0, 0.1, 8);
        assert!((lambda_n(3, &p2) + 8.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn cos_half_theta_examples() {
        let p = params(1.0, 0.3, 8);
        assert_eq!(cos_half_theta(&SeriesPoint::new(1.0, 0.0, 0.0), &p).unwrap(), 1.0);
        assert_eq!(cos_half_theta(&SeriesPoint::new(1.0, 1.0, 0.0), &p).unwrap(), 0.0);
        let a = cos_half_theta(&SeriesPoint::new(0.3, -0.8, 2.0), &p).unwrap();
        let b = cos_half_theta(&SeriesPoint::new(-0.3, 0.8, 2.0), &p).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            cos_half_theta(&SeriesPoint::new(0.0, 0.0, 1.0), &p),
            Err(ModelError::UndefinedAngle)
        );
    }

    #[test]
    fn potential_trivial_cases() {
        let p = params(1.0, 0.1, 8);
        assert_eq!(potential_v(&SeriesPoint::new(0.0, 0.0, 3.0), &p).unwrap().value, 0.0);
        let p1 = params(1.0, 0.1, 1);
        assert_eq!(potential_v(&SeriesPoint::new(0.7, 0.2, 3.0), &p1).unwrap().value, 0.0);
    }

    #[test]
    fn potential_matches_term_by_term_oracle() {
        let p = params(1.0, 0.1, 8);
        let got = potential_v(&SeriesPoint::new(1.0, 0.0, 0.0), &p).unwrap().value;
        let mut want = 0.0;
        for n in (2..=8).step_by(2) {
            want += 0.1f64.powi(n - 1) * 0.25f64.powi(n + 1) * 0.5f64.powi(n) * 2.0;
        }
        assert!((got - want).abs() <= 1e-15 * want.abs());
        assert!((got - oracle_v(1.0, 0.0, 0.0, &p)).abs() <= 1e-15 * want.abs());
    }

    #[test]
    fn potential_rejects_divergent_points() {
        let p = params(1.0, 0.1, 8);
        let r = (4.0f64 / (0.1 * 0.5)).sqrt();
        match potential_v(&SeriesPoint::new(r, 0.0, 0.0), &p) {
            Err(ModelError::ConvergenceDomain { ratio, .. }) => assert!((ratio - 1.0).abs() < 1e-12),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn gradient_vanishes_when_series_is_zero() {
        let p = params(1.0, 0.2, 1);
        assert_eq!(grad_v(&SeriesPoint::new(0.4, -1.1, 7.0), &p).unwrap(), [0.0; 3]);
        let z = params(2.0, 0.0, 8);
        let g = grad_v(&SeriesPoint::new(0.4, -1.1, 7.0), &z).unwrap();
        let eps2 = z.epsilon * z.epsilon;
        assert!(g.iter().all(|x| (eps2 * x).abs() == 0.0));
    }

    #[test]
    fn hamiltonian_examples() {
        let p = ModelParams::new(1.0, 1e-3, 1.0, -1.0).unwrap();
        let p0 = p.ejection_momentum();
        let st = ExtendedState::new(0.0, 0.0, p0, 0.0, -1.0, 0.0);
        assert!((hamiltonian_reg(&st, &p).unwrap() - p.level()).abs() < 1e-18);

        let z = ModelParams::new(1.0, 0.0, 1.0, -1.0).unwrap();
        let st = ExtendedState::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0);
        assert_eq!(hamiltonian_reg(&st, &z).unwrap(), 0.25);
    }

    #[test]
    fn collinear_trivial_cases() {
        for variant in [PotentialVariant::Paper, PotentialVariant::Rederived] {
            let p = params(1.0, 0.01, 8);
            assert_eq!(collinear_v(0.0, &p, variant).unwrap(), 0.0);
            let z = params(1.7, 0.0, 8);
            assert_eq!(collinear_v(3.0, &z, variant).unwrap(), 0.25 * 3.0);
        }
        let p = params(1.0, 0.01, 8);
        assert!(collinear_v(p.u_max(), &p, PotentialVariant::Rederived).is_err());
    }

    #[test]
    fn collinear_series_part_matches_summed_series() {
        // λ=1, ε=0.01, u=100: x = 0.125, the series converges fast.
        let p = params(1.0, 0.01, 60);
        let u = 100.0f64;
        let eps2 = p.epsilon * p.epsilon;
        let series = eps2 * oracle_v(u.sqrt(), 0.0, 0.0, &p);
        let l0 = -0.25 * (p.lambda_bar() * p.epsilon + p.e0);
        let c3 = -p.omega().powi(2) * p.gamma() / 384.0;
        let from_closed = l0 * u + c3 * u.powi(3) - collinear_v(u, &p, PotentialVariant::Rederived).unwrap();
        assert!((from_closed - series).abs() <= 1e-12 * series.abs());

        // The printed closed form disagrees with the series at λ = 1.
        let printed = l0 * u + p.epsilon.powf(1.5) * p.gamma() * u.powi(3) / 16.0
            - collinear_v(u, &p, PotentialVariant::Paper).unwrap();
        assert!((printed - series).abs() > 1e-3 * series.abs());
    }

    #[test]
    fn collinear_derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &lambda in &[1.0, 0.4, 3.0] {
            let p = params(lambda, 0.01, 8);
            let gamma = p.gamma();
            for variant in [PotentialVariant::Paper, PotentialVariant::Rederived] {
                for alignment in [Alignment::Outer, Alignment::Inner] {
                    let f = CollinearForm::new(&p, variant, alignment);
                    for _ in 0..20 {
                        let u = rng.gen_range(1.0..0.9 * 4.0 / (0.01 * gamma));
                        let h = 1e-5 * u;
                        let fd1 = (f.value(u + h) - f.value(u - h)) / (2.0 * h);
                        let fd2 = (f.d1(u + h) - f.d1(u - h)) / (2.0 * h);
                        assert!((f.d1(u) - fd1).abs() <= 1e-6 * (1.0 + fd1.abs()));
                        assert!((f.d2(u) - fd2).abs() <= 1e-6 * (1e-6 + fd2.abs()));
                        let d = f.denominator(u);
                        let poly: f64 = f
                            .cleared_derivative(true)
                            .iter()
                            .enumerate()
                            .map(|(i, c)| c * u.powi(i as i32))
                            .sum();
                        let want = f.d1(u) * d * d;
                        assert!((poly - want).abs() <= 1e-9 * (1.0 + want.abs()) * 256.0);
                    }
                }
            }
        }
    }

    #[test]
    fn truncation_stays_within_tail_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let lambda = rng.gen_range(0.2..4.0);
            let eps = rng.gen_range(0.01..0.5);
            let n_max = rng.gen_range(1..12);
            let p = params(lambda, eps, n_max);
            let r_max = (4.0 * 0.9 / (eps * p.gamma())).sqrt();
            let r = rng.gen_range(0.0..r_max);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let pt = SeriesPoint::new(r * phi.cos(), r * phi.sin(), rng.gen_range(0.0..50.0));
            let base = potential_v(&pt, &p).unwrap();
            let longer = potential_v(&pt, &p.with_n_max(n_max + 5)).unwrap();
            assert!((longer.value - base.value).abs() <= base.tail_bound * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn series_agrees_with_closed_form_at_theta_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let lambda = rng.gen_range(0.2..4.0);
            let eps = rng.gen_range(0.001..0.3);
            let p = ModelParams::new(lambda, eps, 1.0, -0.8).unwrap().with_n_max(40);
            let x = rng.gen_range(0.01..0.5);
            let u = 4.0 * x / (eps * p.gamma());
            let eps2 = eps * eps;
            let series = eps2 * potential_v(&SeriesPoint::new(u.sqrt(), 0.0, 0.0), &p).unwrap().value;
            let f = CollinearForm::new(&p, PotentialVariant::Rederived, Alignment::Outer);
            let non_series = f.l0 * u + f.c3 * u.powi(3);
            let closed = non_series - collinear_v(u, &p, PotentialVariant::Rederived).unwrap();
            assert!((closed - series).abs() <= 1e-10 * series.abs().max(1e-300));

            let inner = SeriesPoint::new(0.0, u.sqrt(), 0.0);
            let series_pi = eps2 * potential_v(&inner, &p).unwrap().value;
            let fi = CollinearForm::new(&p, PotentialVariant::Rederived, Alignment::Inner);
            let closed_pi = -(fi.value(u) - non_series);
            assert!((closed_pi - series_pi).abs() <= 1e-10 * series_pi.abs().max(1e-300));
        }
    }

    fn fd_grad(u: f64, v: f64, t: f64, p: &ModelParams) -> [f64; 3] {
        let f = |u: f64, v: f64, t: f64| potential_v(&SeriesPoint::new(u, v, t), p).unwrap().value;
        let h = 1e-6 * (u * u + v * v).sqrt().max(1.0);
        let ht = h / p.omega().max(1e-300);
        [
            (f(u + h, v, t) - f(u - h, v, t)) / (2.0 * h),
            (f(u, v + h, t) - f(u, v - h, t)) / (2.0 * h),
            (f(u, v, t + ht) - f(u, v, t - ht)) / (2.0 * ht),
        ]
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let lambda = rng.gen_range(0.2..4.0);
            let eps = rng.gen_range(0.05..0.5);
            let p = params(lambda, eps, 8);
            let r_max = (4.0 * 0.8 / (eps * p.gamma())).sqrt();
            let r = rng.gen_range(0.1 * r_max..r_max);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let (u, v, t) = (r * phi.cos(), r * phi.sin(), rng.gen_range(0.0..100.0));
            let g = grad_v(&SeriesPoint::new(u, v, t), &p).unwrap();
            let fd = fd_grad(u, v, t, &p);
            let scale_xi = g[0].hypot(g[1]);
            for i in 0..2 {
                assert!((g[i] - fd[i]).abs() <= 1e-6 * scale_xi, "component {i}: {} vs {}", g[i], fd[i]);
            }
            let scale_t = g[2].abs() + p.omega() * r * scale_xi;
            assert!((g[2] - fd[2]).abs() <= 1e-6 * scale_t);
        }
    }

    proptest! {
        #[test]
        fn hamiltonian_is_s_invariant(
            u in -0.1f64..0.1, v in -0.1f64..0.1,
            pu in -1.0f64..1.0, pv in -1.0f64..1.0,
            e in -2.0f64..0.0, t in 0.0f64..1e4,
            lambda in 0.2f64..5.0,
        ) {
            let p = ModelParams::new(lambda, 1e-3, 1.0, -1.0).unwrap();
            let a = ExtendedState::new(u, v, pu, pv, e, t);
            let b = ExtendedState::new(-u, -v, pu, pv, e, t);
            let c = ExtendedState::new(-u, -v, -pu, -pv, e, t);
            let ha = hamiltonian_reg(&a, &p).unwrap();
            prop_assert_eq!(ha, hamiltonian_reg(&b, &p).unwrap());
            prop_assert_eq!(ha, hamiltonian_reg(&c, &p).unwrap());
        }

        #[test]
        fn cos_half_theta_in_unit_interval(u in -10.0f64..10.0, v in -10.0f64..10.0, t in 0.0f64..1e6) {
            prop_assume!(u * u + v * v > 1e-12);
            let p = params(1.5, 0.2, 8);
            let c = cos_half_theta(&SeriesPoint::new(u, v, t), &p).unwrap();
            prop_assert!((-1.0..=1.0).contains(&c));
        }
    }
}
