use super::{ModelError, UNIT_SLACK};

/// Clamps `x` into `[-1, 1]`, rejecting values beyond the rounding slack.
pub(crate) fn clamp_unit(x: f64) -> Result<f64, ModelError> {
    if !(x.abs() <= 1.0 + UNIT_SLACK) {
        return Err(ModelError::LegendreDomain { x });
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Fills `p[n] = Pₙ(x)` for every slot of `p` by the three-term recurrence.
pub(crate) fn fill_legendre(x: f64, p: &mut [f64]) {
    if p.is_empty() {
        return;
    }
    p[0] = 1.0;
    if p.len() > 1 {
        p[1] = x;
    }
    for n in 1..p.len().saturating_sub(1) {
        let nf = n as f64;
        p[n + 1] = ((2.0 * nf + 1.0) * x * p[n] - nf * p[n - 1]) / (nf + 1.0);
    }
}

/// Fills `dp[n] = Pₙ′(x)` given `p[n] = Pₙ(x)`.
///
/// Uses `P′ₙ₊₁ = P′ₙ₋₁ + (2n+1)Pₙ`, which stays accurate at `x = ±1` where the
/// textbook quotient form degenerates.
pub(crate) fn fill_legendre_deriv(p: &[f64], dp: &mut [f64]) {
    if dp.is_empty() {
        return;
    }
    dp[0] = 0.0;
    if dp.len() > 1 {
        dp[1] = 1.0;
    }
    for n in 1..dp.len().saturating_sub(1) {
        dp[n + 1] = dp[n - 1] + (2.0 * n as f64 + 1.0) * p[n];
    }
}

/// Legendre polynomials `P₀(x) … P_{n_max}(x)`.
pub fn legendre_all(n_max: usize, x: f64) -> Result<Vec<f64>, ModelError> {
    let x = clamp_unit(x)?;
    let mut p = vec![0.0; n_max + 1];
    fill_legendre(x, &mut p);
    Ok(p)
}

/// Derivatives `P₀′(x) … P_{n_max}′(x)`.
pub fn legendre_deriv_all(n_max: usize, x: f64) -> Result<Vec<f64>, ModelError> {
    let p = legendre_all(n_max, x)?;
    let mut dp = vec![0.0; n_max + 1];
    fill_legendre_deriv(&p, &mut dp);
    Ok(dp)
}
