use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Result, SbiteError};

/// Offset keeping the lower bracket strictly right of the stationary point.
const BRACKET_EPS: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-12;

/// Gumbel distribution function `exp(-exp(-x))`.
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Thresholds controlling the maximum of `N` null blocks of length `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalThreshold {
    pub q: usize,
    pub n: usize,
    /// Location of the Gumbel limit of `max_n ‖Y_n‖²`.
    pub d_n: f64,
    /// Scale of the Gumbel limit.
    pub c_n: f64,
    /// `√(d_N + 2 ln ln N)`.
    pub lambda_finite: f64,
    /// `√(2 (ln N + (Q/2) ln ln N - ln Γ(Q/2)))`.
    pub lambda_asymptotic: f64,
}

impl UniversalThreshold {
    /// Residual of the location equation at the stored root.
    pub fn residual(&self) -> f64 {
        location_equation(self.d_n, self.n, self.q)
    }

    /// Asymptotic probability that every null block is thresholded to zero.
    pub fn null_zero_probability(&self) -> f64 {
        gumbel_cdf((self.n as f64).ln().ln())
    }
}

/// `(1 - Q/2) ln(ξ/2) + ξ/2 - ln N + ln Γ(Q/2)`.
pub fn location_equation(xi: f64, n: usize, q: usize) -> f64 {
    let half = q as f64 / 2.0;
    (1.0 - half) * (xi / 2.0).ln() + xi / 2.0 - (n as f64).ln() + ln_gamma(half)
}

fn location_root(n: usize, q: usize) -> Result<f64> {
    let ln_n = (n as f64).ln();
    if q == 2 {
        return Ok(2.0 * ln_n);
    }
    let half = q as f64 / 2.0;
    let f = |xi: f64| location_equation(xi, n, q);
    let df = |xi: f64| (1.0 - half) / xi + 0.5;
    let mut lo = 2.0 * (half - 1.0).max(0.0) + BRACKET_EPS;
    let mut hi = 10.0 * (ln_n + q as f64);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(SbiteError::RootBracket { lo, hi, f_lo, f_hi });
    }
    // bisection down to a narrow bracket, then guarded Newton
    while hi - lo > 1e-3 * (1.0 + lo) {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut xi = 0.5 * (lo + hi);
    for _ in 0..100 {
        let fx = f(xi);
        if fx < 0.0 {
            lo = xi;
        } else {
            hi = xi;
        }
        let mut next = xi - fx / df(xi);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - xi).abs();
        xi = next;
        if step <= ROOT_TOL * (1.0 + xi) {
            break;
        }
    }
    Ok(xi)
}

/// Finite-sample and asymptotic universal thresholds for `N` blocks of length `Q`.
pub fn universal_threshold(n: usize, q: usize) -> Result<UniversalThreshold> {
    if n < 2 {
        return Err(SbiteError::Domain(format!("need N ≥ 2 blocks, got {n}")));
    }
    if q < 1 {
        return Err(SbiteError::Domain("block length must be at least 1".into()));
    }
    let d_n = location_root(n, q)?;
    let ln_n = (n as f64).ln();
    let lnln = ln_n.ln();
    let finite_sq = d_n + 2.0 * lnln;
    let asym_sq = 2.0 * (ln_n + q as f64 / 2.0 * lnln - ln_gamma(q as f64 / 2.0));
    if !(finite_sq > 0.0 && asym_sq > 0.0) {
        return Err(SbiteError::Domain(format!("universal threshold undefined for N = {n}, Q = {q}")));
    }
    Ok(UniversalThreshold { q, n, d_n, c_n: 2.0, lambda_finite: finite_sq.sqrt(), lambda_asymptotic: asym_sq.sqrt() })
}

/// `√((2/Q) ln N)`, the threshold matching the minimum-entry rule.
pub fn robust_universal_threshold(n: usize, q: usize) -> Result<f64> {
    if n < 2 || q < 1 {
        return Err(SbiteError::Domain(format!("need N ≥ 2 and Q ≥ 1, got N = {n}, Q = {q}")));
    }
    Ok((2.0 / q as f64 * (n as f64).ln()).sqrt())
}
