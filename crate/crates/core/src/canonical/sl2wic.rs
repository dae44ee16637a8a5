use statrs::function::gamma::ln_gamma;

use super::sequence::{denoise_canonical, BlockSequence};
use super::universal::{universal_threshold, UniversalThreshold};
use crate::error::{Result, SbiteError};
use crate::risk::{two_stage_search, SearchGrids, SearchOutcome};
use crate::thresholding::Hyperparameters;

/// Prior scale `τ² = λ̃² / (QNν + 1)`.
pub fn prior_scale_sq(ut: &UniversalThreshold, nu: f64) -> f64 {
    ut.lambda_finite * ut.lambda_finite / (ut.q as f64 * ut.n as f64 * nu + 1.0)
}

/// `-ln π_λ(λ; τ)` where `π_λ` is the density of `F(λ) = G₀((λ²/τ² - d_N)/2)`.
pub fn threshold_prior_neg_log(lambda: f64, tau_sq: f64, d_n: f64) -> f64 {
    let z = (lambda * lambda / tau_sq - d_n) / 2.0;
    z + (-z).exp() - (lambda / tau_sq).ln()
}

/// Density of the threshold prior.
pub fn threshold_prior_density(lambda: f64, tau_sq: f64, d_n: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    (-threshold_prior_neg_log(lambda, tau_sq, d_n)).exp()
}

/// Sparsity-weighted ℓ₂ information criterion of the estimate `alpha` at
/// `(λ, ν)`; the flat prior on `ν` contributes a dropped constant.
pub fn sl2wic(data: &BlockSequence, alpha: &BlockSequence, hp: &Hyperparameters) -> Result<f64> {
    let ut = universal_threshold(data.n().max(2), data.q())?;
    sl2wic_with(data, alpha, hp, &ut)
}

pub fn sl2wic_with(
    data: &BlockSequence,
    alpha: &BlockSequence,
    hp: &Hyperparameters,
    ut: &UniversalThreshold,
) -> Result<f64> {
    if hp.s != 1.0 {
        return Err(SbiteError::Domain(format!("criterion is defined for s = 1, got s = {}", hp.s)));
    }
    if !(hp.lambda > 0.0) {
        return Err(SbiteError::Domain("criterion needs λ > 0".into()));
    }
    if alpha.q() != data.q() || alpha.n() != data.n() {
        return Err(SbiteError::InvalidInput("estimate and data differ in shape".into()));
    }
    let norms = data.norms();
    if norms.contains(&0.0) {
        return Err(SbiteError::Domain("criterion needs every block norm to be positive".into()));
    }
    let n = data.n() as f64;
    let q = data.q() as f64;
    let nu = hp.nu;
    let fit = 0.5 * data.squared_distance(alpha);
    let penalty: f64 =
        alpha.norms().iter().zip(&norms).filter(|(a, _)| **a > 0.0).map(|(a, y)| a / y.powf(nu - 1.0)).sum::<f64>()
            * hp.lambda_pow();
    let half = q / 2.0;
    let normalizer = -n * (ln_gamma(half) - (2.0f64.ln() + half * std::f64::consts::PI.ln() + ln_gamma(q)));
    let weight_logs = q * (nu - 1.0) * norms.iter().map(|v| v.ln()).sum::<f64>();
    let scale_log = -q * n * nu * hp.lambda.ln();
    let prior = threshold_prior_neg_log(hp.lambda, prior_scale_sq(ut, nu), ut.d_n);
    Ok(fit + penalty + normalizer + weight_logs + scale_log + prior)
}

/// Criterion at `(λ, ν)` with `α` set to its exact minimizer, the `s = 1`
/// closed-form estimate.
pub fn sl2wic_profile(data: &BlockSequence, lambda: f64, nu: f64, ut: &UniversalThreshold) -> Result<f64> {
    let hp = Hyperparameters::new(lambda, nu, 1.0)?;
    let alpha = denoise_canonical(data, &hp);
    sl2wic_with(data, &alpha, &hp, ut)
}

/// Minimizes the criterion over the stage-one `(λ, ν)` grid of `grids`.
pub fn select_sl2wic(data: &BlockSequence, grids: &SearchGrids) -> Result<SearchOutcome<()>> {
    let ut = universal_threshold(data.n().max(2), data.q())?;
    let peak = data.norms().into_iter().fold(0.0, f64::max);
    let grids = SearchGrids { refine: false, ..grids.clone() };
    two_stage_search(&grids, |_| peak, |hp| sl2wic_profile(data, hp.lambda, hp.nu, &ut).ok().map(|v| (v, ())))
}
