//! Browser bindings: shrinkage curves, a SURE curve on a synthetic sparse
//! sequence, and multichannel burst denoising.

use wasm_bindgen::prelude::*;

use sbite::canonical::{denoise_canonical, sure_canonical, universal_threshold};
use sbite::harness::{add_noise, replicate_rng, sparse_sequence};
use sbite::thresholding::{canonical_threshold, default_smoothness, Hyperparameters};
use sbite::wavelet::{
    ar2_variance, colored_noise, default_burst, denoise_multichannel, inject_burst, DenoiseOptions, SelectionRule,
    DEFAULT_BURST_AMPLITUDES,
};

fn js_err(e: sbite::SbiteError) -> JsError {
    JsError::new(&e.to_string())
}

fn hp(lambda: f64, nu: f64, s: f64) -> Result<Hyperparameters, JsError> {
    let s = if s > 0.0 { s } else { default_smoothness(nu) };
    Hyperparameters::new(lambda, nu, s).map_err(js_err)
}

/// Scalar shrinkage `y ↦ (1 − λ^ν/|y|^ν)_+^s y` on `points` inputs in
/// `[-y_max, y_max]`. Returns inputs then outputs. `s ≤ 0` picks
/// `s = 2 ln ν + 1`.
#[wasm_bindgen]
pub fn threshold_curve(lambda: f64, nu: f64, s: f64, y_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let hp = hp(lambda, nu, s)?;
    let points = points.max(2);
    let ys: Vec<f64> = (0..points).map(|i| -y_max + 2.0 * y_max * i as f64 / (points - 1) as f64).collect();
    let out: Vec<f64> = ys
        .iter()
        .map(|&y| canonical_threshold(&[y], &hp).map(|v| v[0]))
        .collect::<sbite::Result<_>>()
        .map_err(js_err)?;
    Ok(ys.into_iter().chain(out).collect())
}

/// SURE and true loss against λ on one noisy sparse sequence of `n` blocks
/// of `q` channels. Returns `[λ…, SURE…, loss…]` over a linear λ grid on
/// `[0, λ_max]`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sure_curve(
    seed: u32,
    n: usize,
    q: usize,
    nonzero: usize,
    mu: f64,
    nu: f64,
    s: f64,
    lambda_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let alpha = sparse_sequence(q, n, nonzero, mu).map_err(js_err)?;
    let mut rng = replicate_rng(u64::from(seed), "demo", "sure", 0);
    let data = add_noise(&mut rng, &alpha);
    let points = points.max(2);
    let lambdas: Vec<f64> = (0..points).map(|i| lambda_max * i as f64 / (points - 1) as f64).collect();
    let mut sure = Vec::with_capacity(points);
    let mut loss = Vec::with_capacity(points);
    for &l in &lambdas {
        let hp = hp(l, nu, s)?;
        sure.push(sure_canonical(&data, &hp));
        loss.push(denoise_canonical(&data, &hp).squared_distance(&alpha));
    }
    Ok(lambdas.into_iter().chain(sure).chain(loss).collect())
}

/// Finite-sample universal threshold for `n` blocks of `q` channels.
#[wasm_bindgen]
pub fn universal_lambda(n: usize, q: usize) -> Result<f64, JsError> {
    Ok(universal_threshold(n, q).map_err(js_err)?.lambda_finite)
}

/// Three-channel colored noise with a burst at `t0`, peak `amplitude` noise
/// standard deviations on the first channel. Returns the noisy channels then
/// the denoised ones, each of length `len` (a power of two ≥ 256).
#[wasm_bindgen]
pub fn denoise_demo(seed: u32, len: usize, t0: usize, amplitude: f64, rule: &str) -> Result<Vec<f64>, JsError> {
    let rule: SelectionRule = rule.parse().map_err(js_err)?;
    let mut rng = replicate_rng(u64::from(seed), "demo", "denoise", 0);
    let noise = colored_noise(&mut rng, 3, len).map_err(js_err)?;
    let sd = ar2_variance(0.9, std::f64::consts::FRAC_PI_4).sqrt();
    let amps: Vec<f64> = DEFAULT_BURST_AMPLITUDES.iter().map(|a| a * amplitude * sd).collect();
    let noisy = inject_burst(&noise, t0, &amps, &default_burst()).map_err(js_err)?;
    let (clean, _) = denoise_multichannel(&noisy, &DenoiseOptions::default().with_rule(rule)).map_err(js_err)?;
    Ok(noisy.channels().iter().chain(clean.channels()).flatten().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_have_expected_shapes() {
        let c = threshold_curve(1.0, 2.0, 0.0, 3.0, 61).unwrap();
        assert_eq!(c.len(), 122);
        assert_eq!(c[30], 0.0);
        assert_eq!(c[61 + 30], 0.0);
        assert!(c[121] > 0.0 && c[121] < 3.0);
        // y = 2, λ = 1, ν = 2, s = 2 ln 2 + 1: (1 - 1/4)^s · 2.
        let at_two = c[61 + 50];
        assert!((c[50] - 2.0).abs() < 1e-12);
        assert!((at_two - 0.75f64.powf(default_smoothness(2.0)) * 2.0).abs() < 1e-12);

        let s = sure_curve(1, 200, 1, 10, 4.0, 2.0, 0.0, 5.0, 20).unwrap();
        assert_eq!(s.len(), 60);
        assert_eq!(s[20], 200.0);
        assert!(s[40..].iter().all(|v| *v >= 0.0));

        assert!(
            (universal_lambda(1000, 2).unwrap().powi(2) - 2.0 * 1000f64.ln() - 2.0 * 1000f64.ln().ln()).abs() < 1e-9
        );
    }

    #[test]
    fn denoise_demo_returns_both_series() {
        let v = denoise_demo(3, 1024, 400, 40.0, "universal").unwrap();
        assert_eq!(v.len(), 6 * 1024);
        let noisy: f64 = v[..3 * 1024].iter().map(|x| x * x).sum();
        let clean: f64 = v[3 * 1024..].iter().map(|x| x * x).sum();
        assert!(clean < noisy);
    }
}
