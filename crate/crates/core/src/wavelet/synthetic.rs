use rand::Rng;
use rand_distr::StandardNormal;

use super::transform::MultichannelSeries;
use crate::error::{Result, SbiteError};

pub const DEFAULT_BURST_LEN: usize = 64;
/// Proportions of the burst on three channels: reference, three times larger,
/// five times smaller.
pub const DEFAULT_BURST_AMPLITUDES: [f64; 3] = [1.0, 3.0, 0.2];

/// `e^(-t/τ) sin(2π t / period)` for `t = 0..len`.
pub fn damped_sinusoid(len: usize, period: f64, decay: f64) -> Vec<f64> {
    (0..len)
        .map(|t| {
            let t = t as f64;
            (-t / decay).exp() * (2.0 * std::f64::consts::PI * t / period).sin()
        })
        .collect()
}

/// Default burst waveform: 64 samples, period 16, decay 16, unit peak.
pub fn default_burst() -> Vec<f64> {
    let w = damped_sinusoid(DEFAULT_BURST_LEN, 16.0, 16.0);
    let peak = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    w.into_iter().map(|v| v / peak).collect()
}

/// Adds `amplitudes[q] · waveform` to channel `q` starting at sample `t0`.
pub fn inject_burst(
    series: &MultichannelSeries,
    t0: usize,
    amplitudes: &[f64],
    waveform: &[f64],
) -> Result<MultichannelSeries> {
    if amplitudes.len() != series.q() {
        return Err(SbiteError::InvalidInput(format!("{} amplitudes for {} channels", amplitudes.len(), series.q())));
    }
    if t0 + waveform.len() > series.len() {
        return Err(SbiteError::InvalidInput(format!(
            "burst of length {} at {t0} runs past the end ({} samples)",
            waveform.len(),
            series.len()
        )));
    }
    let channels = series
        .channels()
        .iter()
        .zip(amplitudes)
        .map(|(ch, &a)| {
            let mut out = ch.clone();
            for (i, w) in waveform.iter().enumerate() {
                out[t0 + i] += a * w;
            }
            out
        })
        .collect();
    let mut out = MultichannelSeries::new(channels)?;
    out.sample_rate = series.sample_rate;
    Ok(out)
}

/// Stationary AR(2) noise `x_t = 2r cos θ x_{t-1} - r² x_{t-2} + e_t` with unit
/// Gaussian innovations; a band-pass process peaking near frequency `θ`.
pub fn ar2_noise<R: Rng + ?Sized>(rng: &mut R, len: usize, r: f64, theta: f64) -> Vec<f64> {
    let a1 = 2.0 * r * theta.cos();
    let a2 = -r * r;
    let burn = 512;
    let (mut x1, mut x2) = (0.0, 0.0);
    let mut out = Vec::with_capacity(len);
    for t in 0..burn + len {
        let e: f64 = rng.sample(StandardNormal);
        let x = a1 * x1 + a2 * x2 + e;
        x2 = x1;
        x1 = x;
        if t >= burn {
            out.push(x);
        }
    }
    out
}

/// Marginal variance of [`ar2_noise`].
pub fn ar2_variance(r: f64, theta: f64) -> f64 {
    let a1 = 2.0 * r * theta.cos();
    let a2 = -r * r;
    (1.0 - a2) / ((1.0 + a2) * ((1.0 - a2).powi(2) - a1 * a1))
}

/// Independent AR(2) channels with the default band-pass parameters.
pub fn colored_noise<R: Rng + ?Sized>(rng: &mut R, q: usize, len: usize) -> Result<MultichannelSeries> {
    MultichannelSeries::new((0..q).map(|_| ar2_noise(rng, len, 0.9, std::f64::consts::FRAC_PI_4)).collect())
}

/// Independent unit Gaussian channels.
pub fn white_noise<R: Rng + ?Sized>(rng: &mut R, q: usize, len: usize) -> Result<MultichannelSeries> {
    MultichannelSeries::new((0..q).map(|_| (0..len).map(|_| rng.sample(StandardNormal)).collect()).collect())
}

/// Energy of `signal[start..start + len]` relative to the energy expected
/// from noise of variance `noise_var` over the same window.
pub fn local_snr(signal: &[f64], start: usize, len: usize, noise_var: f64) -> f64 {
    let end = (start + len).min(signal.len());
    let energy: f64 = signal[start..end].iter().map(|v| v * v).sum();
    energy / (noise_var * (end - start) as f64)
}
