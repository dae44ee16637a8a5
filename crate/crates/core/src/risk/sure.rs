use serde::{Deserialize, Serialize};

use super::gradient::GradientSystem;
use crate::error::Result;
use crate::fixed_point::{FixedPointSolution, ProblemInstance};
use crate::thresholding::Hyperparameters;

/// Risk estimates of one fit, in unit noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub hp: Hyperparameters,
    pub sure: f64,
    pub gsure: f64,
    /// Equivalent degrees of freedom, intercept included.
    pub edf: f64,
    pub rss: f64,
    /// Nonzero coefficients.
    pub active_count: usize,
    pub active_blocks: usize,
    pub n: usize,
}

/// `(RSS/N) / (1 - edf/N)²`, infinite once `edf ≥ N`.
pub fn gsure_value(rss: f64, edf: f64, n: usize) -> f64 {
    let n = n as f64;
    let ratio = 1.0 - edf / n;
    if ratio <= 0.0 {
        f64::INFINITY
    } else {
        (rss / n) / (ratio * ratio)
    }
}

/// `RSS + N + 2 (edf - N)`.
pub fn sure_value(rss: f64, edf: f64, n: usize) -> f64 {
    let n = n as f64;
    rss + n + 2.0 * (edf - n)
}

/// Equivalent degrees of freedom of the fit.
pub fn degrees_of_freedom(inst: &ProblemInstance, sol: &FixedPointSolution, hp: &Hyperparameters) -> Result<f64> {
    let div =
        if sol.active_blocks.is_empty() { 0.0 } else { GradientSystem::assemble(inst, sol, hp)?.divergence(inst) };
    Ok(div + if inst.has_intercept() { 1.0 } else { 0.0 })
}

/// Stein unbiased risk estimate of `Ȳ1 + Xβ̂` together with GSURE.
pub fn sure(inst: &ProblemInstance, sol: &FixedPointSolution, hp: &Hyperparameters) -> Result<RiskReport> {
    let edf = degrees_of_freedom(inst, sol, hp)?;
    let rss = inst.rss(&sol.beta);
    let n = inst.n();
    Ok(RiskReport {
        hp: *hp,
        sure: sure_value(rss, edf, n),
        gsure: gsure_value(rss, edf, n),
        edf,
        rss,
        active_count: sol.active_coefficients(inst),
        active_blocks: sol.active_blocks.len(),
        n,
    })
}

pub fn gsure(inst: &ProblemInstance, sol: &FixedPointSolution, hp: &Hyperparameters) -> Result<f64> {
    Ok(sure(inst, sol, hp)?.gsure)
}
