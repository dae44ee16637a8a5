use super::sequence::{block_sure_term, sure_from_norms, BlockSequence, Side};
use crate::error::{Result, SbiteError};
use crate::thresholding::Hyperparameters;

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(SbiteError::InvalidInput("λ grid needs at least two points".into()));
    }
    if grid.iter().any(|l| !(l.is_finite() && *l >= 0.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SbiteError::InvalidInput("λ grid must be finite, nonnegative and strictly increasing".into()));
    }
    Ok(())
}

/// Grid with every block norm inside its range inserted, so the jumps of the
/// `s = 1` curve sit exactly on grid points.
fn augmented_grid(grid: &[f64], norms: &[f64]) -> Vec<f64> {
    let (lo, hi) = (grid[0], *grid.last().unwrap());
    let mut pts: Vec<f64> = grid.to_vec();
    pts.extend(norms.iter().copied().filter(|&n| n > lo && n < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn sampled_tv(points: &[f64], eval: impl Fn(f64, Side) -> f64) -> f64 {
    let mut total = 0.0;
    let mut prev_right = eval(points[0], Side::Right);
    for &lam in &points[1..] {
        let left = eval(lam, Side::Left);
        let right = eval(lam, Side::Right);
        total += (left - prev_right).abs() + (right - left).abs();
        prev_right = right;
    }
    total
}

/// Total variation of `λ ↦ SURE(λ, ν, s)` over the span of `lambda_grid`.
///
/// Continuous pieces are sampled on the grid; the jumps at `λ = ‖Y_n‖` are
/// added exactly from the two one-sided limits.
pub fn sure_total_variation(data: &BlockSequence, nu: f64, s: f64, lambda_grid: &[f64]) -> Result<f64> {
    check_grid(lambda_grid)?;
    Hyperparameters::new(1.0, nu, s)?;
    let norms = data.norms();
    let q = data.q() as f64;
    let points = augmented_grid(lambda_grid, &norms);
    Ok(sampled_tv(&points, |lam, side| sure_from_norms(&norms, q, &Hyperparameters { lambda: lam, nu, s }, side)))
}

/// `Σ_n TV(ρ̂_n)`, the per-block total variations summed.
pub fn blockwise_total_variation(data: &BlockSequence, nu: f64, s: f64, lambda_grid: &[f64]) -> Result<f64> {
    check_grid(lambda_grid)?;
    Hyperparameters::new(1.0, nu, s)?;
    let q = data.q() as f64;
    Ok(data
        .norms()
        .iter()
        .map(|&norm| {
            let points = augmented_grid(lambda_grid, &[norm]);
            sampled_tv(&points, |lam, side| block_sure_term(norm, q, &Hyperparameters { lambda: lam, nu, s }, side))
        })
        .sum())
}

/// Exact total variation over `λ ∈ [0, ∞)` of one `Q = 1` SURE term.
///
/// At `s = 1` this is `Y² + 4ν - 2`. For `s > 1` the term rises from 1 to a
/// single interior maximum and falls to `Y² - 1`; in the factor base
/// `x = 1 - (λ/|Y|)^ν` the maximum is the root in `(0, 1)` of
/// `Y² x (1 - x^s) = ν(s - 1) + x(1 - νs)`, giving
/// `Y² + 4ν x^(s-1) - 2 - 2Y² x^(2s)`.
pub fn block_total_variation_exact(y: f64, nu: f64, s: f64) -> Result<f64> {
    Hyperparameters::new(1.0, nu, s)?;
    let y2 = y * y;
    if s == 1.0 {
        return Ok(y2 + 4.0 * nu - 2.0);
    }
    let g = |x: f64| y2 * x * (1.0 - x.powf(s)) - nu * (s - 1.0) - x * (1.0 - nu * s);
    // g(0) < 0 ≤ g(1) and g is concave, so bisection finds the unique root.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if g(hi) < 0.0 {
        return Err(SbiteError::RootBracket { lo, hi, f_lo: g(lo), f_hi: g(hi) });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok(y2 + 4.0 * nu * x.powf(s - 1.0) - 2.0 - 2.0 * y2 * x.powf(2.0 * s))
}
