use super::sequence::BlockSequence;
use super::universal::universal_threshold;
use crate::error::Result;

/// Keep-or-kill oracle risk `Σ_n min(‖α_n‖², Q)`.
pub fn oracle_risk(alpha: &BlockSequence) -> f64 {
    let q = alpha.q() as f64;
    alpha.squared_norms().iter().map(|&a| a.min(q)).sum()
}

/// `max(1 + νs/Q, s²)`.
pub fn oracle_bound_constant(q: usize, nu: f64, s: f64) -> f64 {
    (1.0 + nu * s / q as f64).max(s * s)
}

/// Oracle-inequality bound `(Q + 1 + 2νs + c λ²_{N,Q}) (Q + R*)` for the risk
/// at the finite-sample universal threshold.
pub fn oracle_bound(n: usize, q: usize, nu: f64, s: f64, alpha: &BlockSequence) -> Result<f64> {
    let ut = universal_threshold(n, q)?;
    let lam2 = ut.lambda_asymptotic * ut.lambda_asymptotic;
    let qf = q as f64;
    let lead = qf + 1.0 + 2.0 * nu * s + oracle_bound_constant(q, nu, s) * lam2;
    Ok(lead * (qf + oracle_risk(alpha)))
}
