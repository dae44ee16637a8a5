//! Smooth James-Stein thresholding.
//!
//! A block `y` is multiplied by `(1 - λ^ν / (‖pilot‖^(ν-1) ‖y‖))_+^s`. With
//! `s = ν = 1` this is block soft thresholding, `ν → ∞` approaches hard
//! thresholding and `s > 1` makes the thresholding function continuously
//! differentiable at the threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbiteError};

/// Threshold `lambda` (noise standard deviation units), shrinkage exponent
/// `nu` and smoothness exponent `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub lambda: f64,
    pub nu: f64,
    pub s: f64,
}

impl Hyperparameters {
    pub fn new(lambda: f64, nu: f64, s: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(SbiteError::Domain(format!("lambda must be >= 0, got {lambda}")));
        }
        if !(nu.is_finite() && nu >= 1.0) {
            return Err(SbiteError::Domain(format!("nu must be >= 1, got {nu}")));
        }
        if !(s.is_finite() && s >= 1.0) {
            return Err(SbiteError::Domain(format!("s must be >= 1, got {s}")));
        }
        Ok(Self { lambda, nu, s })
    }

    /// Uses the smoothness rule `s = 2 ln ν + 1`.
    pub fn with_default_smoothness(lambda: f64, nu: f64) -> Result<Self> {
        Self::new(lambda, nu, default_smoothness(nu))
    }

    /// `λ^ν`, the threshold the weighted gradient norm is compared against.
    pub fn lambda_pow(&self) -> f64 {
        self.lambda.powf(self.nu)
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }
}

/// `2 ln ν + 1`.
pub fn default_smoothness(nu: f64) -> f64 {
    2.0 * nu.ln() + 1.0
}

/// `(1 - ratio)_+^s`.
#[inline]
pub(crate) fn positive_part_pow(ratio: f64, s: f64) -> f64 {
    let base = 1.0 - ratio;
    if base <= 0.0 {
        0.0
    } else if s == 1.0 {
        base
    } else {
        base.powf(s)
    }
}

/// Shrink factor `max(0, 1 - λ^ν / (pilot_norm^(ν-1) norm))^s`.
pub fn shrink_factor(norm: f64, pilot_norm: f64, hp: &Hyperparameters) -> Result<f64> {
    if !(norm.is_finite() && norm > 0.0) {
        return Err(SbiteError::Domain(format!("norm must be positive, got {norm}")));
    }
    if !(pilot_norm.is_finite() && pilot_norm > 0.0) {
        return Err(SbiteError::Domain(format!("pilot norm must be positive, got {pilot_norm}")));
    }
    if hp.lambda == 0.0 {
        return Ok(1.0);
    }
    let weight = if hp.nu == 1.0 { 1.0 } else { pilot_norm.powf(hp.nu - 1.0) };
    Ok(positive_part_pow(hp.lambda_pow() / (weight * norm), hp.s))
}

fn check_block(y: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(SbiteError::InvalidInput("block must have at least one entry".into()));
    }
    if let Some(v) = y.iter().find(|v| !v.is_finite()) {
        return Err(SbiteError::InvalidInput(format!("non-finite block entry {v}")));
    }
    Ok(())
}

pub(crate) fn norm2(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Multiplicative factor applied by [`canonical_threshold`] to a block of
/// Euclidean norm `norm`.
#[inline]
pub fn canonical_factor(norm: f64, hp: &Hyperparameters) -> f64 {
    if hp.lambda == 0.0 {
        1.0
    } else if norm <= hp.lambda {
        0.0
    } else {
        positive_part_pow((hp.lambda / norm).powf(hp.nu), hp.s)
    }
}

/// `(1 - λ^ν/‖y‖^ν)_+^s y`: the estimate in the identity-design model.
pub fn canonical_threshold(y: &[f64], hp: &Hyperparameters) -> Result<Vec<f64>> {
    check_block(y)?;
    let factor = canonical_factor(norm2(y), hp);
    Ok(y.iter().map(|v| factor * v).collect())
}

/// Partial derivative value, flagged when evaluated exactly at the `s = 1`
/// discontinuity `‖y‖ = λ` (the value is then the right limit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partial {
    pub value: f64,
    pub at_jump: bool,
}

/// `∂(α̂)_q / ∂y_q` for the canonical estimate; `q` is zero-based.
pub fn canonical_partial(y: &[f64], q: usize, hp: &Hyperparameters) -> Result<Partial> {
    check_block(y)?;
    if q >= y.len() {
        return Err(SbiteError::InvalidInput(format!("coordinate {q} out of range for block of length {}", y.len())));
    }
    if hp.lambda == 0.0 {
        return Ok(Partial { value: 1.0, at_jump: false });
    }
    let norm = norm2(y);
    if norm < hp.lambda {
        return Ok(Partial { value: 0.0, at_jump: false });
    }
    let ratio = (hp.lambda / norm).powf(hp.nu);
    let base = 1.0 - ratio;
    let lead = if hp.s == 1.0 { 1.0 } else { base.max(0.0).powf(hp.s - 1.0) };
    let yq2 = y[q] * y[q];
    let value = lead * (hp.nu * hp.s * ratio * yq2 / (norm * norm) + base);
    Ok(Partial { value, at_jump: norm == hp.lambda && hp.s == 1.0 })
}

/// Divergence `Σ_q ∂(α̂)_q/∂y_q` of the canonical estimate for one block.
pub fn canonical_divergence(y: &[f64], hp: &Hyperparameters) -> Partial {
    let q = y.len() as f64;
    if hp.lambda == 0.0 {
        return Partial { value: q, at_jump: false };
    }
    divergence_from_norm(norm2(y), q, hp)
}

#[inline]
pub(crate) fn divergence_from_norm(norm: f64, q: f64, hp: &Hyperparameters) -> Partial {
    if hp.lambda == 0.0 {
        return Partial { value: q, at_jump: false };
    }
    if norm < hp.lambda {
        return Partial { value: 0.0, at_jump: false };
    }
    let ratio = (hp.lambda / norm).powf(hp.nu);
    let base = 1.0 - ratio;
    let lead = if hp.s == 1.0 { 1.0 } else { base.max(0.0).powf(hp.s - 1.0) };
    Partial { value: lead * (hp.nu * hp.s * ratio + q * base), at_jump: norm == hp.lambda && hp.s == 1.0 }
}

/// Robust variant: the block norm is replaced by `min_q |y_q|`, so a block
/// survives only when every entry clears the threshold.
pub fn robust_threshold(y: &[f64], hp: &Hyperparameters) -> Result<Vec<f64>> {
    check_block(y)?;
    if hp.lambda == 0.0 {
        return Ok(y.to_vec());
    }
    let smallest = y.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let factor = if smallest <= hp.lambda { 0.0 } else { positive_part_pow((hp.lambda / smallest).powf(hp.nu), hp.s) };
    Ok(y.iter().map(|v| factor * v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn hp(lambda: f64, nu: f64, s: f64) -> Hyperparameters {
        Hyperparameters::new(lambda, nu, s).unwrap()
    }

    #[test]
    fn rejects_out_of_range_hyperparameters() {
        assert!(Hyperparameters::new(-0.1, 1.0, 1.0).is_err());
        assert!(Hyperparameters::new(1.0, 0.5, 1.0).is_err());
        assert!(Hyperparameters::new(1.0, 1.0, 0.9).is_err());
        assert!(Hyperparameters::new(f64::NAN, 1.0, 1.0).is_err());
        let h = Hyperparameters::with_default_smoothness(1.0, 4.0).unwrap();
        assert_abs_diff_eq!(h.s, 2.0 * 4f64.ln() + 1.0);
    }

    #[test]
    fn shrink_factor_examples() {
        assert_abs_diff_eq!(shrink_factor(2.0, 1.0, &hp(1.0, 1.0, 1.0)).unwrap(), 0.5);
        assert_eq!(shrink_factor(0.5, 1.0, &hp(1.0, 1.0, 1.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(shrink_factor(5.0, 5.0, &hp(2.5, 2.0, 1.0)).unwrap(), 0.75, epsilon = 1e-15);
        assert!(shrink_factor(0.0, 1.0, &hp(1.0, 1.0, 1.0)).is_err());
        assert!(shrink_factor(1.0, -1.0, &hp(1.0, 1.0, 1.0)).is_err());
        assert!(shrink_factor(f64::INFINITY, 1.0, &hp(1.0, 1.0, 1.0)).is_err());
        assert_eq!(shrink_factor(1e-300, 1e-300, &hp(0.0, 3.0, 2.0)).unwrap(), 1.0);
    }

    #[test]
    fn canonical_threshold_examples() {
        let out = canonical_threshold(&[3.0, 4.0], &hp(2.5, 2.0, 1.0)).unwrap();
        assert_abs_diff_eq!(out[0], 2.25, epsilon = 1e-14);
        assert_abs_diff_eq!(out[1], 3.0, epsilon = 1e-14);
        for (nu, s) in [(1.0, 1.0), (3.0, 2.0), (8.0, 5.0)] {
            assert_eq!(canonical_threshold(&[0.3], &hp(1.0, nu, s)).unwrap(), vec![0.0]);
        }
        assert_abs_diff_eq!(canonical_threshold(&[2.0], &hp(1.0, 1.0, 1.0)).unwrap()[0], 1.0);
        assert_abs_diff_eq!(canonical_threshold(&[-2.0], &hp(1.0, 1.0, 1.0)).unwrap()[0], -1.0);
        // boundary is in the zero set
        assert_eq!(canonical_threshold(&[3.0, 4.0], &hp(5.0, 1.0, 1.0)).unwrap(), vec![0.0, 0.0]);
        assert!(canonical_threshold(&[], &hp(1.0, 1.0, 1.0)).is_err());
        assert!(canonical_threshold(&[f64::NAN], &hp(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn canonical_partial_examples() {
        let p = canonical_partial(&[2.0], 0, &hp(1.0, 1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(p.value, 1.0, epsilon = 1e-15);
        assert!(!p.at_jump);
        assert_eq!(canonical_partial(&[0.3], 0, &hp(1.0, 1.0, 1.0)).unwrap().value, 0.0);
        assert!(canonical_partial(&[1.0, 2.0], 2, &hp(1.0, 1.0, 1.0)).is_err());

        let y = [3.0, 4.0];
        let h = hp(2.5, 2.0, 2.0);
        let step = 1e-6;
        let mut plus = y;
        plus[0] += step;
        let mut minus = y;
        minus[0] -= step;
        let fd =
            (canonical_threshold(&plus, &h).unwrap()[0] - canonical_threshold(&minus, &h).unwrap()[0]) / (2.0 * step);
        let exact = canonical_partial(&y, 0, &h).unwrap().value;
        assert_abs_diff_eq!(exact, fd, epsilon = 1e-6);
    }

    #[test]
    fn jump_point_reports_right_limit() {
        let p = canonical_partial(&[3.0, 4.0], 1, &hp(5.0, 2.0, 1.0)).unwrap();
        assert!(p.at_jump);
        // ν s λ^ν y_q² / ‖y‖^(ν+2) with ‖y‖ = λ
        assert_abs_diff_eq!(p.value, 2.0 * 16.0 / 25.0, epsilon = 1e-14);
        let smooth = canonical_partial(&[3.0, 4.0], 1, &hp(5.0, 2.0, 1.5)).unwrap();
        assert!(!smooth.at_jump);
        assert_eq!(smooth.value, 0.0);
    }

    #[test]
    fn s1_jump_in_sure_contribution_is_two_nu() {
        for nu in [1.0, 2.0, 5.5] {
            for y in [vec![1.7], vec![1.0, -2.0, 0.5]] {
                let norm = norm2(&y);
                let h = hp(norm, nu, 1.0);
                let right = canonical_divergence(&y, &h);
                assert!(right.at_jump);
                // just above the block norm the divergence is zero
                let left = canonical_divergence(&y, &h.with_lambda(norm * (1.0 + 1e-12)));
                assert_eq!(left.value, 0.0);
                assert_abs_diff_eq!(2.0 * (right.value - left.value), 2.0 * nu, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn robust_threshold_examples() {
        assert_eq!(robust_threshold(&[3.0, 0.5], &hp(1.0, 1.0, 1.0)).unwrap(), vec![0.0, 0.0]);
        let out = robust_threshold(&[2.0, 3.0], &hp(1.0, 1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(out[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1], 1.5, epsilon = 1e-15);
        for y in [2.0, -0.4, 7.5] {
            for h in [hp(1.0, 1.0, 1.0), hp(0.7, 3.0, 2.5)] {
                assert_eq!(robust_threshold(&[y], &h).unwrap(), canonical_threshold(&[y], &h).unwrap());
            }
        }
    }

    fn block() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-20.0f64..20.0, 1..6)
    }

    proptest! {
        #[test]
        fn shrinks_and_thresholds(y in block(), lambda in 0.0f64..10.0, nu in 1.0f64..8.0, s in 1.0f64..5.0) {
            let h = hp(lambda, nu, s);
            let out = canonical_threshold(&y, &h).unwrap();
            let n_in = norm2(&y);
            prop_assert!(norm2(&out) <= n_in + 1e-12);
            if lambda > 0.0 {
                prop_assert_eq!(out.iter().all(|v| *v == 0.0), n_in <= lambda);
            }
        }

        #[test]
        fn factor_nonincreasing_in_lambda(norm in 0.01f64..20.0, pilot in 0.01f64..20.0,
                                          l1 in 0.0f64..10.0, dl in 0.0f64..5.0,
                                          nu in 1.0f64..8.0, s in 1.0f64..5.0) {
            let a = shrink_factor(norm, pilot, &hp(l1, nu, s)).unwrap();
            let b = shrink_factor(norm, pilot, &hp(l1 + dl, nu, s)).unwrap();
            prop_assert!(b <= a + 1e-15);
            prop_assert!((0.0..=1.0).contains(&a));
        }

        #[test]
        fn zero_lambda_is_identity(y in block(), nu in 1.0f64..8.0, s in 1.0f64..5.0) {
            let h = hp(0.0, nu, s);
            prop_assert_eq!(canonical_threshold(&y, &h).unwrap(), y.clone());
            prop_assert_eq!(robust_threshold(&y, &h).unwrap(), y);
        }

        #[test]
        fn partial_matches_finite_differences(y in block(), lambda in 0.1f64..6.0,
                                              nu in 1.0f64..6.0, s in 1.0f64..4.0, q in 0usize..6) {
            let q = q % y.len();
            let norm = norm2(&y);
            prop_assume!(s > 1.0 || (norm - lambda).abs() > 1e-4);
            prop_assume!((norm - lambda).abs() > 1e-4);
            let h = hp(lambda, nu, s);
            let step = 1e-6;
            let mut plus = y.clone();
            plus[q] += step;
            let mut minus = y.clone();
            minus[q] -= step;
            let fd = (canonical_threshold(&plus, &h).unwrap()[q]
                - canonical_threshold(&minus, &h).unwrap()[q]) / (2.0 * step);
            let exact = canonical_partial(&y, q, &h).unwrap().value;
            prop_assert!((exact - fd).abs() < 1e-5, "exact {} fd {}", exact, fd);
        }

        #[test]
        fn smooth_partial_continuous_at_threshold(y in block(), nu in 1.0f64..6.0, s in 1.5f64..4.0) {
            let norm = norm2(&y);
            prop_assume!(norm > 1e-3);
            let right = canonical_divergence(&y, &hp(norm * (1.0 - 1e-12), nu, s)).value;
            let left = canonical_divergence(&y, &hp(norm * (1.0 + 1e-12), nu, s)).value;
            prop_assert!((right - left).abs() < 1e-3);
        }
    }
}
