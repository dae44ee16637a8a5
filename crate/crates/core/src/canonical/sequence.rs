use serde::{Deserialize, Serialize};

use crate::error::{Result, SbiteError};
use crate::thresholding::{canonical_factor, Hyperparameters};

/// `N` blocks of `Q` values stored block-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSequence {
    q: usize,
    values: Vec<f64>,
}

impl BlockSequence {
    pub fn new(q: usize, values: Vec<f64>) -> Result<Self> {
        if q == 0 {
            return Err(SbiteError::InvalidInput("block length must be at least 1".into()));
        }
        if values.is_empty() || !values.len().is_multiple_of(q) {
            return Err(SbiteError::InvalidInput(format!(
                "{} values do not form a whole number of blocks of length {q}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(SbiteError::InvalidInput(format!("non-finite value {v}")));
        }
        Ok(Self { q, values })
    }

    pub fn from_blocks(blocks: &[Vec<f64>]) -> Result<Self> {
        let q = blocks.first().map(|b| b.len()).unwrap_or(0);
        if let Some(b) = blocks.iter().find(|b| b.len() != q) {
            return Err(SbiteError::InvalidInput(format!("blocks of lengths {q} and {} cannot be mixed", b.len())));
        }
        Self::new(q, blocks.concat())
    }

    /// `Q = 1` sequence.
    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Self::new(1, values)
    }

    pub fn zeros(q: usize, n: usize) -> Self {
        Self { q, values: vec![0.0; q * n] }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.values.len() / self.q
    }

    pub fn block(&self, n: usize) -> &[f64] {
        &self.values[n * self.q..(n + 1) * self.q]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.q)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn norms(&self) -> Vec<f64> {
        self.blocks().map(|b| b.iter().map(|v| v * v).sum::<f64>().sqrt()).collect()
    }

    pub fn squared_norms(&self) -> Vec<f64> {
        self.blocks().map(|b| b.iter().map(|v| v * v).sum::<f64>()).collect()
    }

    /// `‖self - other‖²` over all entries.
    pub fn squared_distance(&self, other: &BlockSequence) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "sequences differ in size");
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// Entrywise map preserving shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { q: self.q, values: self.values.iter().map(|&v| f(v)).collect() }
    }
}

/// Blockwise closed-form estimate `(1 - λ^ν/‖Y_n‖^ν)_+^s Y_n`.
pub fn denoise_canonical(data: &BlockSequence, hp: &Hyperparameters) -> BlockSequence {
    let mut values = Vec::with_capacity(data.values.len());
    for b in data.blocks() {
        let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let f = canonical_factor(norm, hp);
        values.extend(b.iter().map(|v| f * v));
    }
    BlockSequence { q: data.q, values }
}

/// Which one-sided limit in λ to take when `λ = ‖Y_n‖` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Block counted as active: the limit from smaller λ.
    Left,
    /// Block counted as inactive: the limit from larger λ.
    Right,
}

/// Per-block SURE term `(1 - f)² ‖Y‖² - Q + 2 div` from the block norm.
#[inline]
pub fn block_sure_term(norm: f64, q: f64, hp: &Hyperparameters, side: Side) -> f64 {
    let lambda = hp.lambda;
    if lambda == 0.0 {
        return q;
    }
    let active = match side {
        Side::Left => norm >= lambda,
        Side::Right => norm > lambda,
    };
    let n2 = norm * norm;
    if !active {
        return n2 - q;
    }
    let ratio = (lambda / norm).powf(hp.nu);
    let base = (1.0 - ratio).max(0.0);
    let (f, lead) = if hp.s == 1.0 {
        (base, 1.0)
    } else {
        let lead = base.powf(hp.s - 1.0);
        (lead * base, lead)
    };
    let div = lead * (hp.nu * hp.s * ratio + q * base);
    (1.0 - f) * (1.0 - f) * n2 - q + 2.0 * div
}

/// `SURE(λ, ν, s) = Σ_n ρ̂_n` in unit noise variance.
pub fn sure_canonical(data: &BlockSequence, hp: &Hyperparameters) -> f64 {
    sure_canonical_side(data, hp, Side::Left)
}

pub fn sure_canonical_side(data: &BlockSequence, hp: &Hyperparameters, side: Side) -> f64 {
    sure_from_norms(&data.norms(), data.q() as f64, hp, side)
}

pub(crate) fn sure_from_norms(norms: &[f64], q: f64, hp: &Hyperparameters, side: Side) -> f64 {
    norms.iter().map(|&n| block_sure_term(n, q, hp, side)).sum()
}
