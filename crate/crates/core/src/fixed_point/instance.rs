use nalgebra::{DMatrix, DVector};

use super::partition::BlockPartition;
use crate::error::{Result, SbiteError};

/// Condition number above which the least-squares pilot is replaced by ridge.
pub const PILOT_CONDITION_LIMIT: f64 = 1e8;
/// Ridge penalty, relative to `trace(XᵀX)/P`, used when least squares is unstable.
pub const PILOT_RIDGE_FACTOR: f64 = 1e-3;

/// Centered, unit-norm design together with the scale factors needed to map
/// coefficients back to the original basis.
#[derive(Debug, Clone)]
pub struct RescaledDesign {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub y_mean: f64,
    pub column_means: Vec<f64>,
    pub column_scales: Vec<f64>,
}

/// Mean-centers every column of `raw_x` and scales it to unit Euclidean norm;
/// centers `raw_y`.
pub fn rescale_design(raw_x: &DMatrix<f64>, raw_y: &[f64]) -> Result<RescaledDesign> {
    let (n, p) = raw_x.shape();
    if n < 2 {
        return Err(SbiteError::InvalidInput(format!("need at least 2 rows, got {n}")));
    }
    if raw_y.len() != n {
        return Err(SbiteError::InvalidInput(format!("response has length {} but design has {n} rows", raw_y.len())));
    }
    if raw_x.iter().chain(raw_y).any(|v| !v.is_finite()) {
        return Err(SbiteError::InvalidInput("non-finite value in data".into()));
    }
    let mut x = raw_x.clone();
    let mut column_means = Vec::with_capacity(p);
    let mut column_scales = Vec::with_capacity(p);
    for j in 0..p {
        let mut col = x.column_mut(j);
        let mean = col.mean();
        let peak = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        col.add_scalar_mut(-mean);
        let norm = col.norm();
        if norm <= 1e-12 * (1.0 + peak) * (n as f64).sqrt() {
            return Err(SbiteError::ZeroVariance { column: j });
        }
        col /= norm;
        column_means.push(mean);
        column_scales.push(norm);
    }
    let y_mean = raw_y.iter().sum::<f64>() / n as f64;
    let y = DVector::from_iterator(n, raw_y.iter().map(|v| v - y_mean));
    Ok(RescaledDesign { x, y, y_mean, column_means, column_scales })
}

/// How the pilot estimate `β̃* = A Y` is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PilotRule {
    /// Least squares when `N > P` and `cond(XᵀX) < 1e8`, otherwise ridge with
    /// penalty `1e-3 · trace(XᵀX) / P`.
    Auto,
    LeastSquares,
    Ridge(f64),
}

/// Regression instance in the rescaled basis.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    x: DMatrix<f64>,
    y: DVector<f64>,
    y_mean: f64,
    intercept: bool,
    partition: BlockPartition,
    gram: DMatrix<f64>,
    xty: DVector<f64>,
    block_gram_inv: Vec<DMatrix<f64>>,
    pilot_map: DMatrix<f64>,
    pilot: DVector<f64>,
    pilot_penalty: f64,
    column_means: Vec<f64>,
    column_scales: Vec<f64>,
}

impl ProblemInstance {
    /// Rescales raw data and fits with an intercept.
    pub fn from_raw(raw_x: &DMatrix<f64>, raw_y: &[f64], partition: BlockPartition) -> Result<Self> {
        Self::from_raw_with_pilot(raw_x, raw_y, partition, PilotRule::Auto)
    }

    pub fn from_raw_with_pilot(
        raw_x: &DMatrix<f64>,
        raw_y: &[f64],
        partition: BlockPartition,
        pilot: PilotRule,
    ) -> Result<Self> {
        let design = rescale_design(raw_x, raw_y)?;
        Self::build(
            design.x,
            design.y,
            design.y_mean,
            true,
            partition,
            design.column_means,
            design.column_scales,
            pilot,
        )
    }

    /// Uses `x` and `y` exactly as given, with no intercept.
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, partition: BlockPartition) -> Result<Self> {
        Self::with_pilot(x, y, partition, PilotRule::Auto)
    }

    pub fn with_pilot(x: DMatrix<f64>, y: DVector<f64>, partition: BlockPartition, pilot: PilotRule) -> Result<Self> {
        let p = x.ncols();
        Self::build(x, y, 0.0, false, partition, vec![0.0; p], vec![1.0; p], pilot)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        x: DMatrix<f64>,
        y: DVector<f64>,
        y_mean: f64,
        intercept: bool,
        partition: BlockPartition,
        column_means: Vec<f64>,
        column_scales: Vec<f64>,
        pilot_rule: PilotRule,
    ) -> Result<Self> {
        let (n, p) = x.shape();
        if y.len() != n {
            return Err(SbiteError::InvalidInput(format!("response has length {} but design has {n} rows", y.len())));
        }
        if partition.total() != p {
            return Err(SbiteError::InvalidInput(format!(
                "partition covers {} coefficients but design has {p} columns",
                partition.total()
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(SbiteError::InvalidInput("non-finite value in data".into()));
        }
        let gram = x.transpose() * &x;
        let mut block_gram_inv = Vec::with_capacity(partition.num_blocks());
        for j in 0..partition.num_blocks() {
            let r = partition.range(j);
            let block = gram.view((r.start, r.start), (r.len(), r.len())).clone_owned();
            let chol = block.cholesky().ok_or(SbiteError::SingularBlock { block: j })?;
            let inv = chol.inverse();
            if inv.iter().any(|v| !v.is_finite()) {
                return Err(SbiteError::SingularBlock { block: j });
            }
            block_gram_inv.push(inv);
        }
        let (pilot_map, pilot_penalty) = pilot_map(&x, &gram, pilot_rule)?;
        let pilot = &pilot_map * &y;
        let xty = x.transpose() * &y;
        Ok(Self {
            x,
            y,
            y_mean,
            intercept,
            partition,
            gram,
            xty,
            block_gram_inv,
            pilot_map,
            pilot,
            pilot_penalty,
            column_means,
            column_scales,
        })
    }

    /// Same design and pilot map, new response (centered when the instance
    /// carries an intercept).
    pub fn with_response(&self, y: &[f64]) -> Result<Self> {
        if y.len() != self.n() {
            return Err(SbiteError::InvalidInput("response length mismatch".into()));
        }
        let mut out = self.clone();
        let mean = if self.intercept { y.iter().sum::<f64>() / y.len() as f64 } else { 0.0 };
        out.y = DVector::from_iterator(y.len(), y.iter().map(|v| v - mean));
        out.y_mean = mean;
        out.xty = self.x.transpose() * &out.y;
        out.pilot = &self.pilot_map * &out.y;
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// Response as used by the solver (centered when there is an intercept).
    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn has_intercept(&self) -> bool {
        self.intercept
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn xty(&self) -> &DVector<f64> {
        &self.xty
    }

    pub fn block_gram_inv(&self, j: usize) -> &DMatrix<f64> {
        &self.block_gram_inv[j]
    }

    /// The `P × N` matrix `A` with `β̃* = A Y`.
    pub fn pilot_map(&self) -> &DMatrix<f64> {
        &self.pilot_map
    }

    pub fn pilot(&self) -> &DVector<f64> {
        &self.pilot
    }

    /// Ridge penalty used for the pilot (0 for least squares).
    pub fn pilot_penalty(&self) -> f64 {
        self.pilot_penalty
    }

    pub fn pilot_block_norm(&self, j: usize) -> f64 {
        self.pilot.rows_range(self.partition.range(j)).norm()
    }

    /// `‖β̃*_j‖^(ν-1)`; zero pilot blocks give 0 for `ν > 1` and 1 for `ν = 1`.
    pub fn pilot_weight(&self, j: usize, nu: f64) -> f64 {
        if nu == 1.0 {
            1.0
        } else {
            self.pilot_block_norm(j).powf(nu - 1.0)
        }
    }

    pub fn column_scales(&self) -> &[f64] {
        &self.column_scales
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    /// Coefficients in the original (unscaled) basis.
    pub fn original_coefficients(&self, beta: &DVector<f64>) -> Vec<f64> {
        beta.iter().zip(&self.column_scales).map(|(b, s)| b / s).collect()
    }

    /// Intercept in the original basis for rescaled coefficients `beta`.
    pub fn original_intercept(&self, beta: &DVector<f64>) -> f64 {
        if !self.intercept {
            return 0.0;
        }
        let shift: f64 = self.original_coefficients(beta).iter().zip(&self.column_means).map(|(a, m)| a * m).sum();
        self.y_mean - shift
    }

    /// `Ȳ 1 + Xβ` (just `Xβ` without intercept).
    pub fn fitted(&self, beta: &DVector<f64>) -> DVector<f64> {
        let mut mu = &self.x * beta;
        if self.intercept {
            mu.add_scalar_mut(self.y_mean);
        }
        mu
    }

    /// Residual sum of squares of the fit `beta`.
    pub fn rss(&self, beta: &DVector<f64>) -> f64 {
        (&self.y - &self.x * beta).norm_squared()
    }
}

fn pilot_map(x: &DMatrix<f64>, gram: &DMatrix<f64>, rule: PilotRule) -> Result<(DMatrix<f64>, f64)> {
    let (n, p) = x.shape();
    let ridge = PILOT_RIDGE_FACTOR * gram.trace() / p as f64;
    let penalty = match rule {
        PilotRule::LeastSquares => 0.0,
        PilotRule::Ridge(k) => {
            if !(k.is_finite() && k > 0.0) {
                return Err(SbiteError::InvalidInput(format!("ridge penalty must be positive, got {k}")));
            }
            k
        }
        PilotRule::Auto => {
            if n > p && condition_number(gram) < PILOT_CONDITION_LIMIT {
                0.0
            } else {
                ridge
            }
        }
    };
    let mut system = gram.clone();
    for i in 0..p {
        system[(i, i)] += penalty;
    }
    let chol = system
        .cholesky()
        .ok_or_else(|| SbiteError::InvalidInput("least-squares pilot is singular; use a ridge pilot".into()))?;
    Ok((chol.solve(&x.transpose()), penalty))
}

fn condition_number(gram: &DMatrix<f64>) -> f64 {
    let eig = gram.clone().symmetric_eigen().eigenvalues;
    let max = eig.iter().cloned().fold(f64::MIN, f64::max);
    let min = eig.iter().cloned().fold(f64::MAX, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Replaces each block of columns by an orthonormal basis of its span
/// (thin QR), the normalization under which the grouped update is the
/// group-lasso block minimizer.
pub fn orthonormalize_blocks(x: &DMatrix<f64>, partition: &BlockPartition) -> Result<DMatrix<f64>> {
    if partition.total() != x.ncols() {
        return Err(SbiteError::InvalidInput("partition does not match design".into()));
    }
    let mut out = x.clone();
    for j in 0..partition.num_blocks() {
        let r = partition.range(j);
        let block = x.columns(r.start, r.len()).clone_owned();
        let qr = block.qr();
        let rmat = qr.r();
        if (0..r.len()).any(|i| rmat[(i, i)].abs() < 1e-12) {
            return Err(SbiteError::SingularBlock { block: j });
        }
        out.columns_mut(r.start, r.len()).copy_from(&qr.q());
    }
    Ok(out)
}
