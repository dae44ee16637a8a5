use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::instance::ProblemInstance;
use crate::error::{Result, SbiteError};
use crate::thresholding::Hyperparameters;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Which fixed-point equations are iterated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpdateRule {
    /// `β_j = factor · (X_jᵀX_j)⁻¹ r_j`.
    Sbite,
    /// `β_j = factor · s_j`: smooth adaptive group lasso.
    Group,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockOrder {
    Cyclic,
    ReverseCyclic,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Sup-norm change over a full cycle below which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    pub order: BlockOrder,
    /// Starting point; the pilot when `None`.
    pub init: Option<DVector<f64>>,
    /// Record the penalized objective after every block update.
    pub trace_objective: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            order: BlockOrder::Cyclic,
            init: None,
            trace_objective: false,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_init(mut self, init: DVector<f64>) -> Self {
        self.init = Some(init);
        self
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointSolution {
    pub beta: DVector<f64>,
    /// Blocks with a nonzero estimate.
    pub active_blocks: Vec<usize>,
    /// Full cycles performed.
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub rule: UpdateRule,
    pub objective_trace: Option<Vec<f64>>,
}

impl FixedPointSolution {
    pub fn is_active(&self, j: usize) -> bool {
        self.active_blocks.binary_search(&j).is_ok()
    }

    /// Number of nonzero coefficients.
    pub fn active_coefficients(&self, instance: &ProblemInstance) -> usize {
        self.active_blocks.iter().map(|&j| instance.partition().size(j)).sum()
    }
}

/// `r_j = X_jᵀY - Σ_{k≠j} X_jᵀX_k β_k`, given `gb = Gβ`.
fn partial_residual(inst: &ProblemInstance, beta: &DVector<f64>, gb: &DVector<f64>, j: usize) -> DVector<f64> {
    let r = inst.partition().range(j);
    let len = r.len();
    let own = inst.gram().view((r.start, r.start), (len, len)) * beta.rows(r.start, len);
    inst.xty().rows(r.start, len) - gb.rows(r.start, len) + own
}

/// Smooth James-Stein factor for a block with weight `b_j` and gradient norm
/// `‖r_j‖`. Zero exactly when `b_j ‖r_j‖ ≤ λ^ν`.
pub(crate) fn block_factor(weight: f64, grad_norm: f64, hp: &Hyperparameters) -> f64 {
    if hp.lambda == 0.0 {
        return 1.0;
    }
    let tested = weight * grad_norm;
    let lp = hp.lambda_pow();
    if tested <= lp {
        0.0
    } else {
        let base = 1.0 - lp / tested;
        if hp.s == 1.0 {
            base
        } else {
            base.powf(hp.s)
        }
    }
}

fn apply_rule(
    inst: &ProblemInstance,
    j: usize,
    rj: &DVector<f64>,
    hp: &Hyperparameters,
    rule: UpdateRule,
) -> DVector<f64> {
    let factor = block_factor(inst.pilot_weight(j, hp.nu), rj.norm(), hp);
    if factor == 0.0 {
        return DVector::zeros(rj.len());
    }
    match rule {
        UpdateRule::Sbite => (inst.block_gram_inv(j) * rj) * factor,
        UpdateRule::Group => rj * factor,
    }
}

fn check_block_index(inst: &ProblemInstance, j: usize) -> Result<()> {
    if j >= inst.partition().num_blocks() {
        return Err(SbiteError::InvalidInput(format!(
            "block {j} out of range ({} blocks)",
            inst.partition().num_blocks()
        )));
    }
    Ok(())
}

fn check_beta(inst: &ProblemInstance, beta: &DVector<f64>) -> Result<()> {
    if beta.len() != inst.p() {
        return Err(SbiteError::InvalidInput(format!(
            "coefficient vector has length {} but instance has {} columns",
            beta.len(),
            inst.p()
        )));
    }
    Ok(())
}

/// Block-wise Gaussian MLE `(X_jᵀX_j)⁻¹ r_j` given the other blocks of `beta`.
pub fn block_mle_update(inst: &ProblemInstance, beta: &DVector<f64>, j: usize) -> Result<DVector<f64>> {
    check_beta(inst, beta)?;
    check_block_index(inst, j)?;
    let gb = inst.gram() * beta;
    let rj = partial_residual(inst, beta, &gb, j);
    Ok(inst.block_gram_inv(j) * rj)
}

/// `‖∇_{β_j} l‖ = ‖r_j‖` at `beta` with block `j` set to zero.
pub fn block_gradient_norms(inst: &ProblemInstance, beta: &DVector<f64>) -> Vec<f64> {
    let gb = inst.gram() * beta;
    (0..inst.partition().num_blocks()).map(|j| partial_residual(inst, beta, &gb, j).norm()).collect()
}

/// Smallest distance `|b_j ‖r_j‖ - λ^ν|` to an activation boundary.
pub fn activation_margin(inst: &ProblemInstance, beta: &DVector<f64>, hp: &Hyperparameters) -> f64 {
    let lp = hp.lambda_pow();
    block_gradient_norms(inst, beta)
        .iter()
        .enumerate()
        .map(|(j, g)| (inst.pilot_weight(j, hp.nu) * g - lp).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Penalized least squares objective
/// `½‖Y - Xβ‖² + Σ_j λ^ν ‖β_j‖ / ‖β̃*_j‖^(ν-1)`.
pub fn penalized_objective(inst: &ProblemInstance, beta: &DVector<f64>, hp: &Hyperparameters) -> f64 {
    let fit = 0.5 * inst.rss(beta);
    let lp = hp.lambda_pow();
    let mut penalty = 0.0;
    for j in 0..inst.partition().num_blocks() {
        let nb = beta.rows_range(inst.partition().range(j)).norm();
        if nb == 0.0 {
            continue;
        }
        let w = inst.pilot_weight(j, hp.nu);
        penalty += if w == 0.0 { f64::INFINITY } else { lp * nb / w };
    }
    fit + penalty
}

/// Sup-norm violation of the fixed-point equations at `beta`.
pub fn fixed_point_residual(inst: &ProblemInstance, beta: &DVector<f64>, hp: &Hyperparameters) -> f64 {
    fixed_point_residual_with(inst, beta, hp, UpdateRule::Sbite)
}

pub fn fixed_point_residual_with(
    inst: &ProblemInstance,
    beta: &DVector<f64>,
    hp: &Hyperparameters,
    rule: UpdateRule,
) -> f64 {
    let gb = inst.gram() * beta;
    let mut worst = 0.0f64;
    for j in 0..inst.partition().num_blocks() {
        let rj = partial_residual(inst, beta, &gb, j);
        let target = apply_rule(inst, j, &rj, hp, rule);
        let r = inst.partition().range(j);
        let diff = (beta.rows(r.start, r.len()) - target).amax();
        worst = worst.max(diff);
    }
    worst
}

/// Iterates the smooth blockwise thresholding equations by cyclic block
/// updates until the sup-norm change over a full cycle drops below
/// `opts.tol`. Non-convergence is reported in the solution, not as an error.
pub fn solve_sbite(inst: &ProblemInstance, hp: &Hyperparameters, opts: &SolverOptions) -> Result<FixedPointSolution> {
    solve(inst, hp, opts, UpdateRule::Sbite)
}

/// Grouped variant `β_j = (c_j)_+^s s_j`; coincides with [`solve_sbite`] when
/// every `X_jᵀX_j` is the identity.
pub fn solve_group_sbite(
    inst: &ProblemInstance,
    hp: &Hyperparameters,
    opts: &SolverOptions,
) -> Result<FixedPointSolution> {
    solve(inst, hp, opts, UpdateRule::Group)
}

pub fn solve(
    inst: &ProblemInstance,
    hp: &Hyperparameters,
    opts: &SolverOptions,
    rule: UpdateRule,
) -> Result<FixedPointSolution> {
    if !(opts.tol > 0.0) {
        return Err(SbiteError::InvalidInput(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let mut beta = match &opts.init {
        Some(init) => {
            check_beta(inst, init)?;
            init.clone()
        }
        None => inst.pilot().clone(),
    };
    let part = inst.partition();
    let blocks = part.num_blocks();
    let gram = inst.gram();
    let mut gb = gram * &beta;
    let mut trace = opts.trace_objective.then(|| vec![penalized_objective(inst, &beta, hp)]);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut change = 0.0f64;
        for step in 0..blocks {
            let j = match opts.order {
                BlockOrder::Cyclic => step,
                BlockOrder::ReverseCyclic => blocks - 1 - step,
            };
            let rj = partial_residual(inst, &beta, &gb, j);
            let new = apply_rule(inst, j, &rj, hp, rule);
            let r = part.range(j);
            let delta = &new - beta.rows(r.start, r.len());
            let amax = delta.amax();
            if amax > 0.0 {
                gb += gram.columns(r.start, r.len()) * &delta;
                beta.rows_mut(r.start, r.len()).copy_from(&new);
            }
            change = change.max(amax);
            if let Some(t) = trace.as_mut() {
                t.push(penalized_objective(inst, &beta, hp));
            }
        }
        if !change.is_finite() {
            break;
        }
        if change <= opts.tol {
            converged = true;
            break;
        }
        // refresh the running product to keep rounding from accumulating
        if iterations % 64 == 0 {
            gb = gram * &beta;
        }
    }

    let final_residual = fixed_point_residual_with(inst, &beta, hp, rule);
    let active_blocks = (0..blocks).filter(|&j| beta.rows_range(part.range(j)).iter().any(|v| *v != 0.0)).collect();
    if !converged {
        log::warn!(
            "fixed-point iteration stopped after {iterations} cycles (residual {final_residual:e}, lambda {}, nu {}, s {})",
            hp.lambda,
            hp.nu,
            hp.s
        );
    }
    Ok(FixedPointSolution { beta, active_blocks, iterations, final_residual, converged, rule, objective_trace: trace })
}
