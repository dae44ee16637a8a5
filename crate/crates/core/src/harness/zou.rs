//! Sparse-regression study on Toeplitz-correlated Gaussian covariates.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{parse_cell, ExperimentConfig, ExperimentId};
use super::rng::replicate_rng;
use super::table::ResultTable;
use crate::error::{Result, SbiteError};
use crate::fixed_point::{solve, BlockPartition, ProblemInstance, SolverOptions, UpdateRule};
use crate::risk::{lambda_max, search_hyperparameters, two_stage_search, Criterion, SearchGrids};
use crate::thresholding::Hyperparameters;

pub const ZOU_P: usize = 8;
pub const MODEL1_COEFFICIENTS: [f64; ZOU_P] = [3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0];
pub const MODEL2_COEFFICIENTS: [f64; ZOU_P] = [0.85; ZOU_P];
pub const ZOU_CORRELATION: f64 = 0.5;

/// Estimator/rule pairs in output order.
pub const ZOU_FITS: [(&str, &str); 4] = [("lasso", "cv"), ("sbite", "cv"), ("lasso", "sure"), ("sbite", "sure")];

/// `Σ_ij = ρ^|i−j|`.
pub fn toeplitz_covariance(p: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

/// Rows drawn i.i.d. from `N(0, Σ)` through the Cholesky factor.
pub fn draw_design<R: Rng + ?Sized>(rng: &mut R, n: usize, cov: &DMatrix<f64>) -> DMatrix<f64> {
    let p = cov.nrows();
    let l = cov.clone().cholesky().expect("covariance is positive definite").unpack();
    let z = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    z * l.transpose()
}

/// Per-replicate metrics of one fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZouMetrics {
    /// `(α̂−α)ᵀΣ(α̂−α)/σ²`.
    pub rpe: f64,
    /// Mean over training rows of `(x_nᵀ(α̂−α))²/σ²`.
    pub rpe_given_x: f64,
    /// Nonzero coefficients correctly selected.
    pub correct: usize,
    /// Zero coefficients incorrectly selected.
    pub incorrect: usize,
}

pub fn zou_metrics(estimate: &[f64], truth: &[f64], x: &DMatrix<f64>, cov: &DMatrix<f64>, sigma: f64) -> ZouMetrics {
    let d = DVector::from_iterator(truth.len(), estimate.iter().zip(truth).map(|(a, b)| a - b));
    let s2 = sigma * sigma;
    let rpe = (d.transpose() * cov * &d)[(0, 0)] / s2;
    let xd = x * &d;
    let rpe_given_x = xd.norm_squared() / x.nrows() as f64 / s2;
    let correct = estimate.iter().zip(truth).filter(|(e, t)| **t != 0.0 && **e != 0.0).count();
    let incorrect = estimate.iter().zip(truth).filter(|(e, t)| **t == 0.0 && **e != 0.0).count();
    ZouMetrics { rpe, rpe_given_x, correct, incorrect }
}

fn select_rows(x: &DMatrix<f64>, y: &[f64], rows: &[usize]) -> (DMatrix<f64>, Vec<f64>) {
    let sub = DMatrix::from_fn(rows.len(), x.ncols(), |i, k| x[(rows[i], k)]);
    (sub, rows.iter().map(|&r| y[r]).collect())
}

/// Two-fold cross-validated fit; returns the selected hyperparameters and the
/// coefficients in the original basis.
///
/// Folds are the even and odd rows. A full-data λ is used as
/// `λ √(N_fold/N)` on a fold, since unit-norm columns scale like `√N`.
pub fn cross_validated_fit(x: &DMatrix<f64>, y: &[f64], grids: &SearchGrids) -> Result<(Hyperparameters, Vec<f64>)> {
    let n = y.len();
    let p = x.ncols();
    let full = ProblemInstance::from_raw(x, y, BlockPartition::unit(p)?)?;
    let rows: [Vec<usize>; 2] = [(0..n).step_by(2).collect(), (1..n).step_by(2).collect()];
    let mut folds = Vec::with_capacity(2);
    for k in 0..2 {
        let (xt, yt) = select_rows(x, y, &rows[k]);
        let (xv, yv) = select_rows(x, y, &rows[1 - k]);
        let inst = ProblemInstance::from_raw(&xt, &yt, BlockPartition::unit(p)?)?;
        let scale = (rows[k].len() as f64 / n as f64).sqrt();
        folds.push((inst, xv, yv, scale));
    }
    let opts = SolverOptions::default();
    let outcome = two_stage_search(
        grids,
        |nu| lambda_max(&full, nu),
        |hp| {
            let mut err = 0.0;
            for (inst, xv, yv, scale) in &folds {
                let sol = solve(inst, &hp.with_lambda(hp.lambda * scale), &opts, UpdateRule::Sbite).ok()?;
                if !sol.converged {
                    return None;
                }
                let coef = DVector::from_vec(inst.original_coefficients(&sol.beta));
                let b0 = inst.original_intercept(&sol.beta);
                let pred = xv * coef;
                err += yv.iter().zip(pred.iter()).map(|(a, b)| (a - b0 - b).powi(2)).sum::<f64>();
            }
            Some((err, ()))
        },
    )?;
    let sol = solve(&full, &outcome.hp, &opts, UpdateRule::Sbite)?;
    Ok((outcome.hp, full.original_coefficients(&sol.beta)))
}

/// SURE/GSURE fit in unit noise; returns coefficients in the original basis.
pub fn risk_selected_fit(x: &DMatrix<f64>, y: &[f64], criterion: Criterion, grids: &SearchGrids) -> Result<Vec<f64>> {
    let inst = ProblemInstance::from_raw(x, y, BlockPartition::unit(x.ncols())?)?;
    let out = search_hyperparameters(&inst, criterion, grids)?;
    Ok(inst.original_coefficients(&out.result.solution.beta))
}

/// One training set: `N` rows and `Y = Xα + σε`.
pub fn zou_replicate<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    sigma: f64,
    truth: &[f64],
    cov: &DMatrix<f64>,
) -> (DMatrix<f64>, Vec<f64>) {
    let x = draw_design(rng, n, cov);
    let mean = &x * DVector::from_column_slice(truth);
    let y = mean.iter().map(|m| m + sigma * rng.sample::<f64, _>(StandardNormal)).collect();
    (x, y)
}

/// The four fits of `ZOU_FITS` on one training set. The response is divided
/// by σ before selection and the coefficients multiplied back.
pub fn zou_fits(x: &DMatrix<f64>, y: &[f64], sigma: f64, criterion: Criterion) -> Result<Vec<Vec<f64>>> {
    let ys: Vec<f64> = y.iter().map(|v| v / sigma).collect();
    let fits = [
        cross_validated_fit(x, &ys, &SearchGrids::lasso())?.1,
        cross_validated_fit(x, &ys, &SearchGrids::default())?.1,
        risk_selected_fit(x, &ys, criterion, &SearchGrids::lasso())?,
        risk_selected_fit(x, &ys, criterion, &SearchGrids::default())?,
    ];
    Ok(fits.into_iter().map(|f| f.into_iter().map(|c| c * sigma).collect()).collect())
}

pub fn run_zou(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let truth: &[f64] = match config.experiment {
        ExperimentId::ZouModel1 => &MODEL1_COEFFICIENTS,
        ExperimentId::ZouModel2 => &MODEL2_COEFFICIENTS,
        other => return Err(SbiteError::Config(format!("{other} is not a regression experiment"))),
    };
    let name = config.experiment.name();
    let cov = toeplitz_covariance(ZOU_P, ZOU_CORRELATION);
    let mut table = ResultTable::default();
    for cell in config.selected_cells() {
        let parts = parse_cell(&cell);
        let (n, sigma) = (parts[0] as usize, parts[1]);
        let per_rep: Vec<Result<Vec<ZouMetrics>>> = crate::par::map_range(0..config.replicates, |r| {
            let mut rng = replicate_rng(config.seed, name, &cell, r as u64);
            let (x, y) = zou_replicate(&mut rng, n, sigma, truth, &cov);
            let fits = zou_fits(&x, &y, sigma, config.criterion)?;
            Ok(fits.iter().map(|f| zou_metrics(f, truth, &x, &cov, sigma)).collect())
        });
        let per_rep: Vec<Vec<ZouMetrics>> = per_rep.into_iter().collect::<Result<_>>()?;
        for (k, (est, rule)) in ZOU_FITS.iter().enumerate() {
            let rule = if *rule == "sure" { criterion_name(config.criterion) } else { rule };
            let col = |f: &dyn Fn(&ZouMetrics) -> f64| per_rep.iter().map(|m| f(&m[k])).collect::<Vec<f64>>();
            table.push(name, &cell, est, rule, "rpe", col(&|m| m.rpe));
            table.push(name, &cell, est, rule, "rpe_given_x", col(&|m| m.rpe_given_x));
            table.push(name, &cell, est, rule, "correct", col(&|m| m.correct as f64));
            table.push(name, &cell, est, rule, "incorrect", col(&|m| m.incorrect as f64));
        }
    }
    table.sort();
    Ok(table)
}

fn criterion_name(c: Criterion) -> &'static str {
    match c {
        Criterion::Sure => "sure",
        Criterion::Gsure => "gsure",
    }
}
