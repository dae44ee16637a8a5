//! Identity-design studies: sparse sequence estimation, null coverage of the
//! universal threshold and the oracle bound.

use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{parse_cell, ExperimentConfig, ExperimentId};
use super::rng::replicate_rng;
use super::table::ResultTable;
use crate::canonical::{
    denoise_canonical, oracle_bound, select_canonical_sure, select_sl2wic, universal_threshold, BlockSequence,
};
use crate::error::{Result, SbiteError};
use crate::risk::SearchGrids;
use crate::thresholding::Hyperparameters;

pub const JS04_LEN: usize = 1000;
/// Per-channel amplitudes of the three-channel variant; the last is `μ`.
pub const JS04_Q3_LEADING: [f64; 2] = [1.0, 2.0];
pub const ORACLE_LEN: usize = 500;

/// Estimator/rule pairs of the sequence study, in output order.
pub const JS04_FITS: [(&str, &str); 3] = [("sbite_smooth", "sure"), ("sbite_s1", "sure"), ("sbite_s1", "sl2wic")];

/// `count` leading blocks equal to `μ` (or `(1, 2, μ)` with three channels).
pub fn sparse_sequence(q: usize, n: usize, count: usize, mu: f64) -> Result<BlockSequence> {
    let block: Vec<f64> = match q {
        1 => vec![mu],
        3 => vec![JS04_Q3_LEADING[0], JS04_Q3_LEADING[1], mu],
        _ => return Err(SbiteError::Config(format!("sequence study supports Q = 1 or 3, got {q}"))),
    };
    let mut values = vec![0.0; q * n];
    for b in 0..count.min(n) {
        values[b * q..(b + 1) * q].copy_from_slice(&block);
    }
    BlockSequence::new(q, values)
}

/// Sparse signal of the oracle study: 10 strong blocks of entries 4 and 15
/// weak blocks of entries 1, out of 500.
pub fn oracle_signal(q: usize) -> Result<BlockSequence> {
    let mut values = vec![0.0; q * ORACLE_LEN];
    for (b, v) in values.chunks_mut(q).take(25).enumerate() {
        v.fill(if b < 10 { 4.0 } else { 1.0 });
    }
    BlockSequence::new(q, values)
}

pub fn add_noise<R: Rng + ?Sized>(rng: &mut R, alpha: &BlockSequence) -> BlockSequence {
    let values = alpha.values().iter().map(|a| a + rng.sample::<f64, _>(StandardNormal)).collect();
    BlockSequence::new(alpha.q(), values).expect("same shape as the signal")
}

/// Losses `‖α̂ − α‖² / Q` of the three `JS04_FITS` estimators.
pub fn sequence_losses(data: &BlockSequence, alpha: &BlockSequence) -> Result<[f64; 3]> {
    let q = data.q() as f64;
    let smooth = select_canonical_sure(data, &SearchGrids::default())?.hp;
    let plain = select_canonical_sure(data, &SearchGrids::unsmoothed())?.hp;
    let ic = select_sl2wic(data, &SearchGrids::default())?.hp;
    let loss = |hp: &Hyperparameters| denoise_canonical(data, hp).squared_distance(alpha) / q;
    Ok([loss(&smooth), loss(&plain), loss(&ic)])
}

pub fn run_js04(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let q = match config.experiment {
        ExperimentId::Js04 => 1,
        ExperimentId::Js04Q3 => 3,
        other => return Err(SbiteError::Config(format!("{other} is not a sequence experiment"))),
    };
    let name = config.experiment.name();
    let mut table = ResultTable::default();
    for cell in config.selected_cells() {
        let parts = parse_cell(&cell);
        let alpha = sparse_sequence(q, JS04_LEN, parts[0] as usize, parts[1])?;
        let per_rep: Vec<Result<[f64; 3]>> = crate::par::map_range(0..config.replicates, |r| {
            let mut rng = replicate_rng(config.seed, name, &cell, r as u64);
            sequence_losses(&add_noise(&mut rng, &alpha), &alpha)
        });
        let per_rep: Vec<[f64; 3]> = per_rep.into_iter().collect::<Result<_>>()?;
        for (k, (est, rule)) in JS04_FITS.iter().enumerate() {
            table.push(name, &cell, est, rule, "loss", per_rep.iter().map(|l| l[k]).collect());
        }
    }
    table.sort();
    Ok(table)
}

/// Indicator that the universal-threshold estimate of pure noise is all zero.
pub fn run_null_coverage(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    if config.experiment != ExperimentId::NullCoverage {
        return Err(SbiteError::Config(format!("{} is not the null-coverage experiment", config.experiment)));
    }
    let name = config.experiment.name();
    let mut table = ResultTable::default();
    for cell in config.selected_cells() {
        let parts = parse_cell(&cell);
        let (n, q) = (parts[0] as usize, parts[1] as usize);
        let lambda = universal_threshold(n, q)?.lambda_finite;
        let zero = BlockSequence::zeros(q, n);
        let hits = crate::par::map_range(0..config.replicates, |r| {
            let mut rng = replicate_rng(config.seed, name, &cell, r as u64);
            let y = add_noise(&mut rng, &zero);
            let peak = y.norms().into_iter().fold(0.0, f64::max);
            if peak <= lambda {
                1.0
            } else {
                0.0
            }
        });
        table.push(name, &cell, "sbite", "universal", "all_zero", hits);
    }
    table.sort();
    Ok(table)
}

/// Risk at the finite-sample universal threshold against the oracle bound.
pub fn run_oracle_bound(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    if config.experiment != ExperimentId::OracleBound {
        return Err(SbiteError::Config(format!("{} is not the oracle-bound experiment", config.experiment)));
    }
    let name = config.experiment.name();
    let mut table = ResultTable::default();
    for cell in config.selected_cells() {
        let parts = parse_cell(&cell);
        let (q, nu, s) = (parts[0] as usize, parts[1], parts[2]);
        let alpha = oracle_signal(q)?;
        let hp = Hyperparameters::new(universal_threshold(ORACLE_LEN, q)?.lambda_finite, nu, s)?;
        let bound = oracle_bound(ORACLE_LEN, q, nu, s, &alpha)?;
        let losses = crate::par::map_range(0..config.replicates, |r| {
            let mut rng = replicate_rng(config.seed, name, &cell, r as u64);
            denoise_canonical(&add_noise(&mut rng, &alpha), &hp).squared_distance(&alpha)
        });
        let ratios = losses.iter().map(|l| l / bound).collect();
        table.push(name, &cell, "sbite", "universal", "loss", losses);
        table.push(name, &cell, "sbite", "universal", "loss_over_bound", ratios);
    }
    table.sort();
    Ok(table)
}
