//! Monte-Carlo experiment runners, seeded random streams and result tables.

mod config;
mod rng;
mod sequence;
mod table;
mod zou;

pub use config::{ExperimentConfig, ExperimentId};
pub use rng::{cell_key, replicate_rng};
pub use sequence::{
    add_noise, oracle_signal, run_js04, run_null_coverage, run_oracle_bound, sequence_losses, sparse_sequence,
    JS04_FITS, JS04_LEN, JS04_Q3_LEADING, ORACLE_LEN,
};
pub use table::{mean, mean_se, median, median_se, ResultRow, ResultTable, BOOTSTRAP_RESAMPLES};
pub use zou::{
    cross_validated_fit, draw_design, risk_selected_fit, run_zou, toeplitz_covariance, zou_fits, zou_metrics,
    zou_replicate, ZouMetrics, MODEL1_COEFFICIENTS, MODEL2_COEFFICIENTS, ZOU_CORRELATION, ZOU_FITS, ZOU_P,
};

use crate::error::Result;

/// Runs the experiment named in `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    match config.experiment {
        ExperimentId::ZouModel1 | ExperimentId::ZouModel2 => run_zou(config),
        ExperimentId::Js04 | ExperimentId::Js04Q3 => run_js04(config),
        ExperimentId::NullCoverage => run_null_coverage(config),
        ExperimentId::OracleBound => run_oracle_bound(config),
    }
}
