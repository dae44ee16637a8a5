use serde::{Deserialize, Serialize};

use super::filters::WaveletFamily;
use super::scale::estimate_level_scales;
use super::transform::{dwt, idwt, MultichannelSeries, DEFAULT_COARSE_LEVEL};
use crate::canonical::{denoise_canonical, select_canonical_sure, select_sl2wic, universal_threshold, BlockSequence};
use crate::error::{Result, SbiteError};
use crate::risk::SearchGrids;
use crate::thresholding::Hyperparameters;

/// Levels with fewer blocks than this use the universal threshold.
pub const MIN_SELECTION_BLOCKS: usize = 8;
/// Channels whose level scale falls below this fraction of the largest
/// coefficient are treated as noiseless and passed through.
const NOISELESS_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionRule {
    Universal,
    Sure,
    Sl2wic,
}

impl SelectionRule {
    pub fn name(self) -> &'static str {
        match self {
            SelectionRule::Universal => "universal",
            SelectionRule::Sure => "sure",
            SelectionRule::Sl2wic => "sl2wic",
        }
    }
}

impl std::str::FromStr for SelectionRule {
    type Err = SbiteError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "universal" => Ok(SelectionRule::Universal),
            "sure" => Ok(SelectionRule::Sure),
            "sl2wic" => Ok(SelectionRule::Sl2wic),
            other => Err(SbiteError::Config(format!("unknown rule '{other}' (universal, sure, sl2wic)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DenoiseOptions {
    pub rule: SelectionRule,
    pub family: WaveletFamily,
    pub coarse_level: usize,
    /// Shrinkage exponent used with the universal threshold; `s = 2 ln ν + 1`.
    pub universal_nu: f64,
    pub grids: SearchGrids,
}

impl Default for DenoiseOptions {
    fn default() -> Self {
        Self {
            rule: SelectionRule::Universal,
            family: WaveletFamily::default(),
            coarse_level: DEFAULT_COARSE_LEVEL,
            universal_nu: 2.0,
            grids: SearchGrids::default(),
        }
    }
}

impl DenoiseOptions {
    pub fn with_rule(mut self, rule: SelectionRule) -> Self {
        self.rule = rule;
        self
    }
}

/// What was done at one detail level.
#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub blocks: usize,
    /// Channels entering the blocks (noiseless channels are passed through).
    pub block_size: usize,
    pub rule: SelectionRule,
    pub fallback: bool,
    pub hp: Option<Hyperparameters>,
    pub scales: Vec<f64>,
    pub kept_blocks: usize,
}

/// Blockwise, levelwise denoising across channels.
pub fn denoise_multichannel(
    series: &MultichannelSeries,
    opts: &DenoiseOptions,
) -> Result<(MultichannelSeries, Vec<LevelReport>)> {
    let mut decomp = dwt(series, opts.family, opts.coarse_level)?;
    let scales = estimate_level_scales(&decomp);
    let mut reports = Vec::with_capacity(scales.len());
    for (idx, j) in decomp.levels().enumerate() {
        let level_scales = scales[idx].clone();
        let coeffs = decomp.level_mut(j);
        let n_blocks = coeffs[0].len();
        let noisy: Vec<usize> = (0..coeffs.len())
            .filter(|&c| {
                let peak = coeffs[c].iter().fold(0.0f64, |m, v| m.max(v.abs()));
                level_scales[c] > NOISELESS_RATIO * peak && level_scales[c] > 0.0
            })
            .collect();
        if noisy.is_empty() {
            reports.push(LevelReport {
                level: j,
                blocks: n_blocks,
                block_size: 0,
                rule: opts.rule,
                fallback: false,
                hp: None,
                scales: level_scales,
                kept_blocks: n_blocks,
            });
            continue;
        }
        let q = noisy.len();
        let mut values = Vec::with_capacity(n_blocks * q);
        for k in 0..n_blocks {
            for &c in &noisy {
                values.push(coeffs[c][k] / level_scales[c]);
            }
        }
        let data = BlockSequence::new(q, values)?;
        let fallback = opts.rule != SelectionRule::Universal && n_blocks < MIN_SELECTION_BLOCKS;
        if fallback {
            log::warn!(
                "level {j} has {n_blocks} blocks; using the universal threshold instead of {}",
                opts.rule.name()
            );
        }
        let hp = if fallback || opts.rule == SelectionRule::Universal {
            let ut = universal_threshold(n_blocks.max(2), q)?;
            Hyperparameters::with_default_smoothness(ut.lambda_finite, opts.universal_nu)?
        } else if opts.rule == SelectionRule::Sure {
            select_canonical_sure(&data, &opts.grids)?.hp
        } else {
            select_sl2wic(&data, &opts.grids)?.hp
        };
        let est = denoise_canonical(&data, &hp);
        let mut kept = 0;
        for k in 0..n_blocks {
            let block = est.block(k);
            if block.iter().any(|v| *v != 0.0) {
                kept += 1;
            }
            for (i, &c) in noisy.iter().enumerate() {
                coeffs[c][k] = block[i] * level_scales[c];
            }
        }
        reports.push(LevelReport {
            level: j,
            blocks: n_blocks,
            block_size: q,
            rule: if fallback { SelectionRule::Universal } else { opts.rule },
            fallback,
            hp: Some(hp),
            scales: level_scales,
            kept_blocks: kept,
        });
    }
    let mut out = idwt(&decomp)?;
    out.sample_rate = series.sample_rate;
    Ok((out, reports))
}
