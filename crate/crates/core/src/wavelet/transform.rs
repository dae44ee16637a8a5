use serde::{Deserialize, Serialize};

use super::filters::WaveletFamily;
use crate::error::{Result, SbiteError};

pub const DEFAULT_COARSE_LEVEL: usize = 4;

/// `Q` channels of equal power-of-two length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultichannelSeries {
    channels: Vec<Vec<f64>>,
    pub sample_rate: Option<f64>,
}

impl MultichannelSeries {
    pub fn new(channels: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = channels.first() else {
            return Err(SbiteError::InvalidInput("series needs at least one channel".into()));
        };
        let t = first.len();
        if let Some((q, c)) = channels.iter().enumerate().find(|(_, c)| c.len() != t) {
            return Err(SbiteError::InvalidInput(format!(
                "channel {} has {} samples, channel 1 has {t}",
                q + 1,
                c.len()
            )));
        }
        if t < 2 || !t.is_power_of_two() {
            return Err(SbiteError::InvalidInput(format!("series length {t} is not a power of two ≥ 2")));
        }
        if channels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(SbiteError::InvalidInput("series contains non-finite samples".into()));
        }
        Ok(Self { channels, sample_rate: None })
    }

    pub fn q(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `log₂ T`.
    pub fn levels(&self) -> usize {
        self.len().trailing_zeros() as usize
    }

    pub fn channel(&self, q: usize) -> &[f64] {
        &self.channels[q]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    pub fn energy(&self) -> f64 {
        self.channels.iter().flatten().map(|v| v * v).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            channels: self.channels.iter().map(|ch| ch.iter().map(|v| v * c).collect()).collect(),
            sample_rate: self.sample_rate,
        }
    }
}

/// Periodic orthonormal wavelet coefficients of every channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletDecomposition {
    pub family: WaveletFamily,
    pub coarse_level: usize,
    pub len: usize,
    /// `[channel]`, `2^j₀` scaling coefficients each.
    pub approx: Vec<Vec<f64>>,
    /// `[level - j₀][channel]`, `2^level` coefficients each.
    pub details: Vec<Vec<Vec<f64>>>,
}

impl WaveletDecomposition {
    pub fn q(&self) -> usize {
        self.approx.len()
    }

    /// Detail levels `j₀..J-1`.
    pub fn levels(&self) -> std::ops::Range<usize> {
        self.coarse_level..self.coarse_level + self.details.len()
    }

    pub fn level(&self, j: usize) -> &[Vec<f64>] {
        &self.details[j - self.coarse_level]
    }

    pub fn level_mut(&mut self, j: usize) -> &mut Vec<Vec<f64>> {
        &mut self.details[j - self.coarse_level]
    }

    pub fn energy(&self) -> f64 {
        let a: f64 = self.approx.iter().flatten().map(|v| v * v).sum();
        let d: f64 = self.details.iter().flatten().flatten().map(|v| v * v).sum();
        a + d
    }
}

fn analysis_step(x: &[f64], h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let l = x.len();
    let half = l / 2;
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    for k in 0..half {
        let (mut sa, mut sd) = (0.0, 0.0);
        for (m, (hm, gm)) in h.iter().zip(g).enumerate() {
            let v = x[(2 * k + m) % l];
            sa += hm * v;
            sd += gm * v;
        }
        a[k] = sa;
        d[k] = sd;
    }
    (a, d)
}

fn synthesis_step(a: &[f64], d: &[f64], h: &[f64], g: &[f64]) -> Vec<f64> {
    let half = a.len();
    let l = 2 * half;
    let mut x = vec![0.0; l];
    for k in 0..half {
        for (m, (hm, gm)) in h.iter().zip(g).enumerate() {
            x[(2 * k + m) % l] += hm * a[k] + gm * d[k];
        }
    }
    x
}

fn check_levels(t: usize, j0: usize) -> Result<usize> {
    let big_j = t.trailing_zeros() as usize;
    if j0 < 2 {
        return Err(SbiteError::InvalidInput(format!("coarse level must be at least 2, got {j0}")));
    }
    if j0 >= big_j {
        return Err(SbiteError::InvalidInput(format!("coarse level {j0} leaves no detail level for length {t}")));
    }
    Ok(big_j)
}

/// Pyramid transform down to coarse level `j0`.
pub fn dwt(series: &MultichannelSeries, family: WaveletFamily, j0: usize) -> Result<WaveletDecomposition> {
    let big_j = check_levels(series.len(), j0)?;
    let h = family.lowpass();
    let g = family.highpass();
    let per_channel: Vec<(Vec<f64>, Vec<Vec<f64>>)> = crate::par::map_slice(series.channels(), |ch| {
        let mut approx = ch.clone();
        let mut details = Vec::with_capacity(big_j - j0);
        for _ in j0..big_j {
            let (a, d) = analysis_step(&approx, &h, &g);
            details.push(d);
            approx = a;
        }
        details.reverse();
        (approx, details)
    });
    let mut approx = Vec::with_capacity(series.q());
    let mut details = vec![Vec::with_capacity(series.q()); big_j - j0];
    for (a, ds) in per_channel {
        approx.push(a);
        for (lvl, d) in ds.into_iter().enumerate() {
            details[lvl].push(d);
        }
    }
    Ok(WaveletDecomposition { family, coarse_level: j0, len: series.len(), approx, details })
}

/// Inverse of [`dwt`].
pub fn idwt(decomp: &WaveletDecomposition) -> Result<MultichannelSeries> {
    let h = decomp.family.lowpass();
    let g = decomp.family.highpass();
    let q = decomp.q();
    for (i, lvl) in decomp.details.iter().enumerate() {
        let expect = 1usize << (decomp.coarse_level + i);
        if lvl.len() != q || lvl.iter().any(|d| d.len() != expect) {
            return Err(SbiteError::InvalidInput(format!(
                "level {} must hold {q} channels of {expect} coefficients",
                decomp.coarse_level + i
            )));
        }
    }
    let channels: Vec<Vec<f64>> = crate::par::map_range(0..q, |c| {
        let mut x = decomp.approx[c].clone();
        for lvl in &decomp.details {
            x = synthesis_step(&x, &lvl[c], &h, &g);
        }
        x
    });
    MultichannelSeries::new(channels)
}
