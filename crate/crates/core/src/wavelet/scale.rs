use super::transform::WaveletDecomposition;

/// Normal consistency constant of the median absolute value.
pub const MAD_CONSTANT: f64 = 0.6745;

/// `median(|x|) / 0.6745`.
pub fn mad_scale(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let mut abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let m = abs.len();
    let median = if m % 2 == 1 { abs[m / 2] } else { 0.5 * (abs[m / 2 - 1] + abs[m / 2]) };
    median / MAD_CONSTANT
}

/// Noise scale per detail level and channel, indexed `[level - j₀][channel]`.
pub fn estimate_level_scales(decomp: &WaveletDecomposition) -> Vec<Vec<f64>> {
    decomp.details.iter().map(|lvl| lvl.iter().map(|d| mad_scale(d)).collect()).collect()
}
