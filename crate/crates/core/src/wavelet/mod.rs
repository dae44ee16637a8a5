//! Periodic orthonormal wavelet transforms and the multichannel block denoiser.

mod denoise;
mod filters;
mod scale;
mod synthetic;
mod transform;

pub use denoise::{denoise_multichannel, DenoiseOptions, LevelReport, SelectionRule, MIN_SELECTION_BLOCKS};
pub use filters::WaveletFamily;
pub use scale::{estimate_level_scales, mad_scale, MAD_CONSTANT};
pub use synthetic::{
    ar2_noise, ar2_variance, colored_noise, damped_sinusoid, default_burst, inject_burst, local_snr, white_noise,
    DEFAULT_BURST_AMPLITUDES, DEFAULT_BURST_LEN,
};
pub use transform::{dwt, idwt, MultichannelSeries, WaveletDecomposition, DEFAULT_COARSE_LEVEL};

#[cfg(test)]
mod tests;
