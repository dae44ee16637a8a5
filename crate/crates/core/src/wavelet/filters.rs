use serde::{Deserialize, Serialize};

use crate::error::SbiteError;

/// Least-asymmetric Daubechies filter with four vanishing moments.
const SYMMLET8: [f64; 8] = [
    -0.075765714789502213228,
    -0.029635527646002491764,
    0.49761866763277498998,
    0.80373875180513208088,
    0.2978577956053060514,
    -0.099219543576633532585,
    -0.012603967262031303754,
    0.032223100604051467872,
];

/// Orthonormal compactly supported wavelet families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletFamily {
    Haar,
    /// Four taps, two vanishing moments.
    Daubechies4,
    /// Eight taps, four vanishing moments.
    #[default]
    Symmlet8,
}

impl WaveletFamily {
    /// Scaling (low-pass) filter, unit norm, summing to √2.
    pub fn lowpass(self) -> Vec<f64> {
        match self {
            WaveletFamily::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            WaveletFamily::Daubechies4 => {
                let r3 = 3f64.sqrt();
                let d = 4.0 * 2f64.sqrt();
                vec![(1.0 + r3) / d, (3.0 + r3) / d, (3.0 - r3) / d, (1.0 - r3) / d]
            }
            WaveletFamily::Symmlet8 => SYMMLET8.to_vec(),
        }
    }

    /// Wavelet (high-pass) filter `g_m = (-1)^m h_{L-1-m}`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l).map(|m| if m % 2 == 0 { h[l - 1 - m] } else { -h[l - 1 - m] }).collect()
    }

    pub fn taps(self) -> usize {
        self.lowpass().len()
    }

    pub fn name(self) -> &'static str {
        match self {
            WaveletFamily::Haar => "haar",
            WaveletFamily::Daubechies4 => "db4",
            WaveletFamily::Symmlet8 => "sym8",
        }
    }
}

impl std::str::FromStr for WaveletFamily {
    type Err = SbiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(WaveletFamily::Haar),
            "db4" | "daubechies4" | "d4" => Ok(WaveletFamily::Daubechies4),
            "sym8" | "symmlet8" | "s8" => Ok(WaveletFamily::Symmlet8),
            other => Err(SbiteError::Config(format!("unknown wavelet family '{other}' (haar, db4, sym8)"))),
        }
    }
}
