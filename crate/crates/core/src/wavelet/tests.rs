use super::*;
use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const FAMILIES: [WaveletFamily; 3] = [WaveletFamily::Haar, WaveletFamily::Daubechies4, WaveletFamily::Symmlet8];

fn random_series(seed: u64, q: usize, t: usize) -> MultichannelSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    white_noise(&mut rng, q, t).unwrap()
}

#[test]
fn rejects_bad_lengths_and_levels() {
    assert!(MultichannelSeries::new(vec![vec![0.0; 100]]).is_err());
    assert!(MultichannelSeries::new(vec![vec![0.0; 64], vec![0.0; 32]]).is_err());
    assert!(MultichannelSeries::new(vec![]).is_err());
    let s = random_series(1, 1, 64);
    assert!(dwt(&s, WaveletFamily::Haar, 1).is_err());
    assert!(dwt(&s, WaveletFamily::Haar, 6).is_err());
    assert!(dwt(&s, WaveletFamily::Haar, 5).is_ok());
}

#[test]
fn constant_signal_has_no_details() {
    let s = MultichannelSeries::new(vec![vec![2.5; 128], vec![-1.0; 128]]).unwrap();
    for fam in FAMILIES {
        let d = dwt(&s, fam, 3).unwrap();
        assert!(d.details.iter().flatten().flatten().all(|v| v.abs() < 1e-12), "{fam:?}");
    }
}

#[test]
fn perfect_reconstruction_and_parseval() {
    for fam in FAMILIES {
        let s = random_series(2, 3, 256);
        let d = dwt(&s, fam, 2).unwrap();
        assert_eq!(d.approx[0].len(), 4);
        assert_eq!(d.level(7)[0].len(), 128);
        let back = idwt(&d).unwrap();
        let err: f64 =
            s.channels().iter().flatten().zip(back.channels().iter().flatten()).map(|(a, b)| (a - b).powi(2)).sum();
        assert!(err.sqrt() <= 1e-10 * s.energy().sqrt(), "{fam:?}");
        assert_abs_diff_eq!(d.energy(), s.energy(), epsilon = 1e-10 * s.energy());
    }
}

#[test]
fn white_noise_stays_white_per_level() {
    let s = random_series(3, 1, 4096);
    let d = dwt(&s, WaveletFamily::Symmlet8, 4).unwrap();
    for lvl in &d.details {
        let c = &lvl[0];
        let m = c.len() as f64;
        let var = c.iter().map(|v| v * v).sum::<f64>() / m;
        // the variance of the mean of squares of N(0,1) is 2/m
        let se = (2.0 / m).sqrt();
        assert!((var - 1.0).abs() <= 3.0 * se, "level with {m} coefficients: {var}");
    }
}

#[test]
fn mad_scale_examples() {
    assert_abs_diff_eq!(mad_scale(&[2.0; 10]), 2.0 / 0.6745);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x: Vec<f64> = (0..2048).map(|_| rng.sample(StandardNormal)).collect();
    assert!((mad_scale(&x) - 1.0).abs() <= 0.05);
    let tripled: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
    assert_abs_diff_eq!(mad_scale(&tripled), 3.0 * mad_scale(&x), epsilon = 1e-12);
}

#[test]
fn level_scales_follow_decomposition_shape() {
    let s = random_series(5, 2, 512);
    let d = dwt(&s, WaveletFamily::Daubechies4, 4).unwrap();
    let scales = estimate_level_scales(&d);
    assert_eq!(scales.len(), 5);
    assert!(scales.iter().all(|l| l.len() == 2));
}

#[test]
fn null_input_is_removed_by_universal_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..5 {
        let s = white_noise(&mut rng, 3, 4096).unwrap();
        let (out, _) = denoise_multichannel(&s, &DenoiseOptions::default()).unwrap();
        assert!(out.energy() / s.energy() <= 0.05, "{}", out.energy() / s.energy());
    }
}

#[test]
fn noiseless_blocky_signal_passes_through() {
    let ch: Vec<f64> = (0..1024).map(|t| if (t / 128) % 2 == 0 { 1.0 } else { -2.0 }).collect();
    let s = MultichannelSeries::new(vec![ch.clone(), ch.iter().map(|v| 0.5 * v).collect()]).unwrap();
    let (out, reports) =
        denoise_multichannel(&s, &DenoiseOptions { family: WaveletFamily::Haar, ..DenoiseOptions::default() }).unwrap();
    assert!(reports.iter().any(|r| r.block_size == 0));
    for (a, b) in s.channels().iter().flatten().zip(out.channels().iter().flatten()) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }
}

#[test]
fn universal_rule_is_scale_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = colored_noise(&mut rng, 3, 2048).unwrap();
    let s = inject_burst(&noise, 700, &[20.0, 60.0, 4.0], &default_burst()).unwrap();
    let (base, _) = denoise_multichannel(&s, &DenoiseOptions::default()).unwrap();
    let (scaled, _) = denoise_multichannel(&s.scaled(2.5), &DenoiseOptions::default()).unwrap();
    for (a, b) in base.channels().iter().flatten().zip(scaled.channels().iter().flatten()) {
        assert_abs_diff_eq!(2.5 * a, b, epsilon = 1e-9 * (1.0 + b.abs()));
    }
}

#[test]
fn small_levels_fall_back_to_universal() {
    let s = random_series(8, 2, 64);
    let opts = DenoiseOptions { coarse_level: 2, ..DenoiseOptions::default() }.with_rule(SelectionRule::Sure);
    let (_, reports) = denoise_multichannel(&s, &opts).unwrap();
    let first = &reports[0];
    assert_eq!(first.blocks, 4);
    assert!(first.fallback);
    assert_eq!(first.rule, SelectionRule::Universal);
    assert!(reports
        .iter()
        .filter(|r| r.blocks >= MIN_SELECTION_BLOCKS)
        .all(|r| !r.fallback && r.rule == SelectionRule::Sure));
}

#[test]
fn sure_and_sl2wic_rules_run() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let noise = white_noise(&mut rng, 3, 1024).unwrap();
    let s = inject_burst(&noise, 300, &[10.0, 30.0, 2.0], &default_burst()).unwrap();
    for rule in [SelectionRule::Sure, SelectionRule::Sl2wic] {
        let (out, reports) = denoise_multichannel(&s, &DenoiseOptions::default().with_rule(rule)).unwrap();
        assert_eq!(out.len(), 1024);
        assert!(reports.iter().all(|r| r.hp.is_some()));
        assert!(out.energy() < s.energy());
    }
}

#[test]
fn injection_examples() {
    let zero = MultichannelSeries::new(vec![vec![0.0; 256]; 3]).unwrap();
    let w = default_burst();
    assert_eq!(w.len(), 64);
    let same = inject_burst(&zero, 10, &[0.0; 3], &w).unwrap();
    assert_eq!(same, zero);
    let amps = DEFAULT_BURST_AMPLITUDES;
    let out = inject_burst(&zero, 100, &amps, &w).unwrap();
    let w2: f64 = w.iter().map(|v| v * v).sum();
    assert_abs_diff_eq!(out.energy(), amps.iter().map(|a| a * a).sum::<f64>() * w2, epsilon = 1e-12);
    for t in 100..164 {
        assert_abs_diff_eq!(out.channel(1)[t], 3.0 * out.channel(0)[t], epsilon = 1e-14);
        assert_abs_diff_eq!(out.channel(2)[t], out.channel(0)[t] / 5.0, epsilon = 1e-14);
    }
    assert!(inject_burst(&zero, 200, &amps, &w).is_err());
    assert!(inject_burst(&zero, 0, &[1.0], &w).is_err());
}

#[test]
fn ar2_variance_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let x = ar2_noise(&mut rng, 200_000, 0.9, std::f64::consts::FRAC_PI_4);
    let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    let expect = ar2_variance(0.9, std::f64::consts::FRAC_PI_4);
    assert!((var / expect - 1.0).abs() < 0.05, "{var} vs {expect}");
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn family() -> impl Strategy<Value = WaveletFamily> {
        prop::sample::select(FAMILIES.to_vec())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn transform_round_trips(seed in 0u64..10_000, q in 1usize..4, log_len in 5u32..10, fam in family()) {
            let s = random_series(seed, q, 1 << log_len);
            let d = dwt(&s, fam, 2).unwrap();
            let back = idwt(&d).unwrap();
            for (a, b) in s.channels().iter().flatten().zip(back.channels().iter().flatten()) {
                prop_assert!((a - b).abs() < 1e-10);
            }
            prop_assert!((d.energy() - s.energy()).abs() <= 1e-10 * s.energy());
        }

        #[test]
        fn denoiser_is_scale_equivariant(seed in 0u64..10_000, scale in 0.01f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise = colored_noise(&mut rng, 2, 512).unwrap();
            let s = inject_burst(&noise, 200, &[15.0, 30.0], &default_burst()).unwrap();
            let (base, _) = denoise_multichannel(&s, &DenoiseOptions::default()).unwrap();
            let (scaled, _) = denoise_multichannel(&s.scaled(scale), &DenoiseOptions::default()).unwrap();
            for (a, b) in base.channels().iter().flatten().zip(scaled.channels().iter().flatten()) {
                prop_assert!((scale * a - b).abs() <= 1e-9 * (scale + b.abs()));
            }
        }
    }
}
