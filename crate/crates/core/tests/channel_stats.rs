use beamtrain::{sample_channel, sample_channel_with, ArrayConfig, GainModel};

/// Upper 0.1% point of the chi-square distribution with 15 degrees of freedom.
const CHI2_15_999: f64 = 37.697;

#[test]
fn aoa_azimuth_index_is_uniform() {
    let cfg = ArrayConfig::square(16, 16).unwrap();
    let draws = 10_000u64;
    let mut counts = [0u64; 16];
    for seed in 0..draws {
        let ch = sample_channel::<f64>(1, &cfg, &cfg, seed).unwrap();
        counts[ch.paths()[0].aoa.az] += 1;
    }
    let p = 1.0 / 16.0;
    let expected = draws as f64 * p;
    let se = (p * (1.0 - p) / draws as f64).sqrt();
    for (i, &c) in counts.iter().enumerate() {
        let f = c as f64 / draws as f64;
        assert!((f - p).abs() <= 3.0 * se, "bin {i}: frequency {f}");
    }
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < CHI2_15_999, "chi-square {chi2}");
}

#[test]
fn gains_have_unit_mean_power() {
    let cfg = ArrayConfig::square(4, 4).unwrap();
    let n = 20_000;
    let mut power = 0.0;
    for seed in 0..n {
        let ch = sample_channel::<f64>(1, &cfg, &cfg, seed).unwrap();
        power += ch.paths()[0].gain.norm_sqr();
    }
    let mean = power / n as f64;
    // CN(0, 1) power is Exp(1): standard error 1/sqrt(n).
    assert!((mean - 1.0).abs() < 4.0 / (n as f64).sqrt(), "mean power {mean}");

    for seed in 0..100 {
        let ch = sample_channel_with::<f64>(3, &cfg, &cfg, GainModel::UnitModulus, seed).unwrap();
        assert!(ch.paths().iter().all(|p| (p.gain.norm() - 1.0).abs() < 1e-12));
    }
}

#[test]
fn f32_and_f64_draw_the_same_directions() {
    let cfg = ArrayConfig::square(8, 8).unwrap();
    for seed in 0..50 {
        let a = sample_channel::<f64>(3, &cfg, &cfg, seed).unwrap();
        let b = sample_channel::<f32>(3, &cfg, &cfg, seed).unwrap();
        assert_eq!(a.beam_pairs(), b.beam_pairs());
    }
}
