//! Protocol and sweep behaviour on sampled channels.

use std::collections::BTreeSet;

use beamtrain::protocol::LinkDirection;
use beamtrain::simulate::{parse_csv, wilson_interval, write_csv, CsvRow, Z_95};
use beamtrain::{
    phase1, run_sweep, run_training, sample_channel, score_trial, ArrayConfig, NoiseSpec, QuantizerSpec, Resolution,
    SweepConfig, Trainer,
};

#[test]
fn noiseless_unquantized_recovers_every_pair() {
    for (n, l_max) in [(4, 4), (8, 4), (16, 3)] {
        let cfg = ArrayConfig::square(n, n).unwrap();
        let trainer = Trainer::<f64>::new(&cfg, &cfg).unwrap();
        for l in 1..=l_max {
            for seed in 0..20 {
                let ch = sample_channel::<f64>(l, &cfg, &cfg, seed).unwrap();
                let out = trainer
                    .run(&ch, QuantizerSpec::unquantized(), f64::INFINITY, seed)
                    .unwrap();
                assert!(score_trial(&out, &ch), "n={n} L={l} seed={seed}");
                assert_eq!(out.slots_used, l + 1);
            }
        }
    }
}

#[test]
fn f32_pipeline_recovers_noiseless_pairs() {
    let cfg = ArrayConfig::square(8, 8).unwrap();
    for seed in 0..20 {
        let ch = sample_channel::<f32>(2, &cfg, &cfg, seed).unwrap();
        let out = run_training(&ch, QuantizerSpec::unquantized(), f64::INFINITY, seed).unwrap();
        assert!(score_trial(&out, &ch), "seed={seed}");
    }
}

#[test]
fn phase1_never_repeats_a_direction() {
    let cfg = ArrayConfig::square(8, 8).unwrap();
    for seed in 0..100 {
        let ch = sample_channel::<f64>(3, &cfg, &cfg, seed).unwrap();
        let noise = NoiseSpec::new(-15.0, LinkDirection::Downlink).unwrap();
        let aoas = phase1(&ch, QuantizerSpec::one_bit(), noise, seed).unwrap();
        assert_eq!(aoas.len(), 3);
        assert_eq!(aoas.iter().collect::<BTreeSet<_>>().len(), 3);
    }
}

#[test]
fn one_bit_phase1_at_high_snr() {
    let cfg = ArrayConfig::square(16, 16).unwrap();
    let trainer = Trainer::<f64>::new(&cfg, &cfg).unwrap();
    let noise = NoiseSpec::new(60.0, LinkDirection::Downlink).unwrap();
    let hits = (0..200)
        .filter(|&seed| {
            let ch = sample_channel::<f64>(1, &cfg, &cfg, seed).unwrap();
            let got = trainer.phase1(&ch, QuantizerSpec::one_bit(), noise, seed).unwrap();
            got.directions == [ch.paths()[0].aoa]
        })
        .count();
    assert!(hits >= 198, "{hits}/200");
}

fn small_sweep(resolutions: Vec<Resolution>, trials: usize) -> SweepConfig {
    SweepConfig {
        snr_db: vec![-20.0, -15.0, -10.0, -5.0, 0.0],
        resolutions,
        paths: vec![1, 2],
        grids: vec![(8, 8)],
        array: (8, 8),
        trials,
        base_seed: 5,
        ..SweepConfig::default()
    }
}

#[test]
fn success_is_monotone_in_snr() {
    let cfg = small_sweep(vec![Resolution::OneBit, Resolution::TwoBit], 200);
    let result = run_sweep::<f64>(&cfg).unwrap();
    for w in result.records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.cell.resolution == b.cell.resolution && a.cell.paths == b.cell.paths {
            assert!(a.cell.snr_db < b.cell.snr_db);
            assert!(
                b.success_rate >= a.success_rate - 0.05,
                "{:?} -> {:?}: {} -> {}",
                a.cell,
                b.cell,
                a.success_rate,
                b.success_rate
            );
        }
    }
}

#[test]
fn finer_quantization_is_not_worse() {
    let cfg = small_sweep(
        vec![Resolution::OneBit, Resolution::TwoBit, Resolution::Unquantized],
        500,
    );
    let result = run_sweep::<f64>(&cfg).unwrap();
    let rate = |res, l, snr| {
        result
            .records
            .iter()
            .find(|r| r.cell.resolution == res && r.cell.paths == l && r.cell.snr_db == snr)
            .unwrap()
            .success_rate
    };
    for snr in &cfg.snr_db {
        for l in [1, 2] {
            let (q1, q2, qi) = (
                rate(Resolution::OneBit, l, *snr),
                rate(Resolution::TwoBit, l, *snr),
                rate(Resolution::Unquantized, l, *snr),
            );
            assert!(qi >= q2 - 0.03 && q2 >= q1 - 0.03, "L={l} {snr} dB: {qi} {q2} {q1}");
        }
    }
}

#[test]
fn single_noiseless_trial_succeeds() {
    let cfg = SweepConfig {
        snr_db: vec![f64::INFINITY],
        resolutions: vec![Resolution::Unquantized],
        paths: vec![2],
        trials: 1,
        ..SweepConfig::default()
    };
    let result = run_sweep::<f64>(&cfg).unwrap();
    assert_eq!(result.records[0].success_rate, 1.0);
}

#[test]
fn records_and_skips_account_for_every_cell() {
    let cfg = SweepConfig {
        snr_db: vec![0.0, 10.0],
        resolutions: vec![Resolution::OneBit],
        paths: vec![1, 5],
        grids: vec![(2, 2), (4, 4)],
        array: (4, 4),
        trials: 20,
        ..SweepConfig::default()
    };
    let result = run_sweep::<f64>(&cfg).unwrap();
    assert_eq!(cfg.cells().len(), result.records.len() + result.skipped.len());
    assert_eq!(result.skipped.len(), 2);
    for r in &result.records {
        assert!((0.0..=1.0).contains(&r.success_rate));
        assert!(r.ci_lo <= r.success_rate && r.success_rate <= r.ci_hi);
        assert_eq!((r.ci_lo, r.ci_hi), wilson_interval(r.successes, r.trials, Z_95));
    }
}

#[test]
fn csv_round_trips_numeric_fields() {
    let cfg = small_sweep(vec![Resolution::OneBit], 30);
    let result = run_sweep::<f64>(&cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&result, &mut buf).unwrap();
    let rows = parse_csv(buf.as_slice()).unwrap();
    let want: Vec<CsvRow> = result.records.iter().map(CsvRow::from).collect();
    assert_eq!(rows, want);
}
