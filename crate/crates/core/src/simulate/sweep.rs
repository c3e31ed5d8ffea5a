use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{ArrayConfig, HALF_WAVELENGTH};
use crate::channel::{sample_channel_with, ChannelInstance, GainModel};
use crate::error::{Error, Result};
use crate::protocol::{Trainer, TrainingOutcome};
use crate::quantizer::{QuantizerSpec, Resolution};
use crate::scalar::Real;
use crate::seed::derive;

use super::stats::{wilson_interval, Z_95};

/// What counts as one success.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScoreMode {
    /// A trial succeeds when every ground-truth beam pair is recovered.
    #[default]
    AllPairs,
    /// Each ground-truth beam pair is scored on its own; a cell's `trials`
    /// then counts path-trials (`L` per channel draw).
    PerPath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub snr_db: Vec<f64>,
    pub resolutions: Vec<Resolution>,
    pub paths: Vec<usize>,
    /// Per-axis `(g_az, g_el)` grid sizes, used on both link ends.
    pub grids: Vec<(usize, usize)>,
    /// Per-axis `(n_az, n_el)` antenna counts, used on both link ends.
    pub array: (usize, usize),
    pub spacing_over_wavelength: f64,
    pub trials: usize,
    pub base_seed: u64,
    pub score: ScoreMode,
    /// Path-gain law. Defaults to unit modulus: with Rayleigh gains the weaker
    /// of several paths is frequently buried regardless of receiver quality.
    pub gains: GainModel,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            snr_db: vec![-20.0, -15.0, -10.0, -5.0, 0.0],
            resolutions: vec![Resolution::OneBit, Resolution::TwoBit],
            paths: vec![1, 2],
            grids: vec![(16, 16)],
            array: (16, 16),
            spacing_over_wavelength: HALF_WAVELENGTH,
            trials: 1000,
            base_seed: 0,
            score: ScoreMode::AllPairs,
            gains: GainModel::UnitModulus,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if self.snr_db.is_empty() || self.resolutions.is_empty() || self.paths.is_empty() || self.grids.is_empty() {
            return fail("SNR, resolution, path and grid lists must be non-empty");
        }
        if self.snr_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return fail("SNR values must be finite or +inf");
        }
        if self.paths.contains(&0) {
            return fail("path counts must be positive");
        }
        for &(g_az, g_el) in &self.grids {
            ArrayConfig::new(self.array.0, self.array.1, g_az, g_el)?.with_spacing(self.spacing_over_wavelength)?;
        }
        Ok(())
    }

    /// All cells in output order: resolution, paths, grid, SNR.
    pub fn cells(&self) -> Vec<Cell> {
        let mut snrs = self.snr_db.clone();
        snrs.sort_by(f64::total_cmp);
        snrs.dedup();
        let res: BTreeSet<_> = self.resolutions.iter().copied().collect();
        let paths: BTreeSet<_> = self.paths.iter().copied().collect();
        let grids: BTreeSet<_> = self.grids.iter().copied().collect();
        let mut cells = Vec::new();
        for &resolution in &res {
            for &l in &paths {
                for &(g_az, g_el) in &grids {
                    for &snr_db in &snrs {
                        cells.push(Cell {
                            snr_db,
                            resolution,
                            paths: l,
                            g_az,
                            g_el,
                            n_az: self.array.0,
                            n_el: self.array.1,
                        });
                    }
                }
            }
        }
        cells
    }

    fn array_config(&self, cell: &Cell) -> Result<ArrayConfig> {
        ArrayConfig::new(cell.n_az, cell.n_el, cell.g_az, cell.g_el)?.with_spacing(self.spacing_over_wavelength)
    }
}

/// Coordinates of one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub snr_db: f64,
    pub resolution: Resolution,
    pub paths: usize,
    pub g_az: usize,
    pub g_el: usize,
    pub n_az: usize,
    pub n_el: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub cell: Cell,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
    /// Mean per-trial compute time in seconds.
    pub mean_wall_time_per_trial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedCell {
    pub cell: Cell,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub records: Vec<CellRecord>,
    pub skipped: Vec<SkippedCell>,
}

/// True when the recovered beam pairs equal the ground-truth pairs as a set.
pub fn score_trial<T: Real>(outcome: &TrainingOutcome, truth: &ChannelInstance<T>) -> bool {
    let got: BTreeSet<_> = outcome.pairs.iter().map(|p| (p.aoa, p.aod)).collect();
    let want: BTreeSet<_> = truth.beam_pairs().into_iter().collect();
    outcome.pairs.len() == want.len() && got == want
}

/// Number of ground-truth beam pairs present in the outcome.
fn matched_pairs<T: Real>(outcome: &TrainingOutcome, truth: &ChannelInstance<T>) -> usize {
    let got: BTreeSet<_> = outcome.pairs.iter().map(|p| (p.aoa, p.aod)).collect();
    truth.beam_pairs().iter().filter(|p| got.contains(p)).count()
}

/// `(channel_seed, training_seed)` for one trial of a cell.
///
/// The channel stream depends only on the geometry and path count, and the
/// training (noise) stream additionally on the SNR, so cells that differ only
/// in quantizer resolution or SNR see the same channel draws.
pub fn trial_seeds(base_seed: u64, cell: &Cell, trial: u64) -> (u64, u64) {
    let channel = derive(
        base_seed,
        &[
            cell.paths as u64,
            cell.g_az as u64,
            cell.g_el as u64,
            cell.n_az as u64,
            cell.n_el as u64,
            trial,
        ],
    );
    (channel, derive(channel, &[cell.snr_db.to_bits()]))
}

fn feasibility(cell: &Cell) -> Option<String> {
    let capacity = cell.g_az * cell.g_el;
    (cell.paths > capacity).then(|| format!("{} paths exceed {} distinct grid directions", cell.paths, capacity))
}

/// Runs every cell of `cfg`. Trials execute in parallel; results are folded in
/// trial order, so the output is a pure function of `cfg`.
pub fn run_sweep<T: Real>(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut trainers: HashMap<(usize, usize), Trainer<T>> = HashMap::new();
    let mut records = Vec::new();
    let mut skipped = Vec::new();

    for cell in cfg.cells() {
        if let Some(reason) = feasibility(&cell) {
            skipped.push(SkippedCell { cell, reason });
            continue;
        }
        let array = cfg.array_config(&cell)?;
        let trainer = match trainers.entry((cell.g_az, cell.g_el)) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(Trainer::new(&array, &array)?),
        };
        let trainer = &*trainer;
        let q = QuantizerSpec::new(cell.resolution);

        let outcomes: Vec<Result<(u64, u64, f64)>> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| {
                let start = Instant::now();
                let (ch_seed, tr_seed) = trial_seeds(cfg.base_seed, &cell, t);
                let ch = sample_channel_with::<T>(cell.paths, &array, &array, cfg.gains, ch_seed)?;
                let out = trainer.run(&ch, q, cell.snr_db, tr_seed)?;
                let (hits, units) = match cfg.score {
                    ScoreMode::AllPairs => (u64::from(score_trial(&out, &ch)), 1),
                    ScoreMode::PerPath => (matched_pairs(&out, &ch) as u64, cell.paths as u64),
                };
                Ok((hits, units, start.elapsed().as_secs_f64()))
            })
            .collect();

        let mut successes = 0u64;
        let mut trials = 0u64;
        let mut wall = 0.0;
        let mut failure = None;
        for o in outcomes {
            match o {
                Ok((h, u, w)) => {
                    successes += h;
                    trials += u;
                    wall += w;
                }
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        if let Some(reason) = failure {
            skipped.push(SkippedCell { cell, reason });
            continue;
        }
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, Z_95);
        records.push(CellRecord {
            cell,
            trials,
            successes,
            success_rate: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
            seed: cfg.base_seed,
            mean_wall_time_per_trial: wall / cfg.trials as f64,
        });
    }
    Ok(SweepResult {
        config: cfg.clone(),
        records,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::GridPoint;
    use crate::channel::PathSpec;
    use crate::protocol::{BeamPair, Diagnostics};
    use crate::scalar::cx;

    fn truth() -> ChannelInstance<f64> {
        let c = ArrayConfig::square(4, 4).unwrap();
        let paths = vec![
            PathSpec {
                gain: cx(1.0, 0.0),
                aoa: GridPoint::new(0, 1),
                aod: GridPoint::new(2, 3),
            },
            PathSpec {
                gain: cx(0.5, 0.5),
                aoa: GridPoint::new(3, 3),
                aod: GridPoint::new(1, 0),
            },
        ];
        ChannelInstance::new(paths, c, c).unwrap()
    }

    fn outcome(pairs: &[(GridPoint, GridPoint)]) -> TrainingOutcome {
        TrainingOutcome {
            s_aoa: pairs.iter().map(|p| p.0).collect(),
            s_aod: pairs.iter().map(|p| p.1).collect(),
            pairs: pairs.iter().map(|&(aoa, aod)| BeamPair { aoa, aod }).collect(),
            slots_used: pairs.len() + 1,
            diagnostics: Diagnostics::default(),
        }
    }

    #[test]
    fn any_order_scores() {
        let t = truth();
        let mut pairs = t.beam_pairs();
        assert!(score_trial(&outcome(&pairs), &t));
        pairs.reverse();
        assert!(score_trial(&outcome(&pairs), &t));
    }

    #[test]
    fn off_by_one_fails() {
        let t = truth();
        let mut pairs = t.beam_pairs();
        pairs[1].1.el += 1;
        assert!(!score_trial(&outcome(&pairs), &t));
    }

    #[test]
    fn swapped_pairing_fails() {
        let t = truth();
        let p = t.beam_pairs();
        let swapped = vec![(p[0].0, p[1].1), (p[1].0, p[0].1)];
        assert!(!score_trial(&outcome(&swapped), &t));
        let dup = vec![p[0], p[0]];
        assert!(!score_trial(&outcome(&dup), &t));
    }

    #[test]
    fn cells_sorted_and_deduplicated() {
        let cfg = SweepConfig {
            snr_db: vec![0.0, -10.0, 0.0],
            resolutions: vec![Resolution::Unquantized, Resolution::OneBit],
            paths: vec![2, 1],
            grids: vec![(8, 8)],
            array: (4, 4),
            ..SweepConfig::default()
        };
        let cells = cfg.cells();
        assert_eq!(cells.len(), 2 * 2 * 2);
        assert_eq!(cells[0].resolution, Resolution::OneBit);
        assert_eq!((cells[0].paths, cells[0].snr_db), (1, -10.0));
        assert_eq!(cells[7].resolution, Resolution::Unquantized);
    }

    #[test]
    fn infeasible_cells_skipped() {
        let cfg = SweepConfig {
            snr_db: vec![f64::INFINITY],
            resolutions: vec![Resolution::Unquantized],
            paths: vec![1, 5],
            grids: vec![(2, 2)],
            array: (2, 2),
            trials: 3,
            ..SweepConfig::default()
        };
        let res = run_sweep::<f64>(&cfg).unwrap();
        assert_eq!(res.records.len(), 1);
        assert_eq!(res.skipped.len(), 1);
        assert_eq!(res.records.len() + res.skipped.len(), cfg.cells().len());
        assert_eq!(res.records[0].success_rate, 1.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = [
            SweepConfig {
                trials: 0,
                ..SweepConfig::default()
            },
            SweepConfig {
                paths: vec![],
                ..SweepConfig::default()
            },
            SweepConfig {
                paths: vec![0],
                ..SweepConfig::default()
            },
            SweepConfig {
                snr_db: vec![f64::NAN],
                ..SweepConfig::default()
            },
            SweepConfig {
                grids: vec![(0, 4)],
                ..SweepConfig::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(run_sweep::<f64>(&cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn per_path_counts_path_trials() {
        let cfg = SweepConfig {
            snr_db: vec![f64::INFINITY],
            resolutions: vec![Resolution::Unquantized],
            paths: vec![2],
            grids: vec![(4, 4)],
            array: (4, 4),
            trials: 5,
            score: ScoreMode::PerPath,
            ..SweepConfig::default()
        };
        let res = run_sweep::<f64>(&cfg).unwrap();
        assert_eq!(res.records[0].trials, 10);
        assert_eq!(res.records[0].successes, 10);
    }

    #[test]
    fn seeds_shared_across_resolution_and_snr() {
        let mut a = Cell {
            snr_db: 0.0,
            resolution: Resolution::OneBit,
            paths: 2,
            g_az: 16,
            g_el: 16,
            n_az: 16,
            n_el: 16,
        };
        let base = trial_seeds(9, &a, 3);
        a.resolution = Resolution::TwoBit;
        assert_eq!(trial_seeds(9, &a, 3), base);
        a.snr_db = -5.0;
        let other = trial_seeds(9, &a, 3);
        assert_eq!(other.0, base.0);
        assert_ne!(other.1, base.1);
        a.paths = 1;
        assert_ne!(trial_seeds(9, &a, 3).0, base.0);
    }
}
