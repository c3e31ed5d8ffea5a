//! Two-phase beam training.
//!
//! Phase 1 (all-directions transmit): the base station sends `Ā_t · 1`, the
//! mobile station quantizes what it receives on every antenna and recovers the
//! `L` arrival directions with OMP over `Ā_r`.
//!
//! Phase 2 (fine-directions matching): the mobile station beams back toward
//! each recovered arrival direction in its own slot; the base station
//! quantizes each slot and finds the single departure direction that matches
//! it against `Ā_t*`.
//!
//! Noise is calibrated per transmission so that
//! `SNR = ‖signal‖² / (N σ²)`, with `N = N_t` on the downlink and `N = N_r`
//! on the uplink.

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::array::{make_dictionary, ArrayConfig, Dictionary, GridPoint};
use crate::channel::{complex_normal, ChannelInstance};
use crate::error::{Error, Result};
use crate::quantizer::{quantize_with_report, QuantizerSpec};
use crate::recovery::{omp, onecol_matched};
use crate::scalar::{norm_sqr, Cx, Real};
use crate::seed::mix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkDirection {
    /// Mobile station to base station.
    Uplink,
    /// Base station to mobile station.
    Downlink,
}

/// Receiver noise level for one link direction. An `snr_db` of `+inf`
/// disables noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub direction: LinkDirection,
}

impl NoiseSpec {
    pub fn new(snr_db: f64, direction: LinkDirection) -> Result<Self> {
        if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
            return Err(Error::domain(format!("SNR must be finite or +inf, got {snr_db}")));
        }
        Ok(NoiseSpec { snr_db, direction })
    }

    pub fn noiseless(direction: LinkDirection) -> Self {
        NoiseSpec {
            snr_db: f64::INFINITY,
            direction,
        }
    }

    /// Noise variance for a transmission with received signal energy
    /// `signal_energy` normalized over `n` antennas.
    pub fn variance(&self, signal_energy: f64, n: usize) -> f64 {
        if self.snr_db == f64::INFINITY {
            0.0
        } else {
            signal_energy / (n as f64 * 10f64.powf(self.snr_db / 10.0))
        }
    }
}

/// Matched (arrival, departure) beam directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BeamPair {
    pub aoa: GridPoint,
    pub aod: GridPoint,
}

/// Counters for degenerate events encountered during training.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    /// Quantizer rails that carried no energy.
    pub zero_rails: usize,
    /// Whether the Phase 1 OMP hit a dependent column.
    pub rank_deficient: bool,
}

impl Diagnostics {
    fn merge(self, other: Diagnostics) -> Self {
        Diagnostics {
            zero_rails: self.zero_rails + other.zero_rails,
            rank_deficient: self.rank_deficient || other.rank_deficient,
        }
    }
}

/// Directions recovered by one training phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResult {
    pub directions: Vec<GridPoint>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingOutcome {
    pub s_aoa: Vec<GridPoint>,
    pub s_aod: Vec<GridPoint>,
    pub pairs: Vec<BeamPair>,
    pub slots_used: usize,
    pub diagnostics: Diagnostics,
}

/// Training slots used by the two-phase method: one broadcast slot plus one
/// slot per path.
pub fn proposed_slots(paths: usize) -> usize {
    paths + 1
}

/// Slots used by sector-sweeping hierarchical search with `sectors` sectors
/// per stage over `g_t` transmit directions: `K² · log_K(g_t)`.
///
/// When `g_t` is not a power of `K` the stage count is rounded up; see
/// [`baseline_stages`].
pub fn baseline_slots(sectors: u64, g_t: u64) -> Result<u64> {
    let (stages, _) = baseline_stages(sectors, g_t)?;
    Ok(sectors * sectors * stages)
}

/// `(ceil(log_K g_t), exact)` where `exact` tells whether `g_t` is a power of
/// `K`.
pub fn baseline_stages(sectors: u64, g_t: u64) -> Result<(u64, bool)> {
    if sectors < 2 {
        return Err(Error::domain(format!("sector count must be at least 2, got {sectors}")));
    }
    if g_t == 0 {
        return Err(Error::domain("transmit grid size must be positive"));
    }
    let (mut stages, mut reach) = (0u64, 1u64);
    while reach < g_t {
        reach = reach.saturating_mul(sectors);
        stages += 1;
    }
    Ok((stages, reach == g_t))
}

/// Precomputed dictionaries and probe signals for one array geometry.
///
/// Building the dictionaries dominates the cost of a single training run, so
/// Monte Carlo drivers build one `Trainer` per geometry and share it.
#[derive(Debug, Clone)]
pub struct Trainer<T: Real> {
    tx_dict: Dictionary<T>,
    rx_dict: Dictionary<T>,
    tx_dict_conj: Array2<Cx<T>>,
    /// Phase 1 broadcast `Ā_t · 1`.
    x_dl: Array1<Cx<T>>,
}

impl<T: Real> Trainer<T> {
    pub fn new(tx: &ArrayConfig, rx: &ArrayConfig) -> Result<Self> {
        let tx_dict = make_dictionary::<T>(tx)?;
        let rx_dict = make_dictionary::<T>(rx)?;
        let tx_dict_conj = tx_dict.conj_matrix();
        let x_dl = tx_dict.matrix().sum_axis(ndarray::Axis(1));
        Ok(Trainer {
            tx_dict,
            rx_dict,
            tx_dict_conj,
            x_dl,
        })
    }

    pub fn tx_dictionary(&self) -> &Dictionary<T> {
        &self.tx_dict
    }

    pub fn rx_dictionary(&self) -> &Dictionary<T> {
        &self.rx_dict
    }

    fn check_channel(&self, ch: &ChannelInstance<T>) -> Result<()> {
        if ch.tx_config() != self.tx_dict.config() || ch.rx_config() != self.rx_dict.config() {
            return Err(Error::domain("channel geometry does not match the trainer"));
        }
        Ok(())
    }

    /// Phase 1: recovers the `L` arrival directions, strongest first.
    pub fn phase1(
        &self,
        ch: &ChannelInstance<T>,
        q: QuantizerSpec,
        noise: NoiseSpec,
        seed: u64,
    ) -> Result<PhaseResult> {
        self.check_channel(ch)?;
        if noise.direction != LinkDirection::Downlink {
            return Err(Error::domain("phase 1 runs on the downlink"));
        }
        self.phase1_on(ch, &ch.to_matrix()?, q, noise, seed)
    }

    fn phase1_on(
        &self,
        ch: &ChannelInstance<T>,
        h_dl: &Array2<Cx<T>>,
        q: QuantizerSpec,
        noise: NoiseSpec,
        seed: u64,
    ) -> Result<PhaseResult> {
        let mut y = h_dl.dot(&self.x_dl);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        add_noise(&mut y, noise, ch.tx_config().antennas(), &mut rng);
        let (r, qrep) = quantize_with_report(y.view(), q);

        let est = omp(r.view(), self.rx_dict.matrix().view(), ch.num_paths())?;
        let mut found: Vec<(usize, T)> = est
            .support
            .iter()
            .zip(&est.coefficients)
            .map(|(&j, c)| (j, c.norm()))
            .collect();
        // Stable sort keeps selection order among equal magnitudes.
        found.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let g_el = self.rx_dict.config().g_el;
        Ok(PhaseResult {
            directions: found.into_iter().map(|(j, _)| GridPoint::from_flat(j, g_el)).collect(),
            diagnostics: Diagnostics {
                zero_rails: qrep.zero_rails,
                rank_deficient: est.rank_deficient,
            },
        })
    }

    /// Phase 2: one uplink slot per arrival direction in `s_aoa`; returns the
    /// matching departure directions in the same order.
    pub fn phase2(
        &self,
        ch: &ChannelInstance<T>,
        s_aoa: &[GridPoint],
        q: QuantizerSpec,
        noise: NoiseSpec,
        seed: u64,
    ) -> Result<PhaseResult> {
        self.check_channel(ch)?;
        if noise.direction != LinkDirection::Uplink {
            return Err(Error::domain("phase 2 runs on the uplink"));
        }
        if s_aoa.len() != ch.num_paths() {
            return Err(Error::domain(format!(
                "expected {} arrival directions, got {}",
                ch.num_paths(),
                s_aoa.len()
            )));
        }
        let rx_cfg = self.rx_dict.config();
        if let Some(p) = s_aoa.iter().find(|p| !p.within(rx_cfg)) {
            return Err(Error::domain(format!("arrival direction {p} is off the receiver grid")));
        }
        self.phase2_on(&ch.to_matrix()?, s_aoa, q, noise, seed)
    }

    fn phase2_on(
        &self,
        h_dl: &Array2<Cx<T>>,
        s_aoa: &[GridPoint],
        q: QuantizerSpec,
        noise: NoiseSpec,
        seed: u64,
    ) -> Result<PhaseResult> {
        let rx_cfg = self.rx_dict.config();
        let h_ul = h_dl.t();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g_el = self.tx_dict.config().g_el;
        let mut directions = Vec::with_capacity(s_aoa.len());
        let mut diagnostics = Diagnostics::default();
        for &aoa in s_aoa {
            let x = self.rx_dict.column_at(aoa).mapv(|z| z.conj());
            let mut y = h_ul.dot(&x);
            add_noise(&mut y, noise, rx_cfg.antennas(), &mut rng);
            let (r, qrep) = quantize_with_report(y.view(), q);
            diagnostics.zero_rails += qrep.zero_rails;
            let (j, _) = onecol_matched(r.view(), self.tx_dict_conj.view())?;
            directions.push(GridPoint::from_flat(j, g_el));
        }
        Ok(PhaseResult {
            directions,
            diagnostics,
        })
    }

    /// Runs both phases at the same SNR for each link direction.
    pub fn run(&self, ch: &ChannelInstance<T>, q: QuantizerSpec, snr_db: f64, seed: u64) -> Result<TrainingOutcome> {
        self.check_channel(ch)?;
        let h_dl = ch.to_matrix()?;
        let dl = NoiseSpec::new(snr_db, LinkDirection::Downlink)?;
        let ul = NoiseSpec::new(snr_db, LinkDirection::Uplink)?;
        let p1 = self.phase1_on(ch, &h_dl, q, dl, mix(seed, 1))?;
        let p2 = self.phase2_on(&h_dl, &p1.directions, q, ul, mix(seed, 2))?;
        let pairs = p1
            .directions
            .iter()
            .zip(&p2.directions)
            .map(|(&aoa, &aod)| BeamPair { aoa, aod })
            .collect();
        Ok(TrainingOutcome {
            slots_used: proposed_slots(ch.num_paths()),
            diagnostics: p1.diagnostics.merge(p2.diagnostics),
            s_aoa: p1.directions,
            s_aod: p2.directions,
            pairs,
        })
    }
}

fn add_noise<T: Real>(y: &mut Array1<Cx<T>>, noise: NoiseSpec, n: usize, rng: &mut ChaCha8Rng) {
    let energy = norm_sqr(y.iter()).as_f64();
    let var = noise.variance(energy, n);
    if var > 0.0 {
        y.mapv_inplace(|z| z + complex_normal::<T, _>(rng, var));
    }
}

/// Phase 1 with freshly built dictionaries.
pub fn phase1<T: Real>(
    ch: &ChannelInstance<T>,
    q: QuantizerSpec,
    noise: NoiseSpec,
    seed: u64,
) -> Result<Vec<GridPoint>> {
    Ok(Trainer::new(ch.tx_config(), ch.rx_config())?
        .phase1(ch, q, noise, seed)?
        .directions)
}

/// Phase 2 with freshly built dictionaries.
pub fn phase2<T: Real>(
    ch: &ChannelInstance<T>,
    s_aoa: &[GridPoint],
    q: QuantizerSpec,
    noise: NoiseSpec,
    seed: u64,
) -> Result<Vec<GridPoint>> {
    Ok(Trainer::new(ch.tx_config(), ch.rx_config())?
        .phase2(ch, s_aoa, q, noise, seed)?
        .directions)
}

/// Full two-phase training with freshly built dictionaries.
pub fn run_training<T: Real>(
    ch: &ChannelInstance<T>,
    q: QuantizerSpec,
    snr_db: f64,
    seed: u64,
) -> Result<TrainingOutcome> {
    Trainer::new(ch.tx_config(), ch.rx_config())?.run(ch, q, snr_db, seed)
}
