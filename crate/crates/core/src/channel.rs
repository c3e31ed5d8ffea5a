//! Narrowband L-path geometric channel with on-grid angles.
//!
//! [`ChannelInstance::to_matrix`] returns the downlink matrix (`N_r x N_t`,
//! receiver rows); the uplink matrix is its transpose.

use std::collections::HashSet;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::array::{upa_steering, ArrayConfig, GridPoint};
use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSpec<T: Real> {
    /// Complex path gain.
    pub gain: Cx<T>,
    /// Arrival direction on the receiver grid.
    pub aoa: GridPoint,
    /// Departure direction on the transmitter grid.
    pub aod: GridPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelInstance<T: Real> {
    paths: Vec<PathSpec<T>>,
    tx: ArrayConfig,
    rx: ArrayConfig,
}

impl<T: Real> ChannelInstance<T> {
    pub fn new(paths: Vec<PathSpec<T>>, tx: ArrayConfig, rx: ArrayConfig) -> Result<Self> {
        tx.validate()?;
        rx.validate()?;
        if paths.is_empty() {
            return Err(Error::domain("channel needs at least one path"));
        }
        let mut aoas = HashSet::new();
        let mut aods = HashSet::new();
        for (l, p) in paths.iter().enumerate() {
            if !p.aoa.within(&rx) || !p.aod.within(&tx) {
                return Err(Error::domain(format!("path {l} has an off-grid index")));
            }
            if !(p.gain.re.is_finite() && p.gain.im.is_finite()) || p.gain.norm_sqr() == T::zero() {
                return Err(Error::domain(format!("path {l} gain must be finite and nonzero")));
            }
            if !aoas.insert(p.aoa) || !aods.insert(p.aod) {
                return Err(Error::domain(format!(
                    "path {l} repeats an arrival or departure direction"
                )));
            }
        }
        Ok(ChannelInstance { paths, tx, rx })
    }

    pub fn paths(&self) -> &[PathSpec<T>] {
        &self.paths
    }

    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn tx_config(&self) -> &ArrayConfig {
        &self.tx
    }

    pub fn rx_config(&self) -> &ArrayConfig {
        &self.rx
    }

    /// Ground-truth (AoA, AoD) beam pairs in path order.
    pub fn beam_pairs(&self) -> Vec<(GridPoint, GridPoint)> {
        self.paths.iter().map(|p| (p.aoa, p.aod)).collect()
    }

    /// `sqrt(N_r N_t / L)`.
    pub fn path_scale(&self) -> T {
        let n = (self.rx.antennas() * self.tx.antennas()) as f64;
        T::of(n / self.paths.len() as f64).sqrt()
    }

    /// Downlink channel matrix, `N_r x N_t`.
    pub fn to_matrix(&self) -> Result<Array2<Cx<T>>> {
        let mut h = Array2::zeros((self.rx.antennas(), self.tx.antennas()));
        let scale = self.path_scale();
        for p in &self.paths {
            let (aoa_az, aoa_el) = grid_angles::<T>(p.aoa, &self.rx);
            let (aod_az, aod_el) = grid_angles::<T>(p.aod, &self.tx);
            let a_rx = upa_steering(aoa_az, aoa_el, &self.rx)?.into_inner();
            let a_tx = upa_steering(aod_az, aod_el, &self.tx)?.into_inner();
            let g = p.gain * scale;
            for (i, &r) in a_rx.iter().enumerate() {
                let gr = g * r;
                for (j, &t) in a_tx.iter().enumerate() {
                    h[[i, j]] += gr * t.conj();
                }
            }
        }
        Ok(h)
    }

    /// Uplink channel matrix, `N_t x N_r` (transpose of the downlink).
    pub fn uplink_matrix(&self) -> Result<Array2<Cx<T>>> {
        Ok(self.to_matrix()?.reversed_axes())
    }

    /// Angular-domain channel `G_r x G_t`, nonzero exactly at each path's
    /// (AoA, AoD) flat index pair.
    pub fn to_angular(&self) -> Array2<Cx<T>> {
        let mut ha = Array2::zeros((self.rx.grid_points(), self.tx.grid_points()));
        let scale = self.path_scale();
        for p in &self.paths {
            ha[[p.aoa.flat(self.rx.g_el), p.aod.flat(self.tx.g_el)]] = p.gain * scale;
        }
        ha
    }
}

fn grid_angles<T: Real>(p: GridPoint, cfg: &ArrayConfig) -> (T, T) {
    let g = |i: usize, n: usize| (T::of(2.0) * T::of(i as f64) / T::of(n as f64) - T::one()).acos();
    (g(p.az, cfg.g_az), g(p.el, cfg.g_el))
}

/// Circularly-symmetric complex Gaussian sample with variance `var`.
pub(crate) fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R, var: f64) -> Cx<T> {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    cx(T::of(s * re), T::of(s * im))
}

/// Distribution of the complex path gains.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GainModel {
    /// i.i.d. CN(0, 1).
    #[default]
    ComplexGaussian,
    /// Unit modulus with uniform phase (the CN(0, 1) draw normalized, so both
    /// models share direction draws for a given seed).
    UnitModulus,
}

/// Draws an `l`-path channel: CN(0, 1) gains and distinct, uniformly drawn
/// on-grid arrival and departure directions. Deterministic in `seed`.
pub fn sample_channel<T: Real>(l: usize, tx: &ArrayConfig, rx: &ArrayConfig, seed: u64) -> Result<ChannelInstance<T>> {
    sample_channel_with(l, tx, rx, GainModel::ComplexGaussian, seed)
}

/// [`sample_channel`] with a selectable gain distribution.
pub fn sample_channel_with<T: Real>(
    l: usize,
    tx: &ArrayConfig,
    rx: &ArrayConfig,
    gains: GainModel,
    seed: u64,
) -> Result<ChannelInstance<T>> {
    tx.validate()?;
    rx.validate()?;
    if l == 0 {
        return Err(Error::domain("path count must be at least 1"));
    }
    let capacity = tx.grid_points().min(rx.grid_points());
    if l > capacity {
        return Err(Error::domain(format!(
            "{l} paths exceed the {capacity} distinct grid directions available"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut aoas = HashSet::with_capacity(l);
    let mut aods = HashSet::with_capacity(l);
    let mut paths = Vec::with_capacity(l);
    for _ in 0..l {
        let mut gain = complex_normal::<T, _>(&mut rng, 1.0);
        if gains == GainModel::UnitModulus {
            gain = gain / gain.norm();
        }
        let aoa = draw_distinct(&mut rng, rx, &mut aoas);
        let aod = draw_distinct(&mut rng, tx, &mut aods);
        paths.push(PathSpec { gain, aoa, aod });
    }
    ChannelInstance::new(paths, *tx, *rx)
}

fn draw_distinct<R: Rng>(rng: &mut R, cfg: &ArrayConfig, taken: &mut HashSet<GridPoint>) -> GridPoint {
    loop {
        let p = GridPoint::new(rng.random_range(0..cfg.g_az), rng.random_range(0..cfg.g_el));
        if taken.insert(p) {
            return p;
        }
    }
}
