//! Uniform planar array geometry: steering vectors, angular grids and
//! Kronecker-structured dictionaries.
//!
//! Angles are measured from the array axis, so the per-element phase
//! progression of a uniform linear array is `2π (d/λ) k cos(angle)`. With the
//! `arccos` grid of [`make_grid`] the direction cosines are uniformly spaced,
//! which makes a square grid (`g == n`) an orthonormal basis.
//!
//! Dictionary columns are ordered azimuth-major, elevation-minor: flat index
//! `f` corresponds to azimuth grid index `f / g_el` and elevation grid index
//! `f % g_el`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cx, norm_sqr, Cx, Real};

/// Default element spacing in wavelengths.
pub const HALF_WAVELENGTH: f64 = 0.5;

/// Geometry of one side of the link: antenna counts and angular grid sizes
/// per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_az: usize,
    pub n_el: usize,
    pub g_az: usize,
    pub g_el: usize,
    /// Element spacing `d/λ`.
    pub spacing_over_wavelength: f64,
}

impl ArrayConfig {
    pub fn new(n_az: usize, n_el: usize, g_az: usize, g_el: usize) -> Result<Self> {
        let cfg = ArrayConfig {
            n_az,
            n_el,
            g_az,
            g_el,
            spacing_over_wavelength: HALF_WAVELENGTH,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same antenna count `n` and grid size `g` on both axes.
    pub fn square(n: usize, g: usize) -> Result<Self> {
        Self::new(n, n, g, g)
    }

    pub fn with_spacing(mut self, spacing_over_wavelength: f64) -> Result<Self> {
        self.spacing_over_wavelength = spacing_over_wavelength;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_az == 0 || self.n_el == 0 {
            return Err(Error::Config(format!(
                "antenna counts must be positive, got {}x{}",
                self.n_az, self.n_el
            )));
        }
        if self.g_az == 0 || self.g_el == 0 {
            return Err(Error::Config(format!(
                "grid sizes must be positive, got {}x{}",
                self.g_az, self.g_el
            )));
        }
        let d = self.spacing_over_wavelength;
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::Config(format!(
                "antenna spacing must be positive and finite, got {d}"
            )));
        }
        Ok(())
    }

    pub fn antennas(&self) -> usize {
        self.n_az * self.n_el
    }

    /// Number of dictionary columns (`g_az * g_el`).
    pub fn grid_points(&self) -> usize {
        self.g_az * self.g_el
    }
}

/// A pair of (azimuth, elevation) grid indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub az: usize,
    pub el: usize,
}

impl GridPoint {
    pub fn new(az: usize, el: usize) -> Self {
        GridPoint { az, el }
    }

    /// Flat dictionary column index for an elevation grid of size `g_el`.
    pub fn flat(self, g_el: usize) -> usize {
        self.az * g_el + self.el
    }

    pub fn from_flat(flat: usize, g_el: usize) -> Self {
        GridPoint {
            az: flat / g_el,
            el: flat % g_el,
        }
    }

    pub(crate) fn within(self, cfg: &ArrayConfig) -> bool {
        self.az < cfg.g_az && self.el < cfg.g_el
    }
}

impl std::fmt::Display for GridPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.az, self.el)
    }
}

/// Unit-norm array response vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector<T: Real>(Array1<Cx<T>>);

impl<T: Real> SteeringVector<T> {
    pub fn as_array(&self) -> &Array1<Cx<T>> {
        &self.0
    }

    pub fn view(&self) -> ArrayView1<'_, Cx<T>> {
        self.0.view()
    }

    pub fn into_inner(self) -> Array1<Cx<T>> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> T {
        norm_sqr(self.0.iter()).sqrt()
    }
}

/// Response of an `n`-element uniform linear array to a plane wave at `angle`
/// (radians from the array axis).
pub fn axis_steering<T: Real>(angle: T, n: usize, spacing_over_wavelength: T) -> Result<SteeringVector<T>> {
    if !angle.is_finite() {
        return Err(Error::domain(format!("steering angle must be finite, got {angle}")));
    }
    if n == 0 {
        return Err(Error::domain("steering vector needs at least one element"));
    }
    if !(spacing_over_wavelength.is_finite() && spacing_over_wavelength > T::zero()) {
        return Err(Error::domain(format!(
            "antenna spacing must be positive, got {spacing_over_wavelength}"
        )));
    }
    let amp = T::one() / T::of(n as f64).sqrt();
    let step = T::TAU() * spacing_over_wavelength * angle.cos();
    Ok(SteeringVector(Array1::from_shape_fn(n, |k| {
        let phase = step * T::of(k as f64);
        cx(amp * phase.cos(), amp * phase.sin())
    })))
}

/// Planar-array response: Kronecker product of the azimuth-axis and
/// elevation-axis responses.
pub fn upa_steering<T: Real>(az: T, el: T, cfg: &ArrayConfig) -> Result<SteeringVector<T>> {
    cfg.validate()?;
    let d = T::of(cfg.spacing_over_wavelength);
    let a_az = axis_steering(az, cfg.n_az, d)?;
    let a_el = axis_steering(el, cfg.n_el, d)?;
    Ok(SteeringVector(kron_vec(a_az.view(), a_el.view())))
}

/// Angular grid `arccos(2i/g - 1)`, `i = 0..g`; values lie in `(0, π]`.
pub fn make_grid<T: Real>(g: usize) -> Vec<T> {
    let g_f = T::of(g as f64);
    (0..g)
        .map(|i| (T::of(2.0) * T::of(i as f64) / g_f - T::one()).acos())
        .collect()
}

/// Kronecker product of two vectors.
pub fn kron_vec<T: Real>(a: ArrayView1<'_, Cx<T>>, b: ArrayView1<'_, Cx<T>>) -> Array1<Cx<T>> {
    let nb = b.len();
    Array1::from_shape_fn(a.len() * nb, |i| a[i / nb] * b[i % nb])
}

/// Kronecker product of two matrices.
pub fn kron<T: Real>(a: ArrayView2<'_, Cx<T>>, b: ArrayView2<'_, Cx<T>>) -> Array2<Cx<T>> {
    let (br, bc) = b.dim();
    let (ar, ac) = a.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}

/// Single-axis dictionary: columns are [`axis_steering`] at each grid angle.
pub fn axis_dictionary<T: Real>(n: usize, grid: &[T], spacing_over_wavelength: T) -> Result<Array2<Cx<T>>> {
    let mut m = Array2::zeros((n, grid.len()));
    for (j, &angle) in grid.iter().enumerate() {
        let col = axis_steering(angle, n, spacing_over_wavelength)?;
        m.column_mut(j).assign(col.as_array());
    }
    Ok(m)
}

/// Dictionary matrix of a planar array over its angular grid.
#[derive(Debug, Clone)]
pub struct Dictionary<T: Real> {
    matrix: Array2<Cx<T>>,
    grid_az: Vec<T>,
    grid_el: Vec<T>,
    cfg: ArrayConfig,
}

impl<T: Real> Dictionary<T> {
    /// `(n_az * n_el) x (g_az * g_el)` matrix of unit-norm columns.
    pub fn matrix(&self) -> &Array2<Cx<T>> {
        &self.matrix
    }

    pub fn grid_az(&self) -> &[T] {
        &self.grid_az
    }

    pub fn grid_el(&self) -> &[T] {
        &self.grid_el
    }

    pub fn config(&self) -> &ArrayConfig {
        &self.cfg
    }

    pub fn column(&self, flat: usize) -> ArrayView1<'_, Cx<T>> {
        self.matrix.column(flat)
    }

    pub fn column_at(&self, point: GridPoint) -> ArrayView1<'_, Cx<T>> {
        self.matrix.column(point.flat(self.cfg.g_el))
    }

    pub fn angles(&self, point: GridPoint) -> (T, T) {
        (self.grid_az[point.az], self.grid_el[point.el])
    }

    /// Elementwise conjugate of the dictionary matrix.
    pub fn conj_matrix(&self) -> Array2<Cx<T>> {
        self.matrix.mapv(|z| z.conj())
    }

    /// `Aᴴ A`.
    pub fn gram(&self) -> Array2<Cx<T>> {
        let ah = self.matrix.t().mapv(|z| z.conj());
        ah.dot(&self.matrix)
    }
}

pub fn make_dictionary<T: Real>(cfg: &ArrayConfig) -> Result<Dictionary<T>> {
    cfg.validate()?;
    let d = T::of(cfg.spacing_over_wavelength);
    let grid_az = make_grid::<T>(cfg.g_az);
    let grid_el = make_grid::<T>(cfg.g_el);
    let az = axis_dictionary(cfg.n_az, &grid_az, d)?;
    let el = axis_dictionary(cfg.n_el, &grid_el, d)?;
    Ok(Dictionary {
        matrix: kron(az.view(), el.view()),
        grid_az,
        grid_el,
        cfg: *cfg,
    })
}

/// Grid angles `(azimuth, elevation)` addressed by a flat dictionary index.
pub fn flat_index_to_angles<T: Real>(flat: usize, g_az: usize, g_el: usize) -> Result<(T, T)> {
    if flat >= g_az * g_el {
        return Err(Error::domain(format!(
            "flat index {flat} out of range for {g_az}x{g_el} grid"
        )));
    }
    let p = GridPoint::from_flat(flat, g_el);
    let g = |i: usize, n: usize| (T::of(2.0) * T::of(i as f64) / T::of(n as f64) - T::one()).acos();
    Ok((g(p.az, g_az), g(p.el, g_el)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    fn close(a: Cx<f64>, b: Cx<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn broadside_is_flat() {
        let a = axis_steering(FRAC_PI_2, 4, 0.5).unwrap();
        for z in a.as_array() {
            assert!(close(*z, cx(0.5, 0.0), 1e-12));
        }
    }

    #[test]
    fn endfire_alternates_sign() {
        let a = axis_steering(0.0, 2, 0.5).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!(close(a.as_array()[0], cx(s, 0.0), 1e-12));
        assert!(close(a.as_array()[1], cx(-s, 0.0), 1e-12));
    }

    #[test]
    fn sixty_degrees_matches_scalar_formula() {
        // cos(π/3) = 1/2 so the per-element phase step is π/2.
        let a = axis_steering(FRAC_PI_3, 3, 0.5).unwrap();
        let amp = 1.0 / 3f64.sqrt();
        for k in 0..3 {
            let phase = PI * k as f64 * 0.5;
            let want = cx(amp * phase.cos(), amp * phase.sin());
            assert!(close(a.as_array()[k], want, 1e-12), "k={k}");
        }
    }

    #[test]
    fn non_finite_angle_rejected() {
        assert!(matches!(axis_steering(f64::NAN, 4, 0.5), Err(Error::Domain(_))));
        assert!(matches!(axis_steering(f64::INFINITY, 4, 0.5), Err(Error::Domain(_))));
        assert!(axis_steering(0.0f64, 0, 0.5).is_err());
    }

    #[test]
    fn upa_closed_forms() {
        let cfg = ArrayConfig::square(2, 2).unwrap();
        let a = upa_steering(FRAC_PI_2, FRAC_PI_2, &cfg).unwrap();
        for z in a.as_array() {
            assert!(close(*z, cx(0.5, 0.0), 1e-12));
        }
        let a = upa_steering(0.0, FRAC_PI_2, &cfg).unwrap();
        let want = [0.5, 0.5, -0.5, -0.5];
        for (z, w) in a.as_array().iter().zip(want) {
            assert!(close(*z, cx(w, 0.0), 1e-12));
        }
    }

    #[test]
    fn upa_matches_nested_loop() {
        let cfg = ArrayConfig::square(4, 4).unwrap();
        let (az, el) = (FRAC_PI_6, FRAC_PI_4);
        let a = upa_steering(az, el, &cfg).unwrap();
        let ax = |ang: f64, k: usize| {
            let p = PI * k as f64 * ang.cos();
            cx(p.cos() / 2.0, p.sin() / 2.0)
        };
        for p in 0..4 {
            for q in 0..4 {
                assert!(close(a.as_array()[p * 4 + q], ax(az, p) * ax(el, q), 1e-12));
            }
        }
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_closed_forms() {
        let g2 = make_grid::<f64>(2);
        assert!((g2[0] - PI).abs() < 1e-12 && (g2[1] - FRAC_PI_2).abs() < 1e-12);
        let g4 = make_grid::<f64>(4);
        let want = [PI, 2.0 * FRAC_PI_3, FRAC_PI_2, FRAC_PI_3];
        for (a, b) in g4.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_direction_cosines_uniform() {
        let g = make_grid::<f64>(16);
        for (i, th) in g.iter().enumerate() {
            assert!(*th > 0.0 && *th <= PI);
            let u = -1.0 + i as f64 / 8.0;
            assert!((th.cos() - u).abs() < 1e-12);
            assert!((th.sin() - (1.0 - u * u).sqrt()).abs() < 1e-12);
        }
        assert!((g[15].cos() - 7.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn square_dictionary_is_unitary() {
        let cfg = ArrayConfig::square(2, 2).unwrap();
        let d = make_dictionary::<f64>(&cfg).unwrap();
        assert_eq!(d.matrix().dim(), (4, 4));
        let gram = d.gram();
        for ((i, j), z) in gram.indexed_iter() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!(close(*z, cx(want, 0.0), 1e-10));
        }
    }

    #[test]
    fn oversampled_dictionary_not_orthogonal() {
        let cfg = ArrayConfig::new(4, 4, 8, 8).unwrap();
        let d = make_dictionary::<f64>(&cfg).unwrap();
        assert_eq!(d.matrix().dim(), (16, 64));
        let gram = d.gram();
        for i in 0..64 {
            assert!((gram[[i, i]].re - 1.0).abs() < 1e-12);
        }
        assert!(gram[[0, 1]].norm() > 0.1);
    }

    #[test]
    fn columns_follow_azimuth_major_order() {
        let cfg = ArrayConfig::new(3, 2, 4, 5).unwrap();
        let d = make_dictionary::<f64>(&cfg).unwrap();
        for i in 0..4 {
            for j in 0..5 {
                let want = upa_steering(d.grid_az()[i], d.grid_el()[j], &cfg).unwrap();
                let col = d.column(i * 5 + j);
                assert_eq!(col, want.view());
            }
        }
    }

    #[test]
    fn flat_index_examples() {
        let (az, el) = flat_index_to_angles::<f64>(0, 4, 4).unwrap();
        assert!((az - PI).abs() < 1e-12 && (el - PI).abs() < 1e-12);
        let (az, el) = flat_index_to_angles::<f64>(5, 4, 4).unwrap();
        assert!((az - 2.0 * FRAC_PI_3).abs() < 1e-12);
        assert!((el - 2.0 * FRAC_PI_3).abs() < 1e-12);
        assert!(flat_index_to_angles::<f64>(16, 4, 4).is_err());
    }

    #[test]
    fn flat_round_trip_through_correlation() {
        let cfg = ArrayConfig::square(8, 8).unwrap();
        let d = make_dictionary::<f64>(&cfg).unwrap();
        for flat in 0..64 {
            let (az, el) = flat_index_to_angles::<f64>(flat, 8, 8).unwrap();
            let a = upa_steering(az, el, &cfg).unwrap();
            let best = (0..64)
                .map(|j| {
                    let c: Cx<f64> = d.column(j).iter().zip(a.as_array()).map(|(x, y)| x.conj() * y).sum();
                    (j, c.norm())
                })
                .fold((0, -1.0), |acc, (j, m)| if m > acc.1 { (j, m) } else { acc });
            assert_eq!(best.0, flat);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ArrayConfig::new(0, 4, 4, 4).is_err());
        assert!(ArrayConfig::new(4, 4, 4, 0).is_err());
        assert!(ArrayConfig::square(4, 4).unwrap().with_spacing(0.0).is_err());
        assert!(ArrayConfig::square(4, 4).unwrap().with_spacing(f64::NAN).is_err());
    }

    #[test]
    fn single_precision_dictionary() {
        let cfg = ArrayConfig::square(4, 4).unwrap();
        let d = make_dictionary::<f32>(&cfg).unwrap();
        for ((i, j), z) in d.gram().indexed_iter() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((z.re - want).abs() < 1e-5 && z.im.abs() < 1e-5);
        }
    }
}
