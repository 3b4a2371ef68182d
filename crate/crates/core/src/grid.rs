//! Periodic box discretization.
//!
//! A [`Grid`] is the cube `[0, L)^n` sampled with `N` points per axis. Fourier
//! coefficients are stored in FFT order: index `j` on an axis corresponds to
//! the integer wavenumber `m = j` for `j < N/2` and `m = j - N` otherwise, and
//! to the physical wavenumber `k = 2*pi*m / L`.
//!
//! Two wavevector tables are kept. The full table (`wavevector`) is used for
//! even multipliers such as `exp(-t|k|^2)`. The derivative table
//! (`derivative_wavevector`) has the Nyquist entry `m = -N/2` zeroed, because
//! an odd multiplier `i k` at the Nyquist index would break the Hermitian
//! symmetry of real fields. Projectors are built from the derivative table so
//! that `div` and the Helmholtz split commute exactly.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub const MAX_DIMS: usize = 3;

#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n_dims: usize,
    resolution: usize,
    box_length: f64,
    /// Per-axis physical wavenumbers in FFT order.
    axis_k: Vec<f64>,
    /// |k|^2 per flat index (full table).
    k_squared: Vec<f64>,
    /// 2/3-rule mask per flat index.
    keep: Vec<bool>,
    /// Flat index of `-m` for every flat index `m`.
    negated: Vec<usize>,
    /// Derivative wavevector per flat index.
    dk: Vec<[f64; MAX_DIMS]>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    /// Builds a grid. `resolution` must be even and at least 8.
    pub fn new(n_dims: usize, box_length: f64, resolution: usize) -> Result<Self> {
        if !(2..=MAX_DIMS).contains(&n_dims) {
            return Err(Error::config(format!(
                "n_dims must be 2 or 3, got {n_dims}"
            )));
        }
        if resolution < 8 || resolution % 2 != 0 {
            return Err(Error::config(format!(
                "resolution must be even and >= 8, got {resolution}"
            )));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::config(format!(
                "box_length must be positive, got {box_length}"
            )));
        }

        let k0 = 2.0 * PI / box_length;
        let axis_k: Vec<f64> = (0..resolution)
            .map(|j| k0 * signed_index(j, resolution) as f64)
            .collect();
        let mut axis_dk = axis_k.clone();
        axis_dk[resolution / 2] = 0.0;

        let len = resolution.pow(n_dims as u32);
        let cutoff = resolution as f64 / 3.0;
        let mut k_squared = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        let mut negated = Vec::with_capacity(len);
        let mut dk = Vec::with_capacity(len);
        for flat in 0..len {
            let idx = unravel(flat, n_dims, resolution);
            let mut k2 = 0.0;
            let mut inside = true;
            for &j in &idx[..n_dims] {
                k2 += axis_k[j] * axis_k[j];
                inside &= (signed_index(j, resolution).unsigned_abs() as f64) < cutoff;
            }
            k_squared.push(k2);
            keep.push(inside);
            let neg = idx[..n_dims]
                .iter()
                .fold(0, |acc, &j| acc * resolution + (resolution - j) % resolution);
            negated.push(neg);
            let mut kd = [0.0; MAX_DIMS];
            for d in 0..n_dims {
                kd[d] = axis_dk[idx[d]];
            }
            dk.push(kd);
        }

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(resolution);
        let inverse = planner.plan_fft_inverse(resolution);

        Ok(Self {
            inner: Arc::new(GridInner {
                n_dims,
                resolution,
                box_length,
                axis_k,
                k_squared,
                keep,
                negated,
                dk,
                forward,
                inverse,
            }),
        })
    }

    pub fn n_dims(&self) -> usize {
        self.inner.n_dims
    }

    pub fn resolution(&self) -> usize {
        self.inner.resolution
    }

    pub fn box_length(&self) -> f64 {
        self.inner.box_length
    }

    /// Number of grid points (and Fourier coefficients) per component.
    pub fn len(&self) -> usize {
        self.inner.k_squared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        self.inner.box_length / self.inner.resolution as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n_dims() as i32)
    }

    /// `L^n`.
    pub fn volume(&self) -> f64 {
        self.inner.box_length.powi(self.n_dims() as i32)
    }

    /// Smallest nonzero wavenumber `2*pi/L`.
    pub fn fundamental_wavenumber(&self) -> f64 {
        2.0 * PI / self.inner.box_length
    }

    pub fn axis_wavenumbers(&self) -> &[f64] {
        &self.inner.axis_k
    }

    pub fn multi_index(&self, flat: usize) -> [usize; MAX_DIMS] {
        unravel(flat, self.n_dims(), self.resolution())
    }

    /// Signed integer multi-index `m` of a flat coefficient index.
    pub fn signed_multi_index(&self, flat: usize) -> [i64; MAX_DIMS] {
        let idx = self.multi_index(flat);
        let mut out = [0i64; MAX_DIMS];
        for d in 0..self.n_dims() {
            out[d] = signed_index(idx[d], self.resolution());
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.n_dims()]
            .iter()
            .fold(0, |acc, &j| acc * self.resolution() + j)
    }

    /// Flat index of the coefficient with signed multi-index `m`.
    pub fn flat_from_signed(&self, m: &[i64]) -> usize {
        let n = self.resolution() as i64;
        let idx: Vec<usize> = m[..self.n_dims()]
            .iter()
            .map(|&mi| mi.rem_euclid(n) as usize)
            .collect();
        self.flat_index(&idx)
    }

    pub fn wavevector(&self, flat: usize) -> [f64; MAX_DIMS] {
        let idx = self.multi_index(flat);
        let mut k = [0.0; MAX_DIMS];
        for d in 0..self.n_dims() {
            k[d] = self.inner.axis_k[idx[d]];
        }
        k
    }

    pub fn derivative_wavevector(&self, flat: usize) -> [f64; MAX_DIMS] {
        self.inner.dk[flat]
    }

    pub fn k_squared(&self) -> &[f64] {
        &self.inner.k_squared
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.inner.keep
    }

    /// Physical coordinates of grid point `flat` (origin at a grid point).
    pub fn position(&self, flat: usize) -> [f64; MAX_DIMS] {
        let idx = self.multi_index(flat);
        let h = self.spacing();
        let mut x = [0.0; MAX_DIMS];
        for d in 0..self.n_dims() {
            x[d] = idx[d] as f64 * h;
        }
        x
    }

    /// Coordinates folded into `[-L/2, L/2)`, i.e. the minimal periodic image.
    pub fn centered_position(&self, flat: usize) -> [f64; MAX_DIMS] {
        let idx = self.multi_index(flat);
        let h = self.spacing();
        let mut x = [0.0; MAX_DIMS];
        for d in 0..self.n_dims() {
            x[d] = signed_index(idx[d], self.resolution()) as f64 * h;
        }
        x
    }

    pub(crate) fn forward_plan(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.forward
    }

    pub(crate) fn inverse_plan(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.inverse
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Last time at which a heat kernel still fits in the box: `spread`
    /// standard deviations `sqrt(2t)` on each side of the center, i.e.
    /// `t <= L^2 / (8 spread^2)`.
    pub fn validity_horizon(&self, spread: f64) -> f64 {
        let l = self.box_length();
        l * l / (8.0 * spread * spread)
    }

    /// Flat index of the mode `-m` for every flat index `m`.
    pub fn negated_indices(&self) -> &[usize] {
        &self.inner.negated
    }

    /// A zeroed coefficient array of the grid's size.
    pub fn zeros(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.n_dims() == other.n_dims()
                && self.resolution() == other.resolution()
                && self.box_length() == other.box_length())
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_dims", &self.n_dims())
            .field("resolution", &self.resolution())
            .field("box_length", &self.box_length())
            .finish()
    }
}

/// Convenience wrapper mirroring the constructor.
pub fn make_grid(n_dims: usize, box_length: f64, resolution: usize) -> Result<Grid> {
    Grid::new(n_dims, box_length, resolution)
}

fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn unravel(mut flat: usize, n_dims: usize, n: usize) -> [usize; MAX_DIMS] {
    let mut idx = [0usize; MAX_DIMS];
    for d in (0..n_dims).rev() {
        idx[d] = flat % n;
        flat /= n;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pi_box_has_integer_wavenumbers() {
        let g = make_grid(2, 2.0 * PI, 16).unwrap();
        let ks: Vec<f64> = g.axis_wavenumbers().to_vec();
        let expected: Vec<f64> = (0..16)
            .map(|j| if j < 8 { j as f64 } else { j as f64 - 16.0 })
            .collect();
        for (a, b) in ks.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(g.wavevector(0), [0.0; 3]);
        assert!((g.cell_volume() * g.len() as f64 - g.volume()).abs() < 1e-12);
    }

    #[test]
    fn smallest_wavenumber() {
        let g = make_grid(3, 40.0, 64).unwrap();
        let kmin = g
            .axis_wavenumbers()
            .iter()
            .filter(|k| k.abs() > 0.0)
            .fold(f64::INFINITY, |m, k| m.min(k.abs()));
        assert!((kmin - 2.0 * PI / 40.0).abs() < 1e-15);
        assert!((kmin - 0.157).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(make_grid(2, 2.0 * PI, 7), Err(Error::Config(_))));
        assert!(make_grid(2, 2.0 * PI, 6).is_err());
        assert!(make_grid(4, 1.0, 16).is_err());
        assert!(make_grid(1, 1.0, 16).is_err());
        assert!(make_grid(2, -1.0, 16).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let g = make_grid(3, 1.0, 8).unwrap();
        for flat in [0, 1, 7, 8, 63, 64, 511] {
            let idx = g.multi_index(flat);
            assert_eq!(g.flat_index(&idx), flat);
            let m = g.signed_multi_index(flat);
            assert_eq!(g.flat_from_signed(&m), flat);
        }
    }

    #[test]
    fn mask_keeps_lower_two_thirds() {
        let g = make_grid(2, 1.0, 12).unwrap();
        // N/3 = 4: |m| <= 3 survives
        assert!(g.dealias_mask()[g.flat_from_signed(&[3, -3])]);
        assert!(!g.dealias_mask()[g.flat_from_signed(&[4, 0])]);
        assert!(!g.dealias_mask()[g.flat_from_signed(&[0, -6])]);
    }
}
