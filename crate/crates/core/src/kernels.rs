//! The linear propagator of the artificial-compressibility model and the heat
//! semigroup, both applied exactly in Fourier space.
//!
//! The propagator symbol is
//!
//! ```text
//! M(xi, t) = exp(-t|xi|^2) * (I - Q(xi) * (1 - exp(-t|xi|^2/eps)))
//!          = P(xi) exp(-t|xi|^2) + Q(xi) exp(-t(1 + 1/eps)|xi|^2)
//! ```
//!
//! with `Q = xi xi^T / |xi|^2` and `P = I - Q`. The factor
//! `Q (1 - exp(-r))`, `r = t|xi|^2/eps`, is evaluated as
//! `(t/eps) xi xi^T (1 - exp(-r))/r`, which is smooth through `xi = 0`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{lq_of_magnitudes, ScalarField, SpectralVectorField};
use crate::grid::Grid;

/// Below this argument `(1 - exp(-r))/r` is summed as a Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// `(1 - exp(-r)) / r`, equal to 1 at `r = 0`.
pub fn relaxation_factor(r: f64) -> f64 {
    if r.abs() < SERIES_THRESHOLD {
        1.0 - r / 2.0 + r * r / 6.0 - r * r * r / 24.0
    } else {
        -(-r).exp_m1() / r
    }
}

fn check_args(t: f64, eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(format!("t must be nonnegative, got {t}")));
    }
    Ok(())
}

/// The symbol as an `n x n` matrix for an arbitrary real wavevector.
pub fn m_epsilon_symbol(xi: &[f64], t: f64, eps: f64) -> Result<DMatrix<f64>> {
    check_args(t, eps)?;
    let n = xi.len();
    let xi2: f64 = xi.iter().map(|x| x * x).sum();
    let heat = (-t * xi2).exp();
    let coupling = (t / eps) * relaxation_factor(t * xi2 / eps);
    Ok(DMatrix::from_fn(n, n, |k, l| {
        let delta = if k == l { 1.0 } else { 0.0 };
        heat * (delta - coupling * xi[k] * xi[l])
    }))
}

/// Per-mode coefficients `(heat, coupling)` such that the propagated vector is
/// `heat * (v - coupling * dk (dk . v))`.
#[inline]
fn mode_factors(k2: f64, dk2: f64, t: f64, eps: f64) -> (f64, f64) {
    let heat = (-t * k2).exp();
    if dk2 == 0.0 {
        return (heat, 0.0);
    }
    let r = t * k2 / eps;
    let coupling = if dk2 == k2 {
        (t / eps) * relaxation_factor(r)
    } else {
        // Nyquist-touching modes: the projector direction is the derivative
        // wavevector, the decay rates use the full one.
        -(-r).exp_m1() / dk2
    };
    (heat, coupling)
}

/// `M_eps(t) u` by per-wavevector matrix-vector products.
pub fn apply_m_epsilon(u: &SpectralVectorField, t: f64, eps: f64) -> Result<SpectralVectorField> {
    check_args(t, eps)?;
    let grid = u.grid();
    let n = grid.n_dims();
    let ksq = grid.k_squared();
    let mut out = u.clone();
    for flat in 0..grid.len() {
        let dk = grid.derivative_wavevector(flat);
        let dk2: f64 = dk.iter().map(|x| x * x).sum();
        let (heat, coupling) = mode_factors(ksq[flat], dk2, t, eps);
        let v = u.mode(flat);
        let mut dot = Complex64::new(0.0, 0.0);
        for d in 0..n {
            dot += dk[d] * v[d];
        }
        let mut w = [Complex64::new(0.0, 0.0); 3];
        for d in 0..n {
            w[d] = heat * (v[d] - coupling * dk[d] * dot);
        }
        out.set_mode(flat, &w[..n]);
    }
    Ok(out)
}

/// Coefficient arrays that a Fourier multiplier can act on.
pub trait SpectralArrays: Clone {
    fn grid(&self) -> &Grid;
    fn arrays_mut(&mut self) -> Vec<&mut [Complex64]>;
}

impl SpectralArrays for ScalarField {
    fn grid(&self) -> &Grid {
        ScalarField::grid(self)
    }

    fn arrays_mut(&mut self) -> Vec<&mut [Complex64]> {
        vec![self.coefficients_mut()]
    }
}

impl SpectralArrays for SpectralVectorField {
    fn grid(&self) -> &Grid {
        SpectralVectorField::grid(self)
    }

    fn arrays_mut(&mut self) -> Vec<&mut [Complex64]> {
        self.components_mut().iter_mut().map(|c| c.as_mut_slice()).collect()
    }
}

/// Heat semigroup `exp(t Delta)`.
pub fn apply_heat<F: SpectralArrays>(f: &F, t: f64) -> Result<F> {
    apply_heat_rate(f, t, 1.0)
}

/// `exp(rate * t * Delta)`; `rate = 1 + 1/eps` is the decay of `div u`.
pub fn apply_heat_rate<F: SpectralArrays>(f: &F, t: f64, rate: f64) -> Result<F> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("t must be nonnegative, got {t}")));
    }
    let mut out = f.clone();
    let grid = out.grid().clone();
    let factors: Vec<f64> = grid.k_squared().iter().map(|k2| (-rate * t * k2).exp()).collect();
    for arr in out.arrays_mut() {
        for (z, s) in arr.iter_mut().zip(&factors) {
            *z *= *s;
        }
    }
    Ok(out)
}

/// Solenoidal plus gradient decomposition of a vector field.
#[derive(Clone, Debug)]
pub struct HelmholtzSplit {
    pub solenoidal: SpectralVectorField,
    pub gradient_part: SpectralVectorField,
}

/// Splits `u` with the projector `Q = k k^T/|k|^2`; the zero mode goes to the
/// solenoidal part.
pub fn helmholtz(u: &SpectralVectorField) -> HelmholtzSplit {
    let grid = u.grid();
    let n = grid.n_dims();
    let mut sol = u.clone();
    let mut grad = SpectralVectorField::zeros(grid);
    for flat in 0..grid.len() {
        let dk = grid.derivative_wavevector(flat);
        let dk2: f64 = dk.iter().map(|x| x * x).sum();
        if dk2 == 0.0 {
            continue;
        }
        let v = u.mode(flat);
        let mut dot = Complex64::new(0.0, 0.0);
        for d in 0..n {
            dot += dk[d] * v[d];
        }
        let mut g = [Complex64::new(0.0, 0.0); 3];
        let mut s = [Complex64::new(0.0, 0.0); 3];
        for d in 0..n {
            g[d] = dk[d] * dot / dk2;
            s[d] = v[d] - g[d];
        }
        sol.set_mode(flat, &s[..n]);
        grad.set_mode(flat, &g[..n]);
    }
    HelmholtzSplit {
        solenoidal: sol,
        gradient_part: grad,
    }
}

/// Leray projection onto divergence-free fields.
pub fn leray_project(u: &SpectralVectorField) -> SpectralVectorField {
    helmholtz(u).solenoidal
}

/// Periodized heat kernel `E(., t)`: coefficients `exp(-t|k|^2)/L^n`.
pub fn heat_kernel_field(grid: &Grid, t: f64) -> Result<ScalarField> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("t must be nonnegative, got {t}")));
    }
    let vol = grid.volume();
    let ksq = grid.k_squared();
    Ok(ScalarField::from_fn(grid, |flat| {
        Complex64::new((-t * ksq[flat]).exp() / vol, 0.0)
    }))
}

/// The periodized propagator kernel `M_eps(., t)` as an `n x n` array of
/// scalar fields.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    grid: Grid,
    entries: Vec<Vec<ScalarField>>,
}

impl KernelMatrix {
    pub fn entry(&self, k: usize, l: usize) -> &ScalarField {
        &self.entries[k][l]
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Physical samples of every entry, `[k][l][point]`.
    pub fn samples(&self) -> Vec<Vec<Vec<f64>>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.to_physical()).collect())
            .collect()
    }

    /// `L^q` norm of the pointwise Frobenius norm `|M(x)|_F`.
    pub fn lq_norm(&self, q: f64) -> f64 {
        let samples = self.samples();
        let len = self.grid.len();
        let mags: Vec<f64> = (0..len)
            .map(|p| {
                samples
                    .iter()
                    .flat_map(|row| row.iter())
                    .map(|s| s[p] * s[p])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        lq_of_magnitudes(&mags, self.grid.cell_volume(), q)
    }

    /// `int M(x) dx` entrywise.
    pub fn integral(&self) -> DMatrix<f64> {
        let n = self.entries.len();
        let vol = self.grid.volume();
        DMatrix::from_fn(n, n, |k, l| vol * self.entries[k][l].mean())
    }
}

/// Inverse transform of the symbol. Only defined for `t > 0`.
pub fn materialize_kernel(grid: &Grid, t: f64, eps: f64) -> Result<KernelMatrix> {
    check_args(t, eps)?;
    if t == 0.0 {
        return Err(Error::domain(
            "the kernel at t = 0 is a distribution, not a sampled field",
        ));
    }
    let n = grid.n_dims();
    let vol = grid.volume();
    let ksq = grid.k_squared();
    let mut coeffs = vec![vec![grid.zeros(); n]; n];
    for flat in 0..grid.len() {
        let dk = grid.derivative_wavevector(flat);
        let dk2: f64 = dk.iter().map(|x| x * x).sum();
        let (heat, coupling) = mode_factors(ksq[flat], dk2, t, eps);
        for k in 0..n {
            for l in 0..n {
                let delta = if k == l { 1.0 } else { 0.0 };
                coeffs[k][l][flat] =
                    Complex64::new(heat * (delta - coupling * dk[k] * dk[l]) / vol, 0.0);
            }
        }
    }
    let entries = coeffs
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| ScalarField::from_coefficients(grid, c).expect("grid-sized"))
                .collect()
        })
        .collect();
    Ok(KernelMatrix {
        grid: grid.clone(),
        entries,
    })
}
