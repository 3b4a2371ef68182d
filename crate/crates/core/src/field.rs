//! Fourier-space field containers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::transform::{forward_real, forward_real_many, inverse_real, inverse_real_many};

/// A real scalar field stored as Fourier coefficients.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

/// A real `n`-component vector field stored as Fourier coefficients, one
/// array per component.
#[derive(Clone, Debug)]
pub struct SpectralVectorField {
    grid: Grid,
    components: Vec<Vec<Complex64>>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: grid.zeros(),
        }
    }

    pub fn from_coefficients(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Shape {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Builds a field from a multiplier `c(flat index)` evaluated on every mode.
    pub fn from_fn(grid: &Grid, f: impl Fn(usize) -> Complex64) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: (0..grid.len()).map(f).collect(),
        }
    }

    pub fn from_physical(grid: &Grid, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Shape {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs: forward_real(grid, samples),
        })
    }

    pub fn to_physical(&self) -> Vec<f64> {
        inverse_real(&self.grid, &self.coeffs)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Spatial mean (coefficient 0).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `L^2` norm squared via Parseval.
    pub fn l2_squared(&self) -> f64 {
        self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Largest violation of `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.grid, &self.coeffs)
    }
}

impl SpectralVectorField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            components: (0..grid.n_dims()).map(|_| grid.zeros()).collect(),
        }
    }

    pub fn from_components(grid: &Grid, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.len() != grid.n_dims() {
            return Err(Error::config(format!(
                "vector field needs {} components, got {}",
                grid.n_dims(),
                components.len()
            )));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::Shape {
                    expected: grid.len(),
                    got: c.len(),
                });
            }
        }
        Ok(Self {
            grid: grid.clone(),
            components,
        })
    }

    pub fn from_scalars(fields: Vec<ScalarField>) -> Result<Self> {
        let grid = fields
            .first()
            .map(|f| f.grid().clone())
            .ok_or_else(|| Error::config("no components"))?;
        for f in &fields {
            grid.ensure_same(f.grid())?;
        }
        Self::from_components(&grid, fields.into_iter().map(|f| f.coeffs).collect())
    }

    /// Samples per component, in grid order.
    pub fn from_physical(grid: &Grid, samples: &[Vec<f64>]) -> Result<Self> {
        if samples.len() != grid.n_dims() {
            return Err(Error::config(format!(
                "vector field needs {} components, got {}",
                grid.n_dims(),
                samples.len()
            )));
        }
        for s in samples {
            if s.len() != grid.len() {
                return Err(Error::Shape {
                    expected: grid.len(),
                    got: s.len(),
                });
            }
        }
        let refs: Vec<&[f64]> = samples.iter().map(|s| s.as_slice()).collect();
        let components = forward_real_many(grid, &refs);
        Ok(Self {
            grid: grid.clone(),
            components,
        })
    }

    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        let refs: Vec<&[Complex64]> = self.components.iter().map(|c| c.as_slice()).collect();
        inverse_real_many(&self.grid, &refs)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.components[i]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.components
    }

    pub fn component_field(&self, i: usize) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            coeffs: self.components[i].clone(),
        }
    }

    /// Coefficient vector at one mode.
    pub fn mode(&self, flat: usize) -> [Complex64; 3] {
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for (d, c) in self.components.iter().enumerate() {
            v[d] = c[flat];
        }
        v
    }

    pub fn set_mode(&mut self, flat: usize, v: &[Complex64]) {
        for (d, c) in self.components.iter_mut().enumerate() {
            c[flat] = v[d];
        }
    }

    /// `L^2` norm squared via Parseval.
    pub fn l2_squared(&self) -> f64 {
        self.grid.volume()
            * self
                .components
                .iter()
                .flat_map(|c| c.iter())
                .map(|c| c.norm_sqr())
                .sum::<f64>()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|z| z * s).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    /// `self + s * other`.
    pub fn combine(&self, other: &Self, s: f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let mut out = self.clone();
        out.axpy(s, other);
        Ok(out)
    }

    /// In-place `self += s * other`; grids are assumed equal.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * s;
            }
        }
    }

    /// Largest coefficient modulus over all components.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest coefficient difference to `other`.
    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.iter().zip(b))
            .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.components
            .iter()
            .map(|c| hermitian_defect(&self.grid, c))
            .fold(0.0, f64::max)
    }

    /// Zeroes every mode outside the 2/3-rule band.
    pub fn dealiased(&self) -> Self {
        let mut out = self.clone();
        apply_mask(&self.grid, &mut out.components);
        out
    }
}

pub(crate) fn apply_mask(grid: &Grid, comps: &mut [Vec<Complex64>]) {
    let keep = grid.dealias_mask();
    for c in comps.iter_mut() {
        for (z, &k) in c.iter_mut().zip(keep) {
            if !k {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }
}

fn hermitian_defect(grid: &Grid, c: &[Complex64]) -> f64 {
    let mut worst: f64 = 0.0;
    for flat in 0..grid.len() {
        let m = grid.signed_multi_index(flat);
        let neg = [-m[0], -m[1], -m[2]];
        let partner = grid.flat_from_signed(&neg);
        worst = worst.max((c[flat] - c[partner].conj()).norm());
    }
    worst
}

/// `L^q` norm of nonnegative point values by the cell-volume Riemann sum;
/// `q = f64::INFINITY` gives the maximum.
pub fn lq_of_magnitudes(magnitudes: &[f64], cell_volume: f64, q: f64) -> f64 {
    if q.is_infinite() {
        magnitudes.iter().fold(0.0, |m, &v| m.max(v.abs()))
    } else if q == 1.0 {
        cell_volume * magnitudes.iter().map(|v| v.abs()).sum::<f64>()
    } else if q == 2.0 {
        (cell_volume * magnitudes.iter().map(|v| v * v).sum::<f64>()).sqrt()
    } else {
        (cell_volume * magnitudes.iter().map(|v| v.abs().powf(q)).sum::<f64>()).powf(1.0 / q)
    }
}

/// Pointwise Euclidean magnitude of a set of component samples.
pub fn pointwise_magnitude(components: &[Vec<f64>]) -> Vec<f64> {
    let len = components.first().map_or(0, |c| c.len());
    (0..len)
        .map(|i| {
            components
                .iter()
                .map(|c| c[i] * c[i])
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}
