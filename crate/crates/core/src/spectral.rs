//! Differential operators as Fourier multipliers, dealiased products and
//! physical-space norms.

use num_complex::Complex64;

use crate::error::Result;
use crate::field::{apply_mask, lq_of_magnitudes, pointwise_magnitude, ScalarField, SpectralVectorField};
use crate::grid::Grid;
use crate::transform::{forward_real_many, inverse_real_many};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Fields whose physical samples have a pointwise magnitude.
pub trait Sampled {
    fn grid(&self) -> &Grid;
    /// `|f(x)|` at every grid point (Euclidean norm for vector fields).
    fn magnitudes(&self) -> Vec<f64>;
}

impl Sampled for ScalarField {
    fn grid(&self) -> &Grid {
        ScalarField::grid(self)
    }

    fn magnitudes(&self) -> Vec<f64> {
        self.to_physical().into_iter().map(f64::abs).collect()
    }
}

impl Sampled for SpectralVectorField {
    fn grid(&self) -> &Grid {
        SpectralVectorField::grid(self)
    }

    fn magnitudes(&self) -> Vec<f64> {
        pointwise_magnitude(&self.to_physical())
    }
}

pub fn to_spectral(grid: &Grid, samples: &[Vec<f64>]) -> Result<SpectralVectorField> {
    SpectralVectorField::from_physical(grid, samples)
}

pub fn from_spectral(field: &SpectralVectorField) -> Vec<Vec<f64>> {
    field.to_physical()
}

/// Riemann-sum `L^q` norm; `q = f64::INFINITY` is the largest sample.
pub fn lq_norm<F: Sampled + ?Sized>(f: &F, q: f64) -> f64 {
    lq_of_magnitudes(&f.magnitudes(), f.grid().cell_volume(), q)
}

/// `int u dx = L^n * coefficient(0)` per component.
pub fn mean_integral(u: &SpectralVectorField) -> Vec<f64> {
    let vol = u.grid().volume();
    u.components().iter().map(|c| vol * c[0].re).collect()
}

pub fn gradient(f: &ScalarField) -> SpectralVectorField {
    let grid = f.grid();
    let comps = (0..grid.n_dims())
        .map(|d| {
            f.coefficients()
                .iter()
                .enumerate()
                .map(|(flat, &c)| I * grid.derivative_wavevector(flat)[d] * c)
                .collect()
        })
        .collect();
    SpectralVectorField::from_components(grid, comps).expect("gradient has n components")
}

pub fn divergence(u: &SpectralVectorField) -> ScalarField {
    let grid = u.grid();
    let coeffs = (0..grid.len())
        .map(|flat| {
            let k = grid.derivative_wavevector(flat);
            let mut acc = Complex64::new(0.0, 0.0);
            for (d, c) in u.components().iter().enumerate() {
                acc += I * k[d] * c[flat];
            }
            acc
        })
        .collect();
    ScalarField::from_coefficients(grid, coeffs).expect("same grid")
}

/// Multiplier `-|k|^2` (full wavevector table).
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let ksq = f.grid().k_squared();
    ScalarField::from_fn(f.grid(), |flat| -ksq[flat] * f.coefficients()[flat])
}

/// Derivative `d/dx_axis` of a coefficient array.
pub(crate) fn partial(grid: &Grid, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(flat, &c)| I * grid.derivative_wavevector(flat)[axis] * c)
        .collect()
}

/// Physical samples of a vector field and of all its first derivatives.
/// `grads[i][j]` holds `d_j u_i`.
pub(crate) struct PhysicalJet {
    pub values: Vec<Vec<f64>>,
    pub grads: Vec<Vec<Vec<f64>>>,
}

impl PhysicalJet {
    pub(crate) fn from_coefficients(grid: &Grid, comps: &[Vec<Complex64>]) -> Self {
        let n = grid.n_dims();
        let derivs: Vec<Vec<Complex64>> = comps
            .iter()
            .flat_map(|c| (0..n).map(move |j| partial(grid, c, j)))
            .collect();
        let jobs: Vec<&[Complex64]> = comps
            .iter()
            .map(|c| c.as_slice())
            .chain(derivs.iter().map(|c| c.as_slice()))
            .collect();
        let mut phys = inverse_real_many(grid, &jobs);
        let grads_flat = phys.split_off(n);
        let mut grads = Vec::with_capacity(n);
        let mut it = grads_flat.into_iter();
        for _ in 0..n {
            grads.push((0..n).map(|_| it.next().unwrap()).collect());
        }
        Self {
            values: phys,
            grads,
        }
    }

    pub(crate) fn divergence(&self) -> Vec<f64> {
        let n = self.values.len();
        let len = self.values[0].len();
        let mut div = vec![0.0; len];
        for i in 0..n {
            for (d, g) in div.iter_mut().zip(&self.grads[i][i]) {
                *d += g;
            }
        }
        div
    }
}

/// Dealiased `u . grad v`: the 2/3 mask is applied to both inputs and to the
/// physical-space product.
pub fn advect(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<SpectralVectorField> {
    u.grid().ensure_same(v.grid())?;
    let grid = u.grid();
    let n = grid.n_dims();
    let um = u.dealiased();
    let vm = v.dealiased();
    let uphys: Vec<Vec<f64>> = um.to_physical();
    let vjet = PhysicalJet::from_coefficients(grid, vm.components());
    let products: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..grid.len())
                .map(|p| (0..n).map(|j| uphys[j][p] * vjet.grads[i][j][p]).sum())
                .collect()
        })
        .collect();
    let refs: Vec<&[f64]> = products.iter().map(|s| s.as_slice()).collect();
    let mut comps = forward_real_many(grid, &refs);
    apply_mask(grid, &mut comps);
    SpectralVectorField::from_components(grid, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid2() -> Grid {
        Grid::new(2, 2.0 * PI, 16).unwrap()
    }

    fn sample_vec(grid: &Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> SpectralVectorField {
        let n = grid.n_dims();
        let mut comps = vec![vec![0.0; grid.len()]; n];
        for p in 0..grid.len() {
            let v = f(grid.position(p));
            for d in 0..n {
                comps[d][p] = v[d];
            }
        }
        SpectralVectorField::from_physical(grid, &comps).unwrap()
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let g = grid2();
        let f = ScalarField::from_physical(&g, &vec![3.5; g.len()]).unwrap();
        assert!((f.coefficients()[0].re - 3.5).abs() < 1e-14);
        for c in &f.coefficients()[1..] {
            assert!(c.norm() < 1e-14);
        }
    }

    #[test]
    fn cosine_has_two_half_coefficients() {
        let g = grid2();
        let s: Vec<f64> = (0..g.len())
            .map(|p| {
                let x = g.position(p);
                (2.0 * x[0] + x[1]).cos()
            })
            .collect();
        let f = ScalarField::from_physical(&g, &s).unwrap();
        let plus = g.flat_from_signed(&[2, 1]);
        let minus = g.flat_from_signed(&[-2, -1]);
        for (flat, c) in f.coefficients().iter().enumerate() {
            let expect = if flat == plus || flat == minus { 0.5 } else { 0.0 };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn shear_flow_is_steady_for_advection() {
        let g = grid2();
        let u = sample_vec(&g, |x| [x[1].sin(), 0.0, 0.0]);
        assert!(divergence(&u).coefficients().iter().all(|c| c.norm() < 1e-14));
        let a = advect(&u, &u).unwrap();
        assert!(a.max_abs_coefficient() < 1e-14);
    }

    #[test]
    fn compressive_self_advection() {
        // u = (sin x1, 0): u.grad u + u div u / 2 = (3/4 sin 2 x1, 0)
        let g = grid2();
        let u = sample_vec(&g, |x| [x[0].sin(), 0.0, 0.0]);
        let adv = advect(&u, &u).unwrap().to_physical();
        let div = divergence(&u).to_physical();
        let up = u.to_physical();
        for p in 0..g.len() {
            let x = g.position(p);
            let f1 = adv[0][p] + 0.5 * up[0][p] * div[p];
            assert!((f1 - 0.75 * (2.0 * x[0]).sin()).abs() < 1e-13);
            assert!((adv[1][p] + 0.5 * up[1][p] * div[p]).abs() < 1e-13);
        }
    }

    #[test]
    fn div_grad_is_laplacian() {
        let g = grid2();
        let s: Vec<f64> = (0..g.len())
            .map(|p| {
                let x = g.position(p);
                (3.0 * x[0]).sin() * x[1].cos() + (x[0] - 2.0 * x[1]).cos()
            })
            .collect();
        let f = ScalarField::from_physical(&g, &s).unwrap();
        let lhs = divergence(&gradient(&f));
        let rhs = laplacian(&f);
        for (a, b) in lhs.coefficients().iter().zip(rhs.coefficients()) {
            assert!((a - b).norm() < 1e-13);
        }
        // the gradient of anything has zero mean
        assert!(mean_integral(&gradient(&f)).iter().all(|m| m.abs() < 1e-13));
    }

    #[test]
    fn lq_norms_of_a_constant() {
        let g = Grid::new(2, 2.0, 8).unwrap();
        let f = ScalarField::from_physical(&g, &vec![-2.0; g.len()]).unwrap();
        assert!((lq_norm(&f, 1.0) - 8.0).abs() < 1e-12);
        assert!((lq_norm(&f, 2.0) - 4.0).abs() < 1e-12);
        assert!((lq_norm(&f, 3.0) - (8.0f64 * 4.0).powf(1.0 / 3.0)).abs() < 1e-12);
        assert!((lq_norm(&f, f64::INFINITY) - 2.0).abs() < 1e-12);
    }
}
