//! Initial fields named in a configuration.

use num_complex::Complex64;

use acsim_core::example3d::build_example_datum;
use acsim_core::io::read_snapshot;
use acsim_core::{Grid, SpectralVectorField};

use crate::config::DatumSpec;
use crate::error::CliError;

/// `eta (k2^2, -k1 k2, 0) exp(-width |k|^2) / L^n`, using the grid's
/// derivative wavevectors so the field is discretely divergence-free.
pub fn curl_gaussian(grid: &Grid, eta: f64, width: f64) -> SpectralVectorField {
    let n = grid.n_dims();
    let norm = eta / grid.volume();
    let ksq = grid.k_squared();
    let mut comps = vec![grid.zeros(); n];
    for flat in 0..grid.len() {
        let k = grid.derivative_wavevector(flat);
        let g = norm * (-width * ksq[flat]).exp();
        comps[0][flat] = Complex64::new(k[1] * k[1] * g, 0.0);
        comps[1][flat] = Complex64::new(-k[0] * k[1] * g, 0.0);
    }
    SpectralVectorField::from_components(grid, comps).expect("n components")
}

/// `eta i k exp(-width |k|^2) / L^n`: the gradient of a Gaussian.
pub fn gradient_gaussian(grid: &Grid, eta: f64, width: f64) -> SpectralVectorField {
    let n = grid.n_dims();
    let norm = eta / grid.volume();
    let ksq = grid.k_squared();
    let mut comps = vec![grid.zeros(); n];
    for flat in 0..grid.len() {
        let k = grid.derivative_wavevector(flat);
        let g = norm * (-width * ksq[flat]).exp();
        for d in 0..n {
            comps[d][flat] = Complex64::new(0.0, k[d] * g);
        }
    }
    SpectralVectorField::from_components(grid, comps).expect("n components")
}

pub fn build_datum(grid: &Grid, spec: &DatumSpec) -> Result<SpectralVectorField, CliError> {
    Ok(match spec {
        DatumSpec::Zero => SpectralVectorField::zeros(grid),
        DatumSpec::CurlGaussian { eta, width } => curl_gaussian(grid, *eta, *width),
        DatumSpec::GradientGaussian { eta, width } => gradient_gaussian(grid, *eta, *width),
        DatumSpec::Example3d { eta } => build_example_datum(grid, *eta)?,
        DatumSpec::Snapshot { path } => {
            let (field, meta) = read_snapshot(path)?;
            if field.grid() != grid {
                return Err(CliError::invalid(
                    "datum.path",
                    format!(
                        "snapshot grid (n={}, N={}, L={}) differs from the configured grid",
                        meta.n_dims, meta.resolution, meta.box_length
                    ),
                ));
            }
            field
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use acsim_core::spectral::{divergence, mean_integral};

    #[test]
    fn curl_datum_is_solenoidal_and_matches_the_example() {
        let g = Grid::new(3, 24.0, 16).unwrap();
        let u = curl_gaussian(&g, 0.7, 1.0);
        assert!(divergence(&u).coefficients().iter().all(|c| c.norm() < 1e-18));
        let v = build_example_datum(&g, 0.7).unwrap();
        assert!(u.max_abs_difference(&v) < 1e-18);
    }

    #[test]
    fn gradient_datum_is_real_with_zero_mean() {
        let g = Grid::new(2, 20.0, 16).unwrap();
        let u = gradient_gaussian(&g, 1.0, 0.5);
        assert!(u.hermitian_defect() < 1e-18);
        assert!(mean_integral(&u).iter().all(|m| m.abs() < 1e-15));
        assert!(divergence(&u).coefficients().iter().any(|c| c.norm() > 0.0));
    }
}
