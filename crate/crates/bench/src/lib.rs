//! Shared inputs for the benchmarks.

use acsim_core::kernels::leray_project;
use acsim_core::{Grid, SpectralVectorField};

/// A smooth, localized, divergence-free field of unit-order amplitude.
pub fn smooth_field(grid: &Grid) -> SpectralVectorField {
    let n = grid.n_dims();
    let samples: Vec<Vec<f64>> = (0..n)
        .map(|d| {
            (0..grid.len())
                .map(|flat| {
                    let x = grid.centered_position(flat);
                    let r2: f64 = x[..n].iter().map(|v| v * v).sum();
                    x[(d + 1) % n] * (-r2 / 4.0).exp()
                })
                .collect()
        })
        .collect();
    leray_project(&SpectralVectorField::from_physical(grid, &samples).expect("n components"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use acsim_core::spectral::divergence;

    #[test]
    fn bench_field_is_solenoidal_and_nonzero() {
        let g = Grid::new(2, 20.0, 32).unwrap();
        let u = smooth_field(&g);
        assert!(u.max_abs_coefficient() > 1e-3);
        assert!(divergence(&u).coefficients().iter().all(|c| c.norm() < 1e-14));
    }
}
