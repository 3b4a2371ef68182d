//! Homogeneous terms of the Picard expansion of the mild solution.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{apply_mask, SpectralVectorField};
use crate::grid::Grid;
use crate::kernels::apply_m_epsilon;
use crate::spectral::PhysicalJet;
use crate::transform::forward_real_many;

use super::stepper::{evaluate_nonlinearity, interval_weights, mode_of, ModeGeometry, ModeWeights, Model};

pub const MAX_PICARD_ORDER: usize = 6;

/// `T_1 .. T_K` on a time mesh; `terms[k - 1][m]` is `T_k(times[m])`.
#[derive(Clone, Debug)]
pub struct PicardTerms {
    pub times: Vec<f64>,
    pub terms: Vec<Vec<SpectralVectorField>>,
}

impl PicardTerms {
    pub fn order(&self) -> usize {
        self.terms.len()
    }

    pub fn term(&self, k: usize, m: usize) -> &SpectralVectorField {
        &self.terms[k - 1][m]
    }

    /// `T_1 + ... + T_k` at mesh index `m`.
    pub fn partial_sum(&self, k: usize, m: usize) -> SpectralVectorField {
        let mut acc = self.terms[0][m].clone();
        for j in 1..k {
            acc.axpy(1.0, &self.terms[j][m]);
        }
        acc
    }
}

/// Dealiased `u . grad v + u div v / 2`.
pub fn bilinear(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<SpectralVectorField> {
    u.grid().ensure_same(v.grid())?;
    let grid = u.grid();
    let n = grid.n_dims();
    let um = u.dealiased().to_physical();
    let vm = v.dealiased();
    let jet = PhysicalJet::from_coefficients(grid, vm.components());
    let div = jet.divergence();
    let products: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..grid.len())
                .map(|p| {
                    let mut acc = 0.5 * um[i][p] * div[p];
                    for j in 0..n {
                        acc += um[j][p] * jet.grads[i][j][p];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let refs: Vec<&[f64]> = products.iter().map(|s| s.as_slice()).collect();
    let mut comps = forward_real_many(grid, &refs);
    apply_mask(grid, &mut comps);
    SpectralVectorField::from_components(grid, comps)
}

fn check_mesh(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::config("the time mesh must start at 0"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("the time mesh must be strictly increasing"));
    }
    Ok(())
}

/// Weight tables for each distinct interval length of the mesh.
struct MeshWeights {
    table: Vec<(f64, Vec<ModeWeights>)>,
}

impl MeshWeights {
    fn new(grid: &Grid, eps: f64, times: &[f64]) -> Self {
        let mut table: Vec<(f64, Vec<ModeWeights>)> = Vec::new();
        for w in times.windows(2) {
            let h = w[1] - w[0];
            if !table.iter().any(|(x, _)| *x == h) {
                table.push((h, interval_weights(grid, Model::Temam, eps, h)));
            }
        }
        Self { table }
    }

    fn get(&self, h: f64) -> &[ModeWeights] {
        &self.table.iter().find(|(x, _)| *x == h).expect("interval cached").1
    }
}

/// `E(h) x + h (phi1 - phi2) f0 + h phi2 f1`, mode by mode.
fn trapezoid_update(
    geom: &ModeGeometry,
    n: usize,
    w: &[ModeWeights],
    h: f64,
    x: &SpectralVectorField,
    f0: &SpectralVectorField,
    f1: &SpectralVectorField,
) -> SpectralVectorField {
    let mut out = SpectralVectorField::zeros(x.grid());
    for flat in 0..x.grid().len() {
        let ww = w[flat];
        let (xp, xq) = geom.split(flat, &x.mode(flat), n);
        let (ap, aq) = geom.split(flat, &mode_of(f0.components(), flat, n), n);
        let (bp, bq) = geom.split(flat, &mode_of(f1.components(), flat, n), n);
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for d in 0..n {
            v[d] = xp[d] * ww.s[0]
                + xq[d] * ww.q[0]
                + (ap[d] * (ww.s[1] - ww.s[2]) + aq[d] * (ww.q[1] - ww.q[2])) * h
                + (bp[d] * ww.s[2] + bq[d] * ww.q[2]) * h;
        }
        out.set_mode(flat, &v[..n]);
    }
    out
}

/// Picard terms `T_1 .. T_K` of the mild formulation on the mesh `times`.
/// The Duhamel integrals use the same exponential trapezoid rule as the
/// fixed-point reference [`picard_reference`].
pub fn picard_terms(u0: &SpectralVectorField, k_max: usize, times: &[f64], eps: f64) -> Result<PicardTerms> {
    if k_max == 0 || k_max > MAX_PICARD_ORDER {
        return Err(Error::config(format!("K must lie in 1..={MAX_PICARD_ORDER}, got {k_max}")));
    }
    check_mesh(times)?;
    let grid = u0.grid();
    let n = grid.n_dims();
    let geom = ModeGeometry::new(grid);
    let weights = MeshWeights::new(grid, eps, times);

    let u0m = u0.dealiased();
    let first: Vec<SpectralVectorField> = times
        .iter()
        .map(|&t| apply_m_epsilon(&u0m, t, eps))
        .collect::<Result<_>>()?;
    let mut terms = vec![first];

    for k in 2..=k_max {
        let forcing: Vec<SpectralVectorField> = (0..times.len())
            .map(|m| {
                let mut acc = SpectralVectorField::zeros(grid);
                for l in 1..k {
                    acc.axpy(1.0, &bilinear(&terms[l - 1][m], &terms[k - l - 1][m])?);
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut duhamel = vec![SpectralVectorField::zeros(grid)];
        for m in 0..times.len() - 1 {
            let h = times[m + 1] - times[m];
            let next = trapezoid_update(&geom, n, weights.get(h), h, &duhamel[m], &forcing[m], &forcing[m + 1]);
            duhamel.push(next);
        }
        terms.push(duhamel.into_iter().map(|d| d.scaled(-1.0)).collect());
    }
    Ok(PicardTerms {
        times: times.to_vec(),
        terms,
    })
}

/// Solution of the discrete mild equation on the mesh, each interval solved
/// by fixed-point iteration to relative tolerance `tol`.
pub fn picard_reference(u0: &SpectralVectorField, times: &[f64], eps: f64, tol: f64) -> Result<Vec<SpectralVectorField>> {
    check_mesh(times)?;
    let grid = u0.grid();
    let n = grid.n_dims();
    let geom = ModeGeometry::new(grid);
    let weights = MeshWeights::new(grid, eps, times);
    let nl = |u: &SpectralVectorField| -> SpectralVectorField {
        let ev = evaluate_nonlinearity(grid, &geom, u.dealiased().components(), Model::Temam, true, false);
        SpectralVectorField::from_components(grid, ev.coeffs).expect("n components")
    };
    let zero = SpectralVectorField::zeros(grid);

    let mut out = vec![u0.dealiased()];
    for m in 0..times.len() - 1 {
        let h = times[m + 1] - times[m];
        let w = weights.get(h);
        let cur = &out[m];
        let f0 = nl(cur).scaled(-1.0);
        let base = trapezoid_update(&geom, n, w, h, cur, &f0, &zero);
        let mut iterate = trapezoid_update(&geom, n, w, h, cur, &f0, &f0);
        let mut converged = false;
        for _ in 0..200 {
            let f1 = nl(&iterate).scaled(-1.0);
            let next = trapezoid_update(&geom, n, w, h, &zero, &zero, &f1).add(&base)?;
            let change = next.max_abs_difference(&iterate);
            let scale = next.max_abs_coefficient().max(f64::MIN_POSITIVE);
            iterate = next;
            if change <= tol * scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Degenerate(format!(
                "fixed-point iteration did not converge on [{}, {}]",
                times[m],
                times[m + 1]
            )));
        }
        out.push(iterate);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::trajectory::tests::bump;
    use crate::spectral::mean_integral;

    #[test]
    fn order_is_checked() {
        let g = Grid::new(2, 20.0, 16).unwrap();
        let u = SpectralVectorField::zeros(&g);
        assert!(picard_terms(&u, 0, &[0.0, 1.0], 1.0).is_err());
        assert!(picard_terms(&u, 7, &[0.0, 1.0], 1.0).is_err());
        assert!(picard_terms(&u, 2, &[0.5, 1.0], 1.0).is_err());
    }

    #[test]
    fn low_order_terms_have_no_mass_and_the_series_converges() {
        let g = Grid::new(2, 24.0, 32).unwrap();
        let u0 = bump(&g, 0.3, 0.0);
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let terms = picard_terms(&u0, 5, &times, 1.0).unwrap();
        for m in 0..times.len() {
            for k in 1..=2 {
                assert!(mean_integral(terms.term(k, m)).iter().all(|v| v.abs() < 1e-12));
            }
        }
        let reference = picard_reference(&u0, &times, 1.0, 1e-14).unwrap();
        let last = times.len() - 1;
        let errs: Vec<f64> = (1..=5)
            .map(|k| terms.partial_sum(k, last).sub(&reference[last]).unwrap().l2_squared().sqrt())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < 0.5 * w[0], "{errs:?}");
        }
    }
}
