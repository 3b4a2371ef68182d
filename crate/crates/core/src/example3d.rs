//! The explicit three-dimensional datum `eta (-d2^2 E(x,1), d1 d2 E(x,1), 0)`
//! and the leading cubic term of its limiting mean.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, SpectralVectorField};
use crate::grid::Grid;
use crate::kernels::apply_heat;
use crate::quadrature::{gauss_legendre, gauss_legendre_on, integrate, QuadratureResult};
use crate::spectral::{divergence, gradient};

/// Prefactor of the closed-form transform of `div(v . grad v)`.
pub fn kappa() -> f64 {
    2f64.sqrt() / (512.0 * PI.powf(1.5))
}

/// Factor turning the `(s, tau)` integral into `int T_3 dx` under the
/// unitary-free convention `f^(xi) = int f e^{-i x.xi} dx`: one half from the
/// symmetrized bilinear form and `(2 pi)^-3` from Plancherel.
pub fn plancherel_factor() -> f64 {
    0.5 / (2.0 * PI).powi(3)
}

/// Largest allowed Gaussian tail `exp(-(L/2)^2 / 4)` at the box edge.
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExampleParams {
    pub eta: f64,
    pub eps: f64,
    pub t_horizon: f64,
}

/// Smallest box length meeting the tail tolerance.
pub fn minimal_box_length() -> f64 {
    2.0 * (4.0 * (1.0 / TAIL_TOLERANCE).ln()).sqrt()
}

/// `eta (k2^2, -k1 k2, 0) exp(-|k|^2) / L^3` per mode: the exact periodized
/// datum, divergence-free to round-off with the grid's derivative table.
pub fn build_example_datum(grid: &Grid, eta: f64) -> Result<SpectralVectorField> {
    if grid.n_dims() != 3 {
        return Err(Error::config("the example datum is three-dimensional"));
    }
    let l = grid.box_length();
    let tail = (-(l / 2.0).powi(2) / 4.0).exp();
    if tail >= TAIL_TOLERANCE {
        return Err(Error::config(format!(
            "box length {l} leaves a Gaussian tail {tail:e} at the edge; use L >= {:.2}",
            minimal_box_length()
        )));
    }
    let norm = eta / grid.volume();
    let ksq = grid.k_squared();
    let mut comps = vec![grid.zeros(), grid.zeros(), grid.zeros()];
    for flat in 0..grid.len() {
        let k = grid.derivative_wavevector(flat);
        let g = norm * (-ksq[flat]).exp();
        comps[0][flat] = Complex64::new(k[1] * k[1] * g, 0.0);
        comps[1][flat] = Complex64::new(-k[0] * k[1] * g, 0.0);
    }
    SpectralVectorField::from_components(grid, comps)
}

/// Closed-form transform of `div(v1 . grad v1)(tau)` for the unit datum.
pub fn rhs_symbol(xi: [f64; 3], tau: f64) -> f64 {
    let (x1, x2) = (xi[0] * xi[0], xi[1] * xi[1]);
    let xi2 = x1 + x2 + xi[2] * xi[2];
    let poly = (x1 * x2 + x2 * x2) * (tau + 1.0) - 3.0 * x1 - x2;
    kappa() * poly * (-(tau + 1.0) * xi2 / 2.0).exp() / (tau + 1.0).powf(3.5)
}

/// `int exp(-lambda |xi|^2) xi2^2 ((xi1^2 xi2^2 + xi2^4)(tau+1) - 3 xi1^2 - xi2^2) d xi`.
pub fn xi_integral_closed_form(lambda: f64, tau: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok(-(3.0 * PI.powf(1.5) / (4.0 * lambda.powf(4.5))) * (2.0 * lambda - 3.0 * tau - 3.0))
}

/// Integrand over `0 < tau < s`; nonnegative there.
pub fn t3_integrand(s: f64, tau: f64, eps: f64) -> f64 {
    let lam = (s - tau) * (1.0 + 1.0 / eps) + s + (tau + 3.0) / 2.0;
    kappa() * (3.0 * PI.powf(1.5) / 4.0) * (2.0 * lam - 3.0 * tau - 3.0)
        / (lam.powf(4.5) * (tau + 1.0).powf(3.5))
}

const BUDGET: usize = 2_000_000;

fn check_t3_args(t: f64, eps: f64, tol: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("t must be nonnegative, got {t}")));
    }
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tol must be positive, got {tol}")));
    }
    Ok(())
}

/// Integral of [`t3_integrand`] over `a < s < b`, `0 < tau < s`, by nested
/// adaptive Gauss-Kronrod.
fn t3_strip(a: f64, b: f64, eps: f64, tol: f64) -> Result<QuadratureResult> {
    let inner_tol = 0.1 * tol / (b - a).max(1.0);
    let inner_evals = std::cell::Cell::new(0usize);
    let inner_err = std::cell::Cell::new(0.0f64);
    let failure = std::cell::RefCell::new(None);
    let outer = integrate(
        |s| match integrate(|tau| t3_integrand(s, tau, eps), 0.0, s, inner_tol, 1e-14, BUDGET) {
            Ok(r) => {
                inner_evals.set(inner_evals.get() + r.evaluations);
                inner_err.set(inner_err.get().max(r.abs_error_estimate));
                r.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        0.5 * tol,
        1e-14,
        BUDGET,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(QuadratureResult {
        value: outer.value,
        abs_error_estimate: outer.abs_error_estimate + (b - a) * inner_err.get(),
        evaluations: outer.evaluations + inner_evals.get(),
    })
}

/// First component of `int T_3(v1)(t) dx` up to the constant
/// [`plancherel_factor`] times the calibration ratio: the integral of
/// [`t3_integrand`] over `0 < tau < s < t`.
pub fn t3_first_component(t: f64, eps: f64, tol: f64) -> Result<QuadratureResult> {
    check_t3_args(t, eps, tol)?;
    if t == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    t3_strip(0.0, t, eps, tol)
}

/// Panel breakpoints `0, 1/4, 1/2, 1, 2, 4, ...` clipped to `[0, t]`.
fn geometric_breaks(t: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = 0.25;
    while x < t {
        b.push(x);
        x *= 2.0;
    }
    b.push(t);
    b
}

/// The same integral by a fixed tensor product of Gauss-Legendre rules on
/// geometrically graded panels in `s` and `tau`.
pub fn t3_first_component_tensor(t: f64, eps: f64, order: usize) -> Result<f64> {
    check_t3_args(t, eps, 1.0)?;
    if order == 0 {
        return Err(Error::domain("order must be positive"));
    }
    let rule = gauss_legendre(order);
    let sb = geometric_breaks(t);
    let mut total = 0.0;
    for w in sb.windows(2) {
        total += gauss_legendre_on(
            |s| {
                geometric_breaks(s)
                    .windows(2)
                    .map(|v| gauss_legendre_on(|tau| t3_integrand(s, tau, eps), v[0], v[1], &rule))
                    .sum()
            },
            w[0],
            w[1],
            &rule,
        );
    }
    Ok(total)
}

/// `lim_{t -> oo}` of [`t3_first_component`]: strips `[T, 2T]` are added
/// until the geometric tail estimate from the last two strips is below
/// `tol`; the estimate is included in the value.
pub fn t3_limit(eps: f64, tol: f64) -> Result<QuadratureResult> {
    check_t3_args(1.0, eps, tol)?;
    let mut t = 16.0;
    let mut acc = t3_first_component(t, eps, 0.1 * tol)?;
    let mut prev_inc: Option<f64> = None;
    for _ in 0..40 {
        let strip = t3_strip(t, 2.0 * t, eps, 0.1 * tol)?;
        acc.value += strip.value;
        acc.abs_error_estimate += strip.abs_error_estimate;
        acc.evaluations += strip.evaluations;
        t *= 2.0;
        let inc = strip.value;
        if let Some(p) = prev_inc {
            let ratio = inc / p;
            if ratio > 0.0 && ratio < 1.0 {
                let tail = inc * ratio / (1.0 - ratio);
                if tail < tol {
                    acc.value += tail;
                    acc.abs_error_estimate += tail;
                    return Ok(acc);
                }
            }
        }
        prev_inc = Some(inc);
    }
    Err(Error::Quadrature {
        tol,
        estimate: prev_inc.unwrap_or(f64::NAN),
        evaluations: acc.evaluations,
    })
}

/// Ratio of [`rhs_symbol`] to the pseudospectral transform of
/// `div(v1 . grad v1)` built from [`build_example_datum`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Calibration {
    /// Median ratio over the significant modes.
    pub ratio: f64,
    /// `max |ratio_k / ratio - 1|` over those modes.
    pub spread: f64,
    pub modes_used: usize,
    pub tau: f64,
}

/// Unmasked `div(v . grad v)`; exact on modes the grid fully resolves.
fn resolved_divergence_of_advection(v: &SpectralVectorField) -> Result<ScalarField> {
    let grid = v.grid();
    let n = grid.n_dims();
    let vphys = v.to_physical();
    let grads: Vec<Vec<Vec<f64>>> = (0..n).map(|i| gradient(&v.component_field(i)).to_physical()).collect();
    let products: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..grid.len()).map(|p| (0..n).map(|j| vphys[j][p] * grads[i][j][p]).sum()).collect())
        .collect();
    Ok(divergence(&SpectralVectorField::from_physical(grid, &products)?))
}

/// Compares the closed form with the grid transform `L^3 c_k` on every mode
/// whose symbol exceeds `threshold` times the largest one. The product is
/// formed on a 3/2-oversampled grid so that neither truncation nor aliasing
/// reaches the compared modes.
pub fn calibrate_rhs(grid: &Grid, tau: f64, threshold: f64) -> Result<Calibration> {
    let fine_n = (3 * grid.resolution() / 2 + 1) & !1;
    let fine = Grid::new(grid.n_dims(), grid.box_length(), fine_n)?;
    let v1 = apply_heat(&build_example_datum(&fine, 1.0)?, tau)?;
    let div = resolved_divergence_of_advection(&v1)?;
    let vol = fine.volume();
    let mut pairs = Vec::new();
    let mut peak: f64 = 0.0;
    for flat in 0..fine.len() {
        if fine.derivative_wavevector(flat) != fine.wavevector(flat) {
            continue;
        }
        let k = fine.wavevector(flat);
        let sym = rhs_symbol(k, tau);
        peak = peak.max(sym.abs());
        pairs.push((sym, vol * div.coefficients()[flat]));
    }
    let mut ratios: Vec<f64> = pairs
        .iter()
        .filter(|(s, _)| s.abs() > threshold * peak)
        .map(|(s, c)| s / c.re)
        .collect();
    if ratios.is_empty() {
        return Err(Error::Degenerate("no significant modes for calibration".into()));
    }
    ratios.sort_by(f64::total_cmp);
    let ratio = ratios[ratios.len() / 2];
    let spread = ratios.iter().fold(0.0f64, |m, r| m.max((r / ratio - 1.0).abs()));
    Ok(Calibration {
        ratio,
        spread,
        modes_used: ratios.len(),
        tau,
    })
}

/// `(eta^3 L3 c, 0, 0)` with `c = ratio * plancherel_factor()`.
pub fn perturbative_prediction(eta: f64, l3: f64, calibration_ratio: f64) -> [f64; 3] {
    [eta.powi(3) * l3 * calibration_ratio * plancherel_factor(), 0.0, 0.0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::mean_integral;

    #[test]
    fn calibration_is_constant_across_modes() {
        let g = Grid::new(3, 24.0, 32).unwrap();
        let c = calibrate_rhs(&g, 1.0, 1e-6).unwrap();
        assert!(c.spread < 1e-8, "{c:?}");
        assert!((c.ratio - 1.0).abs() < 1e-12);
        assert!(c.modes_used > 1000);
    }

    #[test]
    fn datum_is_solenoidal_with_zero_mean() {
        let g = Grid::new(3, 24.0, 16).unwrap();
        let u = build_example_datum(&g, 0.3).unwrap();
        assert!(divergence(&u).coefficients().iter().all(|c| c.norm() < 1e-18));
        assert!(mean_integral(&u).iter().all(|m| m.abs() < 1e-15));
        assert!(u.component(2).iter().all(|c| c.norm() == 0.0));
        assert!(u.hermitian_defect() < 1e-18);
    }

    #[test]
    fn small_box_is_rejected() {
        let g = Grid::new(3, 20.0, 16).unwrap();
        assert!(matches!(build_example_datum(&g, 1.0), Err(Error::Config(_))));
        assert!(minimal_box_length() > 21.0 && minimal_box_length() < 21.1);
    }

    #[test]
    fn closed_forms_vanish_where_expected() {
        assert_eq!(rhs_symbol([0.0; 3], 0.7), 0.0);
        let tau = 1.5;
        let x2 = (1.0 / (tau + 1.0f64)).sqrt();
        assert!(rhs_symbol([0.0, x2, 0.0], tau).abs() < 1e-18);
        assert_eq!(xi_integral_closed_form(4.5, 2.0).unwrap(), 0.0);
        assert!(xi_integral_closed_form(0.0, 1.0).is_err());
    }

    #[test]
    fn integrand_is_nonnegative() {
        for &eps in &[0.1, 1.0] {
            for i in 1..30 {
                let s = 0.3 * i as f64;
                for j in 0..i {
                    assert!(t3_integrand(s, 0.3 * j as f64, eps) > 0.0);
                }
            }
        }
    }

    #[test]
    fn adaptive_and_tensor_agree() {
        for &t in &[0.5, 3.0] {
            let a = t3_first_component(t, 1.0, 1e-13).unwrap();
            let b = t3_first_component_tensor(t, 1.0, 24).unwrap();
            assert!((a.value - b).abs() < 1e-9 * b, "{} {}", a.value, b);
        }
        assert_eq!(t3_first_component(0.0, 1.0, 1e-10).unwrap().value, 0.0);
    }
}
