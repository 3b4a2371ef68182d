//! Long-time behaviour: limiting mean, decay exponents and profile residuals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;
use crate::kernels::apply_m_epsilon;
use crate::quadrature::integrate_vec;
use crate::solver::Trajectory;
use crate::spectral::{lq_norm, mean_integral};

/// Spread used for the default periodization window `L^2 / (8 spread^2)`.
pub const DEFAULT_SPREAD: f64 = 3.0;

/// `(n/2)(1 - 1/q)`.
pub fn decay_exponent(n_dims: usize, q: f64) -> f64 {
    let inv = if q.is_infinite() { 0.0 } else { 1.0 / q };
    0.5 * n_dims as f64 * (1.0 - inv)
}

pub fn mean_series(traj: &Trajectory) -> Vec<(f64, Vec<f64>)> {
    traj.records.iter().map(|r| (r.t, r.mean.clone())).collect()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaRoute {
    MeanLimit,
    DuhamelIntegral,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LambdaEstimate {
    pub value: Vec<f64>,
    pub route: LambdaRoute,
    /// Log-log slope of `|m(t) - m(t/2)|` over the tail; `-inf` when the
    /// increments vanish.
    #[serde(with = "crate::io::extended_f64")]
    pub convergence_diagnostic: f64,
    pub t_window: (f64, f64),
    pub converged: bool,
}

impl LambdaEstimate {
    pub fn norm(&self) -> f64 {
        self.value.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn interpolate(series: &[(f64, Vec<f64>)], t: f64) -> Vec<f64> {
    let i = series.partition_point(|(s, _)| *s < t);
    if i == 0 {
        return series[0].1.clone();
    }
    if i >= series.len() {
        return series[series.len() - 1].1.clone();
    }
    let (t0, a) = &series[i - 1];
    let (t1, b) = &series[i];
    let w = (t - t0) / (t1 - t0);
    a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Least-squares slope and RMS residual of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Tail value `2 m(T) - m(T/2)` (one Richardson level in `1/t`).
pub fn lambda_from_mean(series: &[(f64, Vec<f64>)]) -> Result<LambdaEstimate> {
    tail_estimate(series, LambdaRoute::MeanLimit)
}

fn tail_estimate(series: &[(f64, Vec<f64>)], route: LambdaRoute) -> Result<LambdaEstimate> {
    if series.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: series.len(),
        });
    }
    let t_end = series[series.len() - 1].0;
    let t_first = series.iter().map(|(t, _)| *t).find(|t| *t > 0.0).unwrap_or(t_end);
    if !(t_end >= 10.0 * t_first) {
        return Err(Error::config(format!(
            "mean series spans [{t_first}, {t_end}], less than one decade"
        )));
    }
    let m_end = &series[series.len() - 1].1;
    let m_half = interpolate(series, 0.5 * t_end);
    let value: Vec<f64> = m_end.iter().zip(&m_half).map(|(a, b)| 2.0 * a - b).collect();

    // increments |m(t) - m(t/2)| on a geometric grid over the last decade
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let scale = m_end.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut all_tiny = true;
    for j in 0..8 {
        let t = t_end * 10f64.powf(-(j as f64) / 8.0);
        if t / 2.0 < t_first {
            break;
        }
        let inc = distance(&interpolate(series, t), &interpolate(series, t / 2.0));
        if inc > 1e-13 * scale.max(f64::MIN_POSITIVE) {
            all_tiny = false;
        }
        if inc > 0.0 {
            xs.push(t.ln());
            ys.push(inc.ln());
        }
    }
    let slope = if all_tiny || xs.len() < 2 {
        f64::NEG_INFINITY
    } else {
        linear_fit(&xs, &ys).0
    };
    Ok(LambdaEstimate {
        value,
        route,
        convergence_diagnostic: slope,
        t_window: (0.5 * t_end, t_end),
        converged: slope < -0.5,
    })
}

/// `int u0 - int_0^t int f dx ds`, accumulated from the per-step applied
/// forcing mass, then tail-extrapolated like [`lambda_from_mean`].
pub fn lambda_from_duhamel(traj: &Trajectory) -> Result<LambdaEstimate> {
    if traj.records.iter().any(|r| r.nonlinear_mass.len() != traj.initial_mean.len()) {
        return Err(Error::config("trajectory lacks nonlinearity mass records"));
    }
    let mut acc = traj.initial_mean.clone();
    let mut series = Vec::with_capacity(traj.len());
    for (i, r) in traj.records.iter().enumerate() {
        series.push((r.t, acc.clone()));
        if i + 1 < traj.len() {
            let dt = traj.records[i + 1].t - r.t;
            for (a, f) in acc.iter_mut().zip(&r.nonlinear_mass) {
                *a -= dt * f;
            }
        }
    }
    tail_estimate(&series, LambdaRoute::DuhamelIntegral)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DecayFit {
    #[serde(with = "crate::io::extended_f64")]
    pub q: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub fitted_exponent: f64,
    pub predicted_exponent: f64,
    pub window: (f64, f64),
    /// RMS of the log-log fit.
    pub residual: f64,
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 8;

/// Fits `log y = c - p log t` on `window`, using up to 64 samples spread
/// geometrically in `t`.
pub fn decay_fit_series(times: &[f64], values: &[f64], q: f64, n_dims: usize, window: (f64, f64)) -> Result<DecayFit> {
    let idx: Vec<usize> = (0..times.len())
        .filter(|&i| times[i] > 0.0 && times[i] >= window.0 && times[i] <= window.1)
        .collect();
    let mut picked: Vec<usize> = Vec::new();
    if let (Some(&first), Some(&last)) = (idx.first(), idx.last()) {
        let (a, b) = (times[first].ln(), times[last].ln());
        for j in 0..64 {
            let target = a + (b - a) * j as f64 / 63.0;
            let k = idx
                .iter()
                .copied()
                .min_by(|&x, &y| (times[x].ln() - target).abs().total_cmp(&(times[y].ln() - target).abs()))
                .expect("nonempty");
            if picked.last() != Some(&k) && !picked.contains(&k) {
                picked.push(k);
            }
        }
    }
    if picked.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            got: picked.len(),
        });
    }
    if picked.iter().any(|&i| !(values[i] > 0.0)) {
        return Err(Error::Degenerate("norm vanishes inside the fit window".into()));
    }
    let xs: Vec<f64> = picked.iter().map(|&i| times[i].ln()).collect();
    let ys: Vec<f64> = picked.iter().map(|&i| values[i].ln()).collect();
    let (slope, _, rms) = linear_fit(&xs, &ys);
    Ok(DecayFit {
        q,
        fitted_exponent: -slope,
        predicted_exponent: decay_exponent(n_dims, q),
        window,
        residual: rms,
        samples: picked.len(),
    })
}

/// Default window `[t_end/10, t_end]` clipped to the periodization window.
pub fn default_window(traj: &Trajectory) -> (f64, f64) {
    let t_end = traj.last().t;
    let horizon = traj.grid.validity_horizon(DEFAULT_SPREAD);
    (0.1 * t_end, t_end.min(horizon))
}

/// `L^q` norms of the trajectory: from the records for `q` in `{1, 2, inf}`,
/// otherwise from the snapshots.
pub fn norm_series(traj: &Trajectory, q: f64) -> (Vec<f64>, Vec<f64>) {
    if q == 1.0 || q == 2.0 || q.is_infinite() {
        let v = traj
            .records
            .iter()
            .map(|r| if q == 1.0 { r.l1 } else if q == 2.0 { r.l2 } else { r.linf })
            .collect();
        (traj.times(), v)
    } else {
        (
            traj.snapshots.iter().map(|s| s.t).collect(),
            traj.snapshots.iter().map(|s| lq_norm(&s.field, q)).collect(),
        )
    }
}

pub fn decay_fit(traj: &Trajectory, q: f64, window: Option<(f64, f64)>) -> Result<DecayFit> {
    let default = default_window(traj);
    let window = match window {
        Some((a, b)) => (a, b.min(default.1)),
        None => default,
    };
    let (t, v) = norm_series(traj, q);
    decay_fit_series(&t, &v, q, traj.grid.n_dims(), window)
}

/// Which kernel multiplies `lambda` in the profile.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ProfileKind {
    /// `lambda E(., t)`, the heat kernel on every component.
    Heat,
    /// `M_eps(., t) lambda`, the full linear kernel applied to `lambda delta`.
    MEpsilon { eps: f64 },
}

/// Fourier coefficients of the profile at time `t`.
pub fn profile_field(grid: &Grid, lambda: &[f64], t: f64, kind: ProfileKind) -> Result<SpectralVectorField> {
    let n = grid.n_dims();
    if lambda.len() != n {
        return Err(Error::config(format!("lambda needs {n} components")));
    }
    let inv_vol = 1.0 / grid.volume();
    let comps = (0..n)
        .map(|d| vec![Complex64::new(lambda[d] * inv_vol, 0.0); grid.len()])
        .collect();
    let delta = SpectralVectorField::from_components(grid, comps)?;
    match kind {
        ProfileKind::Heat => crate::kernels::apply_heat(&delta, t),
        ProfileKind::MEpsilon { eps } => apply_m_epsilon(&delta, t, eps),
    }
}

/// `t^a |E(., t)|_q` on the grid, `a = (n/2)(1 - 1/q)`.
pub fn gaussian_norm_constant(grid: &Grid, t: f64, q: f64) -> Result<f64> {
    let e = crate::kernels::heat_kernel_field(grid, t)?;
    Ok(t.powf(decay_exponent(grid.n_dims(), q)) * lq_norm(&e, q))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProfileReport {
    #[serde(with = "crate::io::extended_f64")]
    pub q: f64,
    pub profile: ProfileKind,
    pub times: Vec<f64>,
    /// `t^a |u(t) - lambda P(t)|_q`.
    pub residual_series: Vec<f64>,
    /// `t^a |u(t)|_q`.
    pub scaled_norm_series: Vec<f64>,
    pub lambda: Vec<f64>,
    pub lambda_converged: bool,
    /// [`gaussian_norm_constant`] at the last time.
    pub c_grid: f64,
    /// Strictly decreasing over the final decade of `times`.
    pub decreasing: bool,
    pub final_value: f64,
    /// `final_value / (|lambda| c_grid)`.
    pub final_relative: f64,
}

/// Residual series on the snapshots with `t > 0`.
pub fn profile_residual(traj: &Trajectory, lambda: &LambdaEstimate, q: f64, profile: ProfileKind) -> Result<ProfileReport> {
    let grid = &traj.grid;
    let a = decay_exponent(grid.n_dims(), q);
    let snaps: Vec<_> = traj.snapshots.iter().filter(|s| s.t > 0.0).collect();
    if snaps.is_empty() {
        return Err(Error::config("profile residual needs snapshots at positive times"));
    }
    let mut times = Vec::new();
    let mut res = Vec::new();
    let mut scaled = Vec::new();
    for s in &snaps {
        let p = profile_field(grid, &lambda.value, s.t, profile)?;
        let diff = s.field.sub(&p)?;
        let w = s.t.powf(a);
        times.push(s.t);
        res.push(w * lq_norm(&diff, q));
        scaled.push(w * lq_norm(&s.field, q));
    }
    let t_last = *times.last().expect("nonempty");
    let c_grid = gaussian_norm_constant(grid, t_last, q)?;
    let tail: Vec<f64> = times
        .iter()
        .zip(&res)
        .filter(|(t, _)| **t >= 0.1 * t_last)
        .map(|(_, r)| *r)
        .collect();
    let decreasing = tail.len() >= 2 && tail.windows(2).all(|w| w[1] < w[0]);
    let final_value = *res.last().expect("nonempty");
    Ok(ProfileReport {
        q,
        profile,
        times,
        residual_series: res,
        scaled_norm_series: scaled,
        lambda: lambda.value.clone(),
        lambda_converged: lambda.converged,
        c_grid,
        decreasing,
        final_value,
        final_relative: final_value / (lambda.norm() * c_grid),
    })
}

/// Kernel of the linear evolution in [`verify_linear_profile`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LinearKernel {
    Heat,
    MEpsilon { eps: f64 },
}

impl LinearKernel {
    fn apply(&self, f: &SpectralVectorField, t: f64) -> Result<SpectralVectorField> {
        match *self {
            LinearKernel::Heat => crate::kernels::apply_heat(f, t),
            LinearKernel::MEpsilon { eps } => apply_m_epsilon(f, t, eps),
        }
    }

    fn profile(&self) -> ProfileKind {
        match *self {
            LinearKernel::Heat => ProfileKind::Heat,
            LinearKernel::MEpsilon { eps } => ProfileKind::MEpsilon { eps },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LinearProfileReport {
    #[serde(with = "crate::io::extended_f64")]
    pub q: f64,
    pub lambda: Vec<f64>,
    pub times: Vec<f64>,
    /// `t^a |Phi(t) - M(t) lambda|_q`.
    pub residual_series: Vec<f64>,
    /// `t^a |Phi(t)|_q`.
    pub scaled_norm_series: Vec<f64>,
    /// `sup t |f(t)|_1` over the sampled times, relative to the first sample.
    pub mass_condition_growth: f64,
    pub mass_condition_ok: bool,
    pub beta: f64,
    /// Same for `t^(1 + (n/2)(1 - 1/beta)) |f(t)|_beta`.
    pub beta_condition_growth: f64,
    pub beta_condition_ok: bool,
    pub quadrature_error: f64,
}

fn flatten(f: &SpectralVectorField) -> Vec<f64> {
    f.components().iter().flat_map(|c| c.iter().flat_map(|z| [z.re, z.im])).collect()
}

fn unflatten(grid: &Grid, v: &[f64]) -> Result<SpectralVectorField> {
    let len = grid.len();
    let comps = (0..grid.n_dims())
        .map(|d| (0..len).map(|i| Complex64::new(v[2 * (d * len + i)], v[2 * (d * len + i) + 1])).collect())
        .collect();
    SpectralVectorField::from_components(grid, comps)
}

/// Growth allowed in the sampled decay conditions before they are flagged.
const CONDITION_GROWTH_LIMIT: f64 = 10.0;

/// Checks the profile theorem for `Phi(t) = int_0^t M(t - s) f(s) ds` with
/// `f` given in Fourier space; `lambda = int_0^oo int f dy ds`.
pub fn verify_linear_profile<F>(
    grid: &Grid,
    kernel: LinearKernel,
    forcing: F,
    q: f64,
    t_list: &[f64],
    beta: f64,
    tol: f64,
) -> Result<LinearProfileReport>
where
    F: Fn(f64) -> SpectralVectorField,
{
    let n = grid.n_dims();
    // total mass over s in (0, oo) via s = x / (1 - x)
    let (lambda, lerr, _) = integrate_vec(
        |x| {
            let s = x / (1.0 - x);
            let jac = 1.0 / (1.0 - x).powi(2);
            mean_integral(&forcing(s)).into_iter().map(|m| m * jac).collect()
        },
        0.0,
        1.0,
        tol,
        tol,
        2_000_000,
    )?;
    let mut worst_err = lerr;

    let a = decay_exponent(n, q);
    let mut residual = Vec::new();
    let mut scaled = Vec::new();
    let mut mass_cond = Vec::new();
    let mut beta_cond = Vec::new();
    let b_exp = 1.0 + decay_exponent(n, beta);
    for &t in t_list {
        let (phi, err, _) = integrate_vec(
            |s| flatten(&kernel.apply(&forcing(s), t - s).expect("t - s >= 0")),
            0.0,
            t,
            0.0,
            tol,
            20_000_000,
        )?;
        worst_err = worst_err.max(err);
        let phi = unflatten(grid, &phi)?;
        let prof = profile_field(grid, &lambda, t, kernel.profile())?;
        let w = t.powf(a);
        residual.push(w * lq_norm(&phi.sub(&prof)?, q));
        scaled.push(w * lq_norm(&phi, q));
        let f = forcing(t);
        mass_cond.push(t * lq_norm(&f, 1.0));
        beta_cond.push(t.powf(b_exp) * lq_norm(&f, beta));
    }
    let growth = |v: &[f64]| {
        let first = v.first().copied().unwrap_or(0.0);
        let sup = v.iter().fold(0.0f64, |m, x| m.max(*x));
        if first > 0.0 {
            sup / first
        } else if sup == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    };
    let mg = growth(&mass_cond);
    let bg = growth(&beta_cond);
    if mg > CONDITION_GROWTH_LIMIT {
        log::warn!("forcing mass does not look O(1/t): growth {mg}");
    }
    Ok(LinearProfileReport {
        q,
        lambda,
        times: t_list.to_vec(),
        residual_series: residual,
        scaled_norm_series: scaled,
        mass_condition_growth: mg,
        mass_condition_ok: mg <= CONDITION_GROWTH_LIMIT,
        beta,
        beta_condition_growth: bg,
        beta_condition_ok: bg <= CONDITION_GROWTH_LIMIT,
        quadrature_error: worst_err,
    })
}
