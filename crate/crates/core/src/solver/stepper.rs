//! Second-order exponential Runge-Kutta stepping (ETD2RK) with the exact
//! linear propagator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{apply_mask, SpectralVectorField};
use crate::grid::Grid;
use crate::spectral::PhysicalJet;
use crate::transform::forward_real_many;

use super::phi::{phi1, phi2};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Which equation is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// `u.grad u + u div u / 2` with the penalized linear part.
    Temam,
    /// Heat flow plus the Leray-projected advection term.
    NavierStokes,
}

/// Per-mode geometry shared by every propagator on one grid.
#[derive(Clone, Debug)]
pub(crate) struct ModeGeometry {
    pub dk: Vec<[f64; 3]>,
    /// `1 / |dk|^2`, zero where `dk = 0`.
    pub inv_dk2: Vec<f64>,
    /// `|dk|^2`.
    pub dk2: Vec<f64>,
}

impl ModeGeometry {
    pub(crate) fn new(grid: &Grid) -> Self {
        let len = grid.len();
        let mut dk = Vec::with_capacity(len);
        let mut inv = Vec::with_capacity(len);
        let mut sq = Vec::with_capacity(len);
        for flat in 0..len {
            let k = grid.derivative_wavevector(flat);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            dk.push(k);
            sq.push(k2);
            inv.push(if k2 > 0.0 { 1.0 / k2 } else { 0.0 });
        }
        Self {
            dk,
            inv_dk2: inv,
            dk2: sq,
        }
    }

    /// Splits a mode vector into its solenoidal and longitudinal parts.
    #[inline]
    pub(crate) fn split(&self, flat: usize, w: &[Complex64; 3], n: usize) -> ([Complex64; 3], [Complex64; 3]) {
        let k = &self.dk[flat];
        let mut dot = ZERO;
        for d in 0..n {
            dot += w[d] * k[d];
        }
        dot *= self.inv_dk2[flat];
        let mut p = [ZERO; 3];
        let mut q = [ZERO; 3];
        for d in 0..n {
            q[d] = dot * k[d];
            p[d] = w[d] - q[d];
        }
        (p, q)
    }
}

/// Weights `[exp(-a h), phi1(-a h), phi2(-a h)]` for the solenoidal and the
/// longitudinal rate of one mode.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct ModeWeights {
    pub s: [f64; 3],
    pub q: [f64; 3],
}

pub(crate) fn rates(k2: f64, model: Model, eps: f64) -> (f64, f64) {
    match model {
        Model::Temam => (k2, (1.0 + 1.0 / eps) * k2),
        Model::NavierStokes => (k2, k2),
    }
}

fn weights(a: f64, h: f64) -> [f64; 3] {
    let z = -a * h;
    [z.exp(), phi1(z), phi2(z)]
}

/// Propagator weights of every mode for one interval length.
pub(crate) fn interval_weights(grid: &Grid, model: Model, eps: f64, h: f64) -> Vec<ModeWeights> {
    grid.k_squared()
        .iter()
        .map(|&k2| {
            let (a_s, a_q) = rates(k2, model, eps);
            ModeWeights {
                s: weights(a_s, h),
                q: weights(a_q, h),
            }
        })
        .collect()
}

/// Pointwise diagnostics of one state, from its physical jet.
#[derive(Clone, Debug, Default)]
pub(crate) struct PointDiagnostics {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub grad_l1: f64,
    pub grad_l2: f64,
    pub grad_linf: f64,
    /// `1/2 int u div u dx`, per component.
    pub half_u_div_u: Vec<f64>,
}

/// Nonlinearity coefficients plus, on request, diagnostics of the input.
pub(crate) struct NonlinearEval {
    pub coeffs: Vec<Vec<Complex64>>,
    pub diagnostics: Option<PointDiagnostics>,
}

fn diagnostics_from_jet(grid: &Grid, jet: &PhysicalJet, div: &[f64]) -> PointDiagnostics {
    let n = grid.n_dims();
    let dv = grid.cell_volume();
    let mut out = PointDiagnostics {
        half_u_div_u: vec![0.0; n],
        ..Default::default()
    };
    let (mut s1, mut s2, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0);
    for p in 0..grid.len() {
        let mut m2 = 0.0;
        let mut gm2 = 0.0;
        for i in 0..n {
            let v = jet.values[i][p];
            m2 += v * v;
            out.half_u_div_u[i] += v * div[p];
            for j in 0..n {
                let g = jet.grads[i][j][p];
                gm2 += g * g;
            }
        }
        let m = m2.sqrt();
        let gm = gm2.sqrt();
        s1 += m;
        s2 += m2;
        g1 += gm;
        g2 += gm2;
        out.linf = out.linf.max(m);
        out.grad_linf = out.grad_linf.max(gm);
    }
    out.l1 = s1 * dv;
    out.l2 = (s2 * dv).sqrt();
    out.grad_l1 = g1 * dv;
    out.grad_l2 = (g2 * dv).sqrt();
    for h in &mut out.half_u_div_u {
        *h *= 0.5 * dv;
    }
    out
}

/// Computes the model nonlinearity of `comps` (already dealiased if
/// `dealias` is set); the output is masked when `dealias` is set.
pub(crate) fn evaluate_nonlinearity(
    grid: &Grid,
    geom: &ModeGeometry,
    comps: &[Vec<Complex64>],
    model: Model,
    dealias: bool,
    with_diagnostics: bool,
) -> NonlinearEval {
    let n = grid.n_dims();
    let jet = PhysicalJet::from_coefficients(grid, comps);
    let div = jet.divergence();
    let products: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..grid.len())
                .map(|p| {
                    let mut acc = 0.0;
                    for j in 0..n {
                        acc += jet.values[j][p] * jet.grads[i][j][p];
                    }
                    if model == Model::Temam {
                        acc += 0.5 * jet.values[i][p] * div[p];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let refs: Vec<&[f64]> = products.iter().map(|s| s.as_slice()).collect();
    let mut coeffs = forward_real_many(grid, &refs);
    if dealias {
        apply_mask(grid, &mut coeffs);
    }
    if model == Model::NavierStokes {
        project_arrays(geom, n, &mut coeffs);
    }
    let diagnostics = with_diagnostics.then(|| diagnostics_from_jet(grid, &jet, &div));
    NonlinearEval { coeffs, diagnostics }
}

/// Diagnostics without a nonlinearity evaluation.
pub(crate) fn point_diagnostics(grid: &Grid, comps: &[Vec<Complex64>]) -> PointDiagnostics {
    let jet = PhysicalJet::from_coefficients(grid, comps);
    let div = jet.divergence();
    diagnostics_from_jet(grid, &jet, &div)
}

pub(crate) fn project_arrays(geom: &ModeGeometry, n: usize, comps: &mut [Vec<Complex64>]) {
    for flat in 0..comps[0].len() {
        let mut w = [ZERO; 3];
        for d in 0..n {
            w[d] = comps[d][flat];
        }
        let (p, _) = geom.split(flat, &w, n);
        for d in 0..n {
            comps[d][flat] = p[d];
        }
    }
}

/// `(int |grad u|^2, int |div u|^2)` via Parseval.
pub(crate) fn dissipation_rates(grid: &Grid, geom: &ModeGeometry, comps: &[Vec<Complex64>]) -> (f64, f64) {
    let n = grid.n_dims();
    let mut g = 0.0;
    let mut v = 0.0;
    for flat in 0..grid.len() {
        let k = &geom.dk[flat];
        let mut dot = ZERO;
        let mut m2 = 0.0;
        for d in 0..n {
            let c = comps[d][flat];
            m2 += c.norm_sqr();
            dot += c * k[d];
        }
        g += geom.dk2[flat] * m2;
        v += dot.norm_sqr();
    }
    let vol = grid.volume();
    (g * vol, v * vol)
}

/// Result of one step beyond the new state.
pub(crate) struct StepDetail {
    pub next: SpectralVectorField,
    /// Applied `int f dx` averaged over the step (stage average).
    pub nonlinear_mass: Vec<f64>,
    /// Dissipation rates of the ETD interpolant at `j dt / DISSIPATION_PANELS`,
    /// `j = 1 .. DISSIPATION_PANELS - 1`.
    pub inner_rates: Vec<(f64, f64)>,
}

/// Sub-intervals per step for the composite Simpson rule of the dissipation
/// integrals (even).
pub(crate) const DISSIPATION_PANELS: usize = 4;

/// Exponential stepper with cached per-mode weights.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: Grid,
    model: Model,
    eps: f64,
    dt: f64,
    dealias: bool,
    nonlinear: bool,
    geom: ModeGeometry,
    full: Vec<ModeWeights>,
    /// Interpolant weights at the interior sub-points of a step.
    inner: Vec<Vec<ModeWeights>>,
}

impl Stepper {
    pub fn new(grid: &Grid, model: Model, eps: f64, dt: f64, dealias: bool, nonlinear: bool) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::domain(format!("dt must be positive, got {dt}")));
        }
        if !(eps > 0.0) {
            return Err(Error::domain(format!("eps must be positive, got {eps}")));
        }
        Ok(Self {
            grid: grid.clone(),
            model,
            eps,
            dt,
            dealias,
            nonlinear,
            geom: ModeGeometry::new(grid),
            full: interval_weights(grid, model, eps, dt),
            inner: (1..DISSIPATION_PANELS)
                .map(|j| interval_weights(grid, model, eps, dt * j as f64 / DISSIPATION_PANELS as f64))
                .collect(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }




    /// Nonlinearity of a state (zero when the stepper is linear).
    pub(crate) fn eval(&self, u: &SpectralVectorField, with_diagnostics: bool) -> NonlinearEval {
        let n = self.grid.n_dims();
        if !self.nonlinear {
            return NonlinearEval {
                coeffs: vec![self.grid.zeros(); n],
                diagnostics: with_diagnostics.then(|| point_diagnostics(&self.grid, u.components())),
            };
        }
        if self.dealias {
            let masked = u.dealiased();
            evaluate_nonlinearity(&self.grid, &self.geom, masked.components(), self.model, true, with_diagnostics)
        } else {
            evaluate_nonlinearity(&self.grid, &self.geom, u.components(), self.model, false, with_diagnostics)
        }
    }

    /// One step from `u`; `nu` is the nonlinearity at `u`.
    pub(crate) fn advance(&self, u: &SpectralVectorField, nu: &NonlinearEval) -> Result<StepDetail> {
        let grid = &self.grid;
        let n = grid.n_dims();
        let dt = self.dt;
        let len = grid.len();

        // predictor a = E u - dt phi1 N(u)
        let mut a = SpectralVectorField::zeros(grid);
        for flat in 0..len {
            let w = self.full[flat];
            let (up, uq) = self.geom.split(flat, &u.mode(flat), n);
            let (np, nq) = self.geom.split(flat, &mode_of(&nu.coeffs, flat, n), n);
            let mut out = [ZERO; 3];
            for d in 0..n {
                out[d] = up[d] * w.s[0] + uq[d] * w.q[0] - (np[d] * w.s[1] + nq[d] * w.q[1]) * dt;
            }
            a.set_mode(flat, &out[..n]);
        }
        if self.model == Model::NavierStokes {
            project_arrays(&self.geom, n, a.components_mut());
        }

        let na = if self.nonlinear {
            Some(self.eval(&a, false))
        } else {
            None
        };

        // corrector u + = a - dt phi2 (N(a) - N(u)), plus the interpolant
        // u(th) = e^{th L} u - th phi1 N - (th^2 / dt) phi2 (N(a) - N(u))
        let mut next = a.clone();
        let mut inner_sums = vec![(0.0, 0.0); self.inner.len()];
        for flat in 0..len {
            let w = self.full[flat];
            let (up, uq) = self.geom.split(flat, &u.mode(flat), n);
            let (np, nq) = self.geom.split(flat, &mode_of(&nu.coeffs, flat, n), n);
            let (dp, dq) = match &na {
                Some(na) => {
                    let (ap, aq) = self.geom.split(flat, &mode_of(&na.coeffs, flat, n), n);
                    let mut dp = [ZERO; 3];
                    let mut dq = [ZERO; 3];
                    for d in 0..n {
                        dp[d] = ap[d] - np[d];
                        dq[d] = aq[d] - nq[d];
                    }
                    (dp, dq)
                }
                None => ([ZERO; 3], [ZERO; 3]),
            };
            let am = a.mode(flat);
            let mut out = [ZERO; 3];
            for d in 0..n {
                out[d] = am[d] - (dp[d] * w.s[2] + dq[d] * w.q[2]) * dt;
            }
            next.set_mode(flat, &out[..n]);
            let k = &self.geom.dk[flat];
            for (j, (weights, sums)) in self.inner.iter().zip(inner_sums.iter_mut()).enumerate() {
                let h = weights[flat];
                let th = dt * (j + 1) as f64 / DISSIPATION_PANELS as f64;
                let mut dot = ZERO;
                let mut m2 = 0.0;
                for d in 0..n {
                    let v = up[d] * h.s[0] + uq[d] * h.q[0]
                        - (np[d] * h.s[1] + nq[d] * h.q[1]) * th
                        - (dp[d] * h.s[2] + dq[d] * h.q[2]) * (th * th / dt);
                    m2 += v.norm_sqr();
                    dot += v * k[d];
                }
                sums.0 += self.geom.dk2[flat] * m2;
                sums.1 += dot.norm_sqr();
            }
        }
        if self.model == Model::NavierStokes {
            project_arrays(&self.geom, n, next.components_mut());
        }
        let vol = grid.volume();
        let nonlinear_mass = (0..n)
            .map(|d| {
                let n0 = nu.coeffs[d][0].re;
                let a0 = na.as_ref().map_or(n0, |na| na.coeffs[d][0].re);
                0.5 * (n0 + a0) * vol
            })
            .collect();
        Ok(StepDetail {
            next,
            nonlinear_mass,
            inner_rates: inner_sums.into_iter().map(|(g, v)| (g * vol, v * vol)).collect(),
        })
    }

    /// Advances `u` by one step.
    pub fn step(&self, u: &SpectralVectorField) -> Result<SpectralVectorField> {
        self.grid.ensure_same(u.grid())?;
        let nu = self.eval(u, false);
        Ok(self.advance(u, &nu)?.next)
    }

    pub(crate) fn dissipation_rates(&self, u: &SpectralVectorField) -> (f64, f64) {
        dissipation_rates(&self.grid, &self.geom, u.components())
    }
}

#[inline]
pub(crate) fn mode_of(comps: &[Vec<Complex64>], flat: usize, n: usize) -> [Complex64; 3] {
    let mut w = [ZERO; 3];
    for d in 0..n {
        w[d] = comps[d][flat];
    }
    w
}

/// `u . grad u + u div u / 2`, dealiased (inputs and product).
pub fn nonlinearity(u: &SpectralVectorField) -> SpectralVectorField {
    let grid = u.grid();
    let geom = ModeGeometry::new(grid);
    let masked = u.dealiased();
    let ev = evaluate_nonlinearity(grid, &geom, masked.components(), Model::Temam, true, false);
    SpectralVectorField::from_components(grid, ev.coeffs).expect("n components")
}

/// One Temam step with dealiasing: `u(t + dt)` from `u(t)`.
pub fn step(u: &SpectralVectorField, dt: f64, eps: f64) -> Result<SpectralVectorField> {
    Stepper::new(u.grid(), Model::Temam, eps, dt, true, true)?.step(u)
}
