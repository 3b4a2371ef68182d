use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;
use crate::spectral::mean_integral;

use super::config::SimConfig;
use super::stepper::{Model, Stepper, DISSIPATION_PANELS};

/// Diagnostics of the state at one time.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Record {
    pub t: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub grad_l1: f64,
    pub grad_l2: f64,
    pub grad_linf: f64,
    pub div_l2: f64,
    /// `|u|_2^2`.
    pub energy: f64,
    /// `int_0^t |grad u|_2^2`.
    pub grad_dissipation: f64,
    /// `int_0^t |div u|_2^2` (not yet divided by eps).
    pub div_dissipation: f64,
    /// `int u dx`.
    pub mean: Vec<f64>,
    /// `1/2 int u div u dx`.
    pub half_u_div_u: Vec<f64>,
    /// `int f dx` of the nonlinearity as applied over the step that starts
    /// here; at the final record, its instantaneous value.
    pub nonlinear_mass: Vec<f64>,
}

/// A stored state.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub field: SpectralVectorField,
}

/// Time history of one run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: Grid,
    pub model: Model,
    pub epsilon: f64,
    pub dt: f64,
    pub initial_mean: Vec<f64>,
    pub records: Vec<Record>,
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> &Record {
        self.records.last().expect("trajectory has at least one record")
    }

    /// Total dissipation `int_0^t (|grad u|^2 + |div u|^2 / eps)` at record `i`.
    pub fn dissipation(&self, i: usize, eps: f64) -> f64 {
        let r = &self.records[i];
        match self.model {
            Model::Temam => r.grad_dissipation + r.div_dissipation / eps,
            Model::NavierStokes => r.grad_dissipation,
        }
    }

    /// Snapshot nearest to `t`.
    pub fn snapshot_near(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }
}

/// Integrates the penalized model.
pub fn run(config: &SimConfig, u0: &SpectralVectorField) -> Result<Trajectory> {
    integrate(config, u0, Model::Temam)
}

/// Integrates the incompressible reference (heat flow and projected advection).
pub fn ns_reference_run(config: &SimConfig, u0: &SpectralVectorField) -> Result<Trajectory> {
    integrate(config, u0, Model::NavierStokes)
}

/// Shared driver for both models.
pub fn integrate(config: &SimConfig, u0: &SpectralVectorField, model: Model) -> Result<Trajectory> {
    config.validate()?;
    let grid = config.grid()?;
    grid.ensure_same(u0.grid())?;
    let stepper = Stepper::new(&grid, model, config.epsilon, config.dt, config.dealias, config.nonlinearity_on)?;
    let times = config.record_times();
    let fine_steps = config.startup_steps() * config.startup_refinement;
    let fine = if fine_steps > 0 {
        let h = config.dt / config.startup_refinement as f64;
        Some(Stepper::new(&grid, model, config.epsilon, h, config.dealias, config.nonlinearity_on)?)
    } else {
        None
    };

    let (g0, v0) = stepper.dissipation_rates(u0);
    if v0.sqrt() > 1e-10 * g0.sqrt().max(1e-300) && v0 > 0.0 {
        log::warn!(
            "initial datum is not divergence-free: |div u0|_2 = {:e}, |grad u0|_2 = {:e}",
            v0.sqrt(),
            g0.sqrt()
        );
    }

    let mut u = if config.dealias {
        u0.dealiased()
    } else {
        u0.clone()
    };
    if model == Model::NavierStokes {
        u = crate::kernels::leray_project(&u);
    }
    let initial_mean = mean_integral(&u);

    let n_steps = times.len() - 1;
    let mut snap_steps: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|&s| {
            let i = times.partition_point(|&t| t < s).min(n_steps);
            if i > 0 && s - times[i - 1] <= times[i] - s {
                i - 1
            } else {
                i
            }
        })
        .collect();
    snap_steps.sort_unstable();
    snap_steps.dedup();

    let mut records = Vec::with_capacity(n_steps + 1);
    let mut snapshots = Vec::new();
    let mut cum_g = 0.0;
    let mut cum_v = 0.0;
    let mut rates = stepper.dissipation_rates(&u);
    let mut cap = f64::INFINITY;

    for step in 0..=n_steps {
        let t = times[step];
        let eval = stepper.eval(&u, true);
        let diag = eval.diagnostics.clone().expect("diagnostics requested");
        if step == 0 && diag.linf > 0.0 {
            cap = config.blowup_factor * diag.linf;
        }
        if !diag.linf.is_finite() || diag.linf > cap {
            return Err(Error::Divergence {
                time: t,
                norm: diag.linf,
                cap,
            });
        }
        if snap_steps.binary_search(&step).is_ok() {
            snapshots.push(Snapshot { t, field: u.clone() });
        }
        let mut record = Record {
            t,
            l1: diag.l1,
            l2: diag.l2,
            linf: diag.linf,
            grad_l1: diag.grad_l1,
            grad_l2: diag.grad_l2,
            grad_linf: diag.grad_linf,
            div_l2: rates.1.sqrt(),
            energy: u.l2_squared(),
            grad_dissipation: cum_g,
            div_dissipation: cum_v,
            mean: mean_integral(&u),
            half_u_div_u: diag.half_u_div_u.clone(),
            nonlinear_mass: eval.coeffs.iter().map(|c| c[0].re * grid.volume()).collect(),
        };
        if step == n_steps {
            records.push(record);
            break;
        }
        let active = match &fine {
            Some(f) if step < fine_steps => f,
            _ => &stepper,
        };
        let detail = active.advance(&u, &eval)?;
        record.nonlinear_mass = detail.nonlinear_mass;
        records.push(record);
        let next_rates = stepper.dissipation_rates(&detail.next);
        // composite Simpson on the step, interior points from the interpolant
        let w = active.dt() / (3.0 * DISSIPATION_PANELS as f64);
        let (mut sg, mut sv) = (rates.0 + next_rates.0, rates.1 + next_rates.1);
        for (j, r) in detail.inner_rates.iter().enumerate() {
            let c = if j % 2 == 0 { 4.0 } else { 2.0 };
            sg += c * r.0;
            sv += c * r.1;
        }
        cum_g += w * sg;
        cum_v += w * sv;
        rates = next_rates;
        u = detail.next;
    }

    Ok(Trajectory {
        grid,
        model,
        epsilon: config.epsilon,
        dt: config.dt,
        initial_mean,
        records,
        snapshots,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::kernels::{apply_heat, apply_m_epsilon};
    use crate::solver::{energy_ledger, mean_drift_check, Stepper};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    /// `eta * curl(g)` plus `gradient * grad(g(. - c))` with
    /// `g = exp(-|x|^2 / 4)`; the shifted gradient part gives a nonzero
    /// mean drift.
    pub(crate) fn bump(grid: &Grid, eta: f64, gradient: f64) -> SpectralVectorField {
        let n = grid.n_dims();
        let mut comps = vec![vec![0.0; grid.len()]; n];
        for p in 0..grid.len() {
            let x = grid.centered_position(p);
            let g = (-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp();
            let (y0, y1) = (x[0] - 1.0, x[1] - 0.5);
            let h = (-(y0 * y0 + y1 * y1) / 4.0).exp();
            comps[0][p] = eta * x[1] / 2.0 * g - gradient * y0 / 2.0 * h;
            comps[1][p] = -eta * x[0] / 2.0 * g - gradient * y1 / 2.0 * h;
        }
        SpectralVectorField::from_physical(grid, &comps).unwrap().dealiased()
    }

    fn cfg(grid: &Grid, dt: f64, t_end: f64) -> SimConfig {
        SimConfig::new(grid, 1.0, dt, t_end)
    }

    #[test]
    fn zero_datum_stays_zero() {
        let g = Grid::new(2, 20.0, 16).unwrap();
        let tr = run(&cfg(&g, 0.1, 1.0), &SpectralVectorField::zeros(&g)).unwrap();
        assert_eq!(tr.len(), 11);
        for r in &tr.records {
            assert_eq!(r.l2, 0.0);
            assert_eq!(r.energy, 0.0);
            assert!(r.mean.iter().all(|m| *m == 0.0));
        }
    }

    #[test]
    fn linear_run_is_the_heat_flow() {
        let g = Grid::new(2, 30.0, 32).unwrap();
        let u0 = bump(&g, 1.0, 0.0);
        let mut c = cfg(&g, 0.25, 2.0);
        c.nonlinearity_on = false;
        let tr = run(&c, &u0).unwrap();
        for r in &tr.records {
            let h = apply_heat(&u0, r.t).unwrap();
            assert!((r.energy.sqrt() - h.l2_squared().sqrt()).abs() < 1e-10);
            assert!(r.mean.iter().all(|m| m.abs() < 1e-12));
        }
    }

    #[test]
    fn startup_refinement_adds_fine_records() {
        let g = Grid::new(2, 30.0, 32).unwrap();
        let u0 = bump(&g, 1.0, 0.0);
        let mut c = cfg(&g, 0.25, 2.0);
        c.startup_time = 0.5;
        c.startup_refinement = 5;
        c.snapshot_times = vec![0.1, 1.0];
        let t = c.record_times();
        assert_eq!(t.len(), 10 + 7);
        assert!((t[1] - 0.05).abs() < 1e-15 && (t[10] - 0.5).abs() < 1e-15 && (t[16] - 2.0).abs() < 1e-15);
        c.nonlinearity_on = false;
        let tr = run(&c, &u0).unwrap();
        assert_eq!(tr.times(), t);
        assert!((tr.snapshots[0].t - 0.1).abs() < 1e-15 && (tr.snapshots[1].t - 1.0).abs() < 1e-15);
        for r in &tr.records {
            let h = apply_heat(&u0, r.t).unwrap();
            assert!((r.energy.sqrt() - h.l2_squared().sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn linear_step_is_the_propagator() {
        let g = Grid::new(2, 30.0, 32).unwrap();
        let u0 = bump(&g, 1.0, 0.7);
        let s = Stepper::new(&g, Model::Temam, 0.3, 0.2, true, false).unwrap();
        let a = s.step(&u0).unwrap();
        let b = apply_m_epsilon(&u0, 0.2, 0.3).unwrap();
        assert!(a.max_abs_difference(&b) < 1e-12);
    }

    #[test]
    fn shear_flow_decays_exactly_under_projected_flow() {
        let g = Grid::new(2, 2.0 * PI, 16).unwrap();
        let mut comps = vec![vec![0.0; g.len()]; 2];
        for p in 0..g.len() {
            comps[0][p] = g.position(p)[1].sin();
        }
        let u0 = SpectralVectorField::from_physical(&g, &comps).unwrap();
        let tr = ns_reference_run(&cfg(&g, 0.05, 1.0), &u0).unwrap();
        for r in &tr.records {
            let expect = (-r.t).exp() * PI * 2f64.sqrt();
            assert!((r.l2 - expect).abs() < 1e-12, "{} {}", r.l2, expect);
        }
    }

    #[test]
    fn projected_flow_conserves_the_mean() {
        let g = Grid::new(2, 30.0, 32).unwrap();
        let mut u0 = bump(&g, 2.0, 0.0);
        u0.component_mut(0)[0] = Complex64::new(0.01, 0.0);
        let tr = ns_reference_run(&cfg(&g, 0.05, 2.0), &u0).unwrap();
        let m0 = tr.records[0].mean.clone();
        for r in &tr.records {
            for (a, b) in r.mean.iter().zip(&m0) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn second_order_in_time() {
        let g = Grid::new(2, 20.0, 32).unwrap();
        let u0 = bump(&g, 3.0, 1.0);
        let end = |dt: f64| {
            let s = Stepper::new(&g, Model::Temam, 0.5, dt, true, true).unwrap();
            let mut u = u0.clone();
            for _ in 0..(1.0 / dt).round() as usize {
                u = s.step(&u).unwrap();
            }
            u
        };
        let reference = end(1.0 / 128.0);
        let e1 = end(0.5).max_abs_difference(&reference);
        let e2 = end(0.25).max_abs_difference(&reference);
        let ratio = e1 / e2;
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn energy_and_mean_bookkeeping() {
        let g = Grid::new(2, 30.0, 32).unwrap();
        let u0 = bump(&g, 0.5, 0.5);
        let tr = run(&cfg(&g, 0.02, 2.0), &u0).unwrap();
        for w in tr.records.windows(2) {
            assert!(w[1].energy <= w[0].energy);
        }
        let rep = energy_ledger(&tr, 1.0, 1e-6);
        assert!(rep.satisfied, "{rep:?}");
        // stage-averaged forcing reproduces the mean exactly
        let mut m = tr.initial_mean.clone();
        for r in &tr.records[..tr.len() - 1] {
            for d in 0..2 {
                m[d] -= tr.dt * r.nonlinear_mass[d];
            }
        }
        for d in 0..2 {
            assert!((m[d] - tr.last().mean[d]).abs() < 1e-14);
        }
        let drift = |dt: f64| mean_drift_check(&run(&cfg(&g, dt, 1.0), &u0).unwrap()).max_abs_error;
        let ratio = drift(0.025) / drift(0.0125);
        assert!(ratio > 3.4 && ratio < 4.6, "ratio {ratio}");
    }

    #[test]
    fn blow_up_is_reported() {
        let g = Grid::new(2, 30.0, 32).unwrap();
        let u0 = bump(&g, 1.0, 1.0);
        let mut c = cfg(&g, 0.05, 1.0);
        c.blowup_factor = 1.0 + 1e-9;
        // a tiny cap trips as soon as the norm grows at all, or never
        match run(&c, &u0) {
            Ok(tr) => assert!(tr.records.iter().all(|r| r.linf <= tr.records[0].linf * (1.0 + 1e-9))),
            Err(Error::Divergence { time, .. }) => assert!(time > 0.0),
            Err(e) => panic!("{e}"),
        }
    }
}
