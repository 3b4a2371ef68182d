//! Experiments built on one or two time-stepped runs.

use serde::Serialize;

use acsim_core::asymptotics::{
    decay_exponent, decay_fit, lambda_from_mean, mean_series, profile_residual, DecayFit, LambdaEstimate, ProfileKind,
    ProfileReport,
};
use acsim_core::solver::{energy_ledger, integrate, mean_drift_check, suggest_dt, EnergyReport, MeanDriftReport, Model};
use acsim_core::{Grid, SpectralVectorField, Trajectory};

use crate::config::{ExperimentConfig, ProfileChoice};
use crate::datum::build_datum;
use crate::error::CliError;
use crate::outcome::{Assertion, Checked};

/// Grid, initial field and step of a configured run.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub grid: Grid,
    pub u0: SpectralVectorField,
    pub dt: f64,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, CliError> {
    let grid = Grid::new(cfg.n_dims, cfg.box_length, cfg.resolution)?;
    let u0 = build_datum(&grid, &cfg.datum)?;
    let dt = cfg.dt.unwrap_or_else(|| suggest_dt(&u0, cfg.t_end));
    Ok(Prepared { grid, u0, dt })
}

pub fn run_model(cfg: &ExperimentConfig, prep: &Prepared, model: Model) -> Result<Trajectory, CliError> {
    log::info!(
        "{model:?} run: n={} N={} L={} dt={} t_end={}",
        cfg.n_dims,
        cfg.resolution,
        cfg.box_length,
        prep.dt,
        cfg.t_end
    );
    Ok(integrate(&cfg.sim_config(prep.dt), &prep.u0, model)?)
}

/// Mean-drift identity error for steps `dt` and `dt / 2` over a short run.
#[derive(Clone, Debug, Serialize)]
pub struct DriftOrder {
    pub horizon: f64,
    pub coarse: MeanDriftReport,
    pub fine: MeanDriftReport,
    /// `log2(coarse / fine)`; `None` when the coarse error vanishes.
    pub order: Option<f64>,
}

pub fn drift_order(cfg: &ExperimentConfig, prep: &Prepared) -> Result<DriftOrder, CliError> {
    let horizon = cfg.drift_horizon.min(cfg.t_end);
    let mut sim = cfg.sim_config(prep.dt);
    sim.t_end = horizon;
    sim.snapshot_times.clear();
    let coarse = mean_drift_check(&integrate(&sim, &prep.u0, Model::Temam)?);
    sim.dt = 0.5 * prep.dt;
    let fine = mean_drift_check(&integrate(&sim, &prep.u0, Model::Temam)?);
    let order = if coarse.max_abs_error > 0.0 {
        Some((coarse.max_abs_error / fine.max_abs_error).log2())
    } else {
        None
    };
    Ok(DriftOrder {
        horizon,
        coarse,
        fine,
        order,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulateReport {
    pub dt: f64,
    pub steps: usize,
    pub final_time: f64,
    pub final_energy: f64,
    pub final_mean: Vec<f64>,
    pub energy: EnergyReport,
    pub drift: DriftOrder,
    pub assertions: Vec<Assertion>,
}

impl Checked for SimulateReport {
    fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }
}

pub fn simulate_report(cfg: &ExperimentConfig, traj: &Trajectory, drift: DriftOrder) -> SimulateReport {
    let tol = &cfg.tolerances;
    let energy = energy_ledger(traj, cfg.epsilon, tol.energy);
    let mut assertions = vec![Assertion::at_most("energy inequality violation", energy.worst_violation, tol.energy)];
    match drift.order {
        Some(p) => assertions.push(Assertion::at_most("mean-drift order distance from 2", (p - 2.0).abs(), tol.drift_order)),
        None => assertions.push(Assertion::holds("mean drift exact", true)),
    }
    let last = traj.last();
    SimulateReport {
        dt: traj.dt,
        steps: traj.len() - 1,
        final_time: last.t,
        final_energy: last.energy,
        final_mean: last.mean.clone(),
        energy,
        drift,
        assertions,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    #[serde(with = "acsim_core::io::extended_f64")]
    pub q: f64,
    #[serde(with = "acsim_core::io::extended_f64")]
    pub predicted_exponent: f64,
    /// `None` when the run is identically zero and the fit is skipped.
    pub fit: Option<DecayFit>,
}

fn fits(cfg: &ExperimentConfig, traj: &Trajectory) -> Result<Vec<DecayRow>, CliError> {
    let zero = traj.records.iter().all(|r| r.linf == 0.0);
    cfg.q_values()
        .into_iter()
        .map(|q| {
            let fit = if zero { None } else { Some(decay_fit(traj, q, cfg.fit_window)?) };
            Ok(DecayRow {
                q,
                predicted_exponent: decay_exponent(cfg.n_dims, q),
                fit,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub dt: f64,
    pub skipped: bool,
    pub fits: Vec<DecayRow>,
    pub assertions: Vec<Assertion>,
}

impl Checked for DecayReport {
    fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }
}

pub fn decay_report(cfg: &ExperimentConfig, traj: &Trajectory) -> Result<DecayReport, CliError> {
    let rows = fits(cfg, traj)?;
    let skipped = rows.iter().all(|r| r.fit.is_none());
    let assertions = rows
        .iter()
        .filter_map(|r| {
            r.fit.as_ref().map(|f| {
                Assertion::at_most(
                    format!("decay exponent q={} distance from prediction", r.q),
                    (f.fitted_exponent - r.predicted_exponent).abs(),
                    cfg.tolerances.decay_exponent,
                )
            })
        })
        .collect();
    Ok(DecayReport {
        dt: traj.dt,
        skipped,
        fits: rows,
        assertions,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NsCompareReport {
    pub dt: f64,
    pub lambda: LambdaEstimate,
    pub model_fits: Vec<DecayRow>,
    pub reference_fits: Vec<DecayRow>,
    pub assertions: Vec<Assertion>,
}

impl Checked for NsCompareReport {
    fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }
}

/// Compares the `L^2` decay of the model run with the projected reference
/// run from the same datum.
pub fn ns_compare_report(cfg: &ExperimentConfig, model: &Trajectory, reference: &Trajectory) -> Result<NsCompareReport, CliError> {
    let tol = &cfg.tolerances;
    let lambda = lambda_from_mean(&mean_series(model))?;
    let mut q_cfg = cfg.clone();
    if !q_cfg.q_values().contains(&2.0) {
        q_cfg.q_list.push(crate::config::QValue(2.0));
    }
    let model_fits = fits(&q_cfg, model)?;
    let reference_fits = fits(&q_cfg, reference)?;
    let l2 = |rows: &[DecayRow]| {
        rows.iter()
            .find(|r| r.q == 2.0)
            .and_then(|r| r.fit.as_ref())
            .map(|f| f.fitted_exponent)
            .unwrap_or(f64::NAN)
    };
    let predicted = decay_exponent(cfg.n_dims, 2.0);
    let assertions = vec![
        Assertion::at_least("limiting mean magnitude", lambda.norm(), f64::MIN_POSITIVE),
        Assertion::holds("limiting mean converged", lambda.converged),
        Assertion::at_most("model L2 exponent distance from n/4", (l2(&model_fits) - predicted).abs(), tol.decay_exponent),
        Assertion::at_least("reference L2 exponent", l2(&reference_fits), tol.ns_min_exponent),
    ];
    Ok(NsCompareReport {
        dt: model.dt,
        lambda,
        model_fits,
        reference_fits,
        assertions,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileExperimentReport {
    pub dt: f64,
    pub lambda: LambdaEstimate,
    pub profile: ProfileChoice,
    pub residuals: Vec<ProfileReport>,
    /// The same series against the other profile, for comparison only.
    pub alternative: Vec<ProfileReport>,
    pub assertions: Vec<Assertion>,
}

impl Checked for ProfileExperimentReport {
    fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }
}

pub fn profile_report(cfg: &ExperimentConfig, traj: &Trajectory) -> Result<ProfileExperimentReport, CliError> {
    let lambda = lambda_from_mean(&mean_series(traj))?;
    let heat = ProfileKind::Heat;
    let full = ProfileKind::MEpsilon { eps: cfg.epsilon };
    let (chosen, other) = match cfg.profile_kind {
        ProfileChoice::Heat => (heat, full),
        ProfileChoice::MEpsilon => (full, heat),
    };
    let mut residuals = Vec::new();
    let mut alternative = Vec::new();
    for q in cfg.q_values() {
        residuals.push(profile_residual(traj, &lambda, q, chosen)?);
        alternative.push(profile_residual(traj, &lambda, q, other)?);
    }
    let mut assertions = vec![Assertion::at_least("limiting mean magnitude", lambda.norm(), f64::MIN_POSITIVE)];
    for r in &residuals {
        assertions.push(Assertion::holds(format!("residual q={} decreasing over the final decade", r.q), r.decreasing));
        assertions.push(Assertion::at_most(
            format!("final residual q={} relative to |lambda| c", r.q),
            r.final_relative,
            cfg.tolerances.profile_relative,
        ));
    }
    Ok(ProfileExperimentReport {
        dt: traj.dt,
        lambda,
        profile: cfg.profile_kind,
        residuals,
        alternative,
        assertions,
    })
}
