//! One module per experiment; [`execute`] dispatches on the configuration.

pub mod example3d;
pub mod kernel_check;
pub mod linear;
pub mod picard;
pub mod runs;

use serde::Serialize;

use acsim_core::solver::Model;
use acsim_core::Trajectory;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::outcome::{Assertion, Checked};

pub use example3d::Example3dReport;
pub use kernel_check::KernelCheckReport;
pub use linear::LinearProfileExperimentReport;
pub use picard::PicardReport;
pub use runs::{DecayReport, NsCompareReport, ProfileExperimentReport, SimulateReport};

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Report {
    KernelCheck(KernelCheckReport),
    Simulate(SimulateReport),
    NsCompare(NsCompareReport),
    Decay(DecayReport),
    Profile(ProfileExperimentReport),
    LinearProfile(LinearProfileExperimentReport),
    Example3d(Example3dReport),
    Picard(PicardReport),
}

impl Checked for Report {
    fn assertions(&self) -> &[Assertion] {
        match self {
            Report::KernelCheck(r) => r.assertions(),
            Report::Simulate(r) => r.assertions(),
            Report::NsCompare(r) => r.assertions(),
            Report::Decay(r) => r.assertions(),
            Report::Profile(r) => r.assertions(),
            Report::LinearProfile(r) => r.assertions(),
            Report::Example3d(r) => r.assertions(),
            Report::Picard(r) => r.assertions(),
        }
    }
}

/// A report plus the trajectories to write, keyed by file stem.
pub struct Execution {
    pub report: Report,
    pub trajectories: Vec<(&'static str, Trajectory)>,
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Execution, CliError> {
    let mut trajectories = Vec::new();
    let report = match cfg.experiment {
        Experiment::KernelCheck => Report::KernelCheck(kernel_check::kernel_check(cfg)?),
        Experiment::Example3d => Report::Example3d(example3d::example3d(cfg)?),
        Experiment::Picard => Report::Picard(picard::picard(cfg)?),
        Experiment::LinearProfile => Report::LinearProfile(linear::linear_profile(cfg)?),
        Experiment::Simulate => {
            let prep = runs::prepare(cfg)?;
            let traj = runs::run_model(cfg, &prep, Model::Temam)?;
            let drift = runs::drift_order(cfg, &prep)?;
            let r = runs::simulate_report(cfg, &traj, drift);
            trajectories.push(("trajectory", traj));
            Report::Simulate(r)
        }
        Experiment::Decay => {
            let prep = runs::prepare(cfg)?;
            let traj = runs::run_model(cfg, &prep, Model::Temam)?;
            let r = runs::decay_report(cfg, &traj)?;
            trajectories.push(("trajectory", traj));
            Report::Decay(r)
        }
        Experiment::NsCompare => {
            let prep = runs::prepare(cfg)?;
            let model = runs::run_model(cfg, &prep, Model::Temam)?;
            let reference = runs::run_model(cfg, &prep, Model::NavierStokes)?;
            let r = runs::ns_compare_report(cfg, &model, &reference)?;
            trajectories.push(("trajectory", model));
            trajectories.push(("trajectory_reference", reference));
            Report::NsCompare(r)
        }
        Experiment::Profile => {
            let prep = runs::prepare(cfg)?;
            let traj = runs::run_model(cfg, &prep, Model::Temam)?;
            let r = runs::profile_report(cfg, &traj)?;
            trajectories.push(("trajectory", traj));
            Report::Profile(r)
        }
    };
    Ok(Execution { report, trajectories })
}
