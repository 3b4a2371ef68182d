use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;

/// Worst relative violation of the energy inequality over all record pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EnergyReport {
    /// `max (|u(t)|^2 + 2 int_s^t D) / |u(s)|^2 - 1` over `s < t`.
    #[serde(with = "crate::io::extended_f64")]
    pub worst_violation: f64,
    pub worst_pair: (f64, f64),
    pub pairs_checked: usize,
    pub tolerance: f64,
    pub satisfied: bool,
}

pub fn energy_ledger(traj: &Trajectory, eps: f64, tol: f64) -> EnergyReport {
    let n = traj.records.len();
    let energy: Vec<f64> = traj.records.iter().map(|r| r.energy).collect();
    let diss: Vec<f64> = (0..n).map(|i| traj.dissipation(i, eps)).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut pair = (0.0, 0.0);
    let mut checked = 0;
    for s in 0..n {
        if energy[s] <= 0.0 {
            continue;
        }
        for t in s + 1..n {
            let v = (energy[t] + 2.0 * (diss[t] - diss[s])) / energy[s] - 1.0;
            checked += 1;
            if v > worst {
                worst = v;
                pair = (traj.records[s].t, traj.records[t].t);
            }
        }
    }
    if checked == 0 {
        worst = 0.0;
    }
    EnergyReport {
        worst_violation: worst,
        worst_pair: pair,
        pairs_checked: checked,
        tolerance: tol,
        satisfied: worst <= tol,
    }
}

/// Step-by-step comparison of `d/dt int u` with `1/2 int u div u`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MeanDriftReport {
    /// Largest `|dm/dt - (h_n + h_{n+1}) / 2|` over steps and components,
    /// `h = 1/2 int u div u`.
    pub max_abs_error: f64,
    /// Largest `|h|` seen, for scale.
    pub max_rate: f64,
    pub steps: usize,
}

pub fn mean_drift_check(traj: &Trajectory) -> MeanDriftReport {
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for w in traj.records.windows(2) {
        let dt = w[1].t - w[0].t;
        for d in 0..w[0].mean.len() {
            let rate = (w[1].mean[d] - w[0].mean[d]) / dt;
            let mid = 0.5 * (w[0].half_u_div_u[d] + w[1].half_u_div_u[d]);
            err = err.max((rate - mid).abs());
            scale = scale.max(w[0].half_u_div_u[d].abs());
        }
    }
    MeanDriftReport {
        max_abs_error: err,
        max_rate: scale,
        steps: traj.records.len().saturating_sub(1),
    }
}
