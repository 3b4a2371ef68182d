use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;
use crate::spectral::lq_norm;

/// Parameters of one simulation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_dims: usize,
    pub box_length: f64,
    pub resolution: usize,
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "yes")]
    pub nonlinearity_on: bool,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "yes")]
    pub dealias: bool,
    /// Blow-up cap as a multiple of the initial `L^inf` norm.
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
    /// Over `[0, startup_time]` every step is split into
    /// `startup_refinement` equal sub-steps (initial transients).
    #[serde(default)]
    pub startup_time: f64,
    #[serde(default = "one")]
    pub startup_refinement: usize,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn default_blowup() -> f64 {
    1e6
}

impl SimConfig {
    pub fn new(grid: &Grid, epsilon: f64, dt: f64, t_end: f64) -> Self {
        Self {
            n_dims: grid.n_dims(),
            box_length: grid.box_length(),
            resolution: grid.resolution(),
            epsilon,
            dt,
            t_end,
            nonlinearity_on: true,
            snapshot_times: Vec::new(),
            dealias: true,
            blowup_factor: default_blowup(),
            startup_time: 0.0,
            startup_refinement: 1,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n_dims, self.box_length, self.resolution)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(Error::config(format!(
                "t_end ({}) must be at least dt ({})",
                self.t_end, self.dt
            )));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(Error::config("blowup_factor must exceed 1"));
        }
        if !(self.startup_time >= 0.0 && self.startup_time <= self.t_end) || self.startup_refinement == 0 {
            return Err(Error::config("need 0 <= startup_time <= t_end and startup_refinement >= 1"));
        }
        if self.snapshot_times.iter().any(|&s| s < 0.0 || s > self.t_end + 0.5 * self.dt) {
            return Err(Error::config("snapshot_times must lie in [0, t_end]"));
        }
        Ok(())
    }

    /// Number of steps of size `dt`; `t_end` is rounded to a whole number of `dt`.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }

    /// Number of leading `dt` steps that are refined.
    pub fn startup_steps(&self) -> usize {
        if self.startup_refinement > 1 {
            ((self.startup_time / self.dt).round() as usize).min(self.n_steps())
        } else {
            0
        }
    }

    /// Record times: fine steps over the start-up, then steps of `dt`.
    pub fn record_times(&self) -> Vec<f64> {
        let r = self.startup_refinement;
        let s0 = self.startup_steps();
        let fine = self.dt / r as f64;
        let mut t: Vec<f64> = (0..s0 * r).map(|i| i as f64 * fine).collect();
        t.extend((s0..=self.n_steps()).map(|i| i as f64 * self.dt));
        t
    }
}

/// Default step: a quarter of the advective CFL limit `dx / |u0|_inf`,
/// capped at `t_end / 1000`. The linear part imposes no restriction.
pub fn suggest_dt(u0: &SpectralVectorField, t_end: f64) -> f64 {
    let umax = lq_norm(u0, f64::INFINITY);
    let cap = t_end / 1000.0;
    if umax > 0.0 {
        (0.25 * u0.grid().spacing() / umax).min(cap)
    } else {
        cap
    }
}
