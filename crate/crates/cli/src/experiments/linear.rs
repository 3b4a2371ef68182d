use num_complex::Complex64;
use serde::Serialize;

use acsim_core::asymptotics::{verify_linear_profile, LinearProfileReport};
use acsim_core::{Grid, SpectralVectorField};

use crate::config::{ExperimentConfig, ForcingSpec};
use crate::error::CliError;
use crate::outcome::{Assertion, Checked};

/// Fourier coefficients of the forcing at time `s`.
pub fn forcing_field(grid: &Grid, spec: ForcingSpec, s: f64) -> SpectralVectorField {
    let n = grid.n_dims();
    let ksq = grid.k_squared();
    let scale = 1.0 / (grid.volume() * (1.0 + s).powi(2));
    let mut comps = vec![grid.zeros(); n];
    for flat in 0..grid.len() {
        let g = scale * (-(1.0 + s) * ksq[flat]).exp();
        comps[0][flat] = match spec {
            ForcingSpec::HeatMass => Complex64::new(g, 0.0),
            ForcingSpec::HeatDipole => Complex64::new(0.0, grid.derivative_wavevector(flat)[0] * g),
        };
    }
    SpectralVectorField::from_components(grid, comps).expect("n components")
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearRow {
    #[serde(with = "acsim_core::io::extended_f64")]
    pub q: f64,
    pub report: LinearProfileReport,
    /// First over last residual.
    pub residual_drop: f64,
    /// Last over first scaled norm.
    pub scaled_norm_change: f64,
    /// The zero-mass comparison run, when configured.
    pub zero_mass: Option<LinearProfileReport>,
    pub zero_mass_scaled_norm_change: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearProfileExperimentReport {
    pub rows: Vec<LinearRow>,
    pub assertions: Vec<Assertion>,
}

impl Checked for LinearProfileExperimentReport {
    fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }
}

fn change(v: &[f64]) -> f64 {
    v[v.len() - 1] / v[0]
}

pub fn linear_profile(cfg: &ExperimentConfig) -> Result<LinearProfileExperimentReport, CliError> {
    let p = &cfg.linear_profile;
    let grid = Grid::new(cfg.n_dims, cfg.box_length, cfg.resolution)?;
    let run = |spec: ForcingSpec, q: f64| {
        verify_linear_profile(&grid, p.kernel, |s| forcing_field(&grid, spec, s), q, &p.t_list, p.beta, p.quad_tol)
    };
    let mut rows = Vec::new();
    let mut assertions = Vec::new();
    for q in cfg.q_values() {
        let report = run(p.forcing, q)?;
        let residual_drop = report.residual_series[0] / report.residual_series[report.residual_series.len() - 1];
        let scaled_norm_change = change(&report.scaled_norm_series);
        assertions.push(Assertion::at_least(
            format!("residual drop q={q}"),
            residual_drop,
            cfg.tolerances.linear_profile_drop,
        ));
        let (zero_mass, zero_change) = if p.compare_zero_mass && p.forcing != ForcingSpec::HeatDipole {
            let z = run(ForcingSpec::HeatDipole, q)?;
            let c = change(&z.scaled_norm_series);
            assertions.push(Assertion::new(
                format!("zero-mass scaled norm change q={q} below the massive one"),
                c,
                crate::outcome::Relation::Below,
                scaled_norm_change,
            ));
            (Some(z), Some(c))
        } else {
            (None, None)
        };
        rows.push(LinearRow {
            q,
            report,
            residual_drop,
            scaled_norm_change,
            zero_mass,
            zero_mass_scaled_norm_change: zero_change,
        });
    }
    Ok(LinearProfileExperimentReport { rows, assertions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use acsim_core::spectral::mean_integral;

    #[test]
    fn forcing_masses() {
        let g = Grid::new(2, 40.0, 32).unwrap();
        let m = mean_integral(&forcing_field(&g, ForcingSpec::HeatMass, 1.0));
        assert!((m[0] - 0.25).abs() < 1e-14 && m[1] == 0.0);
        let d = mean_integral(&forcing_field(&g, ForcingSpec::HeatDipole, 1.0));
        assert!(d.iter().all(|v| v.abs() < 1e-16));
    }
}
