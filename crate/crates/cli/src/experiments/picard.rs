use serde::Serialize;

use acsim_core::asymptotics::linear_fit;
use acsim_core::solver::{picard_reference, picard_terms};
use acsim_core::spectral::mean_integral;
use acsim_core::Grid;

use crate::config::ExperimentConfig;
use crate::datum::build_datum;
use crate::error::CliError;
use crate::outcome::{Assertion, Checked};

#[derive(Clone, Debug, Serialize)]
pub struct PicardReport {
    pub times: Vec<f64>,
    /// `max_t |int T_k(t) dx|` for `k = 1, 2`.
    pub low_order_mass: [f64; 2],
    /// `|S_k(T) - u(T)|_2` for `k = 1 .. K`, `S_k = T_1 + ... + T_k`.
    pub partial_sum_errors: Vec<f64>,
    /// Consecutive ratios of `partial_sum_errors`.
    pub ratios: Vec<f64>,
    /// `exp` of the log-linear slope of the errors in `k`.
    pub geometric_rate: f64,
    pub assertions: Vec<Assertion>,
}

impl Checked for PicardReport {
    fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }
}

pub fn picard(cfg: &ExperimentConfig) -> Result<PicardReport, CliError> {
    let p = &cfg.picard;
    let tol = &cfg.tolerances;
    let grid = Grid::new(cfg.n_dims, cfg.box_length, cfg.resolution)?;
    let u0 = build_datum(&grid, &cfg.datum)?;
    let times: Vec<f64> = (0..=p.steps).map(|i| p.t_final * i as f64 / p.steps as f64).collect();
    let terms = picard_terms(&u0, p.k_max, &times, cfg.epsilon)?;
    let reference = picard_reference(&u0, &times, cfg.epsilon, p.reference_tol)?;

    let mut mass = [0.0f64; 2];
    for (k, slot) in mass.iter_mut().enumerate().take(p.k_max.min(2)) {
        for m in 0..times.len() {
            let v = mean_integral(terms.term(k + 1, m));
            *slot = slot.max(v.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        }
    }
    let last = times.len() - 1;
    let errors: Vec<f64> = (1..=p.k_max)
        .map(|k| Ok(terms.partial_sum(k, last).sub(&reference[last])?.l2_squared().sqrt()))
        .collect::<Result<_, CliError>>()?;
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    let ks: Vec<f64> = (1..=p.k_max).map(|k| k as f64).collect();
    let logs: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let geometric_rate = if errors.len() >= 2 { linear_fit(&ks, &logs).0.exp() } else { f64::NAN };

    let mut assertions = vec![Assertion::at_most("mass of T1", mass[0], tol.picard_mass)];
    if p.k_max >= 2 {
        assertions.push(Assertion::at_most("mass of T2", mass[1], tol.picard_mass));
    }
    let worst = ratios.iter().cloned().fold(0.0f64, f64::max);
    if !ratios.is_empty() {
        assertions.push(Assertion::at_most("largest partial-sum error ratio", worst, tol.picard_ratio));
    }
    Ok(PicardReport {
        times,
        low_order_mass: mass,
        partial_sum_errors: errors,
        ratios,
        geometric_rate,
        assertions,
    })
}
