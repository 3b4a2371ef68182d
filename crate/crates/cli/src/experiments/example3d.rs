use serde::Serialize;

use acsim_core::asymptotics::{lambda_from_mean, linear_fit, mean_series, LambdaEstimate};
use acsim_core::example3d::{
    build_example_datum, calibrate_rhs, perturbative_prediction, plancherel_factor, t3_first_component,
    t3_first_component_tensor, t3_limit, xi_integral_closed_form, Calibration,
};
use acsim_core::quadrature::gauss_hermite;
use acsim_core::solver::{run, suggest_dt};
use acsim_core::Grid;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::outcome::{Assertion, Checked};

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormRow {
    pub lambda: f64,
    pub tau: f64,
    pub closed_form: f64,
    pub hermite: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct T3Row {
    pub t: f64,
    pub adaptive: f64,
    pub adaptive_error_estimate: f64,
    pub tensor: f64,
    pub relative_difference: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EtaRun {
    pub eta: f64,
    pub dt: f64,
    pub predicted_lambda: [f64; 3],
    pub measured_lambda: LambdaEstimate,
    /// `measured / predicted - 1` on the first component.
    pub relative_error: f64,
    /// `max(|lambda_2|, |lambda_3|) / |lambda_1|`.
    pub transverse_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Example3dReport {
    pub eps: f64,
    pub eta: Vec<f64>,
    #[serde(rename = "L3")]
    pub l3: f64,
    pub l3_error_estimate: f64,
    pub calibration_ratio: f64,
    pub calibration: Calibration,
    /// First components, one per amplitude.
    pub predicted_lambda: Vec<f64>,
    pub measured_lambda: Vec<f64>,
    pub relative_error: Vec<f64>,
    pub closed_forms: Vec<ClosedFormRow>,
    pub t3: Vec<T3Row>,
    pub runs: Vec<EtaRun>,
    /// Log-log slope of `lambda_1` against `eta`.
    pub eta_exponent: Option<f64>,
    /// `lambda_1 / eta^3` extrapolated to `eta -> 0` from the two smallest
    /// amplitudes (error `O(eta^2)`), divided by `L3 c`.
    pub extrapolated_ratio: Option<f64>,
    pub assertions: Vec<Assertion>,
}

impl Checked for Example3dReport {
    fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }
}

/// `int exp(-lambda |xi|^2) xi2^2 ((xi1^2 xi2^2 + xi2^4)(tau+1) - 3 xi1^2 - xi2^2) d xi`
/// by a tensor Gauss-Hermite rule after `xi = x / sqrt(lambda)`.
pub fn xi_integral_hermite(lambda: f64, tau: f64, nodes: usize) -> f64 {
    let (x, w) = gauss_hermite(nodes);
    let s = lambda.sqrt().recip();
    let mut total = 0.0;
    for (a, wa) in x.iter().zip(&w) {
        let x1 = (a * s).powi(2);
        for (b, wb) in x.iter().zip(&w) {
            let x2 = (b * s).powi(2);
            let p = x2 * ((x1 * x2 + x2 * x2) * (tau + 1.0) - 3.0 * x1 - x2);
            // the third direction only contributes its Gaussian mass
            total += wa * wb * p;
        }
    }
    let third: f64 = w.iter().sum();
    total * third * s.powi(3)
}

fn closed_forms(cfg: &ExperimentConfig) -> Result<Vec<ClosedFormRow>, CliError> {
    let p = &cfg.example3d;
    let mut rows = Vec::new();
    for &lambda in &p.closed_form_lambdas {
        for &tau in &p.closed_form_taus {
            let closed = xi_integral_closed_form(lambda, tau)?;
            let hermite = xi_integral_hermite(lambda, tau, p.hermite_nodes);
            rows.push(ClosedFormRow {
                lambda,
                tau,
                closed_form: closed,
                hermite,
                relative_error: (closed - hermite).abs() / closed.abs().max(hermite.abs()),
            });
        }
    }
    Ok(rows)
}

fn t3_rows(cfg: &ExperimentConfig) -> Result<Vec<T3Row>, CliError> {
    let p = &cfg.example3d;
    p.t3_times
        .iter()
        .map(|&t| {
            let a = t3_first_component(t, cfg.epsilon, p.t3_tol)?;
            let b = t3_first_component_tensor(t, cfg.epsilon, p.tensor_order)?;
            Ok(T3Row {
                t,
                adaptive: a.value,
                adaptive_error_estimate: a.abs_error_estimate,
                tensor: b,
                relative_difference: (a.value - b).abs() / a.value.abs().max(b.abs()),
            })
        })
        .collect()
}

pub fn example3d(cfg: &ExperimentConfig) -> Result<Example3dReport, CliError> {
    let p = &cfg.example3d;
    let tol = &cfg.tolerances;
    let grid = Grid::new(3, cfg.box_length, cfg.resolution)?;

    let closed = closed_forms(cfg)?;
    let t3 = t3_rows(cfg)?;
    let limit = t3_limit(cfg.epsilon, p.limit_tol);
    let calibration = calibrate_rhs(&grid, p.calibration_tau, p.calibration_threshold)?;

    let mut assertions = Vec::new();
    for r in &closed {
        assertions.push(Assertion::at_most(
            format!("closed form vs quadrature lambda={} tau={}", r.lambda, r.tau),
            r.relative_error,
            tol.closed_form,
        ));
    }
    assertions.push(Assertion::at_most("calibration spread", calibration.spread, tol.calibration_spread));
    let increasing = t3.windows(2).all(|w| w[1].adaptive > w[0].adaptive);
    assertions.push(Assertion::holds("leading term strictly increasing", increasing));
    for r in &t3 {
        assertions.push(Assertion::at_most(
            format!("quadrature schemes agree t={}", r.t),
            r.relative_difference,
            tol.t3_agreement,
        ));
    }
    let (l3, l3_err) = match &limit {
        Ok(q) => (q.value, q.abs_error_estimate),
        Err(e) => {
            log::error!("limit of the leading term: {e}");
            (f64::NAN, f64::NAN)
        }
    };
    assertions.push(Assertion::holds("leading-term limit converged", limit.is_ok()));
    assertions.push(Assertion::new("leading-term limit", l3, crate::outcome::Relation::Above, 0.0));

    let mut runs = Vec::new();
    for &eta in &p.eta_list {
        let u0 = build_example_datum(&grid, eta)?;
        let dt = cfg.dt.unwrap_or_else(|| suggest_dt(&u0, cfg.t_end));
        let mut sim = cfg.sim_config(dt);
        sim.snapshot_times.clear();
        log::info!("example run eta={eta} dt={dt}");
        let traj = run(&sim, &u0)?;
        let measured = lambda_from_mean(&mean_series(&traj))?;
        let predicted = perturbative_prediction(eta, l3, calibration.ratio);
        let v = &measured.value;
        runs.push(EtaRun {
            eta,
            dt,
            predicted_lambda: predicted,
            relative_error: v[0] / predicted[0] - 1.0,
            transverse_ratio: v[1].abs().max(v[2].abs()) / v[0].abs(),
            measured_lambda: measured,
        });
    }

    let mut eta_exponent = None;
    let mut extrapolated_ratio = None;
    for r in &runs {
        assertions.push(Assertion::at_most(
            format!("transverse components eta={}", r.eta),
            r.transverse_ratio,
            tol.transverse_ratio,
        ));
    }
    if runs.len() >= 2 {
        let x: Vec<f64> = runs.iter().map(|r| r.eta.ln()).collect();
        let y: Vec<f64> = runs.iter().map(|r| r.measured_lambda.value[0].abs().ln()).collect();
        let (slope, _, _) = linear_fit(&x, &y);
        eta_exponent = Some(slope);
        assertions.push(Assertion::at_most("eta-scaling exponent distance from 3", (slope - 3.0).abs(), tol.eta_exponent));

        let mut sorted: Vec<&EtaRun> = runs.iter().collect();
        sorted.sort_by(|a, b| a.eta.total_cmp(&b.eta));
        let (a, b) = (sorted[0], sorted[1]);
        let xa = a.measured_lambda.value[0] / a.eta.powi(3);
        let xb = b.measured_lambda.value[0] / b.eta.powi(3);
        let limit_coeff = (b.eta.powi(2) * xa - a.eta.powi(2) * xb) / (b.eta.powi(2) - a.eta.powi(2));
        let ratio = limit_coeff / (l3 * calibration.ratio * plancherel_factor());
        extrapolated_ratio = Some(ratio);
        assertions.push(Assertion::at_most(
            "extrapolated lambda relative to prediction",
            (ratio - 1.0).abs(),
            tol.lambda_relative,
        ));
    }

    Ok(Example3dReport {
        eps: cfg.epsilon,
        eta: runs.iter().map(|r| r.eta).collect(),
        l3,
        l3_error_estimate: l3_err,
        calibration_ratio: calibration.ratio,
        calibration,
        predicted_lambda: runs.iter().map(|r| r.predicted_lambda[0]).collect(),
        measured_lambda: runs.iter().map(|r| r.measured_lambda.value[0]).collect(),
        relative_error: runs.iter().map(|r| r.relative_error).collect(),
        closed_forms: closed,
        t3,
        runs,
        eta_exponent,
        extrapolated_ratio,
        assertions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_rule_is_exact_for_the_polynomial() {
        for (l, t) in [(2.0, 0.0), (5.0, 1.0), (10.0, 2.0)] {
            let a = xi_integral_hermite(l, t, 6);
            let b = xi_integral_hermite(l, t, 12);
            assert!((a - b).abs() <= 1e-13 * b.abs());
        }
    }
}
