//! Experiment configuration: JSON parsing, defaults and validation.

use std::fmt;
use std::path::PathBuf;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use acsim_core::asymptotics::LinearKernel;
use acsim_core::SimConfig;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    KernelCheck,
    Simulate,
    NsCompare,
    Decay,
    Profile,
    LinearProfile,
    Example3d,
    Picard,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::KernelCheck,
        Experiment::Simulate,
        Experiment::NsCompare,
        Experiment::Decay,
        Experiment::Profile,
        Experiment::LinearProfile,
        Experiment::Example3d,
        Experiment::Picard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::KernelCheck => "kernel-check",
            Experiment::Simulate => "simulate",
            Experiment::NsCompare => "ns-compare",
            Experiment::Decay => "decay",
            Experiment::Profile => "profile",
            Experiment::LinearProfile => "linear-profile",
            Experiment::Example3d => "example3d",
            Experiment::Picard => "picard",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::KernelCheck => "propagator identities on random fields, semigroup law and kernel norm scaling",
            Experiment::Simulate => "one run of the model; energy inequality and mean-drift order",
            Experiment::NsCompare => "decay exponents of the model and of the projected reference flow",
            Experiment::Decay => "fitted L^q decay exponents of one run",
            Experiment::Profile => "residual against the self-similar profile with the limiting mean",
            Experiment::LinearProfile => "profile of the linear Duhamel integral for a prescribed forcing",
            Experiment::Example3d => "closed forms, leading cubic term and perturbative mean of the 3-D datum",
            Experiment::Picard => "vanishing masses and convergence of the Picard partial sums",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

/// An exponent `q` in `[1, inf]`; `"inf"` in JSON for infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QValue(pub f64);

impl Serialize for QValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for QValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = QValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<QValue, E> {
                Ok(QValue(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<QValue, E> {
                Ok(QValue(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<QValue, E> {
                Ok(QValue(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<QValue, E> {
                match v {
                    "inf" | "infinity" | "Infinity" => Ok(QValue(f64::INFINITY)),
                    _ => v.parse().map(QValue).map_err(|_| E::custom(format!("bad exponent {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Initial field.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum DatumSpec {
    Zero,
    /// Fourier coefficients `eta (k2^2, -k1 k2, 0) exp(-width |k|^2) / L^n`:
    /// divergence-free, zero mean, nonzero limiting mean under the model.
    CurlGaussian { eta: f64, width: f64 },
    /// `eta grad exp(-|x|^2 / (4 width))` up to normalization: curl-free.
    GradientGaussian { eta: f64, width: f64 },
    /// The three-dimensional example datum (width 1, needs `n_dims = 3`).
    Example3d { eta: f64 },
    /// A snapshot written by a previous run.
    Snapshot { path: PathBuf },
}

impl Default for DatumSpec {
    fn default() -> Self {
        DatumSpec::CurlGaussian { eta: 1.0, width: 1.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub n_dims: usize,
    pub resolution: usize,
    pub box_length: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct KernelCheckParams {
    pub samples: usize,
    pub times: Vec<f64>,
    pub eps_list: Vec<f64>,
    /// Grid on which the kernel is materialized for the scaling check.
    pub scaling_grid: GridSpec,
}

impl Default for KernelCheckParams {
    fn default() -> Self {
        KernelCheckParams {
            samples: 100,
            times: vec![0.5, 1.0, 2.0, 4.0],
            eps_list: vec![0.1, 1.0],
            scaling_grid: GridSpec {
                n_dims: 2,
                resolution: 512,
                box_length: 160.0,
            },
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_dims: 2,
            resolution: 512,
            box_length: 160.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Example3dParams {
    /// Amplitudes to simulate; empty skips the simulations.
    pub eta_list: Vec<f64>,
    pub closed_form_lambdas: Vec<f64>,
    pub closed_form_taus: Vec<f64>,
    pub hermite_nodes: usize,
    pub calibration_tau: f64,
    pub calibration_threshold: f64,
    pub t3_times: Vec<f64>,
    pub t3_tol: f64,
    pub tensor_order: usize,
    pub limit_tol: f64,
}

impl Default for Example3dParams {
    fn default() -> Self {
        Example3dParams {
            eta_list: vec![0.02, 0.04, 0.08],
            closed_form_lambdas: vec![2.0, 5.0, 10.0],
            closed_form_taus: vec![0.0, 1.0, 2.0],
            hermite_nodes: 12,
            calibration_tau: 1.0,
            calibration_threshold: 1e-6,
            t3_times: vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            t3_tol: 1e-12,
            tensor_order: 40,
            limit_tol: 1e-13,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PicardParams {
    pub k_max: usize,
    /// Mesh `0, t_final / steps, ..., t_final`.
    pub t_final: f64,
    pub steps: usize,
    pub reference_tol: f64,
}

impl Default for PicardParams {
    fn default() -> Self {
        PicardParams {
            k_max: 5,
            t_final: 2.0,
            steps: 20,
            reference_tol: 1e-14,
        }
    }
}

/// Forcing of the linear profile experiment.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum ForcingSpec {
    /// `e_1 E(y, 1 + s) / (1 + s)^2`: total mass `e_1`.
    HeatMass,
    /// `e_1 d_1 E(y, 1 + s) / (1 + s)^2`: total mass zero.
    HeatDipole,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LinearProfileParams {
    pub kernel: LinearKernel,
    pub forcing: ForcingSpec,
    /// Also run the zero-mass forcing and require faster decay.
    pub compare_zero_mass: bool,
    pub t_list: Vec<f64>,
    pub beta: f64,
    pub quad_tol: f64,
}

impl Default for LinearProfileParams {
    fn default() -> Self {
        LinearProfileParams {
            kernel: LinearKernel::Heat,
            forcing: ForcingSpec::HeatMass,
            compare_zero_mass: true,
            t_list: vec![10.0, 20.0, 40.0, 100.0],
            beta: 2.0,
            quad_tol: 1e-10,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileChoice {
    /// `lambda E(., t)` on every component.
    Heat,
    /// `M_eps(., t) lambda`.
    #[default]
    MEpsilon,
}

/// Every threshold an experiment asserts against.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub kernel_identity: f64,
    pub semigroup: f64,
    pub kernel_scaling: f64,
    pub closed_form: f64,
    pub calibration_spread: f64,
    pub t3_agreement: f64,
    pub eta_exponent: f64,
    pub lambda_relative: f64,
    pub transverse_ratio: f64,
    pub decay_exponent: f64,
    pub ns_min_exponent: f64,
    pub profile_relative: f64,
    pub linear_profile_drop: f64,
    pub picard_mass: f64,
    /// Largest allowed ratio of consecutive Picard partial-sum errors.
    pub picard_ratio: f64,
    pub energy: f64,
    /// Allowed distance of the observed mean-drift order from 2.
    pub drift_order: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            kernel_identity: 1e-12,
            semigroup: 1e-13,
            kernel_scaling: 1e-4,
            closed_form: 1e-8,
            calibration_spread: 1e-6,
            t3_agreement: 1e-8,
            eta_exponent: 0.1,
            lambda_relative: 0.1,
            transverse_ratio: 1e-3,
            decay_exponent: 0.1,
            ns_min_exponent: 0.85,
            profile_relative: 0.2,
            linear_profile_drop: 5.0,
            picard_mass: 1e-8,
            picard_ratio: 0.9,
            energy: 1e-6,
            drift_order: 0.5,
        }
    }
}

fn default_n_dims() -> usize {
    3
}
fn default_resolution() -> usize {
    64
}
fn default_box_length() -> f64 {
    40.0
}
fn one() -> f64 {
    1.0
}
fn default_t_end() -> f64 {
    20.0
}
fn yes() -> bool {
    true
}
fn default_blowup() -> f64 {
    1e6
}
fn default_refinement() -> usize {
    1
}
fn default_q_list() -> Vec<QValue> {
    vec![QValue(1.0), QValue(2.0), QValue(f64::INFINITY)]
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("acsim-output")
}
fn default_snapshot_count() -> usize {
    21
}
fn default_drift_horizon() -> f64 {
    1.0
}
fn default_seed() -> u64 {
    20240601
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "default_n_dims")]
    pub n_dims: usize,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_box_length")]
    pub box_length: f64,
    #[serde(default = "one")]
    pub epsilon: f64,
    /// `None` picks a step from the datum's sup norm.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "yes")]
    pub nonlinearity_on: bool,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
    /// Steps over `[0, startup_time]` are split into `startup_refinement`
    /// sub-steps.
    #[serde(default)]
    pub startup_time: f64,
    #[serde(default = "default_refinement")]
    pub startup_refinement: usize,
    /// Explicit snapshot times; `None` spreads `snapshot_count` times
    /// geometrically over the last decade `[t_end / 10, t_end]`.
    #[serde(default)]
    pub snapshot_times: Option<Vec<f64>>,
    #[serde(default = "default_snapshot_count")]
    pub snapshot_count: usize,
    /// Write every snapshot as raw `f64` with a JSON sidecar.
    #[serde(default)]
    pub write_snapshots: bool,
    #[serde(default = "default_q_list")]
    pub q_list: Vec<QValue>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub datum: DatumSpec,
    /// Fit window for decay exponents; default `[t_end / 10, horizon]`.
    #[serde(default)]
    pub fit_window: Option<(f64, f64)>,
    /// Length of the two short runs (steps `dt` and `dt / 2`) that measure
    /// the order of the mean-drift identity.
    #[serde(default = "default_drift_horizon")]
    pub drift_horizon: f64,
    /// Profile the residual is measured against.
    #[serde(default)]
    pub profile_kind: ProfileChoice,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub kernel_check: KernelCheckParams,
    #[serde(default)]
    pub example3d: Example3dParams,
    #[serde(default)]
    pub picard: PicardParams,
    #[serde(default)]
    pub linear_profile: LinearProfileParams,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    /// Defaults for `experiment`.
    pub fn new(experiment: Experiment) -> Self {
        let text = format!("{{\"experiment\":\"{}\"}}", experiment.name());
        serde_json::from_str(&text).expect("defaults parse")
    }

    pub fn q_values(&self) -> Vec<f64> {
        self.q_list.iter().map(|q| q.0).collect()
    }

    /// Snapshot times in use (explicit or the default geometric set).
    pub fn snapshot_times(&self) -> Vec<f64> {
        match &self.snapshot_times {
            Some(t) => t.clone(),
            None => {
                let k = self.snapshot_count.max(2) - 1;
                (0..=k)
                    .map(|i| self.t_end * 10f64.powf(-1.0 + i as f64 / k as f64))
                    .collect()
            }
        }
    }

    /// Solver configuration with the given step.
    pub fn sim_config(&self, dt: f64) -> SimConfig {
        SimConfig {
            n_dims: self.n_dims,
            box_length: self.box_length,
            resolution: self.resolution,
            epsilon: self.epsilon,
            dt,
            t_end: self.t_end,
            nonlinearity_on: self.nonlinearity_on,
            snapshot_times: self.snapshot_times(),
            dealias: self.dealias,
            blowup_factor: self.blowup_factor,
            startup_time: self.startup_time,
            startup_refinement: self.startup_refinement,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::invalid(field, msg));
        if !(1..=3).contains(&self.n_dims) {
            return bad("n_dims", format!("must be 1, 2 or 3, got {}", self.n_dims));
        }
        if self.resolution < 8 || self.resolution % 2 != 0 {
            return bad("resolution", format!("must be even and at least 8, got {}", self.resolution));
        }
        if !(self.box_length > 0.0 && self.box_length.is_finite()) {
            return bad("box_length", format!("must be positive, got {}", self.box_length));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon", format!("must be positive, got {}", self.epsilon));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad("dt", format!("must be positive, got {dt}"));
            }
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end", format!("must be positive, got {}", self.t_end));
        }
        if !(self.blowup_factor > 1.0) {
            return bad("blowup_factor", format!("must exceed 1, got {}", self.blowup_factor));
        }
        for t in self.snapshot_times() {
            if !(0.0..=self.t_end).contains(&t) {
                return bad("snapshot_times", format!("{t} lies outside [0, t_end]"));
            }
        }
        if self.q_list.is_empty() {
            return bad("q_list", "must not be empty".into());
        }
        for q in &self.q_list {
            if !(q.0 >= 1.0) {
                return bad("q_list", format!("exponents must be >= 1, got {}", q.0));
            }
        }
        if !(self.startup_time >= 0.0 && self.startup_time <= self.t_end) {
            return bad("startup_time", format!("must lie in [0, t_end], got {}", self.startup_time));
        }
        if self.startup_refinement == 0 {
            return bad("startup_refinement", "must be at least 1".into());
        }
        if !(self.drift_horizon > 0.0) {
            return bad("drift_horizon", format!("must be positive, got {}", self.drift_horizon));
        }
        if let Some((a, b)) = self.fit_window {
            if !(a > 0.0 && b > a) {
                return bad("fit_window", format!("need 0 < start < end, got ({a}, {b})"));
            }
        }
        match &self.datum {
            DatumSpec::CurlGaussian { eta, width } | DatumSpec::GradientGaussian { eta, width } => {
                if !eta.is_finite() {
                    return bad("datum.eta", "must be finite".into());
                }
                if !(*width > 0.0) {
                    return bad("datum.width", format!("must be positive, got {width}"));
                }
                if self.n_dims < 2 && matches!(self.datum, DatumSpec::CurlGaussian { .. }) {
                    return bad("datum", "curl-gaussian needs n_dims >= 2".into());
                }
            }
            DatumSpec::Example3d { eta } => {
                if !eta.is_finite() {
                    return bad("datum.eta", "must be finite".into());
                }
                if self.n_dims != 3 {
                    return bad("datum", "example3d needs n_dims = 3".into());
                }
            }
            DatumSpec::Zero | DatumSpec::Snapshot { .. } => {}
        }
        self.validate_experiment()?;
        self.check_output_dir()
    }

    fn validate_experiment(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::invalid(field, msg));
        match self.experiment {
            Experiment::KernelCheck => {
                let k = &self.kernel_check;
                if k.samples == 0 {
                    return bad("kernel_check.samples", "must be positive".into());
                }
                if k.times.iter().any(|t| !(*t > 0.0)) || k.times.is_empty() {
                    return bad("kernel_check.times", "need positive times".into());
                }
                if k.eps_list.iter().any(|e| !(*e > 0.0)) || k.eps_list.is_empty() {
                    return bad("kernel_check.eps_list", "need positive values".into());
                }
                let g = &k.scaling_grid;
                if !(1..=3).contains(&g.n_dims) || g.resolution < 8 || g.resolution % 2 != 0 || !(g.box_length > 0.0) {
                    return bad("kernel_check.scaling_grid", "invalid grid".into());
                }
            }
            Experiment::Example3d => {
                if self.n_dims != 3 {
                    return bad("n_dims", "example3d runs in three dimensions".into());
                }
                let p = &self.example3d;
                if p.eta_list.iter().any(|e| !(*e > 0.0)) {
                    return bad("example3d.eta_list", "amplitudes must be positive".into());
                }
                if p.closed_form_lambdas.iter().any(|l| !(*l > 0.0)) {
                    return bad("example3d.closed_form_lambdas", "must be positive".into());
                }
                if p.hermite_nodes < 2 {
                    return bad("example3d.hermite_nodes", "need at least 2".into());
                }
                if p.t3_times.iter().any(|t| !(*t > 0.0)) {
                    return bad("example3d.t3_times", "must be positive".into());
                }
                if p.tensor_order == 0 || !(p.t3_tol > 0.0) || !(p.limit_tol > 0.0) {
                    return bad("example3d", "quadrature orders and tolerances must be positive".into());
                }
            }
            Experiment::Picard => {
                let p = &self.picard;
                if p.k_max == 0 || p.k_max > acsim_core::solver::MAX_PICARD_ORDER {
                    return bad("picard.k_max", format!("must lie in 1..={}", acsim_core::solver::MAX_PICARD_ORDER));
                }
                if !(p.t_final > 0.0) || p.steps == 0 {
                    return bad("picard", "need t_final > 0 and steps > 0".into());
                }
            }
            Experiment::LinearProfile => {
                let p = &self.linear_profile;
                if p.t_list.len() < 2 || p.t_list.iter().any(|t| !(*t > 0.0)) || p.t_list.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("linear_profile.t_list", "need at least two increasing positive times".into());
                }
                if !(p.beta >= 1.0) {
                    return bad("linear_profile.beta", "must be >= 1".into());
                }
            }
            Experiment::Simulate | Experiment::NsCompare | Experiment::Decay | Experiment::Profile => {}
        }
        Ok(())
    }

    fn check_output_dir(&self) -> Result<(), CliError> {
        let mut probe = self.output_dir.as_path();
        loop {
            if probe.exists() {
                let meta = std::fs::metadata(probe).map_err(|e| CliError::invalid("output_dir", e.to_string()))?;
                if !meta.is_dir() {
                    return Err(CliError::invalid("output_dir", format!("{} is not a directory", probe.display())));
                }
                if meta.permissions().readonly() {
                    return Err(CliError::invalid("output_dir", format!("{} is not writable", probe.display())));
                }
                return Ok(());
            }
            match probe.parent() {
                Some(p) if !p.as_os_str().is_empty() => probe = p,
                _ => return Ok(()),
            }
        }
    }
}

/// Parses and validates a JSON configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(CliError::Parse)?;
    match value.get("experiment") {
        None => return Err(CliError::invalid("experiment", "missing".into())),
        Some(serde_json::Value::String(name)) => {
            if Experiment::from_name(name).is_none() {
                return Err(CliError::invalid("experiment", format!("unknown experiment {name:?}")));
            }
        }
        Some(_) => return Err(CliError::invalid("experiment", "must be a string".into())),
    }
    // Re-parse from text so that type errors carry line information.
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(CliError::Parse)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_filled() {
        let c = parse_config(r#"{"experiment":"kernel-check"}"#).unwrap();
        assert_eq!((c.n_dims, c.resolution, c.epsilon), (3, 64, 1.0));
        assert_eq!(c.tolerances, Tolerances::default());
    }

    #[test]
    fn unknown_experiment_is_named() {
        let e = parse_config(r#"{"experiment":"warp"}"#).unwrap_err();
        assert!(e.to_string().contains("unknown experiment"), "{e}");
    }

    #[test]
    fn infinity_token_maps() {
        let c = parse_config(r#"{"experiment":"decay","q_list":[1,2,"inf"]}"#).unwrap();
        assert_eq!(c.q_values(), vec![1.0, 2.0, f64::INFINITY]);
        let back = serde_json::to_string(&c.q_list).unwrap();
        assert_eq!(back, r#"[1.0,2.0,"inf"]"#);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let e = parse_config("{\"experiment\":\"decay\",\n\"colour\":1}").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("colour") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn validation_names_the_field() {
        let e = parse_config(r#"{"experiment":"simulate","epsilon":-1}"#).unwrap_err();
        assert!(e.to_string().contains("epsilon"), "{e}");
        let e = parse_config(r#"{"experiment":"example3d","n_dims":2}"#).unwrap_err();
        assert!(e.to_string().contains("n_dims"), "{e}");
    }

    #[test]
    fn default_snapshots_cover_the_last_decade() {
        let c = ExperimentConfig::new(Experiment::Profile);
        let t = c.snapshot_times();
        assert_eq!(t.len(), 21);
        assert!((t[0] - 2.0).abs() < 1e-12 && (t[20] - 20.0).abs() < 1e-12);
    }
}
