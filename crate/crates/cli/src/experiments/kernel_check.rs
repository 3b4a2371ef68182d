use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use acsim_core::asymptotics::decay_exponent;
use acsim_core::kernels::{apply_heat, apply_heat_rate, apply_m_epsilon, leray_project, m_epsilon_symbol, materialize_kernel};
use acsim_core::spectral::divergence;
use acsim_core::{Grid, SpectralVectorField};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::outcome::{Assertion, Checked};

#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub eps: f64,
    #[serde(with = "acsim_core::io::extended_f64")]
    pub q: f64,
    /// `t^a |M(., t)|_q` per configured time.
    pub scaled_norms: Vec<f64>,
    /// `max / min - 1`.
    pub spread: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelCheckReport {
    pub samples: usize,
    /// Worst `|M u - e^{t Delta} u|` over solenoidal samples, relative to `|u|`
    /// (max over Fourier coefficients).
    pub solenoidal_residual: f64,
    /// Worst `|div M f - e^{t(1 + 1/eps) Delta} div f|` relative to `|div f|`.
    pub divergence_residual: f64,
    /// Worst `|M(t + s) - M(t) M(s)|` over random wavevectors.
    pub semigroup_residual: f64,
    pub origin_is_identity: bool,
    pub scaling: Vec<ScalingRow>,
    pub assertions: Vec<Assertion>,
}

impl Checked for KernelCheckReport {
    fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }
}

fn random_field(grid: &Grid, rng: &mut ChaCha8Rng) -> SpectralVectorField {
    let samples: Vec<Vec<f64>> = (0..grid.n_dims())
        .map(|_| (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    SpectralVectorField::from_physical(grid, &samples).expect("grid-sized samples")
}

pub fn kernel_check(cfg: &ExperimentConfig) -> Result<KernelCheckReport, CliError> {
    let p = &cfg.kernel_check;
    let tol = &cfg.tolerances;
    let grid = Grid::new(cfg.n_dims, cfg.box_length, cfg.resolution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pick = |i: usize| (p.times[i % p.times.len()], p.eps_list[(i / p.times.len()) % p.eps_list.len()]);

    let mut sol_res: f64 = 0.0;
    let mut div_res: f64 = 0.0;
    for i in 0..p.samples {
        let (t, eps) = pick(i);
        let f = random_field(&grid, &mut rng);

        let u = leray_project(&f);
        let diff = apply_m_epsilon(&u, t, eps)?.max_abs_difference(&apply_heat(&u, t)?);
        sol_res = sol_res.max(diff / u.max_abs_coefficient());

        let lhs = divergence(&apply_m_epsilon(&f, t, eps)?);
        let div_f = divergence(&f);
        let rhs = apply_heat_rate(&div_f, t, 1.0 + 1.0 / eps)?;
        let scale = div_f.coefficients().iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let d = lhs
            .coefficients()
            .iter()
            .zip(rhs.coefficients())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        div_res = div_res.max(d / scale);
    }

    let n = cfg.n_dims;
    let mut semi: f64 = 0.0;
    for i in 0..p.samples {
        let (_, eps) = pick(i);
        let xi: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let t = rng.random_range(0.0..2.0);
        let s = rng.random_range(0.0..2.0);
        let whole = m_epsilon_symbol(&xi, t + s, eps)?;
        let product = m_epsilon_symbol(&xi, t, eps)? * m_epsilon_symbol(&xi, s, eps)?;
        semi = semi.max((whole - product).amax());
    }

    let mut origin = true;
    for &t in &p.times {
        for &eps in &p.eps_list {
            let m = m_epsilon_symbol(&vec![0.0; n], t, eps)?;
            origin &= m == nalgebra::DMatrix::identity(n, n);
        }
    }

    let sg = &p.scaling_grid;
    let sgrid = Grid::new(sg.n_dims, sg.box_length, sg.resolution)?;
    let mut scaling = Vec::new();
    for &eps in &p.eps_list {
        let kernels = p
            .times
            .iter()
            .map(|&t| materialize_kernel(&sgrid, t, eps))
            .collect::<acsim_core::Result<Vec<_>>>()?;
        for q in cfg.q_values() {
            let a = decay_exponent(sg.n_dims, q);
            let scaled: Vec<f64> = p.times.iter().zip(&kernels).map(|(t, k)| t.powf(a) * k.lq_norm(q)).collect();
            let max = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
            scaling.push(ScalingRow {
                eps,
                q,
                scaled_norms: scaled,
                spread: max / min - 1.0,
            });
        }
    }

    let mut assertions = vec![
        Assertion::at_most("solenoidal identity residual", sol_res, tol.kernel_identity),
        Assertion::at_most("divergence identity residual", div_res, tol.kernel_identity),
        Assertion::at_most("semigroup residual", semi, tol.semigroup),
        Assertion::holds("symbol at the origin is the identity", origin),
    ];
    for row in &scaling {
        assertions.push(Assertion::at_most(
            format!("scaling spread eps={} q={}", row.eps, row.q),
            row.spread,
            tol.kernel_scaling,
        ));
    }
    Ok(KernelCheckReport {
        samples: p.samples,
        solenoidal_residual: sol_res,
        divergence_residual: div_res,
        semigroup_residual: semi,
        origin_is_identity: origin,
        scaling,
        assertions,
    })
}
