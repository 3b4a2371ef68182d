//! Adaptive Gauss-Kronrod and fixed Gauss-Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A quadrature value with its error estimate and cost.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

// 15-point Kronrod extension of the 7-point Gauss rule (nodes on [0, 1]).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7/K15 panel: (Kronrod value, |Kronrod - Gauss|) per output slot.
fn gk15_panel<F>(f: &F, a: f64, b: f64, width: usize) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(f64) -> Vec<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut g: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..width {
            let s = f1[i] + f2[i];
            k[i] += WGK[j] * s;
            if j % 2 == 1 {
                g[i] += WG[j / 2] * s;
            }
        }
    }
    let err = k.iter().zip(&g).map(|(kv, gv)| (h * (kv - gv)).abs()).collect();
    (k.into_iter().map(|v| v * h).collect(), err)
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    key: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

/// Vector-valued adaptive quadrature with global panel bisection. The
/// error is measured in the max norm over output slots; stops when it is
/// below `max(abs_tol, rel_tol * |value|_inf)`.
pub fn integrate_vec<F>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_evaluations: usize,
) -> Result<(Vec<f64>, f64, usize)>
where
    F: Fn(f64) -> Vec<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    let width = f(0.5 * (a + b)).len();
    let mut evals = 1;
    let make = |a: f64, b: f64| {
        let (value, error) = gk15_panel(&f, a, b, width);
        let key = error.iter().fold(0.0, |m: f64, e| m.max(*e));
        Panel { a, b, value, error, key }
    };
    let mut heap = BinaryHeap::new();
    heap.push(make(a, b));
    evals += 15;
    loop {
        let mut total = vec![0.0; width];
        let mut err = vec![0.0; width];
        for p in heap.iter() {
            for i in 0..width {
                total[i] += p.value[i];
                err[i] += p.error[i];
            }
        }
        let err_max = err.iter().fold(0.0, |m: f64, e| m.max(*e));
        let scale = total.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if err_max <= abs_tol.max(rel_tol * scale) {
            return Ok((total, err_max, evals));
        }
        if evals + 30 > max_evaluations {
            return Err(Error::Quadrature {
                tol: abs_tol.max(rel_tol * scale),
                estimate: err_max,
                evaluations: evals,
            });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Quadrature {
                tol: abs_tol.max(rel_tol * scale),
                estimate: err_max,
                evaluations: evals,
            });
        }
        heap.push(make(worst.a, mid));
        heap.push(make(mid, worst.b));
        evals += 30;
    }
}

/// Scalar adaptive Gauss-Kronrod quadrature.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_evaluations: usize) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (v, e, n) = integrate_vec(|x| vec![f(x)], a, b, abs_tol, rel_tol, max_evaluations)?;
    Ok(QuadratureResult {
        value: v[0],
        abs_error_estimate: e,
        evaluations: n,
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on the Legendre
/// recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Fixed Gauss-Legendre rule of order `n` on `[a, b]`.
pub fn gauss_legendre_on<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    nodes.0.iter().zip(&nodes.1).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Gauss-Hermite nodes and weights for `int f(x) exp(-x^2) dx` (eigenvalues
/// of the Jacobi matrix).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rules_are_exact_for_polynomials() {
        for n in [1, 2, 5, 12, 20] {
            let rule = gauss_legendre(n);
            assert_relative_eq!(rule.1.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            let deg = 2 * n - 1;
            let v = gauss_legendre_on(|x| x.powi(deg as i32 - 1), 0.0, 1.0, &rule);
            assert_relative_eq!(v, 1.0 / deg as f64, epsilon = 1e-13);
        }
    }

    #[test]
    fn hermite_rule_matches_gaussian_moments() {
        let (x, w) = gauss_hermite(10);
        let moment = |p: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum::<f64>();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert_relative_eq!(moment(0), sqrt_pi, epsilon = 1e-13);
        assert_relative_eq!(moment(2), sqrt_pi / 2.0, epsilon = 1e-13);
        assert_relative_eq!(moment(8), 105.0 * sqrt_pi / 16.0, epsilon = 1e-12);
        assert!(moment(5).abs() < 1e-12);
    }

    #[test]
    fn adaptive_rule_handles_peaks() {
        let r = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10, 1e-12, 100_000).unwrap();
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        assert!((r.value - exact).abs() < 1e-8 * exact);
        assert!(r.abs_error_estimate <= 1e-8 * exact);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let r = integrate(|x| x.sqrt().recip(), 0.0, 1.0, 1e-15, 0.0, 200);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn vector_rule_integrates_each_slot() {
        let (v, _, _) = integrate_vec(|x| vec![x.exp(), x.cos()], 0.0, 1.0, 1e-13, 0.0, 10_000).unwrap();
        assert_relative_eq!(v[0], 1f64.exp() - 1.0, epsilon = 1e-13);
        assert_relative_eq!(v[1], 1f64.sin(), epsilon = 1e-13);
    }
}
