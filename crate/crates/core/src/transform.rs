//! Multi-dimensional FFTs built from 1-D rustfft passes.
//!
//! Forward transforms are scaled by `1/N^n` so that coefficient 0 is the mean
//! of the samples; inverse transforms are unscaled sums. Real fields are
//! transformed two at a time, packed as real and imaginary parts.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::grid::Grid;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Lanes gathered per batch on the strided axes.
const LANE_BATCH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

pub(crate) fn transform_in_place(grid: &Grid, data: &mut [Complex64], dir: Direction) {
    let n = grid.resolution();
    let dims = grid.n_dims();
    debug_assert_eq!(data.len(), grid.len());
    let plan = match dir {
        Direction::Forward => grid.forward_plan(),
        Direction::Inverse => grid.inverse_plan(),
    };
    let mut scratch = vec![ZERO; plan.get_inplace_scratch_len()];

    // contiguous last axis
    plan.process_with_scratch(data, &mut scratch);

    // remaining axes: gather batches of lanes into a contiguous buffer
    let total = data.len();
    let mut buf = vec![ZERO; LANE_BATCH * n];
    for axis in (0..dims - 1).rev() {
        let stride = n.pow((dims - 1 - axis) as u32);
        let block = stride * n;
        for start in (0..total).step_by(block) {
            let chunk = &mut data[start..start + block];
            let mut l0 = 0;
            while l0 < stride {
                let lanes = LANE_BATCH.min(stride - l0);
                let b = &mut buf[..lanes * n];
                for j in 0..n {
                    let row = &chunk[j * stride + l0..j * stride + l0 + lanes];
                    for (l, v) in row.iter().enumerate() {
                        b[l * n + j] = *v;
                    }
                }
                plan.process_with_scratch(b, &mut scratch);
                for j in 0..n {
                    let row = &mut chunk[j * stride + l0..j * stride + l0 + lanes];
                    for (l, v) in row.iter_mut().enumerate() {
                        *v = b[l * n + j];
                    }
                }
                l0 += lanes;
            }
        }
    }

    if dir == Direction::Forward {
        let scale = 1.0 / total as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// Real samples to Fourier coefficients.
pub(crate) fn forward_real(grid: &Grid, samples: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    transform_in_place(grid, &mut data, Direction::Forward);
    data
}

/// Fourier coefficients to real samples (imaginary round-off discarded).
pub(crate) fn inverse_real(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    transform_in_place(grid, &mut data, Direction::Inverse);
    data.into_iter().map(|c| c.re).collect()
}

/// Two real signals through one complex transform.
fn forward_pair(grid: &Grid, x: &[f64], y: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut z: Vec<Complex64> = x.iter().zip(y).map(|(&a, &b)| Complex64::new(a, b)).collect();
    transform_in_place(grid, &mut z, Direction::Forward);
    let neg = grid.negated_indices();
    let mut a = Vec::with_capacity(z.len());
    let mut b = Vec::with_capacity(z.len());
    for (k, &zk) in z.iter().enumerate() {
        let zc = z[neg[k]].conj();
        a.push((zk + zc) * 0.5);
        let d = zk - zc;
        b.push(Complex64::new(d.im * 0.5, -d.re * 0.5));
    }
    (a, b)
}

/// Two Hermitian coefficient arrays through one complex transform.
fn inverse_pair(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let mut z: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| Complex64::new(x.re - y.im, x.im + y.re))
        .collect();
    transform_in_place(grid, &mut z, Direction::Inverse);
    z.into_iter().map(|c| (c.re, c.im)).unzip()
}

/// Forward transforms of several real fields.
pub(crate) fn forward_real_many(grid: &Grid, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let pairs: Vec<Vec<Vec<Complex64>>> = fields
        .par_chunks(2)
        .map(|c| match c {
            [x, y] => {
                let (a, b) = forward_pair(grid, x, y);
                vec![a, b]
            }
            [x] => vec![forward_real(grid, x)],
            _ => unreachable!(),
        })
        .collect();
    pairs.into_iter().flatten().collect()
}

/// Inverse transforms of several Hermitian coefficient arrays.
pub(crate) fn inverse_real_many(grid: &Grid, coeffs: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let pairs: Vec<Vec<Vec<f64>>> = coeffs
        .par_chunks(2)
        .map(|c| match c {
            [a, b] => {
                let (x, y) = inverse_pair(grid, a, b);
                vec![x, y]
            }
            [a] => vec![inverse_real(grid, a)],
            _ => unreachable!(),
        })
        .collect();
    pairs.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(grid: &Grid, seed: f64) -> Vec<f64> {
        (0..grid.len()).map(|p| ((p as f64 + seed) * 0.731).sin() * (seed + 1.0)).collect()
    }

    #[test]
    fn paired_transforms_match_single_ones() {
        for dims in [2, 3] {
            let g = Grid::new(dims, 7.0, 8).unwrap();
            let f: Vec<Vec<f64>> = (0..3).map(|s| samples(&g, s as f64)).collect();
            let refs: Vec<&[f64]> = f.iter().map(|v| v.as_slice()).collect();
            let many = forward_real_many(&g, &refs);
            for (m, x) in many.iter().zip(&f) {
                let single = forward_real(&g, x);
                for (a, b) in m.iter().zip(&single) {
                    assert!((a - b).norm() < 1e-14);
                }
            }
            let crefs: Vec<&[Complex64]> = many.iter().map(|v| v.as_slice()).collect();
            let back = inverse_real_many(&g, &crefs);
            for (x, y) in back.iter().zip(&f) {
                for (a, b) in x.iter().zip(y) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }
}
