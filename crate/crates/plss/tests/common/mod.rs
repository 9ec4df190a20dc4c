//! Shared generators and dense oracles for the integration suites.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use plss::SparseMatrix;

pub fn gaussian_dense(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| StandardNormal.sample(rng))
}

/// Random `m x n` matrix with singular values log-spaced over `[1, cond]`.
pub fn conditioned_matrix(seed: u64, m: usize, n: usize, cond: f64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_dense(&mut rng, m, n);
    let svd = g.svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let k = m.min(n);
    let sigma = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            if k == 1 {
                1.0
            } else {
                cond.powf(-(i as f64) / (k as f64 - 1.0)) * cond.sqrt()
            }
        } else {
            0.0
        }
    });
    let a = u * sigma * vt;
    dense_to_sparse(&a)
}

/// Random square matrix whose spectrum clusters at 1 except for `tail`
/// singular values decaying geometrically to `1/cond`.
pub fn clustered_ill_conditioned(seed: u64, n: usize, cond: f64, tail: usize) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_dense(&mut rng, n, n);
    let svd = g.svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let sigma = DMatrix::from_fn(n, n, |i, j| {
        if i != j {
            0.0
        } else if i < n - tail {
            1.0
        } else {
            cond.powf(-((i - (n - tail)) as f64 + 1.0) / tail as f64)
        }
    });
    dense_to_sparse(&(u * sigma * vt))
}

/// Plain Gaussian matrix, resampled until its condition number is at most
/// `max_cond`.
pub fn gaussian_matrix_capped(seed: u64, m: usize, n: usize, max_cond: f64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = gaussian_dense(&mut rng, m, n);
        let sv = g.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        if smin > 0.0 && smax / smin <= max_cond {
            return dense_to_sparse(&g);
        }
    }
}

pub fn dense_to_sparse(a: &DMatrix<f64>) -> SparseMatrix {
    let mut entries = Vec::with_capacity(a.nrows() * a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let v = a[(i, j)];
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    SparseMatrix::from_triplets(&entries, a.nrows(), a.ncols()).unwrap()
}

pub fn to_dense(a: &SparseMatrix) -> DMatrix<f64> {
    let rows = a.to_dense();
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| rows[i][j])
}

/// Minimum-norm least-squares solution through a dense SVD.
pub fn pinv_solve(a: &SparseMatrix, b: &[f64]) -> Vec<f64> {
    let d = to_dense(a);
    let svd = d.svd(true, true);
    let x = svd
        .solve(&DVector::from_column_slice(b), 1e-12)
        .expect("svd solve");
    x.iter().copied().collect()
}

/// `(10, 1, .., 1)`.
pub fn spike(n: usize) -> Vec<f64> {
    let mut x = vec![1.0; n];
    if n > 0 {
        x[0] = 10.0;
    }
    x
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn residual(a: &SparseMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    let ax = a.matvec(x);
    sub(b, &ax)
}
