//! The positive-definite parameter matrix W, restricted to identity or diagonal form.

use serde::{Deserialize, Serialize};

use crate::matrix::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Identity,
    ColumnNorm,
}

/// W applied elementwise. `Diagonal` holds strictly positive finite entries.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Identity,
    Diagonal(Vec<f64>),
}

impl Weight {
    /// Builds W for the given mode. Column-norm weighting uses `1/||A_col_j||`;
    /// zero-norm columns get weight 1 and are returned for the caller to log.
    pub fn from_mode(a: &SparseMatrix, mode: WeightMode) -> (Weight, Vec<usize>) {
        match mode {
            WeightMode::Identity => (Weight::Identity, Vec::new()),
            WeightMode::ColumnNorm => {
                let norms = a.column_norms();
                let mut zero_columns = Vec::new();
                let diag = norms
                    .iter()
                    .enumerate()
                    .map(|(j, &nj)| {
                        if nj > 0.0 {
                            1.0 / nj
                        } else {
                            zero_columns.push(j);
                            1.0
                        }
                    })
                    .collect();
                (Weight::Diagonal(diag), zero_columns)
            }
        }
    }

    /// `W * v`
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Weight::Identity => v.to_vec(),
            Weight::Diagonal(d) => v.iter().zip(d).map(|(x, w)| x * w).collect(),
        }
    }

    /// `W^{-1} * v`
    pub fn apply_inv(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Weight::Identity => v.to_vec(),
            Weight::Diagonal(d) => v.iter().zip(d).map(|(x, w)| x / w).collect(),
        }
    }

    /// `v^T W v`
    pub fn quad(&self, v: &[f64]) -> f64 {
        match self {
            Weight::Identity => v.iter().map(|x| x * x).sum(),
            Weight::Diagonal(d) => v.iter().zip(d).map(|(x, w)| x * x * w).sum(),
        }
    }

    /// `v^T W^{-1} v`
    pub fn quad_inv(&self, v: &[f64]) -> f64 {
        match self {
            Weight::Identity => v.iter().map(|x| x * x).sum(),
            Weight::Diagonal(d) => v.iter().zip(d).map(|(x, w)| x * x / w).sum(),
        }
    }

    /// Elementwise square root of the diagonal, for the transformed-space
    /// factorization `W = R_w^T R_w`.
    pub fn sqrt_diag(&self, n: usize) -> Vec<f64> {
        match self {
            Weight::Identity => vec![1.0; n],
            Weight::Diagonal(d) => d.iter().map(|w| w.sqrt()).collect(),
        }
    }
}
