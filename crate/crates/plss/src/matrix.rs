//! Compressed sparse row matrices and the dense-vector kernels used by every solver.
//!
//! CSR is used for both `A*v` and `A^T*u`: the transpose product is a scatter
//! over the same three arrays, so no transposed copy is stored and each solver
//! iteration touches the matrix memory exactly twice.

use crate::error::{Error, Result};

/// Immutable sparse matrix in compressed sparse row format.
///
/// Invariants established at construction: `row_ptr` is nondecreasing with
/// `row_ptr[0] == 0` and `row_ptr[m] == nnz`; column indices are strictly
/// increasing within each row; duplicate coordinates have been summed.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    m: usize,
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a CSR matrix from coordinate triplets. Duplicates are summed,
    /// entries are sorted within each row.
    pub fn from_triplets(entries: &[(usize, usize, f64)], m: usize, n: usize) -> Result<Self> {
        for &(row, col, value) in entries {
            if row >= m || col >= n {
                return Err(Error::IndexOutOfRange { row, col, m, n });
            }
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { row, col, value });
            }
        }

        let mut row_counts = vec![0usize; m + 1];
        for &(row, _, _) in entries {
            row_counts[row + 1] += 1;
        }
        for i in 0..m {
            row_counts[i + 1] += row_counts[i];
        }

        // Bucket per row, then sort and merge duplicates in place.
        let mut cols = vec![0usize; entries.len()];
        let mut vals = vec![0f64; entries.len()];
        let mut next = row_counts.clone();
        for &(row, col, value) in entries {
            let slot = next[row];
            cols[slot] = col;
            vals[slot] = value;
            next[row] += 1;
        }

        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut row_ptr = Vec::with_capacity(m + 1);
        row_ptr.push(0);
        for i in 0..m {
            let lo = row_counts[i];
            let hi = row_counts[i + 1];
            let mut row: Vec<(usize, f64)> =
                cols[lo..hi].iter().copied().zip(vals[lo..hi].iter().copied()).collect();
            row.sort_unstable_by_key(|&(c, _)| c);
            for (c, v) in row {
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }

        Ok(SparseMatrix { m, n, row_ptr, col_idx, values })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Row `i` as parallel slices of column indices and values.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// `y = A * x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "matvec: input length must equal column count");
        let mut y = vec![0.0; self.m];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.m);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            *yi = acc;
        }
    }

    /// `x = A^T * u`, computed by a scatter pass over the CSR arrays.
    pub fn matvec_transpose(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.m, "matvec_transpose: input length must equal row count");
        let mut x = vec![0.0; self.n];
        self.matvec_transpose_into(u, &mut x);
        x
    }

    pub fn matvec_transpose_into(&self, u: &[f64], x: &mut [f64]) {
        assert_eq!(u.len(), self.m);
        assert_eq!(x.len(), self.n);
        x.fill(0.0);
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                x[c] += v * ui;
            }
        }
    }

    /// Euclidean norm of every column.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.n];
        for (&c, &v) in self.col_idx.iter().zip(&self.values) {
            sq[c] += v * v;
        }
        sq.iter().map(|s| s.sqrt()).collect()
    }

    /// Structural rank: maximum matching of the row/column bipartite pattern.
    /// Recorded as problem metadata; no solver rejects inputs based on it.
    pub fn structural_rank(&self) -> usize {
        let mut col_match = vec![usize::MAX; self.n];
        let mut rank = 0;
        let mut visited = vec![usize::MAX; self.n];
        for i in 0..self.m {
            if self.try_augment(i, i, &mut col_match, &mut visited) {
                rank += 1;
            }
        }
        rank
    }

    fn try_augment(
        &self,
        row: usize,
        mark: usize,
        col_match: &mut [usize],
        visited: &mut [usize],
    ) -> bool {
        let (cols, _) = self.row(row);
        for &c in cols {
            if visited[c] == mark {
                continue;
            }
            visited[c] = mark;
            if col_match[c] == usize::MAX
                || self.try_augment(col_match[c], mark, col_match, visited)
            {
                col_match[c] = row;
                return true;
            }
        }
        false
    }

    /// Densifies into row-major storage. Test and oracle use only.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.m];
        for (i, di) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                di[c] = v;
            }
        }
        d
    }
}

/// Dense vector helpers shared by the solver loops.
pub mod vecops {
    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    pub fn norm(a: &[f64]) -> f64 {
        dot(a, a).sqrt()
    }

    /// `y += alpha * x`
    pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), y.len());
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += alpha * xi;
        }
    }

    pub fn scale(alpha: f64, x: &mut [f64]) {
        for xi in x.iter_mut() {
            *xi *= alpha;
        }
    }

    /// `a - b` elementwise.
    pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }
}
