//! Growing-sketch projection engines.
//!
//! Three interchangeable routes compute the same update
//! `p_k = W A^T S (S^T A W A^T S)^+ S^T r`:
//!
//! * a dense pseudo-inverse of the Gram matrix (the oracle route),
//! * a column-appended Householder QR factorization of `Y_k = A^T S_k`,
//! * a triangular factorization `R D R^T` of `(Y_k^T Y_k)^{-1}` updated by
//!   triangular products only.
//!
//! Sketch columns come from pluggable providers: previous residuals, identity
//! columns, growing random columns, or a fixed-size random sketch redrawn every
//! iteration.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kaczmarz::{RowSchedule, ScheduleMode};
use crate::matrix::vecops::{axpy, dot, norm};
use crate::matrix::SparseMatrix;
use crate::solver::{check_stop, SolveReport, SolverConfig, Status, TraceEntry};
use crate::weight::Weight;

/// Relative rank tolerance shared by the QR and triangular engines.
pub const RANK_TOL: f64 = 1e-12;

/// A column appended to a full-rank history would be numerically dependent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankBreakdown;

/// Raw sketch columns `S` and their images `Y = A^T S`, for the
/// pseudo-inverse route.
#[derive(Debug, Clone, Default)]
pub struct SketchHistory {
    pub s_cols: Vec<Vec<f64>>,
    pub y_cols: Vec<Vec<f64>>,
}

impl SketchHistory {
    pub fn push(&mut self, a: &SparseMatrix, s: Vec<f64>) {
        self.y_cols.push(a.matvec_transpose(&s));
        self.s_cols.push(s);
    }

    pub fn len(&self) -> usize {
        self.s_cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_cols.is_empty()
    }
}

/// Closed-form update through the pseudo-inverse of the Gram matrix
/// `G = Y^T W Y`. Singular values below `k * eps * sigma_max` are truncated,
/// so rank-deficient sketches are absorbed rather than rejected.
pub fn sketched_update(
    a: &SparseMatrix,
    w: &Weight,
    sketch: &SketchHistory,
    r_prev: &[f64],
) -> Vec<f64> {
    assert!(!sketch.is_empty(), "sketched_update requires at least one sketch column");
    let k = sketch.len();
    let n = a.cols();

    let wy: Vec<Vec<f64>> = sketch.y_cols.iter().map(|y| w.apply(y)).collect();
    // Normalize columns in the W-metric before forming the Gram matrix; the
    // projection is invariant under column scaling, and unit diagonals keep
    // the eigenvalue truncation meaningful when residual columns span many
    // orders of magnitude.
    let inv_norms: Vec<f64> = sketch
        .y_cols
        .iter()
        .zip(&wy)
        .map(|(y, wyj)| {
            let d = dot(y, wyj);
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let gram = DMatrix::from_fn(k, k, |i, j| {
        inv_norms[i] * inv_norms[j] * dot(&sketch.y_cols[i], &wy[j])
    });
    let rhs = DVector::from_fn(k, |i, _| inv_norms[i] * dot(&sketch.s_cols[i], r_prev));

    let eig = gram.symmetric_eigen();
    let sigma_max = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let cutoff = k as f64 * f64::EPSILON * sigma_max;
    let projected = eig.eigenvectors.transpose() * rhs;
    let scaled = DVector::from_fn(k, |i, _| {
        let l = eig.eigenvalues[i];
        if l.abs() > cutoff {
            projected[i] / l
        } else {
            0.0
        }
    });
    let coeffs = eig.eigenvectors * scaled;

    let mut p = vec![0.0; n];
    for (j, col) in wy.iter().enumerate() {
        axpy(coeffs[j] * inv_norms[j], col, &mut p);
    }
    p
}

/// Householder QR factorization of `Y_k`, grown one column per iteration.
/// `Q` is kept in factored form; the triangular factor is stored with a
/// positive diagonal.
#[derive(Debug, Clone)]
pub struct QrEngine {
    n: usize,
    reflectors: Vec<Vec<f64>>,
    t_cols: Vec<Vec<f64>>,
    signs: Vec<f64>,
}

impl QrEngine {
    pub fn new(n: usize) -> Self {
        QrEngine { n, reflectors: Vec::new(), t_cols: Vec::new(), signs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.reflectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reflectors.is_empty()
    }

    /// Appends one column; returns the new diagonal element `r_kk > 0`.
    pub fn append(&mut self, y: &[f64]) -> std::result::Result<f64, RankBreakdown> {
        assert_eq!(y.len(), self.n);
        let k = self.len();
        if k == self.n {
            return Err(RankBreakdown);
        }
        let mut w = y.to_vec();
        for v in &self.reflectors {
            let c = 2.0 * dot(v, &w);
            axpy(-c, v, &mut w);
        }
        let sigma = norm(&w[k..]);
        if sigma <= RANK_TOL * norm(y) {
            return Err(RankBreakdown);
        }
        let alpha = if w[k] >= 0.0 { -sigma } else { sigma };

        let mut v = vec![0.0; self.n];
        v[k..].copy_from_slice(&w[k..]);
        v[k] -= alpha;
        let vnorm = norm(&v);
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }
        self.reflectors.push(v);
        let sign = if alpha >= 0.0 { 1.0 } else { -1.0 };
        self.signs.push(sign);

        let mut t_col: Vec<f64> = (0..k).map(|j| self.signs[j] * w[j]).collect();
        t_col.push(sigma);
        self.t_cols.push(t_col);
        Ok(sigma)
    }

    /// `p_k = (rho / r_kk) q_k` using one product with the factored `Q`.
    pub fn update(&self, rho: f64) -> std::result::Result<Vec<f64>, RankBreakdown> {
        let k = self.len();
        if k == 0 {
            return Err(RankBreakdown);
        }
        let r_kk = self.t_cols[k - 1][k - 1];
        let mut p = self.q_col(k - 1);
        let scale = rho / r_kk;
        for pi in p.iter_mut() {
            *pi *= scale;
        }
        Ok(p)
    }

    /// Column `j` of the orthonormal factor, materialized from the reflectors.
    pub fn q_col(&self, j: usize) -> Vec<f64> {
        let mut u = vec![0.0; self.n];
        u[j] = self.signs[j];
        for v in self.reflectors.iter().rev() {
            let c = 2.0 * dot(v, &u);
            axpy(-c, v, &mut u);
        }
        u
    }

    /// Entry `(i, j)` of the triangular factor (zero below the diagonal).
    pub fn t_entry(&self, i: usize, j: usize) -> f64 {
        if i <= j {
            self.t_cols[j][i]
        } else {
            0.0
        }
    }

    pub fn last_diagonal(&self) -> f64 {
        let k = self.len();
        self.t_cols[k - 1][k - 1]
    }
}

/// Triangular factorization `(Y_k^T Y_k)^{-1} = R_k D_k R_k^T` updated one
/// column per iteration by products with triangular matrices only. Column `j`
/// of `R_k` is `[t_hat_j; -1]` padded with zeros, `D_k = diag(1/delta_j)`.
#[derive(Debug, Clone)]
pub struct TriEngine {
    r_cols: Vec<Vec<f64>>,
    deltas: Vec<f64>,
    y_cols: Vec<Vec<f64>>,
    last_that: Vec<f64>,
    /// Per-step `s_j^T r_{j-1}` and updates, kept only in verification mode.
    history: Option<TriHistory>,
}

#[derive(Debug, Clone, Default)]
struct TriHistory {
    rhos: Vec<f64>,
    p_cols: Vec<Vec<f64>>,
}

impl TriEngine {
    pub fn new() -> Self {
        TriEngine {
            r_cols: Vec::new(),
            deltas: Vec::new(),
            y_cols: Vec::new(),
            last_that: Vec::new(),
            history: None,
        }
    }

    /// Enables per-step snapshots needed by [`TriEngine::lincomb_coeffs`].
    pub fn with_history() -> Self {
        let mut e = Self::new();
        e.history = Some(TriHistory::default());
        e
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn delta(&self, j: usize) -> f64 {
        self.deltas[j]
    }

    /// `t_hat_k = R_{k-1} (D_{k-1} (R_{k-1}^T (Y_{k-1}^T y)))`, without
    /// appending.
    fn compute_that(&self, u: &[f64]) -> Vec<f64> {
        let k = self.len();
        // v = R^T u (R upper triangular with columns [t_hat_j; -1])
        let mut v = vec![0.0; k];
        for (vj, col) in v.iter_mut().zip(&self.r_cols) {
            let mut acc = 0.0;
            for (&ci, &ui) in col.iter().zip(u) {
                acc += ci * ui;
            }
            *vj = acc;
        }
        // v = D v
        for (vj, &delta) in v.iter_mut().zip(&self.deltas) {
            *vj /= delta;
        }
        // t_hat = R v
        let mut t_hat = vec![0.0; k];
        for (col, &vj) in self.r_cols.iter().zip(&v) {
            for (ti, &ci) in t_hat.iter_mut().zip(col) {
                *ti += ci * vj;
            }
        }
        t_hat
    }

    pub fn append(&mut self, y: &[f64]) -> std::result::Result<(), RankBreakdown> {
        let k = self.len();
        let u: Vec<f64> = self.y_cols.iter().map(|yj| dot(yj, y)).collect();
        let t_hat = self.compute_that(&u);
        let yty = dot(y, y);
        let delta = yty - dot(&u, &t_hat);
        if delta <= 1e-14 * yty {
            return Err(RankBreakdown);
        }
        let mut r_col = t_hat.clone();
        r_col.push(-1.0);
        debug_assert_eq!(r_col.len(), k + 1);
        self.r_cols.push(r_col);
        self.deltas.push(delta);
        self.y_cols.push(y.to_vec());
        self.last_that = t_hat;
        Ok(())
    }

    /// `p_k = (rho / delta_k) (y_k - Y_{k-1} t_hat_k)`; no linear solves.
    pub fn update(&mut self, rho: f64) -> std::result::Result<Vec<f64>, RankBreakdown> {
        let k = self.len();
        if k == 0 {
            return Err(RankBreakdown);
        }
        let mut p = self.y_cols[k - 1].clone();
        for (j, &tj) in self.last_that.iter().enumerate() {
            axpy(-tj, &self.y_cols[j], &mut p);
        }
        let scale = rho / self.deltas[k - 1];
        for pi in p.iter_mut() {
            *pi *= scale;
        }
        if let Some(h) = self.history.as_mut() {
            h.rhos.push(rho);
            h.p_cols.push(p.clone());
        }
        Ok(p)
    }

    /// Coefficients `alpha_1..k-1` of the latest update as a linear
    /// combination of previous updates:
    /// `p_k = (rho_{k-1} / delta_k) (sum alpha_j p_j + y_k)`.
    ///
    /// Verification-only; requires [`TriEngine::with_history`]. Returns an
    /// error when a stored `s_j^T r_{j-1}` is zero.
    pub fn lincomb_coeffs(&self) -> Result<Vec<f64>> {
        let h = self
            .history
            .as_ref()
            .ok_or_else(|| Error::Config("lincomb_coeffs requires history mode".into()))?;
        let k = self.len();
        assert!(k >= 1);
        let y_k = &self.y_cols[k - 1];
        let mut alphas = Vec::with_capacity(k - 1);
        for j in 0..k - 1 {
            let rho_j = h.rhos[j];
            if rho_j == 0.0 {
                return Err(Error::Config(format!(
                    "degenerate history: s^T r vanished at step {}",
                    j + 1
                )));
            }
            // alpha_j = t_j^T (Y_j^T y_k) / rho_j with t_j = [t_hat_j; -1]
            let col = &self.r_cols[j];
            let mut acc = 0.0;
            for (i, &ci) in col.iter().enumerate() {
                acc += ci * dot(&self.y_cols[i], y_k);
            }
            alphas.push(acc / rho_j);
        }
        Ok(alphas)
    }

    /// Stored update `p_j` (history mode only).
    pub fn stored_update(&self, j: usize) -> &[f64] {
        &self.history.as_ref().expect("history mode").p_cols[j]
    }

    pub fn stored_rho(&self, j: usize) -> f64 {
        self.history.as_ref().expect("history mode").rhos[j]
    }

    /// Dense `R_k D_k R_k^T`, for invariant checks.
    pub fn materialize_inverse(&self) -> DMatrix<f64> {
        let k = self.len();
        let mut r = DMatrix::zeros(k, k);
        for j in 0..k {
            for (i, &ci) in self.r_cols[j].iter().enumerate() {
                r[(i, j)] = ci;
            }
        }
        let d = DMatrix::from_diagonal(&DVector::from_fn(k, |j, _| 1.0 / self.deltas[j]));
        &r * d * r.transpose()
    }
}

impl Default for TriEngine {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Pinv,
    Qr,
    Tri,
}

/// How sketch columns are generated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SketchKind {
    /// Previous residuals (the short-recursion sketch).
    Residual,
    /// Distinct identity columns within each epoch.
    IdentityColumns(ScheduleMode),
    /// One fresh random column per iteration. `in_range` draws `A * g` for
    /// Gaussian `g` (in range(A)); otherwise raw Gaussian columns.
    RandomGrowing { in_range: bool },
    /// Fixed-size Gaussian sketch redrawn every iteration; pinv engine only.
    RandomFixed { r: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SketchProvider {
    pub kind: SketchKind,
    pub seed: u64,
}

impl SketchProvider {
    pub fn residual() -> Self {
        SketchProvider { kind: SketchKind::Residual, seed: 0 }
    }

    pub fn identity_columns(mode: ScheduleMode, seed: u64) -> Self {
        SketchProvider { kind: SketchKind::IdentityColumns(mode), seed }
    }

    pub fn random_growing(in_range: bool, seed: u64) -> Self {
        SketchProvider { kind: SketchKind::RandomGrowing { in_range }, seed }
    }

    pub fn random_fixed(r: usize, seed: u64) -> Self {
        SketchProvider { kind: SketchKind::RandomFixed { r }, seed }
    }
}

fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Iterates `x_k = x_{k-1} + p_k` with the selected provider and engine.
pub fn run_projection(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    provider: &SketchProvider,
    engine: EngineKind,
    config: &SolverConfig,
) -> Result<SolveReport> {
    let b_norm = norm(b);
    config.validate(b_norm)?;
    if matches!(provider.kind, SketchKind::RandomFixed { .. }) && engine != EngineKind::Pinv {
        return Err(Error::Config(
            "a fixed-size redrawn sketch requires the pseudo-inverse engine".into(),
        ));
    }

    let m = a.rows();
    let n = a.cols();
    let (weight, _) = Weight::from_mode(a, config.weight_mode);
    let sqrt_w = weight.sqrt_diag(n);
    let start = Instant::now();
    let mut trace = config.trace.then(Vec::new);

    let mut x = x0.to_vec();
    let mut r = {
        let ax = a.matvec(&x);
        b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect::<Vec<f64>>()
    };
    let mut r_norm = norm(&r);

    let mut rng = ChaCha8Rng::seed_from_u64(provider.seed);
    let mut schedule = match &provider.kind {
        SketchKind::IdentityColumns(mode) => Some(RowSchedule::new(m, *mode, provider.seed)),
        _ => None,
    };

    let mut history = SketchHistory::default();
    let mut qr = QrEngine::new(n);
    let mut tri = TriEngine::new();

    let record = |trace: &mut Option<Vec<TraceEntry>>, k: usize, r_norm: f64| {
        if let Some(t) = trace.as_mut() {
            t.push(TraceEntry {
                iter: k,
                abs_residual: r_norm,
                rel_residual: if b_norm > 0.0 { r_norm / b_norm } else { r_norm },
                elapsed_seconds: start.elapsed().as_secs_f64(),
            });
        }
    };

    let mut k = 0usize;
    record(&mut trace, k, r_norm);
    let status = loop {
        if check_stop(r_norm, b_norm, config) {
            break Status::Converged;
        }
        if k >= config.max_iters {
            break Status::IterationLimit;
        }

        let p = match &provider.kind {
            SketchKind::RandomFixed { r: width } => {
                let mut fresh = SketchHistory::default();
                for _ in 0..*width {
                    fresh.push(a, gaussian_vec(&mut rng, m));
                }
                sketched_update(a, &weight, &fresh, &r)
            }
            kind => {
                let s = match kind {
                    SketchKind::Residual => r.clone(),
                    SketchKind::IdentityColumns(_) => {
                        let i = schedule.as_mut().unwrap().next_index();
                        let mut e = vec![0.0; m];
                        e[i] = 1.0;
                        e
                    }
                    SketchKind::RandomGrowing { in_range } => {
                        if *in_range {
                            a.matvec(&gaussian_vec(&mut rng, n))
                        } else {
                            gaussian_vec(&mut rng, m)
                        }
                    }
                    SketchKind::RandomFixed { .. } => unreachable!(),
                };
                let rho = dot(&s, &r);
                match engine {
                    EngineKind::Pinv => {
                        history.push(a, s);
                        sketched_update(a, &weight, &history, &r)
                    }
                    EngineKind::Qr | EngineKind::Tri => {
                        let y = a.matvec_transpose(&s);
                        let y_w: Vec<f64> =
                            y.iter().zip(&sqrt_w).map(|(yi, si)| yi * si).collect();
                        let step = match engine {
                            EngineKind::Qr => {
                                qr.append(&y_w).and_then(|_| qr.update(rho))
                            }
                            EngineKind::Tri => {
                                tri.append(&y_w).and_then(|()| tri.update(rho))
                            }
                            EngineKind::Pinv => unreachable!(),
                        };
                        match step {
                            Ok(p_w) => {
                                p_w.iter().zip(&sqrt_w).map(|(pi, si)| pi * si).collect()
                            }
                            Err(RankBreakdown) => break Status::BreakdownStagnation,
                        }
                    }
                }
            }
        };

        axpy(1.0, &p, &mut x);
        let ap = a.matvec(&p);
        for (ri, api) in r.iter_mut().zip(&ap) {
            *ri -= api;
        }
        r_norm = norm(&r);
        k += 1;
        record(&mut trace, k, r_norm);
    };

    Ok(SolveReport {
        status,
        iterations: k,
        final_abs_residual: r_norm,
        final_rel_residual: if b_norm > 0.0 { r_norm / b_norm } else { r_norm },
        wall_seconds: start.elapsed().as_secs_f64(),
        solution: x,
        trace,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::TolMode;
    use approx::assert_abs_diff_eq;

    fn diag21() -> SparseMatrix {
        SparseMatrix::from_triplets(&[(0, 0, 2.0), (1, 1, 1.0)], 2, 2).unwrap()
    }

    #[test]
    fn sketched_update_residual_column() {
        let a = diag21();
        let mut h = SketchHistory::default();
        h.push(&a, vec![2.0, 1.0]);
        let p = sketched_update(&a, &Weight::Identity, &h, &[2.0, 1.0]);
        assert_abs_diff_eq!(p[0], 20.0 / 17.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 5.0 / 17.0, epsilon = 1e-14);
    }

    #[test]
    fn sketched_update_identity_column() {
        let a = diag21();
        let mut h = SketchHistory::default();
        h.push(&a, vec![1.0, 0.0]);
        let p = sketched_update(&a, &Weight::Identity, &h, &[2.0, 1.0]);
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn sketched_update_square_sketch_inverts() {
        let a = diag21();
        let mut h = SketchHistory::default();
        h.push(&a, vec![1.0, 0.0]);
        h.push(&a, vec![0.0, 1.0]);
        let p = sketched_update(&a, &Weight::Identity, &h, &[2.0, 1.0]);
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn qr_single_column() {
        let mut qr = QrEngine::new(2);
        let rkk = qr.append(&[4.0, 1.0]).unwrap();
        assert_abs_diff_eq!(rkk, 17.0f64.sqrt(), epsilon = 1e-14);
        let q = qr.q_col(0);
        assert_abs_diff_eq!(q[0], 4.0 / 17.0f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(q[1], 1.0 / 17.0f64.sqrt(), epsilon = 1e-14);
        let p = qr.update(5.0).unwrap();
        assert_abs_diff_eq!(p[0], 20.0 / 17.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 5.0 / 17.0, epsilon = 1e-14);
    }

    #[test]
    fn qr_second_column_diagonal() {
        let mut qr = QrEngine::new(2);
        qr.append(&[4.0, 1.0]).unwrap();
        let rkk = qr.append(&[-12.0 / 17.0, 12.0 / 17.0]).unwrap();
        assert_abs_diff_eq!(rkk, (3600.0f64 / 4913.0).sqrt(), epsilon = 1e-12);
        let p = qr.update(180.0 / 289.0).unwrap();
        assert_abs_diff_eq!(p[0], -3.0 / 17.0, epsilon = 1e-13);
        assert_abs_diff_eq!(p[1], 12.0 / 17.0, epsilon = 1e-13);
    }

    #[test]
    fn qr_dependent_column_breaks_down() {
        let mut qr = QrEngine::new(3);
        qr.append(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(qr.append(&[2.0, 4.0, 6.0]), Err(RankBreakdown));
    }

    #[test]
    fn qr_zero_rho_gives_zero_update() {
        let mut qr = QrEngine::new(2);
        qr.append(&[4.0, 1.0]).unwrap();
        let p = qr.update(0.0).unwrap();
        assert_eq!(p, vec![0.0, 0.0]);
    }

    #[test]
    fn tri_first_append() {
        let mut tri = TriEngine::new();
        tri.append(&[4.0, 1.0]).unwrap();
        assert_abs_diff_eq!(tri.delta(0), 17.0, epsilon = 1e-14);
        let inv = tri.materialize_inverse();
        assert_abs_diff_eq!(inv[(0, 0)], 1.0 / 17.0, epsilon = 1e-15);
        let mut t = tri.clone();
        let p = t.update(5.0).unwrap();
        assert_abs_diff_eq!(p[0], 20.0 / 17.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 5.0 / 17.0, epsilon = 1e-14);
    }

    #[test]
    fn tri_second_append_exact_rationals() {
        let mut tri = TriEngine::new();
        tri.append(&[4.0, 1.0]).unwrap();
        tri.append(&[-12.0 / 17.0, 12.0 / 17.0]).unwrap();
        assert_abs_diff_eq!(tri.delta(1), 3600.0 / 4913.0, epsilon = 1e-14);
        assert_abs_diff_eq!(tri.last_that[0], -36.0 / 289.0, epsilon = 1e-15);

        // R D R^T equals the dense inverse of Y^T Y
        let y = DMatrix::from_columns(&[
            DVector::from_vec(vec![4.0, 1.0]),
            DVector::from_vec(vec![-12.0 / 17.0, 12.0 / 17.0]),
        ]);
        let gram_inv = (y.transpose() * &y).try_inverse().unwrap();
        let mat = tri.materialize_inverse();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(mat[(i, j)], gram_inv[(i, j)], epsilon = 1e-12);
            }
        }

        let p = tri.update(180.0 / 289.0).unwrap();
        assert_abs_diff_eq!(p[0], -3.0 / 17.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 12.0 / 17.0, epsilon = 1e-14);
    }

    #[test]
    fn tri_dependent_column_breaks_down() {
        let mut tri = TriEngine::new();
        tri.append(&[1.0, 2.0]).unwrap();
        assert_eq!(tri.append(&[2.0, 4.0]), Err(RankBreakdown));
    }

    #[test]
    fn tri_zero_rho_gives_zero_update() {
        let mut tri = TriEngine::new();
        tri.append(&[4.0, 1.0]).unwrap();
        let p = tri.update(0.0).unwrap();
        assert_eq!(p, vec![0.0, 0.0]);
    }

    #[test]
    fn lincomb_first_step_is_empty() {
        let mut tri = TriEngine::with_history();
        tri.append(&[4.0, 1.0]).unwrap();
        tri.update(5.0).unwrap();
        assert!(tri.lincomb_coeffs().unwrap().is_empty());
    }

    #[test]
    fn lincomb_reconstructs_worked_example() {
        let mut tri = TriEngine::with_history();
        tri.append(&[4.0, 1.0]).unwrap();
        tri.update(5.0).unwrap();
        tri.append(&[-12.0 / 17.0, 12.0 / 17.0]).unwrap();
        let p2 = tri.update(180.0 / 289.0).unwrap();
        let alphas = tri.lincomb_coeffs().unwrap();
        assert_eq!(alphas.len(), 1);
        // (rho_1 / delta_2) (alpha_1 p_1 + y_2)
        let mut rec = vec![-12.0 / 17.0, 12.0 / 17.0];
        axpy(alphas[0], tri.stored_update(0), &mut rec);
        let scale = tri.stored_rho(1) / tri.delta(1);
        for v in rec.iter_mut() {
            *v *= scale;
        }
        assert_abs_diff_eq!(rec[0], p2[0], epsilon = 1e-12);
        assert_abs_diff_eq!(rec[1], p2[1], epsilon = 1e-12);
    }

    #[test]
    fn run_projection_residual_matches_short_recursion() {
        let a = diag21();
        let cfg = SolverConfig::new(1e-12, TolMode::Absolute, 100);
        for engine in [EngineKind::Pinv, EngineKind::Qr, EngineKind::Tri] {
            let rep = run_projection(
                &a,
                &[2.0, 1.0],
                &[0.0, 0.0],
                &SketchProvider::residual(),
                engine,
                &cfg,
            )
            .unwrap();
            assert_eq!(rep.status, Status::Converged, "{engine:?}");
            assert_eq!(rep.iterations, 2, "{engine:?}");
            assert_abs_diff_eq!(rep.solution[0], 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(rep.solution[1], 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn identity_columns_cyclic_sweep() {
        let a = diag21();
        let cfg = SolverConfig::new(1e-12, TolMode::Absolute, 100);
        let rep = run_projection(
            &a,
            &[2.0, 1.0],
            &[0.0, 0.0],
            &SketchProvider::identity_columns(ScheduleMode::Cyclic, 0),
            EngineKind::Pinv,
            &cfg,
        )
        .unwrap();
        assert_eq!(rep.status, Status::Converged);
        assert_eq!(rep.iterations, 2);
        assert_abs_diff_eq!(rep.solution[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.solution[1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn random_fixed_requires_pinv() {
        let a = diag21();
        let cfg = SolverConfig::new(1e-8, TolMode::Absolute, 10);
        let err = run_projection(
            &a,
            &[2.0, 1.0],
            &[0.0, 0.0],
            &SketchProvider::random_fixed(2, 1),
            EngineKind::Qr,
            &cfg,
        );
        assert!(err.is_err());
    }
}
