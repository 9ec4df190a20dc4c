//! Row-action solvers: classical Kaczmarz and the history-projected variant.
//!
//! The projected variant keeps the recent updates `P = [p_1 .. p_j]` together
//! with their images `A P` and norms `theta_j = ||p_j||^2`, and projects each
//! row step against that history:
//!
//! ```text
//! c = (A P)^T e_i,  d = Theta^{-1/2} c,
//! gamma = (b_i - a_i^T x) / (||a_i||^2 - ||d||^2),
//! p = gamma (a_i - P Theta^{-1} c).
//! ```
//!
//! With an empty history this reduces to the classical step. The history is
//! capped at `min(m, n)` columns and reset when full.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::vecops::{axpy, norm};
use crate::matrix::SparseMatrix;
use crate::solver::{check_stop, SolveReport, SolverConfig, Status, TraceEntry};

/// Denominator guard relative to `||a_i||^2`.
pub const KZ_BREAKDOWN_TOL: f64 = 1e-14;

/// Row visiting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    /// A fresh seeded permutation every epoch (the default).
    PermutationEpoch,
    /// Rows `0, 1, .., m-1` repeated.
    Cyclic,
}

#[derive(Debug, Clone)]
pub struct RowSchedule {
    m: usize,
    mode: ScheduleMode,
    rng: ChaCha8Rng,
    order: Vec<usize>,
    pos: usize,
}

impl RowSchedule {
    pub fn new(m: usize, mode: ScheduleMode, seed: u64) -> Self {
        let mut s = RowSchedule {
            m,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            order: Vec::new(),
            pos: 0,
        };
        s.refill();
        s
    }

    fn refill(&mut self) {
        self.order = (0..self.m).collect();
        if self.mode == ScheduleMode::PermutationEpoch {
            self.order.shuffle(&mut self.rng);
        }
        self.pos = 0;
    }

    pub fn next_index(&mut self) -> usize {
        if self.pos == self.m {
            self.refill();
        }
        let i = self.order[self.pos];
        self.pos += 1;
        i
    }
}

/// `x <- x + ((b_i - a_i^T x) / ||a_i||^2) a_i`. Returns the update, or `None`
/// for a zero row.
pub fn classical_kaczmarz_step(
    a: &SparseMatrix,
    b_i: f64,
    i: usize,
    x: &mut [f64],
) -> Option<Vec<f64>> {
    let (cols, vals) = a.row(i);
    let row_sq: f64 = vals.iter().map(|v| v * v).sum();
    if row_sq == 0.0 {
        return None;
    }
    let mut dot_ax = 0.0;
    for (&c, &v) in cols.iter().zip(vals) {
        dot_ax += v * x[c];
    }
    let gamma = (b_i - dot_ax) / row_sq;
    let mut p = vec![0.0; x.len()];
    for (&c, &v) in cols.iter().zip(vals) {
        p[c] = gamma * v;
        x[c] += gamma * v;
    }
    Some(p)
}

/// Outcome of one projected row step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KzStepOutcome {
    Updated,
    SkippedZeroRow,
    SkippedBreakdown,
}

/// Update history for the projected variant.
#[derive(Debug, Clone)]
pub struct KaczmarzState {
    pub x: Vec<f64>,
    p_cols: Vec<Vec<f64>>,
    ap_cols: Vec<Vec<f64>>,
    thetas: Vec<f64>,
    cap: usize,
    pub skipped_breakdowns: usize,
    pub history_resets: usize,
}

impl KaczmarzState {
    pub fn new(a: &SparseMatrix, x0: &[f64]) -> Self {
        assert_eq!(x0.len(), a.cols());
        KaczmarzState {
            x: x0.to_vec(),
            p_cols: Vec::new(),
            ap_cols: Vec::new(),
            thetas: Vec::new(),
            cap: a.rows().min(a.cols()),
            skipped_breakdowns: 0,
            history_resets: 0,
        }
    }

    pub fn history_len(&self) -> usize {
        self.p_cols.len()
    }

    /// Stored update `p_j`.
    pub fn stored_update(&self, j: usize) -> &[f64] {
        &self.p_cols[j]
    }
}

/// One projected step against row `i`. The caller supplies `r_i = b_i - a_i^T x`
/// implicitly through `b_i`.
pub fn kz_step(a: &SparseMatrix, b_i: f64, i: usize, state: &mut KaczmarzState) -> KzStepOutcome {
    let (cols, vals) = a.row(i);
    let row_sq: f64 = vals.iter().map(|v| v * v).sum();
    if row_sq == 0.0 {
        return KzStepOutcome::SkippedZeroRow;
    }
    if state.history_len() == state.cap {
        state.p_cols.clear();
        state.ap_cols.clear();
        state.thetas.clear();
        state.history_resets += 1;
    }

    let k = state.history_len();
    // c_j = (A p_j)_i, read off the stored images
    let c: Vec<f64> = (0..k).map(|j| state.ap_cols[j][i]).collect();
    let d_sq: f64 = c
        .iter()
        .zip(&state.thetas)
        .map(|(cj, th)| cj * cj / th)
        .sum();
    let denom = row_sq - d_sq;
    if denom <= KZ_BREAKDOWN_TOL * row_sq {
        state.skipped_breakdowns += 1;
        return KzStepOutcome::SkippedBreakdown;
    }

    let mut dot_ax = 0.0;
    for (&col, &v) in cols.iter().zip(vals) {
        dot_ax += v * state.x[col];
    }
    let gamma = (b_i - dot_ax) / denom;

    // p = gamma (a_i - P Theta^{-1} c)
    let mut p = vec![0.0; a.cols()];
    for (&col, &v) in cols.iter().zip(vals) {
        p[col] = v;
    }
    for ((&cj, &theta), pcol) in c.iter().zip(&state.thetas).zip(&state.p_cols) {
        axpy(-cj / theta, pcol, &mut p);
    }
    for pi in p.iter_mut() {
        *pi *= gamma;
    }

    axpy(1.0, &p, &mut state.x);
    let ap = a.matvec(&p);
    let theta: f64 = p.iter().map(|v| v * v).sum();
    state.p_cols.push(p);
    state.ap_cols.push(ap);
    state.thetas.push(theta);
    KzStepOutcome::Updated
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KaczmarzVariant {
    /// History-projected steps.
    Projected,
    /// Plain row projections.
    Classical,
}

/// Runs row sweeps until the residual test passes or the iteration cap is hit.
/// One iteration is one row visit; the residual is refreshed incrementally.
pub fn kz_solve(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    variant: KaczmarzVariant,
    mode: ScheduleMode,
    seed: u64,
    config: &SolverConfig,
) -> Result<SolveReport> {
    let b_norm = norm(b);
    config.validate(b_norm)?;
    let m = a.rows();
    let start = Instant::now();
    let mut trace = config.trace.then(Vec::new);
    let mut warnings = Vec::new();

    let mut state = KaczmarzState::new(a, x0);
    let mut r: Vec<f64> = {
        let ax = a.matvec(&state.x);
        b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect()
    };
    let mut r_norm = norm(&r);
    let mut schedule = RowSchedule::new(m, mode, seed);
    let mut zero_rows_seen = false;

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
        let i = schedule.next_index();
        let updated = match variant {
            KaczmarzVariant::Projected => match kz_step(a, b[i], i, &mut state) {
                KzStepOutcome::Updated => true,
                KzStepOutcome::SkippedZeroRow => {
                    zero_rows_seen = true;
                    false
                }
                KzStepOutcome::SkippedBreakdown => false,
            },
            KaczmarzVariant::Classical => {
                match classical_kaczmarz_step(a, b[i], i, &mut state.x) {
                    Some(_) => true,
                    None => {
                        zero_rows_seen = true;
                        false
                    }
                }
            }
        };
        if updated {
            let ax = a.matvec(&state.x);
            for (ri, (bi, axi)) in r.iter_mut().zip(b.iter().zip(&ax)) {
                *ri = bi - axi;
            }
            r_norm = norm(&r);
        }
        k += 1;
        record(&mut trace, k, r_norm);
    };

    if zero_rows_seen {
        warnings.push("zero rows skipped during row sweeps".into());
    }
    if state.skipped_breakdowns > 0 {
        warnings.push(format!(
            "{} row steps skipped on vanishing denominator",
            state.skipped_breakdowns
        ));
    }

    Ok(SolveReport {
        status,
        iterations: k,
        final_abs_residual: r_norm,
        final_rel_residual: if b_norm > 0.0 { r_norm / b_norm } else { r_norm },
        wall_seconds: start.elapsed().as_secs_f64(),
        solution: state.x,
        trace,
        warnings,
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
    fn classical_step_values() {
        let a = diag21();
        let mut x = vec![0.0, 0.0];
        let p = classical_kaczmarz_step(&a, 2.0, 0, &mut x).unwrap();
        assert_eq!(p, vec![1.0, 0.0]);
        assert_eq!(x, vec![1.0, 0.0]);
    }

    #[test]
    fn classical_step_zero_row() {
        let a = SparseMatrix::from_triplets(&[(0, 0, 1.0)], 2, 1).unwrap();
        let mut x = vec![0.0];
        assert!(classical_kaczmarz_step(&a, 1.0, 1, &mut x).is_none());
        assert_eq!(x, vec![0.0]);
    }

    #[test]
    fn projected_step_empty_history_is_classical() {
        let a = diag21();
        let mut state = KaczmarzState::new(&a, &[0.0, 0.0]);
        assert_eq!(kz_step(&a, 2.0, 0, &mut state), KzStepOutcome::Updated);
        assert_eq!(state.x, vec![1.0, 0.0]);
        assert_eq!(state.stored_update(0), &[1.0, 0.0]);
    }

    #[test]
    fn projected_step_with_history_worked_values() {
        let a = diag21();
        let mut state = KaczmarzState::new(&a, &[0.0, 0.0]);
        kz_step(&a, 2.0, 0, &mut state);
        // row 1: c = (A p_1)_1 = 0, d = 0, gamma = 1, p = (0, 1)
        assert_eq!(kz_step(&a, 1.0, 1, &mut state), KzStepOutcome::Updated);
        assert_abs_diff_eq!(state.x[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(state.x[1], 1.0, epsilon = 1e-15);
        assert_eq!(state.stored_update(1), &[0.0, 1.0]);
    }

    #[test]
    fn repeated_row_breaks_down_and_is_skipped() {
        let a = diag21();
        let mut state = KaczmarzState::new(&a, &[0.0, 0.0]);
        kz_step(&a, 2.0, 0, &mut state);
        // Same row again: d recovers the full row norm, denominator vanishes.
        assert_eq!(kz_step(&a, 2.0, 0, &mut state), KzStepOutcome::SkippedBreakdown);
        assert_eq!(state.skipped_breakdowns, 1);
        assert_eq!(state.history_len(), 1);
    }

    #[test]
    fn history_resets_when_full() {
        let a = diag21();
        let mut state = KaczmarzState::new(&a, &[0.0, 0.0]);
        assert_eq!(state.cap, 2);
        kz_step(&a, 2.0, 0, &mut state);
        kz_step(&a, 1.0, 1, &mut state);
        assert_eq!(state.history_len(), 2);
        kz_step(&a, 2.0, 0, &mut state);
        assert_eq!(state.history_resets, 1);
        assert_eq!(state.history_len(), 1);
    }

    #[test]
    fn cyclic_schedule_order() {
        let mut s = RowSchedule::new(3, ScheduleMode::Cyclic, 9);
        let seen: Vec<usize> = (0..7).map(|_| s.next_index()).collect();
        assert_eq!(seen, vec![0, 1, 2, 0, 1, 2, 0]);
    }

    #[test]
    fn permutation_epochs_cover_all_rows() {
        let mut s = RowSchedule::new(5, ScheduleMode::PermutationEpoch, 42);
        for _ in 0..3 {
            let mut epoch: Vec<usize> = (0..5).map(|_| s.next_index()).collect();
            epoch.sort_unstable();
            assert_eq!(epoch, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn permutation_schedule_deterministic_per_seed() {
        let draw = |seed| {
            let mut s = RowSchedule::new(6, ScheduleMode::PermutationEpoch, seed);
            (0..12).map(|_| s.next_index()).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
    }

    #[test]
    fn solve_diag_both_variants() {
        let a = diag21();
        let cfg = SolverConfig::new(1e-12, TolMode::Absolute, 100);
        for variant in [KaczmarzVariant::Projected, KaczmarzVariant::Classical] {
            let rep = kz_solve(&a, &[2.0, 1.0], &[0.0, 0.0], variant, ScheduleMode::Cyclic, 0, &cfg)
                .unwrap();
            assert_eq!(rep.status, Status::Converged, "{variant:?}");
            assert_abs_diff_eq!(rep.solution[0], 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(rep.solution[1], 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn projected_converges_in_one_sweep_on_diagonal() {
        let a = diag21();
        let cfg = SolverConfig::new(1e-12, TolMode::Absolute, 100);
        let rep = kz_solve(
            &a,
            &[2.0, 1.0],
            &[0.0, 0.0],
            KaczmarzVariant::Projected,
            ScheduleMode::Cyclic,
            0,
            &cfg,
        )
        .unwrap();
        assert_eq!(rep.iterations, 2);
    }
}
