//! Short-recursion projected solver with residual sketches.
//!
//! The iteration keeps five live vectors (`x`, `r`, `y`, `p`, and the scratch
//! `W*y`) plus three scalars and advances the update by
//! `p <- beta * p + gamma * W*y`, where the scalars come from a 1-step
//! recursion. One product with `A` and one with `A^T` per iteration.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::vecops::{axpy, dot};
use crate::matrix::SparseMatrix;
use crate::weight::{Weight, WeightMode};

/// `phi` at or below this is treated as a vanished `A^T r`: the remaining
/// residual has no component in range(A) numerically.
pub const PHI_BREAKDOWN: f64 = 1e-300;
/// `tau >= 1` holds analytically (Cauchy-Schwarz); `tau - 1` at or below this
/// means no progress direction remains.
pub const TAU_BREAKDOWN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TolMode {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub tol_mode: TolMode,
    pub max_iters: usize,
    pub weight_mode: WeightMode,
    pub trace: bool,
}

impl SolverConfig {
    pub fn new(tol: f64, tol_mode: TolMode, max_iters: usize) -> Self {
        SolverConfig { tol, tol_mode, max_iters, weight_mode: WeightMode::Identity, trace: false }
    }

    pub fn with_weight(mut self, mode: WeightMode) -> Self {
        self.weight_mode = mode;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn validate(&self, b_norm: f64) -> Result<()> {
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("iteration cap must be at least 1".into()));
        }
        if self.tol_mode == TolMode::Relative && b_norm == 0.0 {
            return Err(Error::Config("relative tolerance with a zero right-hand side".into()));
        }
        Ok(())
    }
}

/// True iff the configured stopping inequality holds.
pub fn check_stop(r_norm: f64, b_norm: f64, config: &SolverConfig) -> bool {
    match config.tol_mode {
        TolMode::Absolute => r_norm <= config.tol,
        TolMode::Relative => r_norm <= config.tol * b_norm,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    IterationLimit,
    BreakdownYVanished,
    BreakdownStagnation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: Status,
    pub iterations: usize,
    pub final_abs_residual: f64,
    pub final_rel_residual: f64,
    pub wall_seconds: f64,
    pub solution: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
    /// Zero-norm columns that received unit weight under column-norm weighting.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

/// Outcome of one initialization or recursion step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Ok,
    YVanished,
    Stagnation,
}

/// Live state of the recursion. After `init` and after every successful
/// `step`, `r` and `rho` hold the residual of the current `x`.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub k: usize,
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    pub wy: Vec<f64>,
    /// `||r||^2`
    pub rho: f64,
    /// `p^T W^{-1} p`
    pub theta: f64,
    /// `y^T W y`
    pub phi: f64,
    scratch_m: Vec<f64>,
}

impl SolverState {
    /// First update: `p_1 = (rho_0 / phi_0) * W y_0`, then `x_1 = x_0 + p_1`
    /// and the residual is refreshed. Returns `YVanished` when `phi` is
    /// numerically zero while the residual is not.
    pub fn init(a: &SparseMatrix, b: &[f64], x0: &[f64], w: &Weight) -> (SolverState, StepStatus) {
        let m = a.rows();
        let n = a.cols();
        assert_eq!(b.len(), m);
        assert_eq!(x0.len(), n);

        let mut r = b.to_vec();
        let ax0 = a.matvec(x0);
        for (ri, axi) in r.iter_mut().zip(&ax0) {
            *ri -= axi;
        }
        let rho = dot(&r, &r);
        let y = a.matvec_transpose(&r);
        let wy = w.apply(&y);
        let phi = dot(&y, &wy);

        let mut state = SolverState {
            k: 0,
            x: x0.to_vec(),
            r,
            y,
            p: vec![0.0; n],
            wy,
            rho,
            theta: 0.0,
            phi,
            scratch_m: vec![0.0; m],
        };

        if rho == 0.0 {
            return (state, StepStatus::Ok);
        }
        if state.phi <= PHI_BREAKDOWN {
            return (state, StepStatus::YVanished);
        }

        let coeff = state.rho / state.phi;
        state.p = state.wy.iter().map(|v| coeff * v).collect();
        state.theta = w.quad_inv(&state.p);
        axpy(1.0, &state.p.clone(), &mut state.x);
        state.k = 1;
        state.refresh_residual(a);
        (state, StepStatus::Ok)
    }

    /// One recursion step: recompute `y`, `phi`, form `beta`/`gamma`, update
    /// `p`, `theta`, `x`, then refresh the residual.
    pub fn step(&mut self, a: &SparseMatrix, w: &Weight) -> StepStatus {
        a.matvec_transpose_into(&self.r, &mut self.y);
        self.wy = w.apply(&self.y);
        self.phi = dot(&self.y, &self.wy);
        if self.phi <= PHI_BREAKDOWN {
            return StepStatus::YVanished;
        }

        let tau = (self.theta * self.phi).sqrt() / self.rho;
        if tau - 1.0 <= TAU_BREAKDOWN {
            return StepStatus::Stagnation;
        }
        let beta = 1.0 / ((tau - 1.0) * (tau + 1.0));
        let gamma = (self.theta / self.rho) * beta;

        for (pi, wyi) in self.p.iter_mut().zip(&self.wy) {
            *pi = beta * *pi + gamma * wyi;
        }
        self.theta = w.quad_inv(&self.p);
        axpy(1.0, &self.p.clone(), &mut self.x);
        self.k += 1;
        self.refresh_residual(a);
        StepStatus::Ok
    }

    /// `r <- r - A p` followed by `rho = ||r||^2` (recomputed from `r`, not
    /// carried by an update formula, to avoid drift).
    fn refresh_residual(&mut self, a: &SparseMatrix) {
        a.matvec_into(&self.p, &mut self.scratch_m);
        for (ri, api) in self.r.iter_mut().zip(&self.scratch_m) {
            *ri -= api;
        }
        self.rho = dot(&self.r, &self.r);
    }

    pub fn residual_norm(&self) -> f64 {
        self.rho.sqrt()
    }
}

/// Runs the recursion until the stopping rule, iteration cap, or a breakdown.
pub fn plss_solve(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveReport> {
    let (weight, zero_cols) = Weight::from_mode(a, config.weight_mode);
    let mut report = plss_solve_with_weight(a, b, x0, &weight, config)?;
    if !zero_cols.is_empty() {
        report
            .warnings
            .push(format!("{} zero-norm columns received unit weight", zero_cols.len()));
    }
    Ok(report)
}

pub fn plss_solve_with_weight(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    weight: &Weight,
    config: &SolverConfig,
) -> Result<SolveReport> {
    let b_norm = dot(b, b).sqrt();
    config.validate(b_norm)?;
    let start = Instant::now();
    let mut trace = config.trace.then(Vec::new);

    let record = |trace: &mut Option<Vec<TraceEntry>>, k: usize, r_norm: f64, start: &Instant| {
        if let Some(t) = trace.as_mut() {
            t.push(TraceEntry {
                iter: k,
                abs_residual: r_norm,
                rel_residual: if b_norm > 0.0 { r_norm / b_norm } else { r_norm },
                elapsed_seconds: start.elapsed().as_secs_f64(),
            });
        }
    };

    let (mut state, mut status) = SolverState::init(a, b, x0, weight);
    record(&mut trace, state.k, state.residual_norm(), &start);

    let finish = |state: &SolverState, status: Status, trace: Option<Vec<TraceEntry>>| {
        let r_norm = state.residual_norm();
        Ok(SolveReport {
            status,
            iterations: state.k,
            final_abs_residual: r_norm,
            final_rel_residual: if b_norm > 0.0 { r_norm / b_norm } else { r_norm },
            wall_seconds: start.elapsed().as_secs_f64(),
            solution: state.x.clone(),
            trace,
            warnings: Vec::new(),
        })
    };

    loop {
        if check_stop(state.residual_norm(), b_norm, config) {
            return finish(&state, Status::Converged, trace);
        }
        match status {
            StepStatus::YVanished => return finish(&state, Status::BreakdownYVanished, trace),
            StepStatus::Stagnation => return finish(&state, Status::BreakdownStagnation, trace),
            StepStatus::Ok => {}
        }
        if state.k >= config.max_iters {
            return finish(&state, Status::IterationLimit, trace);
        }
        status = state.step(a, weight);
        if status == StepStatus::Ok {
            record(&mut trace, state.k, state.residual_norm(), &start);
        }
    }
}
