//! Golub-Kahan bidiagonalization baselines: Craig's method and LSQR.
//!
//! Both share the recurrence
//!
//! ```text
//! beta_1 u_1 = r_0,          alpha_1 v_1 = A^T u_1,
//! beta_{k+1} u_{k+1} = A v_k - alpha_k u_k,
//! alpha_{k+1} v_{k+1} = A^T u_{k+1} - beta_{k+1} v_k,
//! ```
//!
//! without reorthogonalization. Craig updates `x_k = x_{k-1} + zeta_k v_k`
//! with `zeta_k = -(beta_k / alpha_k) zeta_{k-1}`, `zeta_0 = -1`, and its
//! residual norm is available as `|zeta_k| beta_{k+1}` without forming `r`.
//! LSQR applies Givens rotations to the lower-bidiagonal factor; its stopping
//! test here uses the true residual `||b - A x_k||` recomputed each iteration.

use std::time::Instant;

use crate::error::Result;
use crate::matrix::vecops::{axpy, norm};
use crate::matrix::SparseMatrix;
use crate::solver::{check_stop, SolveReport, SolverConfig, Status, TraceEntry};

/// Underflow guard for `alpha` / `beta`; at or below this the recurrence has
/// terminated exactly (a lucky breakdown).
pub const BIDIAG_BREAKDOWN_TOL: f64 = 1e-300;

/// One live lane of the bidiagonalization.
#[derive(Debug, Clone)]
pub struct BidiagState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

/// Starts the recurrence from an initial residual. Returns `None` when
/// `r0 = 0` or `A^T u_1 = 0` (nothing to iterate on).
pub fn bidiag_start(a: &SparseMatrix, r0: &[f64]) -> Option<BidiagState> {
    let beta = norm(r0);
    if beta <= BIDIAG_BREAKDOWN_TOL {
        return None;
    }
    let u: Vec<f64> = r0.iter().map(|ri| ri / beta).collect();
    let y = a.matvec_transpose(&u);
    let alpha = norm(&y);
    if alpha <= BIDIAG_BREAKDOWN_TOL {
        return None;
    }
    let v: Vec<f64> = y.iter().map(|yi| yi / alpha).collect();
    Some(BidiagState { u, v, alpha, beta })
}

/// Advances one step, replacing `u, v, alpha` and storing `beta_{k+1}` in
/// `state.beta`. Returns `false` on a lucky breakdown (state left at the
/// terminal vectors).
pub fn bidiag_step(a: &SparseMatrix, state: &mut BidiagState) -> bool {
    let mut w = a.matvec(&state.v);
    axpy(-state.alpha, &state.u, &mut w);
    let beta = norm(&w);
    state.beta = beta;
    if beta <= BIDIAG_BREAKDOWN_TOL {
        return false;
    }
    for (ui, wi) in state.u.iter_mut().zip(&w) {
        *ui = wi / beta;
    }
    let mut z = a.matvec_transpose(&state.u);
    axpy(-beta, &state.v, &mut z);
    let alpha = norm(&z);
    if alpha <= BIDIAG_BREAKDOWN_TOL {
        state.alpha = 0.0;
        return false;
    }
    for (vi, zi) in state.v.iter_mut().zip(&z) {
        *vi = zi / alpha;
    }
    state.alpha = alpha;
    true
}

/// Craig's method: minimum-error iterates on consistent systems.
pub fn craig_solve(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveReport> {
    let b_norm = norm(b);
    config.validate(b_norm)?;
    let start = Instant::now();
    let mut trace = config.trace.then(Vec::new);

    let mut x = x0.to_vec();
    let r0: Vec<f64> = {
        let ax = a.matvec(&x);
        b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect()
    };
    let mut r_norm = norm(&r0);

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
    let status = 'outer: {
        if check_stop(r_norm, b_norm, config) {
            break 'outer Status::Converged;
        }
        let Some(mut state) = bidiag_start(a, &r0) else {
            // r0 != 0 here, so A^T u vanished: r0 is orthogonal to range(A).
            break 'outer Status::BreakdownYVanished;
        };
        let mut zeta = state.beta / state.alpha;
        axpy(zeta, &state.v, &mut x);
        loop {
            let advanced = bidiag_step(a, &mut state);
            r_norm = zeta.abs() * state.beta;
            k += 1;
            record(&mut trace, k, r_norm);
            if check_stop(r_norm, b_norm, config) {
                break 'outer Status::Converged;
            }
            if !advanced {
                break 'outer Status::BreakdownStagnation;
            }
            if k >= config.max_iters {
                break 'outer Status::IterationLimit;
            }
            zeta *= -(state.beta / state.alpha);
            axpy(zeta, &state.v, &mut x);
        }
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

/// LSQR: least-squares iterates via Givens rotations on the bidiagonal factor.
pub fn lsqr_solve(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveReport> {
    let b_norm = norm(b);
    config.validate(b_norm)?;
    let start = Instant::now();
    let mut trace = config.trace.then(Vec::new);

    let mut x = x0.to_vec();
    let r0: Vec<f64> = {
        let ax = a.matvec(&x);
        b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect()
    };
    let mut r_norm = norm(&r0);

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
    let status = 'outer: {
        if check_stop(r_norm, b_norm, config) {
            break 'outer Status::Converged;
        }
        let Some(mut state) = bidiag_start(a, &r0) else {
            break 'outer Status::BreakdownYVanished;
        };
        let mut w = state.v.clone();
        let mut phibar = state.beta;
        let mut rhobar = state.alpha;
        loop {
            let advanced = bidiag_step(a, &mut state);
            let beta = state.beta;
            let rho = rhobar.hypot(beta);
            let c = rhobar / rho;
            let s = beta / rho;
            let phi = c * phibar;
            phibar *= s;
            axpy(phi / rho, &w, &mut x);

            let true_res = {
                let ax = a.matvec(&x);
                let diff: f64 = b
                    .iter()
                    .zip(&ax)
                    .map(|(bi, axi)| (bi - axi) * (bi - axi))
                    .sum();
                diff.sqrt()
            };
            r_norm = true_res;
            k += 1;
            record(&mut trace, k, r_norm);
            if check_stop(r_norm, b_norm, config) {
                break 'outer Status::Converged;
            }
            if !advanced {
                break 'outer Status::BreakdownStagnation;
            }
            if k >= config.max_iters {
                break 'outer Status::IterationLimit;
            }
            let alpha = state.alpha;
            let theta = s * alpha;
            rhobar = -c * alpha;
            let mut w_next = state.v.clone();
            axpy(-theta / rho, &w, &mut w_next);
            w = w_next;
        }
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
