//! Solve a small consistent system with the short-recursion solver and print
//! the per-iteration trace.

use plss::solver::{plss_solve, SolverConfig, TolMode};
use plss::SparseMatrix;

fn main() {
    // Tridiagonal 10x10 system
    let n = 10;
    let mut entries = Vec::new();
    for i in 0..n {
        entries.push((i, i, 2.5));
        if i + 1 < n {
            entries.push((i, i + 1, -1.0));
            entries.push((i + 1, i, -1.0));
        }
    }
    let a = SparseMatrix::from_triplets(&entries, n, n).unwrap();

    // spike right-hand side: b = A * (10, 1, .., 1)
    let mut x_true = vec![1.0; n];
    x_true[0] = 10.0;
    let b = a.matvec(&x_true);

    let cfg = SolverConfig::new(1e-10, TolMode::Relative, n).with_trace(true);
    let rep = plss_solve(&a, &b, &vec![0.0; n], &cfg).unwrap();

    println!("status: {:?}, iterations: {}", rep.status, rep.iterations);
    for e in rep.trace.as_deref().unwrap_or(&[]) {
        println!("  iter {:3}  |r| = {:.3e}  |r|/|b| = {:.3e}", e.iter, e.abs_residual, e.rel_residual);
    }
    let err: f64 = rep
        .solution
        .iter()
        .zip(&x_true)
        .map(|(xi, ti)| (xi - ti) * (xi - ti))
        .sum::<f64>()
        .sqrt();
    println!("error vs planted solution: {err:.3e}");
}
