//! The bidiagonalization baselines next to the short-recursion solver.

use plss::baselines::{craig_solve, lsqr_solve};
use plss::solver::{plss_solve, SolverConfig, TolMode};
use plss::SparseMatrix;

fn main() {
    let n = 20;
    let mut entries = Vec::new();
    for i in 0..n {
        entries.push((i, i, 2.0 + (i as f64) * 0.1));
        if i + 2 < n {
            entries.push((i, i + 2, -0.7));
        }
    }
    let a = SparseMatrix::from_triplets(&entries, n, n).unwrap();
    let mut x_true = vec![1.0; n];
    x_true[0] = 10.0;
    let b = a.matvec(&x_true);
    let x0 = vec![0.0; n];
    let cfg = SolverConfig::new(1e-10, TolMode::Relative, 200);

    let plss_rep = plss_solve(&a, &b, &x0, &cfg).unwrap();
    let craig_rep = craig_solve(&a, &b, &x0, &cfg).unwrap();
    let lsqr_rep = lsqr_solve(&a, &b, &x0, &cfg).unwrap();

    for (name, rep) in [("plss", &plss_rep), ("craig", &craig_rep), ("lsqr", &lsqr_rep)] {
        println!(
            "{name:5} {:?} after {:3} iterations, |r|/|b| = {:.3e}",
            rep.status, rep.iterations, rep.final_rel_residual
        );
    }

    // On consistent systems the short recursion and Craig produce the same
    // iterates; their final points agree to solver tolerance.
    let gap: f64 = plss_rep
        .solution
        .iter()
        .zip(&craig_rep.solution)
        .map(|(p, c)| (p - c) * (p - c))
        .sum::<f64>()
        .sqrt();
    println!("|x_plss - x_craig| = {gap:.3e}");
}
