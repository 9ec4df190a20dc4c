//! Column-norm weighting on a badly scaled system.

use plss::solver::{plss_solve, SolverConfig, TolMode};
use plss::{SparseMatrix, WeightMode};

fn main() {
    // Columns scaled over five orders of magnitude
    let n = 12;
    let mut entries = Vec::new();
    for i in 0..n {
        let scale = 10f64.powf((i as f64) / (n as f64 - 1.0) * 5.0);
        entries.push((i, i, 2.0 * scale));
        if i + 1 < n {
            entries.push((i + 1, i, 0.5 * scale));
        }
    }
    let a = SparseMatrix::from_triplets(&entries, n, n).unwrap();
    let mut x_true = vec![1.0; n];
    x_true[0] = 10.0;
    let b = a.matvec(&x_true);
    let x0 = vec![0.0; n];

    for (name, mode) in [
        ("identity weight   ", WeightMode::Identity),
        ("column-norm weight", WeightMode::ColumnNorm),
    ] {
        let cfg = SolverConfig::new(1e-8, TolMode::Relative, 500).with_weight(mode);
        let rep = plss_solve(&a, &b, &x0, &cfg).unwrap();
        println!(
            "{name} {:?} after {:3} iterations, |r|/|b| = {:.3e}",
            rep.status, rep.iterations, rep.final_rel_residual
        );
    }
}
