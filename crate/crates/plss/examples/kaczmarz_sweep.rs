//! Compare classical Kaczmarz sweeps with the history-projected variant.

use plss::kaczmarz::{kz_solve, KaczmarzVariant, ScheduleMode};
use plss::solver::{SolverConfig, TolMode};
use plss::SparseMatrix;

fn main() {
    // Underdetermined 6x9 system with overlapping rows
    let mut entries = Vec::new();
    for i in 0..6 {
        entries.push((i, i, 2.0));
        entries.push((i, i + 3, 1.0));
    }
    let a = SparseMatrix::from_triplets(&entries, 6, 9).unwrap();
    let mut x_true = vec![1.0; 9];
    x_true[0] = 10.0;
    let b = a.matvec(&x_true);
    let x0 = vec![0.0; 9];
    let cfg = SolverConfig::new(1e-10, TolMode::Relative, 600);

    for (name, variant, mode) in [
        ("classical, cyclic", KaczmarzVariant::Classical, ScheduleMode::Cyclic),
        ("classical, shuffled epochs", KaczmarzVariant::Classical, ScheduleMode::PermutationEpoch),
        ("projected, cyclic", KaczmarzVariant::Projected, ScheduleMode::Cyclic),
        ("projected, shuffled epochs", KaczmarzVariant::Projected, ScheduleMode::PermutationEpoch),
    ] {
        let rep = kz_solve(&a, &b, &x0, variant, mode, 1, &cfg).unwrap();
        println!(
            "{name:28} {:?} after {:4} row steps, |r|/|b| = {:.3e}",
            rep.status, rep.iterations, rep.final_rel_residual
        );
    }
}
