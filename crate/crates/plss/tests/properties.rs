//! Randomized property checks over the matrix kernels and the solver family.

mod common;

use common::*;
use plss::solver::{plss_solve, SolverConfig, Status, TolMode};
use plss::SparseMatrix;
use proptest::prelude::*;

fn triplet_strategy() -> impl Strategy<Value = (Vec<(usize, usize, f64)>, usize, usize)> {
    (2usize..12, 2usize..12).prop_flat_map(|(m, n)| {
        let entry = (0..m, 0..n, -5.0f64..5.0);
        (proptest::collection::vec(entry, 0..40), Just(m), Just(n))
    })
}

proptest! {
    #[test]
    fn matvec_matches_dense((entries, m, n) in triplet_strategy(),
                            x in proptest::collection::vec(-3.0f64..3.0, 12)) {
        let a = SparseMatrix::from_triplets(&entries, m, n).unwrap();
        let x = &x[..n];
        let dense = a.to_dense();
        let y = a.matvec(x);
        for i in 0..m {
            let want: f64 = (0..n).map(|j| dense[i][j] * x[j]).sum();
            prop_assert!((y[i] - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn adjoint_identity((entries, m, n) in triplet_strategy(),
                        u in proptest::collection::vec(-3.0f64..3.0, 12),
                        v in proptest::collection::vec(-3.0f64..3.0, 12)) {
        let a = SparseMatrix::from_triplets(&entries, m, n).unwrap();
        let (u, v) = (&u[..m], &v[..n]);
        let lhs = dot(u, &a.matvec(v));
        let rhs = dot(&a.matvec_transpose(u), v);
        let scale = 1.0 + norm(u) * norm(v) * 25.0;
        prop_assert!((lhs - rhs).abs() <= 1e-11 * scale);
    }

    #[test]
    fn diagonal_systems_terminate(diag in proptest::collection::vec(0.5f64..4.0, 2..10)) {
        let n = diag.len();
        let entries: Vec<_> = diag.iter().enumerate().map(|(i, &d)| (i, i, d)).collect();
        let a = SparseMatrix::from_triplets(&entries, n, n).unwrap();
        let b = a.matvec(&spike(n));
        // In exact arithmetic the solver terminates within n steps; rounding
        // can cost a couple of extra iterations at tight tolerances.
        let cfg = SolverConfig::new(1e-10, TolMode::Relative, n + 3);
        let rep = plss_solve(&a, &b, &vec![0.0; n], &cfg).unwrap();
        prop_assert_eq!(rep.status, Status::Converged);
        prop_assert!(rep.iterations <= n + 3);
        let r = residual(&a, &b, &rep.solution);
        prop_assert!(norm(&r) <= 1e-9 * norm(&b));
    }
}

#[test]
fn reported_residual_matches_recomputed() {
    for seed in 0..20u64 {
        let a = conditioned_matrix(400 + seed, 12, 9, 20.0);
        let b = a.matvec(&spike(9));
        let cfg = SolverConfig::new(1e-9, TolMode::Relative, 50);
        let rep = plss_solve(&a, &b, &[0.0; 9], &cfg).unwrap();
        let r_true = norm(&residual(&a, &b, &rep.solution));
        assert!(
            (r_true - rep.final_abs_residual).abs() <= 1e-10 * (1.0 + norm(&b)),
            "seed {seed}: reported {:.3e} vs true {r_true:.3e}",
            rep.final_abs_residual
        );
    }
}
