//! Run the same residual-sketch iteration through all three projection
//! engines and with different sketch providers.

use plss::kaczmarz::ScheduleMode;
use plss::projection::{run_projection, EngineKind, SketchProvider};
use plss::solver::{SolverConfig, TolMode};
use plss::SparseMatrix;

fn main() {
    let entries = [
        (0, 0, 3.0),
        (0, 2, 1.0),
        (1, 1, 2.0),
        (1, 3, -1.0),
        (2, 0, 1.0),
        (2, 2, 4.0),
        (3, 1, -1.0),
        (3, 3, 2.5),
        (4, 0, 0.5),
        (4, 4, 1.0),
    ];
    let a = SparseMatrix::from_triplets(&entries, 5, 5).unwrap();
    let b = a.matvec(&[10.0, 1.0, 1.0, 1.0, 1.0]);
    let x0 = vec![0.0; 5];
    let cfg = SolverConfig::new(1e-10, TolMode::Relative, 50);

    println!("residual sketch through each engine:");
    for engine in [EngineKind::Pinv, EngineKind::Qr, EngineKind::Tri] {
        let rep =
            run_projection(&a, &b, &x0, &SketchProvider::residual(), engine, &cfg).unwrap();
        println!(
            "  {:?}: {:?} after {} iterations, |r| = {:.3e}",
            engine, rep.status, rep.iterations, rep.final_abs_residual
        );
    }

    println!("other sketch providers (pseudo-inverse engine):");
    let providers = [
        ("identity columns", SketchProvider::identity_columns(ScheduleMode::Cyclic, 0)),
        ("random growing", SketchProvider::random_growing(true, 42)),
        ("random fixed r=3", SketchProvider::random_fixed(3, 42)),
    ];
    for (name, provider) in providers {
        let rep = run_projection(&a, &b, &x0, &provider, EngineKind::Pinv, &cfg).unwrap();
        println!(
            "  {name}: {:?} after {} iterations, |r| = {:.3e}",
            rep.status, rep.iterations, rep.final_abs_residual
        );
    }
}
