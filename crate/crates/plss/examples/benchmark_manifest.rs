//! Build a benchmark manifest programmatically and run it in parallel.

use std::fs::File;
use std::io::Write;

use plss::harness::{run_benchmark, BenchmarkManifest, PresetId, ProblemSpec, SolverId};

fn main() {
    let dir = tempfile::tempdir().unwrap();

    // Two synthetic problems written as Matrix Market files
    for (name, rows) in [("small", 8usize), ("larger", 40)] {
        let path = dir.path().join(format!("{name}.mtx"));
        let mut f = File::create(&path).unwrap();
        let nnz = rows + (rows - 1);
        writeln!(f, "%%MatrixMarket matrix coordinate real general").unwrap();
        writeln!(f, "{rows} {rows} {nnz}").unwrap();
        for i in 1..=rows {
            writeln!(f, "{i} {i} 3.0").unwrap();
            if i < rows {
                writeln!(f, "{} {} -1.0", i + 1, i).unwrap();
            }
        }
    }

    let manifest = BenchmarkManifest {
        problems: ["small", "larger"]
            .iter()
            .map(|name| ProblemSpec {
                name: name.to_string(),
                matrix: dir.path().join(format!("{name}.mtx")),
                solvers: vec![
                    SolverId::Plss,
                    SolverId::Craig,
                    SolverId::Lsqr,
                    SolverId::PlssKz,
                ],
                preset: Some(PresetId::Exp2),
                tol: None,
                tol_mode: None,
                max_iters: None,
                seed: Some(0),
                sketch_size: None,
            })
            .collect(),
    };

    let out = dir.path().join("results");
    let rows = run_benchmark(&manifest, Some(4), &out).unwrap();
    println!("{:10} {:18} {:>6} {:>12} {:>10} fastest", "problem", "solver", "iters", "residual", "status");
    for r in &rows {
        println!(
            "{:10} {:18} {:>6} {:>12.3e} {:>10} {}",
            r.problem, r.solver, r.iterations, r.final_residual, r.status, r.fastest
        );
    }
    println!("\ncsv written to {}", out.join("results.csv").display());
}
