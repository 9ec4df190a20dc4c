use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use plss::harness::{
    run_benchmark, run_problem, BenchmarkManifest, PresetId, RunOptions, SolverId,
};
use plss::solver::{SolverConfig, TolMode};

#[derive(Parser)]
#[command(name = "plss", about = "Projected iterative solvers for sparse linear systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one system read from a Matrix Market file.
    Solve(SolveArgs),
    /// Run every (problem, solver) pair of a benchmark manifest.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Matrix Market coordinate file.
    #[arg(long)]
    matrix: PathBuf,
    /// Solver id: plss, plss-w, plss-kz, kaczmarz-classic, craig, lsqr,
    /// proj-pinv, proj-qr, proj-tri, randproj.
    #[arg(long)]
    solver: SolverId,
    /// Right-hand side vector file (one value per line). Defaults to the
    /// synthetic spike b = A * (10, 1, .., 1).
    #[arg(long, conflicts_with = "rhs_mode")]
    rhs: Option<PathBuf>,
    /// Right-hand side synthesis mode.
    #[arg(long, value_enum, default_value = "spike")]
    rhs_mode: RhsModeArg,
    /// Starting point vector file; defaults to zero.
    #[arg(long)]
    x0: Option<PathBuf>,
    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Interpret the tolerance relative to ||b|| or as an absolute bound.
    #[arg(long, value_enum, default_value = "rel")]
    tol_mode: TolModeArg,
    /// Iteration cap; defaults to n + 1000 unless a preset sets it.
    #[arg(long, conflicts_with = "preset")]
    max_iters: Option<usize>,
    /// Named protocol preset (exp1..exp4) fixing tolerance and budget.
    #[arg(long)]
    preset: Option<String>,
    /// Weight mode for the short-recursion solvers.
    #[arg(long, value_enum, default_value = "identity")]
    weight: WeightArg,
    /// Seed for randomized sketches and row schedules.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Width of the fixed random sketch (randproj).
    #[arg(long)]
    sketch_size: Option<usize>,
    /// Write the per-iteration trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the full run report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON manifest listing problems and solvers.
    #[arg(long)]
    manifest: PathBuf,
    /// Worker threads; defaults to one per logical core.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory for results.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum TolModeArg {
    Rel,
    Abs,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum RhsModeArg {
    Spike,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum WeightArg {
    Identity,
    Colnorm,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> plss::Result<()> {
    match cli.command {
        Command::Solve(args) => {
            // `spike` is the only synthesis mode; a file path overrides it.
            let RhsModeArg::Spike = args.rhs_mode;
            // The iteration budget may depend on n, so peek at the matrix
            // header dimensions by loading it once here for budget resolution.
            let a = plss::read_matrix_market_file(&args.matrix)?;
            let n = a.cols();
            drop(a);

            let mut config = match &args.preset {
                Some(p) => p.parse::<PresetId>()?.config(n),
                None => {
                    let mode = match args.tol_mode {
                        TolModeArg::Rel => TolMode::Relative,
                        TolModeArg::Abs => TolMode::Absolute,
                    };
                    SolverConfig::new(args.tol, mode, args.max_iters.unwrap_or(n + 1000))
                }
            };
            config.weight_mode = match args.weight {
                WeightArg::Identity => plss::WeightMode::Identity,
                WeightArg::Colnorm => plss::WeightMode::ColumnNorm,
            };
            let mut opts = RunOptions::new(config);
            opts.seed = args.seed;
            opts.sketch_size = args.sketch_size.or_else(|| {
                args.preset
                    .as_deref()
                    .and_then(|p| p.parse::<PresetId>().ok())
                    .and_then(|p| p.sketch_size(n))
            });

            let full = run_problem(
                &args.matrix,
                args.solver,
                &opts,
                args.rhs.as_deref(),
                args.x0.as_deref(),
                args.trace.as_deref(),
                args.report.as_deref(),
            )?;
            println!(
                "{} {} status={} iters={} abs_res={:.3e} rel_res={:.3e} seconds={:.3}",
                full.problem,
                full.solver,
                serde_json::to_value(full.report.status)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_owned))
                    .unwrap_or_default(),
                full.report.iterations,
                full.report.final_abs_residual,
                full.report.final_rel_residual,
                full.report.wall_seconds
            );
            for w in &full.report.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Bench(args) => {
            let manifest = BenchmarkManifest::from_file(&args.manifest)?;
            let rows = run_benchmark(&manifest, args.jobs, &args.out)?;
            let errors = rows.iter().filter(|r| r.status.starts_with("error:")).count();
            println!(
                "wrote {} rows to {} ({} errors)",
                rows.len(),
                args.out.join("results.csv").display(),
                errors
            );
            Ok(())
        }
    }
}
