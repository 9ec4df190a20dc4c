//! Experiment harness: solver dispatch, synthetic right-hand sides, tolerance
//! presets, per-problem reports, and a parallel benchmark runner.

use std::fmt;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{craig_solve, lsqr_solve};
use crate::error::{Error, Result};
use crate::kaczmarz::{kz_solve, KaczmarzVariant, ScheduleMode};
use crate::market::read_matrix_market_file;
use crate::matrix::SparseMatrix;
use crate::projection::{run_projection, EngineKind, SketchProvider};
use crate::solver::{plss_solve, SolveReport, SolverConfig, TolMode, TraceEntry};
use crate::weight::WeightMode;

/// Default width of the fixed random sketch when no preset or override applies.
pub const DEFAULT_RANDOM_SKETCH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverId {
    /// Short recursion, identity weight.
    Plss,
    /// Short recursion, inverse column-norm weight.
    PlssW,
    /// History-projected Kaczmarz.
    PlssKz,
    KaczmarzClassic,
    Craig,
    Lsqr,
    /// Residual sketch through the pseudo-inverse engine.
    ProjPinv,
    /// Residual sketch through the QR engine.
    ProjQr,
    /// Residual sketch through the triangular engine.
    ProjTri,
    /// Fixed-size random sketch redrawn every iteration.
    Randproj,
}

impl SolverId {
    pub const ALL: [SolverId; 10] = [
        SolverId::Plss,
        SolverId::PlssW,
        SolverId::PlssKz,
        SolverId::KaczmarzClassic,
        SolverId::Craig,
        SolverId::Lsqr,
        SolverId::ProjPinv,
        SolverId::ProjQr,
        SolverId::ProjTri,
        SolverId::Randproj,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SolverId::Plss => "plss",
            SolverId::PlssW => "plss-w",
            SolverId::PlssKz => "plss-kz",
            SolverId::KaczmarzClassic => "kaczmarz-classic",
            SolverId::Craig => "craig",
            SolverId::Lsqr => "lsqr",
            SolverId::ProjPinv => "proj-pinv",
            SolverId::ProjQr => "proj-qr",
            SolverId::ProjTri => "proj-tri",
            SolverId::Randproj => "randproj",
        }
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown solver id: {s}")))
    }
}

/// Named tolerance/budget presets from the experiment protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetId {
    Exp1,
    Exp2,
    Exp3,
    Exp4,
}

impl PresetId {
    /// Builds a configuration for a system with `n` unknowns.
    pub fn config(&self, n: usize) -> SolverConfig {
        match self {
            PresetId::Exp1 => SolverConfig::new(1e-2, TolMode::Relative, n.max(1)),
            PresetId::Exp2 => SolverConfig::new(1e-6, TolMode::Relative, n + 1000),
            PresetId::Exp3 => SolverConfig::new(1e-2, TolMode::Absolute, 500),
            PresetId::Exp4 => SolverConfig::new(1e-4, TolMode::Absolute, n + 1500),
        }
    }

    /// Fixed random sketch width associated with the preset, if any.
    pub fn sketch_size(&self, n: usize) -> Option<usize> {
        match self {
            PresetId::Exp3 => Some(if n > 100_000 { 5 } else { 50 }),
            _ => None,
        }
    }
}

impl FromStr for PresetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp1" => Ok(PresetId::Exp1),
            "exp2" => Ok(PresetId::Exp2),
            "exp3" => Ok(PresetId::Exp3),
            "exp4" => Ok(PresetId::Exp4),
            other => Err(Error::Config(format!("unknown preset: {other}"))),
        }
    }
}

/// Consistent synthetic right-hand side: `b = A x` with `x = (10, 1, .., 1)`.
pub fn synth_rhs(a: &SparseMatrix) -> Vec<f64> {
    let mut x = vec![1.0; a.cols()];
    if !x.is_empty() {
        x[0] = 10.0;
    }
    a.matvec(&x)
}

/// Per-run knobs beyond the shared [`SolverConfig`].
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: SolverConfig,
    pub seed: u64,
    /// Width of the fixed random sketch (`randproj` only).
    pub sketch_size: Option<usize>,
}

impl RunOptions {
    pub fn new(config: SolverConfig) -> Self {
        RunOptions { config, seed: 0, sketch_size: None }
    }
}

/// Dispatches one solver run. The weight mode in `opts.config` is overridden
/// where the solver id fixes it (`plss` identity, `plss-w` column norm).
pub fn run_solver(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    id: SolverId,
    opts: &RunOptions,
) -> Result<SolveReport> {
    match id {
        SolverId::Plss => {
            let cfg = opts.config.clone().with_weight(WeightMode::Identity);
            plss_solve(a, b, x0, &cfg)
        }
        SolverId::PlssW => {
            let cfg = opts.config.clone().with_weight(WeightMode::ColumnNorm);
            plss_solve(a, b, x0, &cfg)
        }
        SolverId::PlssKz => kz_solve(
            a,
            b,
            x0,
            KaczmarzVariant::Projected,
            ScheduleMode::PermutationEpoch,
            opts.seed,
            &opts.config,
        ),
        SolverId::KaczmarzClassic => kz_solve(
            a,
            b,
            x0,
            KaczmarzVariant::Classical,
            ScheduleMode::PermutationEpoch,
            opts.seed,
            &opts.config,
        ),
        SolverId::Craig => craig_solve(a, b, x0, &opts.config),
        SolverId::Lsqr => lsqr_solve(a, b, x0, &opts.config),
        SolverId::ProjPinv => run_projection(
            a,
            b,
            x0,
            &SketchProvider::residual(),
            EngineKind::Pinv,
            &opts.config,
        ),
        SolverId::ProjQr => run_projection(
            a,
            b,
            x0,
            &SketchProvider::residual(),
            EngineKind::Qr,
            &opts.config,
        ),
        SolverId::ProjTri => run_projection(
            a,
            b,
            x0,
            &SketchProvider::residual(),
            EngineKind::Tri,
            &opts.config,
        ),
        SolverId::Randproj => {
            let r = opts.sketch_size.unwrap_or(DEFAULT_RANDOM_SKETCH);
            run_projection(
                a,
                b,
                x0,
                &SketchProvider::random_fixed(r, opts.seed),
                EngineKind::Pinv,
                &opts.config,
            )
        }
    }
}

/// Matrix metadata included in every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixInfo {
    pub m: usize,
    pub n: usize,
    pub nnz: usize,
    pub structural_rank: usize,
}

impl MatrixInfo {
    pub fn of(a: &SparseMatrix) -> Self {
        MatrixInfo {
            m: a.rows(),
            n: a.cols(),
            nnz: a.nnz(),
            structural_rank: a.structural_rank(),
        }
    }
}

/// Full record of one solver run on one problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemReport {
    pub problem: String,
    pub matrix: MatrixInfo,
    pub solver: SolverId,
    #[serde(flatten)]
    pub report: SolveReport,
}

/// Writes the per-iteration trace as CSV.
pub fn write_trace_csv(path: &Path, trace: &[TraceEntry]) -> Result<()> {
    let mut f = File::create(path)?;
    writeln!(f, "iter,abs_residual,rel_residual,elapsed_seconds")?;
    for e in trace {
        writeln!(
            f,
            "{},{:.17e},{:.17e},{:.6}",
            e.iter, e.abs_residual, e.rel_residual, e.elapsed_seconds
        )?;
    }
    Ok(())
}

/// Reads a dense vector from a plain text file: one value per line,
/// whitespace-separated values allowed, `%` and `#` comment lines skipped.
pub fn read_vector(path: &Path, expected_len: usize) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut v = Vec::with_capacity(expected_len);
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        for tok in t.split_whitespace() {
            let x: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad vector entry: {tok}")))?;
            v.push(x);
        }
    }
    if v.len() != expected_len {
        return Err(Error::DimensionMismatch { expected: expected_len, got: v.len() });
    }
    Ok(v)
}

/// Loads a matrix, builds the right-hand side (from a file or the synthetic
/// spike) and starting point (from a file or zero), runs one solver, and
/// optionally writes a trace CSV and a JSON report.
pub fn run_problem(
    matrix_path: &Path,
    solver: SolverId,
    opts: &RunOptions,
    rhs_path: Option<&Path>,
    x0_path: Option<&Path>,
    trace_out: Option<&Path>,
    report_out: Option<&Path>,
) -> Result<ProblemReport> {
    let a = read_matrix_market_file(matrix_path)?;
    let b = match rhs_path {
        Some(p) => read_vector(p, a.rows())?,
        None => synth_rhs(&a),
    };
    let x0 = match x0_path {
        Some(p) => read_vector(p, a.cols())?,
        None => vec![0.0; a.cols()],
    };
    let mut opts = opts.clone();
    if trace_out.is_some() {
        opts.config.trace = true;
    }
    let report = run_solver(&a, &b, &x0, solver, &opts)?;
    if let Some(path) = trace_out {
        let trace = report.trace.as_deref().unwrap_or(&[]);
        write_trace_csv(path, trace)?;
    }
    let problem = matrix_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| matrix_path.display().to_string());
    let full = ProblemReport {
        problem,
        matrix: MatrixInfo::of(&a),
        solver,
        report,
    };
    if let Some(path) = report_out {
        let mut f = File::create(path)?;
        serde_json::to_writer_pretty(&mut f, &full)
            .map_err(|e| Error::Config(format!("failed to serialize report: {e}")))?;
        writeln!(f)?;
    }
    Ok(full)
}

/// One problem entry of a benchmark manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub name: String,
    pub matrix: PathBuf,
    pub solvers: Vec<SolverId>,
    #[serde(default)]
    pub preset: Option<PresetId>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub tol_mode: Option<TolMode>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub sketch_size: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub problems: Vec<ProblemSpec>,
}

impl BenchmarkManifest {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad manifest: {e}")))
    }
}

/// One output row of a benchmark run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub problem: String,
    pub m: usize,
    pub n: usize,
    pub nnz: usize,
    pub solver: String,
    pub iterations: usize,
    pub seconds: f64,
    pub final_residual: f64,
    /// Terminal status, or `error: ...` when the run could not start.
    pub status: String,
    /// `*` on the fastest converged solver of each problem.
    pub fastest: String,
}

fn bench_one(spec: &ProblemSpec, solver: SolverId) -> BenchRow {
    let mut row = BenchRow {
        problem: spec.name.clone(),
        m: 0,
        n: 0,
        nnz: 0,
        solver: solver.as_str().to_string(),
        iterations: 0,
        seconds: 0.0,
        final_residual: f64::NAN,
        status: String::new(),
        fastest: String::new(),
    };
    let a = match read_matrix_market_file(&spec.matrix) {
        Ok(a) => a,
        Err(e) => {
            row.status = format!("error: {e}");
            return row;
        }
    };
    row.m = a.rows();
    row.n = a.cols();
    row.nnz = a.nnz();

    let n = a.cols();
    let mut config = match spec.preset {
        Some(p) => p.config(n),
        None => SolverConfig::new(1e-6, TolMode::Relative, n + 1000),
    };
    if let Some(tol) = spec.tol {
        config.tol = tol;
    }
    if let Some(mode) = spec.tol_mode {
        config.tol_mode = mode;
    }
    if let Some(cap) = spec.max_iters {
        config.max_iters = cap;
    }
    let mut opts = RunOptions::new(config);
    opts.seed = spec.seed.unwrap_or(0);
    opts.sketch_size = spec
        .sketch_size
        .or_else(|| spec.preset.and_then(|p| p.sketch_size(n)));

    let b = synth_rhs(&a);
    let x0 = vec![0.0; n];
    match run_solver(&a, &b, &x0, solver, &opts) {
        Ok(rep) => {
            row.iterations = rep.iterations;
            row.seconds = rep.wall_seconds;
            row.final_residual = rep.final_abs_residual;
            row.status = serde_json::to_value(rep.status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_else(|| format!("{:?}", rep.status));
        }
        Err(e) => {
            row.status = format!("error: {e}");
        }
    }
    row
}

/// Runs every (problem, solver) pair of the manifest, in parallel when `jobs`
/// allows, and writes `results.csv` under `out_dir`. Row order follows the
/// manifest regardless of scheduling; a failed pair becomes an `error: ...`
/// row without affecting the others.
pub fn run_benchmark(
    manifest: &BenchmarkManifest,
    jobs: Option<usize>,
    out_dir: &Path,
) -> Result<Vec<BenchRow>> {
    std::fs::create_dir_all(out_dir)?;
    let pairs: Vec<(&ProblemSpec, SolverId)> = manifest
        .problems
        .iter()
        .flat_map(|p| p.solvers.iter().map(move |&s| (p, s)))
        .collect();

    let run_all = || pairs.par_iter().map(|(p, s)| bench_one(p, *s)).collect::<Vec<_>>();
    let mut rows = match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(run_all)
        }
        None => run_all(),
    };

    // Mark the fastest converged solver per problem.
    let mut idx = 0;
    while idx < rows.len() {
        let problem = rows[idx].problem.clone();
        let mut end = idx;
        while end < rows.len() && rows[end].problem == problem {
            end += 1;
        }
        let winner = (idx..end)
            .filter(|&i| rows[i].status == "converged")
            .min_by(|&i, &j| rows[i].seconds.total_cmp(&rows[j].seconds));
        if let Some(w) = winner {
            rows[w].fastest = "*".to_string();
        }
        idx = end;
    }

    let mut f = File::create(out_dir.join("results.csv"))?;
    writeln!(
        f,
        "problem,m,n,nnz,solver,iterations,seconds,final_residual,status,fastest"
    )?;
    for r in &rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{:.6},{:.17e},{},{}",
            r.problem,
            r.m,
            r.n,
            r.nnz,
            r.solver,
            r.iterations,
            r.seconds,
            r.final_residual,
            r.status,
            r.fastest
        )?;
    }
    Ok(rows)
}
