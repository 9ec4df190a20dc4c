//! Projected iterative solvers for sparse linear systems `Ax = b`.
//!
//! The core method builds iterates by projecting onto a growing sketch of the
//! residual history. With residual sketches the projection collapses to a
//! short recursion — two sparse products and a handful of vector operations
//! per iteration ([`solver::plss_solve`]). The same update can be computed by
//! three interchangeable engines over explicit sketch histories
//! ([`projection`]), by row-action steps ([`kaczmarz`]), and compared against
//! Golub-Kahan baselines ([`baselines`]). The [`harness`] module runs the
//! experiment protocol over Matrix Market files.

pub mod baselines;
pub mod error;
pub mod harness;
pub mod kaczmarz;
pub mod market;
pub mod matrix;
pub mod projection;
pub mod solver;
pub mod weight;

pub use error::{Error, Result};
pub use market::{read_matrix_market, read_matrix_market_file};
pub use matrix::SparseMatrix;
pub use solver::{plss_solve, SolveReport, SolverConfig, Status, TolMode};
pub use weight::{Weight, WeightMode};
