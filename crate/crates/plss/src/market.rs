//! Matrix Market coordinate-format reader.
//!
//! Accepts `real` and `integer` fields with `general` or `symmetric` symmetry,
//! 1-based coordinates, and `%` comment lines. Symmetric storage is expanded to
//! full storage (off-diagonal entries mirrored, diagonal kept once). `pattern`,
//! `complex`, and `array` files are rejected.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;

pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<SparseMatrix> {
    let mut lines = reader.lines();

    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty file".into()))??;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse(format!("bad Matrix Market header: {header}")));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::UnsupportedFormat(format!("{} format", tokens[2])));
    }
    let field = tokens[3].as_str();
    if field != "real" && field != "integer" {
        return Err(Error::UnsupportedFormat(format!("{field} field")));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::UnsupportedFormat(format!("{other} symmetry"))),
    };

    // Size line: first non-comment line after the header.
    let mut size_line = None;
    for line in lines.by_ref() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some(line);
        break;
    }
    let size_line = size_line.ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad size line: {size_line}"))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(Error::Parse(format!("bad size line: {size_line}")));
    }
    let (m, n, declared_nnz) = (dims[0], dims[1], dims[2]);

    let mut entries = Vec::with_capacity(declared_nnz);
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let row: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad entry line: {trimmed}")))?;
        let col: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad entry line: {trimmed}")))?;
        let value: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad entry line: {trimmed}")))?;
        if row == 0 || col == 0 || row > m || col > n {
            return Err(Error::Parse(format!(
                "coordinate ({row}, {col}) outside declared {m}x{n} bounds"
            )));
        }
        let (r, c) = (row - 1, col - 1);
        entries.push((r, c, value));
        if symmetric && r != c {
            entries.push((c, r, value));
        }
    }

    SparseMatrix::from_triplets(&entries, m, n)
}

pub fn read_matrix_market_file<P: AsRef<Path>>(path: P) -> Result<SparseMatrix> {
    read_matrix_market(BufReader::new(File::open(path)?))
}
