//! JSON run reports and CSV tables.
//!
//! Dense blocks (`U`, `X`, `V`) are written in long form, one entry per
//! row in column-major order, under the header `row,col,re` (real) or
//! `row,col,re,im` (complex). Indices are zero-based.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use lrup_core::{DenseMatrix, Scalar, C64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub m: usize,
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub true_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub source: String,
    pub n: usize,
    pub nnz: usize,
    pub symmetric: bool,
    pub complex: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub function: String,
    /// `hermitian` (Lanczos) or `general` (two Arnoldi processes).
    pub algorithm: String,
    pub matrix: MatrixMeta,
    pub tol: f64,
    pub lookahead: usize,
    pub max_m: usize,
    /// Seed for `random` vectors without their own seed.
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    /// Krylov steps behind the written factor.
    pub m: usize,
    pub converged: bool,
    pub wall_time_s: f64,
    /// Spectral-norm error of the written factor against the dense oracle.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub true_error: Option<f64>,
}

impl RunReport {
    /// Step indices must be strictly increasing.
    pub fn validate(&self) -> Result<()> {
        if self.steps.windows(2).any(|w| w[0].m >= w[1].m) {
            return Err(Error::Usage("report steps are not strictly increasing".into()));
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.validate()?;
        let path = path.as_ref();
        let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(&mut file, self)?;
        writeln!(file).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }
}

/// Shortest round-trip formatting, so equal runs give equal bytes.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// `NA` marks a value that does not apply.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), fmt_f64)
}

pub fn write_dense_csv<T: Scalar>(path: impl AsRef<Path>, m: &DenseMatrix<T>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    if T::IS_COMPLEX {
        w.write_record(["row", "col", "re", "im"])?;
    } else {
        w.write_record(["row", "col", "re"])?;
    }
    for j in 0..m.cols() {
        for (i, v) in m.col(j).iter().enumerate() {
            let (i, j) = (i.to_string(), j.to_string());
            if T::IS_COMPLEX {
                w.write_record([i, j, fmt_f64(v.re()), fmt_f64(v.im())])?;
            } else {
                w.write_record([i, j, fmt_f64(v.re())])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a block written by [`write_dense_csv`].
pub fn read_dense_csv(path: impl AsRef<Path>) -> Result<DenseMatrix<C64>> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    let mut entries = Vec::new();
    let (mut rows, mut cols) = (0, 0);
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |q: usize| rec.get(q).ok_or_else(|| Error::parse(k + 2, "missing field"));
        let idx = |q: usize| field(q)?.parse::<usize>().map_err(|_| Error::parse(k + 2, "bad index"));
        let num = |q: usize| field(q)?.parse::<f64>().map_err(|_| Error::parse(k + 2, "bad number"));
        let (i, j) = (idx(0)?, idx(1)?);
        let im = if rec.len() > 3 { num(3)? } else { 0.0 };
        entries.push((i, j, C64::new(num(2)?, im)));
        rows = rows.max(i + 1);
        cols = cols.max(j + 1);
    }
    let mut m = DenseMatrix::zeros(rows, cols);
    for (i, j, v) in entries {
        m[(i, j)] = v;
    }
    Ok(m)
}

/// Writes a table with a header row; every row must match the header width.
pub fn write_table(path: impl AsRef<Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
