//! Matrix files.
//!
//! Two formats are accepted on input:
//!
//! * JSON: `{"dim": n, "entries": [[re, im], ...]}` with `n²` entries in row-major order.
//! * Plain text: the first line holds `n`, followed by `n²` lines of `re im`.
//!   Blank lines and lines starting with `#` are ignored.
//!
//! Output is always JSON with 17 significant digits per float, so a write
//! followed by a read reproduces every entry bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

/// On-disk JSON schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(t: &ComplexMatrix) -> Self {
        Self {
            dim: t.dim(),
            entries: t.row_major().into_iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn into_matrix(self) -> Result<ComplexMatrix> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::Parse {
                line: 1,
                field: 2,
                message: format!(
                    "dim {} needs {} entries, found {}",
                    self.dim,
                    self.dim * self.dim,
                    self.entries.len()
                ),
            });
        }
        if let Some(k) = self
            .entries
            .iter()
            .position(|[re, im]| !re.is_finite() || !im.is_finite())
        {
            return Err(Error::InvalidInput(format!(
                "entry {k} (row {}, column {}) is not finite",
                k / self.dim,
                k % self.dim
            )));
        }
        let entries: Vec<C64> = self
            .entries
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(self.dim, &entries)
    }

    /// JSON text with 17-significant-digit floats.
    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .entries
            .iter()
            .map(|[re, im]| format!("[{}, {}]", fmt_f64(*re), fmt_f64(*im)))
            .collect();
        format!(
            "{{\"dim\": {}, \"entries\": [\n  {}\n]}}\n",
            self.dim,
            body.join(",\n  ")
        )
    }
}

/// Float with 17 significant digits (round-trip exact).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_plain(text)
    }
}

fn parse_json(text: &str) -> Result<ComplexMatrix> {
    // NaN/Inf cannot appear in JSON, so any non-finite value is rejected here.
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        field: e.column(),
        message: e.to_string(),
    })?;
    file.into_matrix()
}

fn parse_plain(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line_no, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        field: 1,
        message: "empty matrix file".into(),
    })?;
    let dim: usize = first.parse().map_err(|_| Error::Parse {
        line: line_no,
        field: 1,
        message: format!("expected dimension, found {first:?}"),
    })?;

    let mut entries = Vec::with_capacity(dim * dim);
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                field: fields.len().min(2) + 1,
                message: format!("expected `re im`, found {} fields", fields.len()),
            });
        }
        let mut parts = [0.0f64; 2];
        for (k, f) in fields.iter().enumerate() {
            parts[k] = f.parse().map_err(|_| Error::Parse {
                line: line_no,
                field: k + 1,
                message: format!("not a number: {f:?}"),
            })?;
            if !parts[k].is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite value at line {line_no}, field {}",
                    k + 1
                )));
            }
        }
        entries.push(parts);
    }
    MatrixFile { dim, entries }.into_matrix()
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, t: &ComplexMatrix) -> Result<()> {
    fs::write(path, MatrixFile::from_matrix(t).to_json())?;
    Ok(())
}
