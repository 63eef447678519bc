//! Plain-text matrix files.
//!
//! ```text
//! # optional comment lines
//! dim 2 complex
//! 0.5 0  0.1 -0.2
//! 0.1 0.2  0.5 0
//! ```
//!
//! The header gives the dimension and the field (`real` or `complex`).
//! Entries follow in row-major order, one `re im` pair per entry for complex
//! files and one number per entry for real ones. Line breaks between entries
//! are free. Values are written with 17 significant digits, which round-trips
//! every `f64`.

use std::fmt::Write as _;
use std::path::Path;

use faer::Mat;
use fermionic_entropy::{HermitianOperator, C64};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

pub fn parse_matrix(text: &str, path: &Path) -> CliResult<Mat<C64>> {
    let err = |line: usize, column: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    // (line, column, token), comments stripped
    let mut tokens = text.lines().enumerate().flat_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or("");
        body.split_whitespace()
            .map(move |t| (i + 1, t.as_ptr() as usize - l.as_ptr() as usize + 1, t))
    });
    let (line, col, tag) = tokens.next().ok_or_else(|| err(1, 1, "empty matrix file".into()))?;
    if tag != "dim" {
        return Err(err(line, col, format!("expected header `dim N real|complex`, found `{tag}`")));
    }
    let (line, col, n) = tokens.next().ok_or_else(|| err(line, col, "missing dimension".into()))?;
    let dim: usize = n
        .parse()
        .map_err(|_| err(line, col, format!("invalid dimension `{n}`")))?;
    if dim == 0 {
        return Err(err(line, col, "dimension must be positive".into()));
    }
    let (line, col, f) = tokens.next().ok_or_else(|| err(line, col, "missing field marker".into()))?;
    let field = match f {
        "real" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(err(line, col, format!("unknown field `{other}`"))),
    };
    let per = if field == Field::Complex { 2 } else { 1 };
    let mut values = Vec::with_capacity(dim * dim * per);
    let mut last = (line, col);
    for (line, col, t) in tokens {
        let v: f64 = t.parse().map_err(|_| err(line, col, format!("invalid number `{t}`")))?;
        if !v.is_finite() {
            return Err(err(line, col, format!("non-finite entry `{t}`")));
        }
        if values.len() == dim * dim * per {
            return Err(err(line, col, format!("more than {} entries", dim * dim)));
        }
        values.push(v);
        last = (line, col);
    }
    if values.len() != dim * dim * per {
        return Err(err(
            last.0,
            last.1,
            format!("expected {} numbers, found {}", dim * dim * per, values.len()),
        ));
    }
    Ok(Mat::from_fn(dim, dim, |i, j| {
        let k = (i * dim + j) * per;
        if per == 2 {
            C64::new(values[k], values[k + 1])
        } else {
            C64::new(values[k], 0.0)
        }
    }))
}

pub fn read_matrix(path: &Path) -> CliResult<Mat<C64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(&text, path)
}

/// Reads a Hermitian matrix; a non-Hermitian file is a module error.
pub fn read_hermitian(path: &Path) -> CliResult<HermitianOperator> {
    Ok(HermitianOperator::new(read_matrix(path)?)?)
}

pub fn format_matrix(m: &Mat<C64>) -> String {
    let n = m.nrows();
    let mut out = format!("dim {n} complex\n");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| format!("{:.16e} {:.16e}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        let _ = writeln!(out, "{}", row.join("  "));
    }
    out
}

pub fn write_matrix(path: &Path, m: &Mat<C64>) -> CliResult<()> {
    std::fs::write(path, format_matrix(m)).map_err(|e| CliError::io(path, e))
}
