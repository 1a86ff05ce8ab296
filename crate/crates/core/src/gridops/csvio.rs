//! CSV exchange.
//!
//! * Matrices: one line per row, no header, `re,im` pairs per cell.
//! * Fields: header `x[,y[,z]],re,im`, one line per node in flat order.
//!
//! Numbers are written in Rust's shortest round-trip form, so a write/read
//! cycle is lossless.

use std::io::{Read, Write};

use ndarray::Array1;
use thiserror::Error;

use super::{Grid, GridError, StateVector};
use crate::linalg::{CMatrix, C64};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Shape { line: usize, message: String },
    #[error("line {line}, column {column}: cannot parse '{value}' as a finite number")]
    Number { line: usize, column: usize, value: String },
    #[error("invalid field header '{0}' (expected x[,y[,z]],re,im)")]
    Header(String),
    #[error("field does not lie on a periodic grid: {0}")]
    Grid(#[from] GridError),
    #[error("line {line}: coordinate {value} does not match grid node {expected}")]
    Coordinate { line: usize, value: f64, expected: f64 },
}

fn number(record: &csv::StringRecord, column: usize, line: usize) -> Result<f64, CsvError> {
    let raw = record.get(column).unwrap_or("");
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CsvError::Number { line, column: column + 1, value: raw.to_string() }),
    }
}

pub fn write_matrix_csv<W: Write>(m: &CMatrix, w: W) -> Result<(), CsvError> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for row in m.rows() {
        let fields: Vec<String> = row.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect();
        out.write_record(&fields)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a square matrix written by [`write_matrix_csv`].
pub fn read_matrix_csv<R: Read>(r: R) -> Result<CMatrix, CsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(r);
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let line = k + 1;
        if record.len() % 2 != 0 {
            return Err(CsvError::Shape { line, message: format!("odd number of fields ({})", record.len()) });
        }
        let mut row = Vec::with_capacity(record.len() / 2);
        for c in 0..record.len() / 2 {
            row.push(C64::new(number(&record, 2 * c, line)?, number(&record, 2 * c + 1, line)?));
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CsvError::Shape {
                    line,
                    message: format!("{} cells, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    let n = rows.len();
    if rows.first().is_some_and(|r| r.len() != n) {
        return Err(CsvError::Shape { line: n, message: format!("{n} rows of {} cells is not square", rows[0].len()) });
    }
    Ok(CMatrix::from_shape_fn((n, n), |(i, j)| rows[i][j]))
}

const AXES: [&str; 3] = ["x", "y", "z"];

pub fn write_field_csv<W: Write>(u: &StateVector, w: W) -> Result<(), CsvError> {
    let dim = u.grid.dim();
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = AXES[..dim].to_vec();
    header.extend(["re", "im"]);
    out.write_record(&header)?;
    for (k, z) in u.values.iter().enumerate() {
        let p = u.grid.point(k);
        let mut fields: Vec<String> = p[..dim].iter().map(|v| v.to_string()).collect();
        fields.push(z.re.to_string());
        fields.push(z.im.to_string());
        out.write_record(&fields)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a field written by [`write_field_csv`], recovering its grid from
/// the row count and the first node.
pub fn read_field_csv<R: Read>(r: R) -> Result<StateVector, CsvError> {
    let mut reader = csv::Reader::from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let dim = header.len().saturating_sub(2);
    let expected: Vec<&str> = AXES[..dim.min(3)].iter().copied().chain(["re", "im"]).collect();
    if !(1..=3).contains(&dim) || header != expected {
        return Err(CsvError::Header(header.join(",")));
    }
    let mut coords: Vec<[f64; 3]> = Vec::new();
    let mut values: Vec<C64> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let line = k + 2;
        if record.len() != dim + 2 {
            return Err(CsvError::Shape { line, message: format!("{} fields, expected {}", record.len(), dim + 2) });
        }
        let mut p = [0.0; 3];
        for (a, slot) in p.iter_mut().enumerate().take(dim) {
            *slot = number(&record, a, line)?;
        }
        coords.push(p);
        values.push(C64::new(number(&record, dim, line)?, number(&record, dim + 1, line)?));
    }
    let total = values.len();
    let n = (total as f64).powf(1.0 / dim as f64).round() as usize;
    if n.checked_pow(dim as u32) != Some(total) || total == 0 {
        return Err(CsvError::Shape { line: total + 1, message: format!("{total} rows is not a {dim}D tensor grid") });
    }
    let half_width = -coords[0][0];
    let grid = Grid::new(dim, n, half_width)?;
    let tol = 1e-9 * (1.0 + half_width);
    for (k, p) in coords.iter().enumerate() {
        let want = grid.point(k);
        for a in 0..dim {
            if (p[a] - want[a]).abs() > tol {
                return Err(CsvError::Coordinate { line: k + 2, value: p[a], expected: want[a] });
            }
        }
    }
    Ok(StateVector::new(grid, Array1::from(values))?)
}
