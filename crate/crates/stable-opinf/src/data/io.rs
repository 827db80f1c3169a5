//! Dataset persistence: human-readable CSV for time series and a raw
//! little-endian binary for large matrices.
//!
//! CSV layout: header row `t,<name>,...`, then one row per sample with every
//! value printed to 17 significant digits (round-trips f64 exactly).
//!
//! Binary layout: one ASCII header line `SOPF1 <rows> <cols>\n` followed by
//! rows·cols 64-bit little-endian floats in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{cast, to_f64, Scalar};
use crate::Matrix;

const MAGIC: &str = "SOPF1";

/// Writes a time series (one variable per row of `values`, one sample per
/// column) as CSV with a `t` column.
pub fn write_timeseries_csv<T: Scalar>(
    path: impl AsRef<Path>,
    t_grid: &[T],
    values: &Matrix<T>,
    names: &[&str],
) -> Result<()> {
    if values.cols() != t_grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "csv: {} samples but {} time stamps",
            values.cols(),
            t_grid.len()
        )));
    }
    if names.len() != values.rows() {
        return Err(Error::DimensionMismatch(format!(
            "csv: {} names for {} variables",
            names.len(),
            values.rows()
        )));
    }
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header = vec!["t".to_string()];
    header.extend(names.iter().map(|s| s.to_string()));
    w.write_record(&header).map_err(|e| Error::Parse(e.to_string()))?;
    let mut record = Vec::with_capacity(values.rows() + 1);
    for k in 0..t_grid.len() {
        record.clear();
        record.push(format!("{:.16e}", to_f64(t_grid[k])));
        for i in 0..values.rows() {
            record.push(format!("{:.16e}", to_f64(values[(i, k)])));
        }
        w.write_record(&record).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_timeseries_csv`]: returns the time grid,
/// the variable matrix (one variable per row), and the variable names.
pub fn read_timeseries_csv<T: Scalar>(
    path: impl AsRef<Path>,
) -> Result<(Vec<T>, Matrix<T>, Vec<String>)> {
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if header.is_empty() || &header[0] != "t" {
        return Err(Error::Parse("csv: first column must be `t`".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(|s| s.to_string()).collect();
    let vars = names.len();
    let mut t_grid = Vec::new();
    let mut data: Vec<T> = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.len() != vars + 1 {
            return Err(Error::Parse(format!(
                "csv: row with {} fields, expected {}",
                record.len(),
                vars + 1
            )));
        }
        let mut fields = record.iter().map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("csv: bad float {s:?}: {e}")))
        });
        t_grid.push(cast::<T>(fields.next().unwrap()?));
        for f in fields {
            data.push(cast::<T>(f?));
        }
    }
    let samples = t_grid.len();
    if samples == 0 {
        return Err(Error::Parse("csv: no data rows".into()));
    }
    // Rows arrive sample-major; transpose into variable-per-row layout.
    let mut values = Matrix::zeros(vars.max(1), samples);
    if vars > 0 {
        for k in 0..samples {
            for i in 0..vars {
                values[(i, k)] = data[k * vars + i];
            }
        }
    }
    Ok((t_grid, values, names))
}

/// Writes a matrix as `SOPF1 <rows> <cols>\n` + row-major f64 LE payload.
pub fn write_matrix_binary<T: Scalar>(path: impl AsRef<Path>, m: &Matrix<T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{MAGIC} {} {}", m.rows(), m.cols())?;
    for v in m.data() {
        w.write_all(&to_f64(*v).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a matrix written by [`write_matrix_binary`].
pub fn read_matrix_binary<T: Scalar>(path: impl AsRef<Path>) -> Result<Matrix<T>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        r.read_exact(&mut byte)?;
        if byte[0] == b'\n' {
            break;
        }
        header.push(byte[0]);
        if header.len() > 128 {
            return Err(Error::Parse("binary: unterminated header".into()));
        }
    }
    let header = String::from_utf8(header).map_err(|e| Error::Parse(e.to_string()))?;
    let mut parts = header.split_whitespace();
    match parts.next() {
        Some(m) if m == MAGIC => {}
        other => return Err(Error::Parse(format!("binary: bad magic {other:?}"))),
    }
    let rows: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse("binary: bad row count".into()))?;
    let cols: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse("binary: bad column count".into()))?;
    if parts.next().is_some() {
        return Err(Error::Parse("binary: trailing header fields".into()));
    }
    let mut payload = vec![0u8; rows * cols * 8];
    r.read_exact(&mut payload)?;
    if r.read(&mut byte)? != 0 {
        return Err(Error::Parse("binary: trailing bytes after payload".into()));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| cast::<T>(f64::from_le_bytes(c.try_into().unwrap())))
        .collect::<Vec<_>>();
    Matrix::from_vec(rows, cols, data)
}
