//! CSV files of vectors (one value per line) and matrices (one row per line).
//! Lines starting with `#` are comments.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

fn parse_rows(text: &str, origin: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("{origin}: record {}: '{field}' is not a number", k + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{origin}: no data")));
    }
    Ok(rows)
}

pub fn parse_vector(text: &str, origin: &str) -> Result<Vector> {
    let rows = parse_rows(text, origin)?;
    if let Some(bad) = rows.iter().position(|r| r.len() != 1) {
        return Err(Error::Parse(format!(
            "{origin}: expected one value per line, record {} has {}",
            bad + 1,
            rows[bad].len()
        )));
    }
    Ok(Vector::from_iterator(rows.len(), rows.into_iter().map(|r| r[0])))
}

pub fn parse_matrix(text: &str, origin: &str) -> Result<Matrix> {
    let rows = parse_rows(text, origin)?;
    let cols = rows[0].len();
    Ok(Matrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

pub fn read_vector(path: &Path) -> Result<Vector> {
    parse_vector(&read(path)?, &path.display().to_string())
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    parse_matrix(&read(path)?, &path.display().to_string())
}

pub fn format_vector(v: &Vector) -> String {
    v.iter().map(|x| format!("{x:?}\n")).collect()
}

pub fn format_matrix(m: &Matrix) -> String {
    (0..m.nrows())
        .map(|i| {
            let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:?}")).collect();
            row.join(",") + "\n"
        })
        .collect()
}

pub fn write_vector(path: &Path, v: &Vector) -> Result<()> {
    Ok(fs::write(path, format_vector(v))?)
}
