//! Matrix and vector files.
//!
//! Text: a `# rows=<m> cols=<n>` header line, then one comma-separated line per row.
//! Binary: `rows` and `cols` as little-endian u64, then the entries as little-endian
//! f64 in column-major order. Files ending in `.bin` use the binary format.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn matrix_to_csv(a: &DenseMatrix) -> String {
    let mut out = format!("# rows={} cols={}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| a.get(i, j).to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<DenseMatrix> {
    let mut declared: Option<(usize, usize)> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            if declared.is_none() {
                declared = parse_header(header);
            }
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number `{}`", lineno + 1, f.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let a = DenseMatrix::from_rows(&rows)?;
    if let Some((m, n)) = declared {
        if (m, n) != (a.rows(), a.cols()) {
            return Err(Error::Parse(format!(
                "header declares {m}x{n} but the body is {}x{}",
                a.rows(),
                a.cols()
            )));
        }
    }
    Ok(a)
}

fn parse_header(h: &str) -> Option<(usize, usize)> {
    let mut m = None;
    let mut n = None;
    for tok in h.split_whitespace() {
        if let Some(v) = tok.strip_prefix("rows=") {
            m = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("cols=") {
            n = v.parse().ok();
        }
    }
    Some((m?, n?))
}

pub fn matrix_to_bytes(a: &DenseMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * a.data().len());
    out.extend((a.rows() as u64).to_le_bytes());
    out.extend((a.cols() as u64).to_le_bytes());
    for v in a.data() {
        out.extend(v.to_le_bytes());
    }
    out
}

pub fn matrix_from_bytes(bytes: &[u8]) -> Result<DenseMatrix> {
    if bytes.len() < 16 {
        return Err(Error::Parse("binary matrix shorter than its header".into()));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes"));
    let (m, n) = (word(0) as usize, word(1) as usize);
    let expected = m
        .checked_mul(n)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(16))
        .ok_or_else(|| Error::Parse("declared size overflows".into()))?;
    if bytes.len() != expected {
        return Err(Error::Parse(format!(
            "binary matrix declares {m}x{n} ({expected} bytes) but has {} bytes",
            bytes.len()
        )));
    }
    let data = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    DenseMatrix::new(m, n, data)
}

fn is_binary(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("bin"))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    if is_binary(path) {
        matrix_from_bytes(&fs::read(path).map_err(|e| io_err(path, e))?)
    } else {
        matrix_from_csv(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)
    }
}

pub fn write_matrix(path: &Path, a: &DenseMatrix) -> Result<()> {
    let res = if is_binary(path) {
        fs::write(path, matrix_to_bytes(a))
    } else {
        fs::write(path, matrix_to_csv(a))
    };
    res.map_err(|e| io_err(path, e))
}

/// Reads a single row or single column as a vector.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let a = read_matrix(path)?;
    if a.rows() != 1 && a.cols() != 1 {
        return Err(Error::Dimension(format!(
            "{} holds a {}x{} matrix, not a vector",
            path.display(),
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.data().to_vec())
}

/// Writes `v` as a column.
pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    write_matrix(path, &DenseMatrix::new(v.len(), 1, v.to_vec())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, -2.5, 0.1], vec![1e-300, 3.0, 1.0 / 3.0]]).unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let a = sample();
        let text = matrix_to_csv(&a);
        assert!(text.starts_with("# rows=2 cols=3\n"));
        assert_eq!(matrix_from_csv(&text).unwrap(), a);
    }

    #[test]
    fn csv_header_mismatch() {
        assert!(matrix_from_csv("# rows=3 cols=3\n1,2,3\n").is_err());
        assert!(matrix_from_csv("1,x\n").is_err());
    }

    #[test]
    fn binary_round_trip() {
        let a = sample();
        let bytes = matrix_to_bytes(&a);
        assert_eq!(bytes.len(), 16 + 6 * 8);
        assert_eq!(&bytes[..8], &2u64.to_le_bytes());
        // First stored entry is (0, 0), the second is (1, 0).
        assert_eq!(&bytes[24..32], &1e-300f64.to_le_bytes());
        assert_eq!(matrix_from_bytes(&bytes).unwrap(), a);
        assert!(matrix_from_bytes(&bytes[..40]).is_err());
    }
}
