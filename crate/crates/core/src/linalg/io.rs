//! Matrix I/O: Matrix Market coordinate files and a plain dense text form.
//!
//! Sparse matrices round-trip through the Matrix Market `coordinate real
//! general` format with 1-based indices. Dense matrices use a minimal text
//! layout: a `rows cols` header line followed by one whitespace-separated
//! row per line. Values are written with 17 significant digits so both
//! formats round-trip `f64` exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

use super::{DenseMatrix, SparseMatrix};

const MM_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Read a sparse matrix from a Matrix Market coordinate file.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();

    let (first_no, first) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))
        .and_then(|(i, l)| Ok((i + 1, l?)))?;
    let header = first.trim();
    if !header.eq_ignore_ascii_case(MM_HEADER) {
        return Err(parse_err(
            path,
            first_no,
            format!("unsupported header {header:?}; expected {MM_HEADER:?}"),
        ));
    }

    let mut dims: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        match dims {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(path, line_no, "expected `rows cols nnz`"));
                }
                let r = fields[0]
                    .parse::<usize>()
                    .map_err(|e| parse_err(path, line_no, format!("bad rows: {e}")))?;
                let c = fields[1]
                    .parse::<usize>()
                    .map_err(|e| parse_err(path, line_no, format!("bad cols: {e}")))?;
                let n = fields[2]
                    .parse::<usize>()
                    .map_err(|e| parse_err(path, line_no, format!("bad nnz: {e}")))?;
                dims = Some((r, c, n));
                triplets.reserve(n);
            }
            Some((r, c, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(path, line_no, "expected `row col value`"));
                }
                let row = fields[0]
                    .parse::<usize>()
                    .map_err(|e| parse_err(path, line_no, format!("bad row index: {e}")))?;
                let col = fields[1]
                    .parse::<usize>()
                    .map_err(|e| parse_err(path, line_no, format!("bad col index: {e}")))?;
                let val = fields[2]
                    .parse::<f64>()
                    .map_err(|e| parse_err(path, line_no, format!("bad value: {e}")))?;
                if row == 0 || row > r || col == 0 || col > c {
                    return Err(parse_err(
                        path,
                        line_no,
                        format!("entry ({row}, {col}) outside 1..={r} x 1..={c}"),
                    ));
                }
                triplets.push((row - 1, col - 1, val));
            }
        }
    }
    let (rows, cols, nnz) = dims.ok_or_else(|| parse_err(path, 1, "missing dimension line"))?;
    if triplets.len() != nnz {
        return Err(parse_err(
            path,
            1,
            format!("header promises {nnz} entries, file holds {}", triplets.len()),
        ));
    }
    SparseMatrix::from_triplets(rows, cols, triplets)
}

/// Write a sparse matrix as a Matrix Market coordinate file.
pub fn write_matrix_market(matrix: &SparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    writeln!(w, "{MM_HEADER}")?;
    writeln!(w, "{} {} {}", matrix.rows(), matrix.cols(), matrix.nnz())?;
    for (r, c, v) in matrix.triplets() {
        writeln!(w, "{} {} {:.16e}", r + 1, c + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a dense matrix from the `rows cols` + row-per-line text form.
pub fn read_dense_text(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut dims: Option<(usize, usize)> = None;
    let mut data: Vec<f64> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        match dims {
            None => {
                let fields: Vec<&str> = text.split_whitespace().collect();
                if fields.len() != 2 {
                    return Err(parse_err(path, line_no, "expected `rows cols`"));
                }
                let r = fields[0]
                    .parse::<usize>()
                    .map_err(|e| parse_err(path, line_no, format!("bad rows: {e}")))?;
                let c = fields[1]
                    .parse::<usize>()
                    .map_err(|e| parse_err(path, line_no, format!("bad cols: {e}")))?;
                dims = Some((r, c));
                data.reserve(r * c);
            }
            Some(_) => {
                for f in text.split_whitespace() {
                    let v = f
                        .parse::<f64>()
                        .map_err(|e| parse_err(path, line_no, format!("bad value {f:?}: {e}")))?;
                    data.push(v);
                }
            }
        }
    }
    let (rows, cols) = dims.ok_or_else(|| parse_err(path, 1, "missing dimension line"))?;
    if data.len() != rows * cols {
        return Err(parse_err(
            path,
            1,
            format!("expected {} values, found {}", rows * cols, data.len()),
        ));
    }
    DenseMatrix::from_vec(rows, cols, data)
}

/// Write a dense matrix in the text form accepted by [`read_dense_text`].
pub fn write_dense_text(matrix: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    writeln!(w, "{} {}", matrix.rows(), matrix.cols())?;
    for i in 0..matrix.rows() {
        let row = matrix.row(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                write!(w, " ")?;
            }
            write!(w, "{v:.16e}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
