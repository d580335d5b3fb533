//! Sparse matrices in compressed sparse row form.
//!
//! Built from coordinate triplets, which are validated (in-range, finite),
//! deduplicated by rejection, and normalized by dropping exact zeros. The
//! stored structure is therefore canonical: ascending `(row, col)` with
//! finite nonzero values, so equality of two sparse matrices is equality of
//! their triplet lists.

use crate::{Error, Result};

use super::dense::axpy;
use super::DenseMatrix;

/// CSR sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Build from coordinate triplets `(row, col, value)`.
    ///
    /// Entries that are exactly zero are dropped; duplicate coordinates and
    /// non-finite or out-of-range entries are rejected.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "sparse dimensions must be >= 1, got {rows}x{cols}"
            )));
        }
        let mut kept: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if r >= rows {
                return Err(Error::IndexOutOfRange {
                    context: "sparse row",
                    index: r,
                    limit: rows,
                });
            }
            if c >= cols {
                return Err(Error::IndexOutOfRange {
                    context: "sparse col",
                    index: c,
                    limit: cols,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: "SparseMatrix::from_triplets",
                });
            }
            if v != 0.0 {
                kept.push((r, c, v));
            }
        }
        kept.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for w in kept.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::InvalidArgument(format!(
                    "duplicate sparse coordinate ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        let mut row_ptr = vec![0usize; rows + 1];
        for &(r, _, _) in &kept {
            row_ptr[r + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = kept.iter().map(|t| t.1).collect();
        let values = kept.iter().map(|t| t.2).collect();
        Ok(SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Empty matrix with no stored entries.
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        SparseMatrix::from_triplets(rows, cols, Vec::new())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries of row `i` as parallel (column, value) slices.
    pub fn row_entries(&self, i: usize) -> (&[usize], &[f64]) {
        debug_assert!(i < self.rows);
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Value at `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row_entries(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// Export the canonical triplet list in ascending `(row, col)` order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            for (c, v) in cols.iter().zip(vals.iter()) {
                out.push((i, *c, *v));
            }
        }
        out
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "sparse matvec",
                expected: self.cols,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals.iter()) {
                acc += v * x[*c];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// `self^T * x`, streamed over rows so storage order is preserved.
    pub fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "sparse matvec_transpose",
                expected: self.rows,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            for (c, v) in cols.iter().zip(vals.iter()) {
                y[*c] += v * x[i];
            }
        }
        Ok(y)
    }

    /// `self * d` for a dense right factor.
    pub fn matmul_dense(&self, d: &DenseMatrix) -> Result<DenseMatrix> {
        if d.rows() != self.cols {
            return Err(Error::ShapeMismatch {
                context: "sparse matmul_dense",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: d.rows(),
                right_cols: d.cols(),
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, d.cols());
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            let out_row = out.row_mut(i);
            for (c, v) in cols.iter().zip(vals.iter()) {
                axpy(*v, d.row(*c), out_row);
            }
        }
        Ok(out)
    }

    /// `self^T * d` for a dense right factor.
    pub fn matmul_transpose_dense(&self, d: &DenseMatrix) -> Result<DenseMatrix> {
        if d.rows() != self.rows {
            return Err(Error::ShapeMismatch {
                context: "sparse matmul_transpose_dense",
                left_rows: self.cols,
                left_cols: self.rows,
                right_rows: d.rows(),
                right_cols: d.cols(),
            });
        }
        let mut out = DenseMatrix::zeros(self.cols, d.cols());
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            for (c, v) in cols.iter().zip(vals.iter()) {
                axpy(*v, d.row(i), out.row_mut(*c));
            }
        }
        Ok(out)
    }

    /// Transposed copy (still canonical CSR).
    pub fn transpose(&self) -> SparseMatrix {
        let t: Vec<(usize, usize, f64)> =
            self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect();
        // Entries were unique and valid, so reconstruction cannot fail.
        SparseMatrix::from_triplets(self.cols, self.rows, t).expect("transpose of valid matrix")
    }

    /// Densify.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            for (c, v) in cols.iter().zip(vals.iter()) {
                out.set(i, *c, *v);
            }
        }
        out
    }

    /// True when square and equal to its transpose within `tol` per entry.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            for (c, v) in cols.iter().zip(vals.iter()) {
                if (v - self.get(*c, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}
