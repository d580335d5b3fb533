//! Matrix-free operator interface.
//!
//! The randomized factorization and the conjugate gradient solver only need
//! products with a matrix and its transpose, never its entries. `LinearOp`
//! captures exactly that, so dense matrices, sparse matrices, and the
//! implicitly-shifted ranking system all plug into the same solvers.
//!
//! Shape agreement is a caller obligation here: implementations are entitled
//! to assume `x.len() == ncols()` (resp. `nrows()`), and the solvers
//! validate once at their own entry points.

use super::{DenseMatrix, SparseMatrix};

/// A linear operator exposed through matrix-vector products.
pub trait LinearOp {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `A * x` with `x.len() == ncols()`.
    fn apply(&self, x: &[f64]) -> Vec<f64>;

    /// `A^T * x` with `x.len() == nrows()`.
    fn apply_transpose(&self, x: &[f64]) -> Vec<f64>;

    /// `A * M`, by default one column at a time.
    fn apply_dense(&self, m: &DenseMatrix) -> DenseMatrix {
        debug_assert_eq!(m.rows(), self.ncols());
        let mut out = DenseMatrix::zeros(self.nrows(), m.cols());
        for j in 0..m.cols() {
            let col = self.apply(&m.column(j));
            for (i, v) in col.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }

    /// `A^T * M`, by default one column at a time.
    fn apply_transpose_dense(&self, m: &DenseMatrix) -> DenseMatrix {
        debug_assert_eq!(m.rows(), self.nrows());
        let mut out = DenseMatrix::zeros(self.ncols(), m.cols());
        for j in 0..m.cols() {
            let col = self.apply_transpose(&m.column(j));
            for (i, v) in col.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }
}

impl LinearOp for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x).expect("caller guarantees shape")
    }

    fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        self.matvec_transpose(x).expect("caller guarantees shape")
    }

    fn apply_dense(&self, m: &DenseMatrix) -> DenseMatrix {
        self.matmul(m).expect("caller guarantees shape")
    }

    fn apply_transpose_dense(&self, m: &DenseMatrix) -> DenseMatrix {
        self.transpose().matmul(m).expect("caller guarantees shape")
    }
}

impl LinearOp for SparseMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x).expect("caller guarantees shape")
    }

    fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        self.matvec_transpose(x).expect("caller guarantees shape")
    }

    fn apply_dense(&self, m: &DenseMatrix) -> DenseMatrix {
        self.matmul_dense(m).expect("caller guarantees shape")
    }

    fn apply_transpose_dense(&self, m: &DenseMatrix) -> DenseMatrix {
        self.matmul_transpose_dense(m).expect("caller guarantees shape")
    }
}
