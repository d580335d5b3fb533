//! Dense row-major matrices over `f64`.
//!
//! The multiply kernel transposes the right operand once and then walks both
//! operands row-wise in cache-sized blocks, so large products stream memory
//! instead of thrashing it. Every factory validates finiteness; arithmetic
//! that could overflow re-validates its result, so a `DenseMatrix` never
//! carries NaN or infinity.

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Rows of the left operand processed per block in the multiply kernel.
/// Chosen so a block of left-hand rows stays resident in L2 while the
/// transposed right operand streams through once per block.
const MATMUL_ROW_BLOCK: usize = 48;

/// Dot product with four independent accumulators. The split accumulators
/// break the sequential dependency chain, which matters more than vector
/// width on long rows; summation order is fixed, so results are reproducible.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4 * 4;
    let (a_main, a_tail) = a.split_at(chunks);
    let (b_main, b_tail) = b.split_at(chunks);
    for (ca, cb) in a_main.chunks_exact(4).zip(b_main.chunks_exact(4)) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    let mut tail = 0.0;
    for (x, y) in a_tail.iter().zip(b_tail.iter()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// y += alpha * x, the streaming update used by elimination and CG.
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += alpha * xi;
    }
}

fn all_finite(data: &[f64]) -> bool {
    data.iter().all(|v| v.is_finite())
}

impl DenseMatrix {
    /// Zero matrix. Dimensions must be at least 1x1.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Build from a row-major buffer. Rejects length mismatches, empty
    /// shapes, and non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be >= 1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "DenseMatrix::from_vec",
                expected: rows * cols,
                got: data.len(),
            });
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite {
                context: "DenseMatrix::from_vec",
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Build from explicit rows; all rows must share one length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidArgument(
                "from_rows requires at least one non-empty row".into(),
            ));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "DenseMatrix::from_rows",
                    expected: cols,
                    got: rows[i].len(),
                });
            }
            data.extend_from_slice(r);
        }
        DenseMatrix::from_vec(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    /// Borrow row `i` as a slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        debug_assert!(i < self.rows);
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        debug_assert!(i < self.rows);
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy column `j` out as a vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        debug_assert!(j < self.cols);
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    /// Transposed copy.
    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                context: "matmul",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let m = self.rows;
        let n = other.cols;
        let k = self.cols;
        let bt = other.transpose();
        let mut c = DenseMatrix::zeros(m, n);
        for i0 in (0..m).step_by(MATMUL_ROW_BLOCK) {
            let i1 = (i0 + MATMUL_ROW_BLOCK).min(m);
            for j in 0..n {
                let b_row = &bt.data[j * k..(j + 1) * k];
                for i in i0..i1 {
                    let a_row = &self.data[i * k..(i + 1) * k];
                    c.data[i * n + j] = dot(a_row, b_row);
                }
            }
        }
        if !all_finite(&c.data) {
            return Err(Error::NonFinite { context: "matmul" });
        }
        Ok(c)
    }

    /// Matrix-vector product `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// Transposed matrix-vector product `self^T * x`, computed row-wise so
    /// the matrix is still traversed in storage order.
    pub fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "matvec_transpose",
                expected: self.rows,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            axpy(x[i], self.row(i), &mut y);
        }
        Ok(y)
    }

    /// Entry-wise sum.
    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_entries("add", other, |a, b| a + b)
    }

    /// Entry-wise difference `self - other`.
    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_entries("sub", other, |a, b| a - b)
    }

    fn zip_entries(
        &self,
        context: &'static str,
        other: &DenseMatrix,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                context,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let data: Vec<f64> = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        if !all_finite(&data) {
            return Err(Error::NonFinite { context });
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Scale every entry by a finite factor.
    pub fn scale(&self, factor: f64) -> Result<DenseMatrix> {
        if !factor.is_finite() {
            return Err(Error::NonFinite { context: "scale" });
        }
        let data: Vec<f64> = self.data.iter().map(|&a| a * factor).collect();
        if !all_finite(&data) {
            return Err(Error::NonFinite { context: "scale" });
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Scale column `j` by `s[j]` for every column.
    pub fn scale_columns(&self, s: &[f64]) -> Result<DenseMatrix> {
        if s.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "scale_columns",
                expected: self.cols,
                got: s.len(),
            });
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for (j, &f) in s.iter().enumerate() {
                out.data[i * self.cols + j] *= f;
            }
        }
        if !all_finite(&out.data) {
            return Err(Error::NonFinite {
                context: "scale_columns",
            });
        }
        Ok(out)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Copy out the sub-block with rows `r0..r1` and columns `c0..c1`.
    pub fn sub_block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Result<DenseMatrix> {
        if r1 > self.rows || c1 > self.cols || r0 >= r1 || c0 >= c1 {
            return Err(Error::InvalidArgument(format!(
                "sub_block [{r0}..{r1}) x [{c0}..{c1}) invalid for {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut out = DenseMatrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            out.row_mut(i - r0)
                .copy_from_slice(&self.data[i * self.cols + c0..i * self.cols + c1]);
        }
        Ok(out)
    }

    /// Assemble a 2x2 block matrix `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(
        tl: &DenseMatrix,
        tr: &DenseMatrix,
        bl: &DenseMatrix,
        br: &DenseMatrix,
    ) -> Result<DenseMatrix> {
        if tl.rows != tr.rows
            || bl.rows != br.rows
            || tl.cols != bl.cols
            || tr.cols != br.cols
        {
            return Err(Error::InvalidArgument(format!(
                "block shapes do not tile: {}x{}, {}x{}, {}x{}, {}x{}",
                tl.rows, tl.cols, tr.rows, tr.cols, bl.rows, bl.cols, br.rows, br.cols
            )));
        }
        let rows = tl.rows + bl.rows;
        let cols = tl.cols + tr.cols;
        let mut out = DenseMatrix::zeros(rows, cols);
        for i in 0..tl.rows {
            out.data[i * cols..i * cols + tl.cols].copy_from_slice(tl.row(i));
            out.data[i * cols + tl.cols..(i + 1) * cols].copy_from_slice(tr.row(i));
        }
        for i in 0..bl.rows {
            let r = tl.rows + i;
            out.data[r * cols..r * cols + bl.cols].copy_from_slice(bl.row(i));
            out.data[r * cols + bl.cols..(r + 1) * cols].copy_from_slice(br.row(i));
        }
        Ok(out)
    }

    /// Symmetrize in place: replace `self` with `(self + self^T) / 2`.
    /// Only meaningful for square matrices.
    pub(crate) fn symmetrize(&mut self) {
        debug_assert_eq!(self.rows, self.cols);
        let n = self.rows;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg;
            }
        }
    }

    /// True when the matrix is square and exactly equal to its transpose.
    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let n = self.rows;
        for i in 0..n {
            for j in (i + 1)..n {
                if self.data[i * n + j] != self.data[j * n + i] {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_small_known_product() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![5.0], vec![6.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.rows(), 2);
        assert_eq!(c.cols(), 1);
        assert_eq!(c.get(0, 0), 17.0);
        assert_eq!(c.get(1, 0), 39.0);
    }

    #[test]
    fn matmul_rejects_shape_mismatch() {
        let a = DenseMatrix::zeros(2, 3);
        let b = DenseMatrix::zeros(2, 3);
        assert!(matches!(
            a.matmul(&b),
            Err(Error::ShapeMismatch { context: "matmul", .. })
        ));
    }

    #[test]
    fn frobenius_norm_of_identity() {
        // ||I_4||_F = sqrt(4) = 2.
        assert_eq!(DenseMatrix::identity(4).frobenius_norm(), 2.0);
    }

    #[test]
    fn from_vec_rejects_non_finite() {
        let r = DenseMatrix::from_vec(1, 2, vec![1.0, f64::NAN]);
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn transpose_round_trip() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let t = a.transpose();
        assert_eq!(t.rows(), 3);
        assert_eq!(t.get(2, 1), 6.0);
        assert_eq!(t.transpose(), a);
    }

    #[test]
    fn matvec_and_transpose_agree_with_explicit_sums() {
        let a = DenseMatrix::from_rows(&[vec![1.0, -2.0, 0.5], vec![3.0, 4.0, -1.0]]).unwrap();
        let x = vec![2.0, 1.0, 4.0];
        assert_eq!(a.matvec(&x).unwrap(), vec![2.0, 6.0]);
        let y = vec![1.0, -1.0];
        assert_eq!(a.matvec_transpose(&y).unwrap(), vec![-2.0, -6.0, 1.5]);
    }

    #[test]
    fn matmul_blocked_kernel_matches_naive_on_odd_sizes() {
        // Exercise the row-block edges: sizes straddling the block width.
        let mut rng = crate::linalg::RngStream::new(7);
        for &(m, k, n) in &[(1usize, 1usize, 1usize), (5, 3, 2), (49, 17, 50), (96, 50, 33)] {
            let a = crate::linalg::gaussian_matrix(m, k, &mut rng);
            let b = crate::linalg::gaussian_matrix(k, n, &mut rng);
            let c = a.matmul(&b).unwrap();
            for i in 0..m {
                for j in 0..n {
                    let mut s = 0.0;
                    for t in 0..k {
                        s += a.get(i, t) * b.get(t, j);
                    }
                    assert!((c.get(i, j) - s).abs() <= 1e-12 * (1.0 + s.abs()));
                }
            }
        }
    }

    #[test]
    fn sub_block_and_from_blocks_round_trip() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 9.0],
        ])
        .unwrap();
        let tl = a.sub_block(0, 2, 0, 2).unwrap();
        let tr = a.sub_block(0, 2, 2, 3).unwrap();
        let bl = a.sub_block(2, 3, 0, 2).unwrap();
        let br = a.sub_block(2, 3, 2, 3).unwrap();
        assert_eq!(DenseMatrix::from_blocks(&tl, &tr, &bl, &br).unwrap(), a);
    }

    #[test]
    fn symmetry_detection_is_exact() {
        let mut a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 5.0]]).unwrap();
        assert!(a.is_symmetric());
        a.set(0, 1, 2.0 + 1e-15);
        assert!(!a.is_symmetric());
        a.symmetrize();
        assert!(a.is_symmetric());
    }
}
