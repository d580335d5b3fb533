//! Direct dense inversion.
//!
//! Gauss-Jordan elimination with partial pivoting on the augmented system
//! `[A | I]`. This is the single-tessellation baseline that the recursive
//! block inversion is measured against, so it is written as the textbook
//! algorithm: no blocking, one elimination pass, row operations streamed
//! with `axpy`.

use crate::{Error, Result};

use super::dense::axpy;
use super::DenseMatrix;

/// Pivot magnitudes at or below `PIVOT_FLOOR * max_abs(A)` are treated as
/// singular.
const PIVOT_FLOOR: f64 = 1e-13;

/// Invert a square matrix by Gauss-Jordan elimination with partial
/// pivoting. Fails with [`Error::SingularMatrix`] when no acceptable pivot
/// exists at some elimination step.
pub fn invert_dense(matrix: &DenseMatrix) -> Result<DenseMatrix> {
    let n = matrix.rows();
    if matrix.cols() != n {
        return Err(Error::ShapeMismatch {
            context: "invert_dense",
            left_rows: matrix.rows(),
            left_cols: matrix.cols(),
            right_rows: n,
            right_cols: n,
        });
    }

    // Augmented working matrix [A | I], eliminated in place.
    let width = 2 * n;
    let mut work = vec![0.0f64; n * width];
    for i in 0..n {
        work[i * width..i * width + n].copy_from_slice(matrix.row(i));
        work[i * width + n + i] = 1.0;
    }
    let threshold = PIVOT_FLOOR * matrix.max_abs().max(f64::MIN_POSITIVE);

    for col in 0..n {
        // Partial pivoting: pick the largest magnitude on or below the
        // diagonal; first row wins ties so elimination is deterministic.
        let mut pivot_row = col;
        let mut pivot_mag = work[col * width + col].abs();
        for r in (col + 1)..n {
            let mag = work[r * width + col].abs();
            if mag > pivot_mag {
                pivot_row = r;
                pivot_mag = mag;
            }
        }
        if pivot_mag <= threshold {
            return Err(Error::SingularMatrix {
                context: "invert_dense",
                pivot: pivot_mag,
                step: col,
            });
        }
        if pivot_row != col {
            let (a, b) = work.split_at_mut(pivot_row * width);
            a[col * width..(col + 1) * width].swap_with_slice(&mut b[..width]);
        }
        // Normalize the pivot row, then clear the column everywhere else.
        let inv_pivot = 1.0 / work[col * width + col];
        for v in work[col * width..(col + 1) * width].iter_mut() {
            *v *= inv_pivot;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = work[r * width + col];
            if factor == 0.0 {
                continue;
            }
            let (pivot_slice, row_slice) = if r > col {
                let (head, tail) = work.split_at_mut(r * width);
                (
                    &head[col * width..(col + 1) * width],
                    &mut tail[..width],
                )
            } else {
                let (head, tail) = work.split_at_mut(col * width);
                (
                    &tail[..width],
                    &mut head[r * width..(r + 1) * width],
                )
            };
            axpy(-factor, pivot_slice, row_slice);
            row_slice[col] = 0.0;
        }
    }

    let mut inv = DenseMatrix::zeros(n, n);
    for i in 0..n {
        inv.row_mut(i)
            .copy_from_slice(&work[i * width + n..(i + 1) * width]);
    }
    if !inv.data().iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite {
            context: "invert_dense",
        });
    }
    Ok(inv)
}
