//! Thin Householder QR.
//!
//! Both the working copy of the input and the accumulating orthogonal factor
//! are kept transposed, so every reflector touches contiguous slices. The
//! factorization is normalized to a non-negative diagonal of `R`, which pins
//! down the otherwise sign-ambiguous factors and keeps downstream randomized
//! bases reproducible.

use crate::{Error, Result};

use super::dense::{axpy, dot};
use super::DenseMatrix;

/// Thin QR of an `m x n` matrix with `m >= n`: returns `(Q, R)` with `Q`
/// of shape `m x n` having orthonormal columns, `R` upper-triangular `n x n`
/// with non-negative diagonal, and `Q * R` equal to the input.
pub fn qr_factor(matrix: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let m = matrix.rows();
    let n = matrix.cols();
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "qr_factor requires rows >= cols, got {m}x{n}"
        )));
    }

    // Work on transposes: row c of `at` is column c of the input, so each
    // reflector update below is a dot + axpy over contiguous memory.
    let mut at = matrix.transpose();
    // Reflectors (v, ||v||^2), each acting on rows j.. of the implicit A.
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n);

    for j in 0..n {
        let x = &at.row(j)[j..m];
        let norm = dot(x, x).sqrt();
        if norm == 0.0 {
            reflectors.push((Vec::new(), 0.0));
            continue;
        }
        // Reflect onto -sign(x0) * ||x|| * e1 to avoid cancellation.
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 == 0.0 {
            reflectors.push((Vec::new(), 0.0));
            continue;
        }
        // Apply H = I - 2 v v^T / ||v||^2 to the remaining columns.
        for c in j..n {
            let seg = &mut at.row_mut(c)[j..m];
            let w = 2.0 * dot(&v, seg) / vnorm2;
            axpy(-w, &v, seg);
        }
        // The pivot column is now exactly (.., alpha, 0, .., 0).
        let seg = &mut at.row_mut(j)[j..m];
        seg[0] = alpha;
        for t in seg.iter_mut().skip(1) {
            *t = 0.0;
        }
        reflectors.push((v, vnorm2));
    }

    // Accumulate thin Q by applying the reflectors in reverse to the first
    // n columns of the identity; `qt` holds Q transposed.
    let mut qt = DenseMatrix::zeros(n, m);
    for c in 0..n {
        qt.set(c, c, 1.0);
    }
    for j in (0..n).rev() {
        let (v, vnorm2) = &reflectors[j];
        if v.is_empty() {
            continue;
        }
        for c in 0..n {
            let seg = &mut qt.row_mut(c)[j..m];
            let w = 2.0 * dot(v, seg) / *vnorm2;
            axpy(-w, v, seg);
        }
    }

    // Extract R (upper n x n of A) and normalize diagonal signs.
    let mut r = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            r.set(i, j, at.get(j, i));
        }
    }
    for j in 0..n {
        if r.get(j, j) < 0.0 {
            for c in j..n {
                let v = r.get(j, c);
                r.set(j, c, -v);
            }
            for t in qt.row_mut(j).iter_mut() {
                *t = -*t;
            }
        }
    }

    let q = qt.transpose();
    if !q.data().iter().all(|v| v.is_finite()) || !r.data().iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite { context: "qr_factor" });
    }
    Ok((q, r))
}
