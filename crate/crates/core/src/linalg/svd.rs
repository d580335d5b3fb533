//! Dense SVD for small matrices.
//!
//! Householder bidiagonalization followed by implicit-shift QR sweeps on the
//! bidiagonal, with rotations accumulated into the factors. Both orthogonal
//! factors are kept transposed throughout so every reflector and rotation
//! works on contiguous rows; they are transposed back once at the end.
//!
//! The decomposition is thin: for an `m x n` input with `m >= n`, `U` is
//! `m x n`, `sigma` has length `n`, and `V` is `n x n` (the wide case is
//! handled by factoring the transpose and swapping factors). Singular values
//! are non-negative and non-increasing, and each column of `U` is normalized
//! so its largest-magnitude entry is non-negative, which pins the otherwise
//! arbitrary sign choice.

use crate::{Error, Result};

use super::dense::{axpy, dot};
use super::DenseMatrix;

/// Largest small-side dimension `svd_small` accepts. The dense bidiagonal
/// reduction is cubic in the small side; beyond this bound the randomized
/// path is the intended tool.
pub const SVD_SMALL_MAX_DIM: usize = 4096;

/// Sweep budget multiplier: total QR iterations are capped at
/// `100 * min(rows, cols)`.
const MAX_SWEEPS_PER_DIM: usize = 100;

/// Thin singular value decomposition `M = U * diag(sigma) * V^T`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

/// Compute the thin SVD of a dense matrix.
///
/// Fails with [`Error::SvdNoConvergence`] if the QR sweeps exhaust their
/// iteration budget; the error carries the remaining off-diagonal residual.
pub fn svd_small(matrix: &DenseMatrix) -> Result<Svd> {
    let (m, n) = (matrix.rows(), matrix.cols());
    if m.min(n) > SVD_SMALL_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "svd_small supports a small side of at most {SVD_SMALL_MAX_DIM}, got {m}x{n}"
        )));
    }
    let mut f = if m >= n {
        svd_tall(matrix)?
    } else {
        let t = svd_tall(&matrix.transpose())?;
        Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    };
    apply_sign_convention(&mut f);
    Ok(f)
}

/// Core factorization for `m >= n`. Returns sorted factors without the
/// column-sign normalization (applied by the caller after any transpose
/// swap, so the convention always refers to the final `U`).
fn svd_tall(matrix: &DenseMatrix) -> Result<Svd> {
    let (m, n) = (matrix.rows(), matrix.cols());
    debug_assert!(m >= n);

    // ---- Householder bidiagonalization -------------------------------
    // `at` holds the working matrix transposed (rows of `at` are columns
    // of A), so left reflectors touch contiguous slices; right reflectors
    // act on rows of A, i.e. columns of `at`, handled through `a_row`.
    let mut a = matrix.clone();
    let mut left: Vec<(usize, Vec<f64>, f64)> = Vec::with_capacity(n);
    let mut right: Vec<(usize, Vec<f64>, f64)> = Vec::new();

    for j in 0..n {
        // Left reflector: zero A[j+1.., j].
        let x: Vec<f64> = (j..m).map(|i| a.get(i, j)).collect();
        if let Some((v, vnorm2, alpha)) = householder(&x) {
            for c in j..n {
                let mut col: Vec<f64> = (j..m).map(|i| a.get(i, c)).collect();
                let w = 2.0 * dot(&v, &col) / vnorm2;
                axpy(-w, &v, &mut col);
                for (off, val) in col.into_iter().enumerate() {
                    a.set(j + off, c, val);
                }
            }
            a.set(j, j, alpha);
            for i in (j + 1)..m {
                a.set(i, j, 0.0);
            }
            left.push((j, v, vnorm2));
        }
        // Right reflector: zero A[j, j+2..].
        if j + 2 < n {
            let x: Vec<f64> = ((j + 1)..n).map(|c| a.get(j, c)).collect();
            if let Some((v, vnorm2, alpha)) = householder(&x) {
                for r in j..m {
                    let row = a.row_mut(r);
                    let seg = &mut row[(j + 1)..n];
                    let w = 2.0 * dot(&v, seg) / vnorm2;
                    axpy(-w, &v, seg);
                }
                a.set(j, j + 1, alpha);
                for c in (j + 2)..n {
                    a.set(j, c, 0.0);
                }
                right.push((j, v, vnorm2));
            }
        }
    }

    // Bidiagonal: d[i] = B[i][i], e[i] = B[i-1][i] (e[0] unused).
    let mut d: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    let mut e: Vec<f64> = vec![0.0; n];
    for i in 1..n {
        e[i] = a.get(i - 1, i);
    }

    // Accumulate the orthogonal factors, transposed. Row r of `ut` is
    // column r of U; same for `vt`.
    let mut ut = DenseMatrix::zeros(n, m);
    for c in 0..n {
        ut.set(c, c, 1.0);
    }
    for (j, v, vnorm2) in left.iter().rev() {
        for c in 0..n {
            let seg = &mut ut.row_mut(c)[*j..m];
            let w = 2.0 * dot(v, seg) / *vnorm2;
            axpy(-w, v, seg);
        }
    }
    let mut vt = DenseMatrix::identity(n);
    for (j, v, vnorm2) in right.iter().rev() {
        for c in 0..n {
            let seg = &mut vt.row_mut(c)[(*j + 1)..n];
            let w = 2.0 * dot(v, seg) / *vnorm2;
            axpy(-w, v, seg);
        }
    }

    // ---- Implicit-shift QR on the bidiagonal -------------------------
    let anorm = (0..n).fold(0.0f64, |acc, i| acc.max(d[i].abs() + e[i].abs()));
    let negligible = |x: f64| x.abs() <= 0.5 * f64::EPSILON * anorm;
    let budget = MAX_SWEEPS_PER_DIM * n.max(1);
    let mut sweeps = 0usize;

    for k in (0..n).rev() {
        loop {
            // Find the start of the block ending at k. `cancel` is set when
            // the block is bounded above by a negligible diagonal entry
            // whose superdiagonal must be chased away first.
            let mut l = k;
            let mut cancel = false;
            loop {
                if l == 0 {
                    break;
                }
                if negligible(e[l]) {
                    e[l] = 0.0;
                    break;
                }
                if negligible(d[l - 1]) {
                    cancel = true;
                    break;
                }
                l -= 1;
            }

            if cancel {
                // Chase e[l] into oblivion with rotations against row l-1.
                let mut c = 0.0f64;
                let mut s = 1.0f64;
                for i in l..=k {
                    let f = s * e[i];
                    e[i] *= c;
                    if negligible(f) {
                        break;
                    }
                    let g = d[i];
                    let h = f.hypot(g);
                    d[i] = h;
                    c = g / h;
                    s = -f / h;
                    rotate_rows(&mut ut, l - 1, i, c, s);
                }
            }

            let z = d[k];
            if l == k {
                // Converged: make the singular value non-negative.
                if z < 0.0 {
                    d[k] = -z;
                    for v in vt.row_mut(k).iter_mut() {
                        *v = -*v;
                    }
                }
                break;
            }

            sweeps += 1;
            if sweeps > budget {
                let residual = e.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
                return Err(Error::SvdNoConvergence {
                    iterations: sweeps,
                    residual,
                });
            }

            // Wilkinson-style shift from the trailing 2x2.
            let x = d[l];
            let nm = k - 1;
            let y = d[nm];
            let mut g = e[nm];
            let h = e[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = f.hypot(1.0);
            let sign_g = if f >= 0.0 { g.abs() } else { -g.abs() };
            f = ((x - z) * (x + z) + h * (y / (f + sign_g) - h)) / x;

            // One sweep of Givens rotations chasing the bulge.
            let mut c = 1.0f64;
            let mut s = 1.0f64;
            let mut x = x;
            for j in l..=nm {
                let i = j + 1;
                let mut g = e[i];
                let mut y = d[i];
                let mut h = s * g;
                g *= c;
                let mut zz = f.hypot(h);
                e[j] = zz;
                if zz != 0.0 {
                    c = f / zz;
                    s = h / zz;
                } else {
                    c = 1.0;
                    s = 0.0;
                }
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                rotate_rows(&mut vt, j, i, c, s);
                zz = f.hypot(h);
                d[j] = zz;
                if zz != 0.0 {
                    let inv = 1.0 / zz;
                    c = f * inv;
                    s = h * inv;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                rotate_rows(&mut ut, j, i, c, s);
            }
            e[l] = 0.0;
            e[k] = f;
            d[k] = x;
        }
    }

    // ---- Sort descending (stable under ties) --------------------------
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).unwrap().then(i.cmp(&j)));
    let sigma: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let ut = permute_rows(&ut, &order);
    let vt = permute_rows(&vt, &order);

    Ok(Svd {
        u: ut.transpose(),
        sigma,
        v: vt.transpose(),
    })
}

/// Householder reflector for `x`: returns `(v, ||v||^2, alpha)` such that
/// `(I - 2 v v^T / ||v||^2) x = alpha * e1`, or `None` when `x` is zero.
fn householder(x: &[f64]) -> Option<(Vec<f64>, f64, f64)> {
    let norm = dot(x, x).sqrt();
    if norm == 0.0 {
        return None;
    }
    let alpha = if x[0] >= 0.0 { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vnorm2 = dot(&v, &v);
    if vnorm2 == 0.0 {
        return None;
    }
    Some((v, vnorm2, alpha))
}

/// Apply the rotation `[c s; -s c]` to rows `p` and `q` of a transposed
/// factor (i.e. to columns `p`, `q` of the factor itself).
fn rotate_rows(t: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    debug_assert!(p < q);
    let cols = t.cols();
    let (head, tail) = t.data_mut().split_at_mut(q * cols);
    let rp = &mut head[p * cols..(p + 1) * cols];
    let rq = &mut tail[..cols];
    for (a, b) in rp.iter_mut().zip(rq.iter_mut()) {
        let y = *a;
        let z = *b;
        *a = y * c + z * s;
        *b = z * c - y * s;
    }
}

fn permute_rows(t: &DenseMatrix, order: &[usize]) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(t.rows(), t.cols());
    for (dst, &src) in order.iter().enumerate() {
        out.row_mut(dst).copy_from_slice(t.row(src));
    }
    out
}

/// Flip signs so the largest-magnitude entry of each `U` column is
/// non-negative (first such entry wins on exact ties), adjusting `V` to
/// keep the product unchanged.
fn apply_sign_convention(f: &mut Svd) {
    for j in 0..f.u.cols() {
        let mut best = 0usize;
        let mut best_abs = f.u.get(0, j).abs();
        for i in 1..f.u.rows() {
            let a = f.u.get(i, j).abs();
            if a > best_abs {
                best = i;
                best_abs = a;
            }
        }
        if f.u.get(best, j) < 0.0 {
            for i in 0..f.u.rows() {
                let v = f.u.get(i, j);
                f.u.set(i, j, -v);
            }
            if j < f.v.cols() {
                for i in 0..f.v.rows() {
                    let v = f.v.get(i, j);
                    f.v.set(i, j, -v);
                }
            }
        }
    }
}
