//! Independent numerical oracles for tests.
//!
//! These deliberately avoid the production factorization code paths: the
//! cyclic Jacobi method below shares nothing with the bidiagonal SVD it is
//! used to cross-check.

use super::DenseMatrix;

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
/// Returned in unspecified order; callers sort as needed.
pub(crate) fn jacobi_eigenvalues(sym: &DenseMatrix) -> Vec<f64> {
    assert_eq!(sym.rows(), sym.cols());
    let n = sym.rows();
    let mut a = sym.clone();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() <= 1e-14 * (1.0 + a.frobenius_norm()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    (0..n).map(|i| a.get(i, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        let m = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut e = jacobi_eigenvalues(&m);
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_trace_and_determinant_consistency() {
        let mut rng = crate::linalg::RngStream::new(3);
        let g = crate::linalg::gaussian_matrix(10, 10, &mut rng);
        let sym = g.transpose().matmul(&g).unwrap();
        let eigs = jacobi_eigenvalues(&sym);
        let trace: f64 = (0..10).map(|i| sym.get(i, i)).sum();
        let eig_sum: f64 = eigs.iter().sum();
        assert!((trace - eig_sum).abs() <= 1e-10 * trace.abs());
        assert!(eigs.iter().all(|&l| l >= -1e-10));
    }
}
