//! Power-method spectral radius estimation.
//!
//! Used to verify the spectral bound on the normalized adjacency and to
//! scale tolerances in tests. The estimate is a lower bound that converges
//! to the dominant eigenvalue magnitude for diagonalizable operators.

use crate::{Error, Result};

use super::dense::dot;
use super::op::LinearOp;
use super::RngStream;

/// Estimate the spectral radius of a square operator by `iters` power
/// iterations from a seeded random start.
pub fn spectral_radius_estimate(
    op: &dyn LinearOp,
    iters: usize,
    seed: u64,
) -> Result<f64> {
    let n = op.nrows();
    if n != op.ncols() {
        return Err(Error::ShapeMismatch {
            context: "spectral_radius_estimate",
            left_rows: op.nrows(),
            left_cols: op.ncols(),
            right_rows: op.ncols(),
            right_cols: op.ncols(),
        });
    }
    if iters == 0 {
        return Err(Error::InvalidArgument(
            "spectral_radius_estimate requires iters >= 1".into(),
        ));
    }
    let mut rng = RngStream::new(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let mut norm = dot(&x, &x).sqrt();
    if norm == 0.0 {
        x[0] = 1.0;
        norm = 1.0;
    }
    let mut estimate = 0.0;
    for _ in 0..iters {
        for v in x.iter_mut() {
            *v /= norm;
        }
        x = op.apply(&x);
        norm = dot(&x, &x).sqrt();
        estimate = norm;
        if norm == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(estimate)
}
