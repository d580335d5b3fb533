//! Dense/sparse linear algebra kernels shared by every solver.
//!
//! The matrix types are deliberately plain — row-major `f64` storage, CSR
//! sparsity — with the performance-sensitive paths (the blocked multiply,
//! reflector and rotation applications) arranged so inner loops run over
//! contiguous slices. Randomness is funneled through [`RngStream`] to keep
//! all sampling reproducible.

mod dense;
mod gauss;
mod io;
mod op;
mod power;
mod qr;
mod rng;
mod sparse;
mod svd;

#[cfg(test)]
pub(crate) mod testsupport;

pub use dense::DenseMatrix;
pub use gauss::invert_dense;
pub use io::{read_dense_text, read_matrix_market, write_dense_text, write_matrix_market};
pub use op::LinearOp;
pub use power::spectral_radius_estimate;
pub use qr::qr_factor;
pub use rng::{gaussian_matrix, RngStream, RNG_ALGORITHM};
pub use sparse::SparseMatrix;
pub use svd::{svd_small, Svd, SVD_SMALL_MAX_DIM};

pub(crate) use dense::dot;
