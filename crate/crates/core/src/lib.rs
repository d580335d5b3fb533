//! Ranking on weighted hypergraphs with learned hyperedge weights.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] — dense and sparse matrices, Householder QR, a small-matrix
//!   SVD, Gauss-Jordan inversion, seeded Gaussian sampling, and text/Matrix
//!   Market I/O.
//! * [`rsvd`] — randomized SVD via subspace iteration and the SVD-based
//!   inverse built from it.
//! * [`blockinv`] — recursive 2x2 block inversion over a midpoint
//!   tessellation, with Schur complements inverted by either the direct or
//!   the randomized-SVD kernel.
//! * [`cg`] — conjugate gradient for the ranking system, matrix-free.
//! * [`hypergraph`] — incidence structures, weighted degrees, the normalized
//!   adjacency, and the ranking system matrix.
//! * [`learning`] — simplex-constrained steepest descent on hyperedge
//!   weights.
//! * [`pipeline`] — query construction, the three interchangeable solvers,
//!   evaluation at cut-offs, the ranking/learning schedules, a synthetic
//!   corpus generator, and the benchmark harness.
//!
//! All randomness flows through [`linalg::RngStream`], so every result in the
//! crate is reproducible from explicit seeds.

pub mod blockinv;
pub mod cg;
pub mod error;
pub mod hypergraph;
pub mod learning;
pub mod linalg;
pub mod pipeline;
pub mod rsvd;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
