//! Interchangeable solver back-ends for ranking queries.
//!
//! All three answer the same system `X f = (theta/(1+theta)) y`:
//!
//! * `direct` — dense Gauss-Jordan inverse of `X`, applied per query;
//! * `block-rsvd` — recursive block inverse with randomized-SVD leaves;
//! * `cg` — conjugate gradients straight on the sparse operator, no
//!   inverse at all.
//!
//! The first two pay once at preparation and answer queries with a
//! matrix-vector product; the iterative one prepares nothing and pays per
//! query. Within their tolerances all three return the same ranking
//! vector.

use std::fmt;
use std::str::FromStr;

use crate::blockinv::{
    block_invert, BlockInvConfig, BlockInverse, BlockPartition, LeafSolver, ResidualCheck,
};
use crate::cg::{cg_solve, CgConfig};
use crate::hypergraph::SystemMatrix;
use crate::linalg::{invert_dense, DenseMatrix};
use crate::{Error, Result};

/// Default leaf bound for the block tessellation.
pub const DEFAULT_LEAF_THRESHOLD: usize = 500;
/// Probes used for the block inverse's residual estimate.
pub const DEFAULT_RESIDUAL_PROBES: usize = 8;

/// Which back-end answers ranking queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Direct,
    BlockRsvd,
    Cg,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Direct, SolverKind::BlockRsvd, SolverKind::Cg];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Direct => "direct",
            SolverKind::BlockRsvd => "block-rsvd",
            SolverKind::Cg => "cg",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(SolverKind::Direct),
            "block-rsvd" => Ok(SolverKind::BlockRsvd),
            "cg" => Ok(SolverKind::Cg),
            other => Err(Error::InvalidArgument(format!(
                "unknown solver {other:?} (expected direct, block-rsvd, or cg)"
            ))),
        }
    }
}

/// Knobs shared by the back-ends.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    /// Block tessellation stops splitting at this dimension.
    pub leaf_threshold: usize,
    /// Oversampling for randomized-SVD leaves.
    pub oversample: usize,
    /// Subspace iterations for randomized-SVD leaves.
    pub power_iters: usize,
    /// Relative tolerance of the iterative solver.
    pub cg_rel_tolerance: f64,
    /// Iteration budget of the iterative solver; `None` means the system
    /// dimension.
    pub cg_max_iters: Option<usize>,
    /// Seeds leaf sketches and residual probes.
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            leaf_threshold: DEFAULT_LEAF_THRESHOLD,
            oversample: crate::rsvd::DEFAULT_OVERSAMPLE,
            power_iters: crate::rsvd::DEFAULT_POWER_ITERS,
            cg_rel_tolerance: crate::cg::DEFAULT_CG_REL_TOLERANCE,
            cg_max_iters: None,
            seed: 0,
        }
    }
}

/// A back-end after its one-time preparation.
#[derive(Debug, Clone)]
pub enum PreparedSolver {
    Direct { inverse: DenseMatrix },
    Block { inverse: BlockInverse },
    /// The iterative back-end keeps no state; queries run on the operator.
    Iterative,
}

impl PreparedSolver {
    pub fn kind(&self) -> SolverKind {
        match self {
            PreparedSolver::Direct { .. } => SolverKind::Direct,
            PreparedSolver::Block { .. } => SolverKind::BlockRsvd,
            PreparedSolver::Iterative => SolverKind::Cg,
        }
    }

    /// Solve for the ranking vector of one query.
    pub fn rank(&self, sys: &SystemMatrix, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != sys.dim() {
            return Err(Error::DimensionMismatch {
                context: "query vector",
                expected: sys.dim(),
                got: y.len(),
            });
        }
        let b: Vec<f64> = y.iter().map(|v| v * sys.rhs_scale()).collect();
        match self {
            PreparedSolver::Direct { inverse } => inverse.matvec(&b),
            PreparedSolver::Block { inverse } => inverse.apply(&b),
            PreparedSolver::Iterative => {
                let cfg = CgConfig::default();
                Ok(cg_solve(sys, &b, &cfg)?.f)
            }
        }
    }
}

/// Run a back-end's one-time preparation against a system.
pub fn prepare(
    sys: &SystemMatrix,
    kind: SolverKind,
    settings: &SolverSettings,
) -> Result<PreparedSolver> {
    match kind {
        SolverKind::Direct => {
            let inverse = invert_dense(&sys.to_dense())?;
            Ok(PreparedSolver::Direct { inverse })
        }
        SolverKind::BlockRsvd => {
            let partition = BlockPartition::tessellate(sys.dim(), settings.leaf_threshold)?;
            let cfg = BlockInvConfig {
                leaf_solver: LeafSolver::Rsvd {
                    oversample: settings.oversample,
                    power_iters: settings.power_iters,
                },
                residual_check: ResidualCheck::Probes(DEFAULT_RESIDUAL_PROBES),
                seed: settings.seed,
            };
            let inverse = block_invert(&sys.to_dense(), &partition, &cfg)?;
            Ok(PreparedSolver::Block { inverse })
        }
        SolverKind::Cg => Ok(PreparedSolver::Iterative),
    }
}

/// Solve one query with explicit iterative settings (used when the caller
/// has tuned tolerances; [`PreparedSolver::rank`] uses defaults).
pub fn rank_iterative(
    sys: &SystemMatrix,
    y: &[f64],
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    let b: Vec<f64> = y.iter().map(|v| v * sys.rhs_scale()).collect();
    let cfg = CgConfig {
        rel_tolerance: settings.cg_rel_tolerance,
        max_iters: settings.cg_max_iters,
        ..CgConfig::default()
    };
    Ok(cg_solve(sys, &b, &cfg)?.f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::HypergraphModel;
    use crate::linalg::RngStream;

    fn small_system(seed: u64) -> SystemMatrix {
        let mut rng = RngStream::new(seed);
        let n = 40;
        let hg = loop {
            let mut edges = Vec::new();
            for _ in 0..60 {
                let size = 2 + rng.index(3);
                edges.push(rng.distinct_indices(size, n));
            }
            let mut covered = vec![false; n];
            for e in &edges {
                for &v in e {
                    covered[v] = true;
                }
            }
            if covered.iter().all(|&c| c) {
                break HypergraphModel::from_edges(n, &edges).unwrap();
            }
        };
        SystemMatrix::from_model(&hg, &vec![1.0; 60], 1.0 / 9.0).unwrap()
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in SolverKind::ALL {
            let parsed: SolverKind = kind.name().parse().unwrap();
            assert_eq!(parsed, kind);
        }
        assert!("gauss".parse::<SolverKind>().is_err());
    }

    #[test]
    fn all_backends_agree_on_the_ranking_vector() {
        let sys = small_system(3);
        let mut rng = RngStream::new(4);
        let y: Vec<f64> = (0..sys.dim())
            .map(|_| if rng.uniform() < 0.2 { rng.uniform() } else { 0.0 })
            .collect();

        let mut settings = SolverSettings::default();
        settings.leaf_threshold = 12;
        let direct = prepare(&sys, SolverKind::Direct, &settings).unwrap();
        let block = prepare(&sys, SolverKind::BlockRsvd, &settings).unwrap();
        let iterative = prepare(&sys, SolverKind::Cg, &settings).unwrap();

        let fd = direct.rank(&sys, &y).unwrap();
        let fb = block.rank(&sys, &y).unwrap();
        let fc = iterative.rank(&sys, &y).unwrap();

        let scale = fd.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-30);
        let gap = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        };
        assert!(gap(&fd, &fb) <= 1e-8 * scale, "block vs direct");
        assert!(gap(&fd, &fc) <= 1e-6 * scale, "iterative vs direct");
    }

    #[test]
    fn ranking_solves_the_system() {
        let sys = small_system(9);
        let mut y = vec![0.0; sys.dim()];
        y[0] = 1.0;
        y[7] = 0.5;
        let solver = prepare(&sys, SolverKind::Direct, &SolverSettings::default()).unwrap();
        let f = solver.rank(&sys, &y).unwrap();
        // X f must reproduce the scaled query.
        let xf = crate::linalg::LinearOp::apply(&sys, &f);
        for (i, (lhs, yi)) in xf.iter().zip(y.iter()).enumerate() {
            assert!(
                (lhs - sys.rhs_scale() * yi).abs() < 1e-10,
                "component {i}: {lhs} vs {}",
                sys.rhs_scale() * yi
            );
        }
    }

    #[test]
    fn block_preparation_records_a_residual_estimate() {
        let sys = small_system(11);
        let mut settings = SolverSettings::default();
        settings.leaf_threshold = 10;
        match prepare(&sys, SolverKind::BlockRsvd, &settings).unwrap() {
            PreparedSolver::Block { inverse } => {
                assert!(inverse.residual().is_finite());
                assert!(inverse.residual() < 1e-6);
                assert!(inverse.is_symmetric());
            }
            other => panic!("expected block solver, got {:?}", other.kind()),
        }
    }

    #[test]
    fn query_dimension_is_validated() {
        let sys = small_system(13);
        let solver = prepare(&sys, SolverKind::Cg, &SolverSettings::default()).unwrap();
        assert!(solver.rank(&sys, &[1.0, 2.0]).is_err());
    }
}
