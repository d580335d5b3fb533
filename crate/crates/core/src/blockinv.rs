//! Recursive 2x2 block inversion.
//!
//! A square matrix is tessellated by midpoint halving until blocks fall
//! under a leaf threshold. Each split is inverted through its Schur
//! complements:
//!
//! ```text
//! inv = [ Z1^-1                  -X11^-1 X12 Z2^-1 ]
//!       [ -Z2^-1 X21 X11^-1       Z2^-1            ]
//! Z1 = X11 - X12 X22^-1 X21,   Z2 = X22 - X21 X11^-1 X12
//! ```
//!
//! Leaves are inverted either directly (Gauss-Jordan) or through the
//! full-width randomized SVD. When the input is exactly symmetric the
//! bottom-left product is the transpose of the top-right one and both
//! Schur complements stay symmetric, so the symmetric path computes five
//! half-size products per node instead of seven; the structure is detected
//! once at the root and re-symmetrization after each product keeps
//! round-off from breaking the invariant down the recursion.
//!
//! The inverse is kept in its recursive form. Applying it to a vector
//! walks the tree; materializing it assembles the dense matrix on demand.

use crate::linalg::{invert_dense, DenseMatrix, RngStream};
use crate::rsvd::{invert_from_svd, rsvd, RsvdConfig};
use crate::{Error, Result};

/// How leaf blocks (and bottom-of-recursion Schur complements) invert.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafSolver {
    /// Gauss-Jordan with partial pivoting.
    Direct,
    /// Full-width randomized SVD inverse. The oversample is clamped so the
    /// sketch never exceeds the leaf dimension.
    Rsvd { oversample: usize, power_iters: usize },
}

/// How the achieved residual `||X Xinv - I||_F` is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualCheck {
    /// Materialize the product and take the exact Frobenius norm. The
    /// recorded residual is then a true bound (it *is* the norm).
    Exact,
    /// Estimate the norm with this many seeded Gaussian probes. Cheap — no
    /// full product — but the recorded value is a statistical estimate,
    /// not a bound.
    Probes(usize),
}

/// Configuration for [`block_invert`].
#[derive(Debug, Clone)]
pub struct BlockInvConfig {
    pub leaf_solver: LeafSolver,
    pub residual_check: ResidualCheck,
    /// Seeds the leaf sketches and the residual probes.
    pub seed: u64,
}

impl BlockInvConfig {
    /// Direct leaves, exact residual.
    pub fn direct() -> Self {
        BlockInvConfig {
            leaf_solver: LeafSolver::Direct,
            residual_check: ResidualCheck::Exact,
            seed: 0,
        }
    }

    /// Randomized-SVD leaves with the standard two subspace iterations.
    pub fn rsvd_leaves(seed: u64) -> Self {
        BlockInvConfig {
            leaf_solver: LeafSolver::Rsvd {
                oversample: crate::rsvd::DEFAULT_OVERSAMPLE,
                power_iters: crate::rsvd::DEFAULT_POWER_ITERS,
            },
            residual_check: ResidualCheck::Exact,
            seed,
        }
    }
}

/// Recursive midpoint tessellation of `[0, dim)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    dim: usize,
    leaf_dim_threshold: usize,
    split: Option<(usize, Box<BlockPartition>, Box<BlockPartition>)>,
}

impl BlockPartition {
    /// Halve at the midpoint until every block is at most `threshold` wide.
    pub fn tessellate(dim: usize, threshold: usize) -> Result<Self> {
        if dim == 0 || threshold == 0 {
            return Err(Error::InvalidArgument(format!(
                "tessellate requires dim >= 1 and threshold >= 1, got dim {dim}, threshold {threshold}"
            )));
        }
        Ok(Self::build(dim, threshold, &[], 0))
    }

    /// Like [`tessellate`](Self::tessellate), but when a block must split,
    /// the cut lands on the candidate boundary nearest the midpoint if one
    /// lies strictly inside the block; otherwise it falls back to the
    /// midpoint. `boundaries` are global offsets (segment starts, say), so
    /// splits tend to respect them.
    pub fn tessellate_with_boundaries(
        dim: usize,
        threshold: usize,
        boundaries: &[usize],
    ) -> Result<Self> {
        if dim == 0 || threshold == 0 {
            return Err(Error::InvalidArgument(format!(
                "tessellate requires dim >= 1 and threshold >= 1, got dim {dim}, threshold {threshold}"
            )));
        }
        let mut sorted: Vec<usize> = boundaries
            .iter()
            .copied()
            .filter(|&b| b > 0 && b < dim)
            .collect();
        sorted.sort_unstable();
        sorted.dedup();
        Ok(Self::build(dim, threshold, &sorted, 0))
    }

    fn build(dim: usize, threshold: usize, boundaries: &[usize], offset: usize) -> Self {
        if dim <= threshold {
            return BlockPartition {
                dim,
                leaf_dim_threshold: threshold,
                split: None,
            };
        }
        let mid = offset + dim / 2;
        // Nearest in-block boundary to the midpoint, or the midpoint itself.
        let cut = boundaries
            .iter()
            .copied()
            .filter(|&b| b > offset && b < offset + dim)
            .min_by_key(|&b| (b.abs_diff(mid), b))
            .unwrap_or(mid);
        let left_dim = cut - offset;
        let right_dim = dim - left_dim;
        let left = Self::build(left_dim, threshold, boundaries, offset);
        let right = Self::build(right_dim, threshold, boundaries, cut);
        BlockPartition {
            dim,
            leaf_dim_threshold: threshold,
            split: Some((left_dim, Box::new(left), Box::new(right))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn leaf_dim_threshold(&self) -> usize {
        self.leaf_dim_threshold
    }

    /// Split offset and children, `None` at a leaf.
    pub fn split(&self) -> Option<(usize, &BlockPartition, &BlockPartition)> {
        self.split
            .as_ref()
            .map(|(s, l, r)| (*s, l.as_ref(), r.as_ref()))
    }

    /// Leaf blocks as `(global_offset, len)` pairs in ascending order.
    pub fn leaves(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.collect_leaves(0, &mut out);
        out
    }

    fn collect_leaves(&self, offset: usize, out: &mut Vec<(usize, usize)>) {
        match &self.split {
            None => out.push((offset, self.dim)),
            Some((s, l, r)) => {
                l.collect_leaves(offset, out);
                r.collect_leaves(offset + s, out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match &self.split {
            None => 0,
            Some((_, l, r)) => 1 + l.depth().max(r.depth()),
        }
    }
}

#[derive(Debug, Clone)]
enum InvNode {
    Leaf {
        inv: DenseMatrix,
    },
    Split {
        split: usize,
        z1_inv: Box<InvNode>,
        z2_inv: Box<InvNode>,
        top_right: DenseMatrix,
        bottom_left: DenseMatrix,
    },
}

/// The recursive inverse produced by [`block_invert`].
#[derive(Debug, Clone)]
pub struct BlockInverse {
    partition: BlockPartition,
    root: InvNode,
    dim: usize,
    symmetric: bool,
    residual: f64,
    residual_check: ResidualCheck,
}

impl BlockInverse {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Partition the inverse was built over (its `leaf_dim_threshold`
    /// records which schedule produced this inverse).
    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    /// Whether the symmetric recursion was used.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Achieved `||X Xinv - I||_F`, exact or probe-estimated per the
    /// configured [`ResidualCheck`].
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn residual_check(&self) -> ResidualCheck {
        self.residual_check
    }

    /// `Xinv * y` through the recursive structure, without materializing.
    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "BlockInverse::apply",
                expected: self.dim,
                got: y.len(),
            });
        }
        Ok(apply_node(&self.root, y))
    }

    /// Assemble the dense inverse.
    pub fn materialize(&self) -> DenseMatrix {
        materialize_node(&self.root)
    }
}

fn apply_node(node: &InvNode, y: &[f64]) -> Vec<f64> {
    match node {
        InvNode::Leaf { inv } => inv.matvec(y).expect("leaf shape fixed at build"),
        InvNode::Split {
            split,
            z1_inv,
            z2_inv,
            top_right,
            bottom_left,
        } => {
            let (y1, y2) = y.split_at(*split);
            let mut out = apply_node(z1_inv, y1);
            let tr = top_right.matvec(y2).expect("shape fixed at build");
            for (o, t) in out.iter_mut().zip(tr.iter()) {
                *o += t;
            }
            let mut lower = bottom_left.matvec(y1).expect("shape fixed at build");
            let z2y = apply_node(z2_inv, y2);
            for (l, z) in lower.iter_mut().zip(z2y.iter()) {
                *l += z;
            }
            out.extend_from_slice(&lower);
            out
        }
    }
}

fn materialize_node(node: &InvNode) -> DenseMatrix {
    match node {
        InvNode::Leaf { inv } => inv.clone(),
        InvNode::Split {
            z1_inv,
            z2_inv,
            top_right,
            bottom_left,
            ..
        } => {
            let tl = materialize_node(z1_inv);
            let br = materialize_node(z2_inv);
            DenseMatrix::from_blocks(&tl, top_right, bottom_left, &br)
                .expect("shapes fixed at build")
        }
    }
}

struct BuildCtx<'a> {
    cfg: &'a BlockInvConfig,
    rng: RngStream,
    leaf_counter: u64,
    symmetric: bool,
}

fn block_path(path: &[&'static str]) -> String {
    path.join(".")
}

fn wrap_singular(err: Error, path: &[&'static str]) -> Error {
    match err {
        e @ (Error::SingularMatrix { .. } | Error::SingularValueBelowThreshold { .. }) => {
            Error::SingularBlock {
                path: block_path(path),
                message: e.to_string(),
            }
        }
        other => other,
    }
}

fn invert_leaf(
    x: &DenseMatrix,
    ctx: &mut BuildCtx<'_>,
    path: &[&'static str],
) -> Result<DenseMatrix> {
    let d = x.rows();
    let mut inv = match &ctx.cfg.leaf_solver {
        LeafSolver::Direct => invert_dense(x).map_err(|e| wrap_singular(e, path))?,
        LeafSolver::Rsvd {
            oversample,
            power_iters,
        } => {
            let leaf_rng = ctx.rng.fork(ctx.leaf_counter);
            ctx.leaf_counter += 1;
            // Inversion needs every direction, so the target rank is the
            // whole leaf and the oversample clamps to the remaining room.
            let target_rank = d;
            let cfg = RsvdConfig {
                target_rank,
                oversample: (*oversample).min(d - target_rank),
                power_iters: *power_iters,
                rng: leaf_rng,
            };
            let factors = rsvd(x, &cfg).map_err(|e| wrap_singular(e, path))?;
            invert_from_svd(&factors).map_err(|e| wrap_singular(e, path))?
        }
    };
    if ctx.symmetric {
        inv.symmetrize();
    }
    Ok(inv)
}

/// Recursive inversion of one block. Returns the tree node plus the dense
/// inverse of this block, which the parent consumes for its products.
fn invert_node(
    x: &DenseMatrix,
    part: &BlockPartition,
    ctx: &mut BuildCtx<'_>,
    path: &mut Vec<&'static str>,
) -> Result<(InvNode, DenseMatrix)> {
    let d = x.rows();
    debug_assert_eq!(d, part.dim());
    let Some((s, left, right)) = part.split() else {
        let inv = invert_leaf(x, ctx, path)?;
        return Ok((InvNode::Leaf { inv: inv.clone() }, inv));
    };

    let x11 = x.sub_block(0, s, 0, s)?;
    let x12 = x.sub_block(0, s, s, d)?;
    let x21 = x.sub_block(s, d, 0, s)?;
    let x22 = x.sub_block(s, d, s, d)?;

    path.push("x11");
    let (_, x11_inv) = invert_node(&x11, left, ctx, path)?;
    path.pop();
    path.push("x22");
    let (_, x22_inv) = invert_node(&x22, right, ctx, path)?;
    path.pop();

    let p = x11_inv.matmul(&x12)?; // X11^-1 X12
    let q = x22_inv.matmul(&x21)?; // X22^-1 X21
    let mut z1 = x11.sub(&x12.matmul(&q)?)?;
    let mut z2 = x22.sub(&x21.matmul(&p)?)?;
    if ctx.symmetric {
        z1.symmetrize();
        z2.symmetrize();
    }
    drop((x11, x22, x12, x22_inv, q));

    path.push("z1");
    let (z1_node, z1_dense) = invert_node(&z1, left, ctx, path)?;
    path.pop();
    drop(z1);
    path.push("z2");
    let (z2_node, z2_dense) = invert_node(&z2, right, ctx, path)?;
    path.pop();
    drop(z2);

    let top_right = p.matmul(&z2_dense)?.scale(-1.0)?;
    drop(p);
    let bottom_left = if ctx.symmetric {
        top_right.transpose()
    } else {
        let r = x21.matmul(&x11_inv)?;
        z2_dense.matmul(&r)?.scale(-1.0)?
    };
    drop((x21, x11_inv));

    let assembled = DenseMatrix::from_blocks(&z1_dense, &top_right, &bottom_left, &z2_dense)?;
    let node = InvNode::Split {
        split: s,
        z1_inv: Box::new(z1_node),
        z2_inv: Box::new(z2_node),
        top_right,
        bottom_left,
    };
    Ok((node, assembled))
}

/// Invert a square matrix over the given partition.
///
/// Singular leaves and Schur complements surface as
/// [`Error::SingularBlock`] naming the chain of blocks from the root, e.g.
/// `root.x22.z1`.
pub fn block_invert(
    x: &DenseMatrix,
    partition: &BlockPartition,
    cfg: &BlockInvConfig,
) -> Result<BlockInverse> {
    let dim = x.rows();
    if x.cols() != dim {
        return Err(Error::DimensionMismatch {
            context: "block_invert requires a square matrix",
            expected: dim,
            got: x.cols(),
        });
    }
    if partition.dim() != dim {
        return Err(Error::DimensionMismatch {
            context: "block_invert partition",
            expected: dim,
            got: partition.dim(),
        });
    }
    if let ResidualCheck::Probes(p) = cfg.residual_check {
        if p == 0 {
            return Err(Error::InvalidArgument(
                "residual probe count must be >= 1".into(),
            ));
        }
    }

    let mut ctx = BuildCtx {
        cfg,
        rng: RngStream::new(cfg.seed).fork(u64::MAX),
        leaf_counter: 0,
        symmetric: x.is_symmetric(),
    };
    let mut path = vec!["root"];
    let (root, dense) = invert_node(x, partition, &mut ctx, &mut path)?;

    let residual = match cfg.residual_check {
        ResidualCheck::Exact => {
            let n = DenseMatrix::identity(dim);
            x.matmul(&dense)?.sub(&n)?.frobenius_norm()
        }
        ResidualCheck::Probes(count) => {
            let mut probe_rng = RngStream::new(cfg.seed).fork(u64::MAX - 1);
            let mut total = 0.0;
            for _ in 0..count {
                let g: Vec<f64> = (0..dim).map(|_| probe_rng.normal()).collect();
                let xinv_g = dense.matvec(&g)?;
                let back = x.matvec(&xinv_g)?;
                total += back
                    .iter()
                    .zip(g.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
            }
            (total / count as f64).sqrt()
        }
    };

    Ok(BlockInverse {
        partition: partition.clone(),
        root,
        dim,
        symmetric: ctx.symmetric,
        residual,
        residual_check: cfg.residual_check,
    })
}
