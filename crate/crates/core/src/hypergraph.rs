//! Hypergraph model, normalized adjacency, and the ranking operator.
//!
//! Vertices of several kinds (images, users, groups, geographic contexts,
//! tags) share one index space, described by [`VertexSegments`]. A
//! hypergraph is a 0/1 incidence between vertices and hyperedges plus a
//! positive weight per edge. From incidence `H`, weights `W`, vertex
//! degrees `Dv` and edge cardinalities `De`, the normalized adjacency is
//!
//! ```text
//! A = Dv^-1/2 H W De^-1 H' Dv^-1/2
//! ```
//!
//! and ranking solves `(I - A/(1+theta)) f = (theta/(1+theta)) y`. The
//! left-hand operator is [`SystemMatrix`]; its spectrum lies in
//! `(0, 2)` for `theta > 0` because `A`'s eigenvalues sit in `[-1, 1]`, so
//! the system is symmetric positive definite.
//!
//! `A` is assembled from vertex pairs `u <= v` and mirrored, so the stored
//! matrix is bitwise symmetric — downstream symmetry detection can use
//! exact comparison.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::linalg::{DenseMatrix, LinearOp, SparseMatrix};
use crate::{Error, Result};

/// Kind of a vertex in the shared index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexType {
    Image,
    User,
    Group,
    Geo,
    Tag,
}

impl VertexType {
    /// Short code used in segment files.
    pub fn code(self) -> &'static str {
        match self {
            VertexType::Image => "Im",
            VertexType::User => "U",
            VertexType::Group => "Gr",
            VertexType::Geo => "Geo",
            VertexType::Tag => "Ta",
        }
    }

    pub const ALL: [VertexType; 5] = [
        VertexType::Image,
        VertexType::User,
        VertexType::Group,
        VertexType::Geo,
        VertexType::Tag,
    ];
}

impl fmt::Display for VertexType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for VertexType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Im" | "image" => Ok(VertexType::Image),
            "U" | "user" => Ok(VertexType::User),
            "Gr" | "group" => Ok(VertexType::Group),
            "Geo" | "geo" => Ok(VertexType::Geo),
            "Ta" | "tag" => Ok(VertexType::Tag),
            other => Err(Error::InvalidArgument(format!(
                "unknown vertex type {other:?} (expected Im, U, Gr, Geo, or Ta)"
            ))),
        }
    }
}

/// Contiguous spans of the vertex index space, one per vertex type.
///
/// Spans must start at 0, be non-empty, and tile the space without gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSegments {
    spans: Vec<(VertexType, usize, usize)>,
}

impl VertexSegments {
    /// Build from `(type, start, end)` spans with `end` exclusive.
    pub fn new(spans: Vec<(VertexType, usize, usize)>) -> Result<Self> {
        if spans.is_empty() {
            return Err(Error::InvalidArgument(
                "vertex segments must not be empty".into(),
            ));
        }
        let mut cursor = 0;
        for (i, &(ty, start, end)) in spans.iter().enumerate() {
            if start != cursor {
                return Err(Error::InvalidArgument(format!(
                    "segment {i} ({ty}) starts at {start}, expected {cursor}: \
                     segments must tile the index space"
                )));
            }
            if end <= start {
                return Err(Error::InvalidArgument(format!(
                    "segment {i} ({ty}) is empty: [{start}, {end})"
                )));
            }
            if spans[..i].iter().any(|&(t, _, _)| t == ty) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate segment for vertex type {ty}"
                )));
            }
            cursor = end;
        }
        Ok(VertexSegments { spans })
    }

    /// Convenience: consecutive spans from `(type, len)` pairs.
    pub fn from_lens(lens: &[(VertexType, usize)]) -> Result<Self> {
        let mut spans = Vec::with_capacity(lens.len());
        let mut cursor = 0;
        for &(ty, len) in lens {
            spans.push((ty, cursor, cursor + len));
            cursor += len;
        }
        Self::new(spans)
    }

    /// Total number of vertices.
    pub fn dim(&self) -> usize {
        self.spans.last().map(|&(_, _, end)| end).unwrap_or(0)
    }

    /// Span of a type as `(start, end)`, if present.
    pub fn range(&self, ty: VertexType) -> Option<(usize, usize)> {
        self.spans
            .iter()
            .find(|&&(t, _, _)| t == ty)
            .map(|&(_, s, e)| (s, e))
    }

    pub fn count(&self, ty: VertexType) -> usize {
        self.range(ty).map(|(s, e)| e - s).unwrap_or(0)
    }

    /// Type owning a vertex index.
    pub fn type_of(&self, vertex: usize) -> Option<VertexType> {
        self.spans
            .iter()
            .find(|&&(_, s, e)| vertex >= s && vertex < e)
            .map(|&(t, _, _)| t)
    }

    pub fn spans(&self) -> &[(VertexType, usize, usize)] {
        &self.spans
    }

    /// Write tab-separated `type start end` rows.
    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = String::from("# vertex segments: type\tstart\tend\n");
        for &(ty, start, end) in &self.spans {
            out.push_str(&format!("{ty}\t{start}\t{end}\n"));
        }
        fs::write(path, out)?;
        Ok(())
    }

    /// Read the format written by [`save`](Self::save).
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let mut spans = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                message,
            };
            let mut fields = line.split('\t');
            let ty: VertexType = fields
                .next()
                .ok_or_else(|| parse_err("missing vertex type".into()))?
                .parse()
                .map_err(|e| parse_err(format!("{e}")))?;
            let start: usize = fields
                .next()
                .ok_or_else(|| parse_err("missing start".into()))?
                .parse()
                .map_err(|e| parse_err(format!("bad start: {e}")))?;
            let end: usize = fields
                .next()
                .ok_or_else(|| parse_err("missing end".into()))?
                .parse()
                .map_err(|e| parse_err(format!("bad end: {e}")))?;
            if fields.next().is_some() {
                return Err(parse_err("too many fields".into()));
            }
            spans.push((ty, start, end));
        }
        Self::new(spans)
    }
}

/// Unweighted hypergraph: a validated 0/1 incidence with both directions
/// of membership cached.
#[derive(Debug, Clone)]
pub struct HypergraphModel {
    incidence: SparseMatrix,
    members_of_edge: Vec<Vec<usize>>,
    edges_of_vertex: Vec<Vec<usize>>,
}

impl HypergraphModel {
    /// Validate an incidence matrix (rows are vertices, columns edges).
    /// Every stored entry must be exactly 1.0 and every edge non-empty.
    pub fn new(incidence: SparseMatrix) -> Result<Self> {
        let n_vertices = incidence.rows();
        let n_edges = incidence.cols();
        let mut members_of_edge = vec![Vec::new(); n_edges];
        let mut edges_of_vertex = vec![Vec::new(); n_vertices];
        for v in 0..n_vertices {
            let (cols, values) = incidence.row_entries(v);
            for (&e, &value) in cols.iter().zip(values.iter()) {
                if value != 1.0 {
                    return Err(Error::InvalidArgument(format!(
                        "incidence entry ({v}, {e}) is {value}, expected exactly 1"
                    )));
                }
                members_of_edge[e].push(v);
                edges_of_vertex[v].push(e);
            }
        }
        for (e, members) in members_of_edge.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::EmptyHyperedge { edge: e });
            }
        }
        Ok(HypergraphModel {
            incidence,
            members_of_edge,
            edges_of_vertex,
        })
    }

    /// Build from explicit member lists, one per edge.
    pub fn from_edges(n_vertices: usize, edges: &[Vec<usize>]) -> Result<Self> {
        let mut triplets = Vec::new();
        for (e, members) in edges.iter().enumerate() {
            for &v in members {
                triplets.push((v, e, 1.0));
            }
        }
        let incidence = SparseMatrix::from_triplets(n_vertices, edges.len(), triplets)?;
        Self::new(incidence)
    }

    pub fn n_vertices(&self) -> usize {
        self.incidence.rows()
    }

    pub fn n_edges(&self) -> usize {
        self.incidence.cols()
    }

    pub fn incidence(&self) -> &SparseMatrix {
        &self.incidence
    }

    /// Vertices of an edge, ascending.
    pub fn edge_members(&self, edge: usize) -> &[usize] {
        &self.members_of_edge[edge]
    }

    /// Edges containing a vertex, ascending.
    pub fn vertex_edges(&self, vertex: usize) -> &[usize] {
        &self.edges_of_vertex[vertex]
    }
}

/// Weighted vertex degrees and edge cardinalities.
#[derive(Debug, Clone)]
pub struct Degrees {
    /// `d(v) = sum of w_e over edges containing v`.
    pub vertex: Vec<f64>,
    /// `delta(e) = |e|`, as floats for downstream arithmetic.
    pub edge: Vec<f64>,
}

fn validate_weights(hg: &HypergraphModel, weights: &[f64]) -> Result<()> {
    if weights.len() != hg.n_edges() {
        return Err(Error::DimensionMismatch {
            context: "edge weights",
            expected: hg.n_edges(),
            got: weights.len(),
        });
    }
    for (e, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "edge weight {e} is {w}, expected finite and non-negative"
            )));
        }
    }
    Ok(())
}

/// Compute degrees under the given weights. A vertex whose weighted degree
/// is zero (no edges, or only zero-weight edges) makes the normalization
/// undefined and is rejected.
pub fn degrees(hg: &HypergraphModel, weights: &[f64]) -> Result<Degrees> {
    validate_weights(hg, weights)?;
    let mut vertex = vec![0.0; hg.n_vertices()];
    let mut edge = vec![0.0; hg.n_edges()];
    for e in 0..hg.n_edges() {
        let members = hg.edge_members(e);
        edge[e] = members.len() as f64;
        for &v in members {
            vertex[v] += weights[e];
        }
    }
    for (v, &d) in vertex.iter().enumerate() {
        if d <= 0.0 {
            return Err(Error::IsolatedVertex { vertex: v });
        }
    }
    Ok(Degrees { vertex, edge })
}

/// Assemble the normalized adjacency `Dv^-1/2 H W De^-1 H' Dv^-1/2`.
///
/// Entries are accumulated once per unordered vertex pair (edges visited
/// in index order) and mirrored, so `A` is bitwise symmetric.
pub fn build_adjacency(hg: &HypergraphModel, weights: &[f64]) -> Result<SparseMatrix> {
    let deg = degrees(hg, weights)?;
    let inv_sqrt: Vec<f64> = deg.vertex.iter().map(|d| 1.0 / d.sqrt()).collect();
    let n = hg.n_vertices();

    let mut upper: HashMap<(usize, usize), f64> = HashMap::new();
    for e in 0..hg.n_edges() {
        if weights[e] == 0.0 {
            continue;
        }
        let members = hg.edge_members(e);
        let coef = weights[e] / deg.edge[e];
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i..] {
                let val = coef * inv_sqrt[u] * inv_sqrt[v];
                *upper.entry((u, v)).or_insert(0.0) += val;
            }
        }
    }

    let mut triplets = Vec::with_capacity(2 * upper.len());
    for (&(u, v), &val) in upper.iter() {
        triplets.push((u, v, val));
        if u != v {
            triplets.push((v, u, val));
        }
    }
    SparseMatrix::from_triplets(n, n, triplets)
}

/// The ranking operator `X = I - A/(1+theta)`.
#[derive(Debug, Clone)]
pub struct SystemMatrix {
    adjacency: SparseMatrix,
    theta: f64,
}

impl SystemMatrix {
    /// Wrap a normalized adjacency. `A` must be square and exactly
    /// symmetric; `theta` must be positive and finite — both are what
    /// keeps the operator positive definite.
    pub fn new(adjacency: SparseMatrix, theta: f64) -> Result<Self> {
        if adjacency.rows() != adjacency.cols() {
            return Err(Error::DimensionMismatch {
                context: "system matrix requires a square adjacency",
                expected: adjacency.rows(),
                got: adjacency.cols(),
            });
        }
        if !adjacency.is_symmetric(0.0) {
            let mut worst = 0.0_f64;
            for (u, v, val) in adjacency.triplets() {
                worst = worst.max((val - adjacency.get(v, u)).abs());
            }
            return Err(Error::NonSymmetric { discrepancy: worst });
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "theta must be positive and finite, got {theta}"
            )));
        }
        Ok(SystemMatrix { adjacency, theta })
    }

    /// Build the operator straight from a weighted hypergraph.
    pub fn from_model(hg: &HypergraphModel, weights: &[f64], theta: f64) -> Result<Self> {
        Self::new(build_adjacency(hg, weights)?, theta)
    }

    pub fn dim(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    /// `1/(1+theta)`: how much of the adjacency feeds back per step.
    pub fn feedback_scale(&self) -> f64 {
        1.0 / (1.0 + self.theta)
    }

    /// `theta/(1+theta)`: scale applied to the query vector on the
    /// right-hand side.
    pub fn rhs_scale(&self) -> f64 {
        self.theta / (1.0 + self.theta)
    }

    /// Materialize `I - A/(1+theta)` densely.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut out = self.adjacency.to_dense();
        let s = -self.feedback_scale();
        for i in 0..n {
            for j in 0..n {
                let v = out.get(i, j) * s;
                out.set(i, j, if i == j { 1.0 + v } else { v });
            }
        }
        out
    }
}

impl LinearOp for SystemMatrix {
    fn nrows(&self) -> usize {
        self.dim()
    }

    fn ncols(&self) -> usize {
        self.dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.adjacency.matvec(x).expect("dimension checked at build");
        let s = self.feedback_scale();
        x.iter().zip(ax.iter()).map(|(xi, ai)| xi - s * ai).collect()
    }

    fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        // Symmetric by construction.
        self.apply(x)
    }
}

/// The smoothness objective `sum_e w_e/delta(e) * sum_{u<v in e}
/// (f_u/sqrt(d_u) - f_v/sqrt(d_v))^2`, evaluated edge-wise in O(nnz).
///
/// Equals `f' (I - A) f` for the adjacency built from the same weights.
pub fn laplacian_quadratic(hg: &HypergraphModel, weights: &[f64], f: &[f64]) -> Result<f64> {
    if f.len() != hg.n_vertices() {
        return Err(Error::DimensionMismatch {
            context: "laplacian_quadratic vector",
            expected: hg.n_vertices(),
            got: f.len(),
        });
    }
    let deg = degrees(hg, weights)?;
    let g: Vec<f64> = f
        .iter()
        .zip(deg.vertex.iter())
        .map(|(fi, di)| fi / di.sqrt())
        .collect();
    let mut total = 0.0;
    for e in 0..hg.n_edges() {
        if weights[e] == 0.0 {
            continue;
        }
        let members = hg.edge_members(e);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for &v in members {
            sum += g[v];
            sum_sq += g[v] * g[v];
        }
        // Pair expansion: sum_{u<v} (g_u - g_v)^2 = delta*sum_sq - sum^2.
        total += weights[e] * sum_sq - weights[e] / deg.edge[e] * sum * sum;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spectral_radius_estimate, RngStream};

    fn toy_chain() -> HypergraphModel {
        // Edges {0,1} and {1,2} over three vertices.
        HypergraphModel::from_edges(3, &[vec![0, 1], vec![1, 2]]).unwrap()
    }

    fn random_hypergraph(
        n_vertices: usize,
        n_edges: usize,
        rng: &mut RngStream,
    ) -> HypergraphModel {
        loop {
            let mut edges = Vec::with_capacity(n_edges);
            for _ in 0..n_edges {
                let size = 2 + rng.index(4);
                edges.push(rng.distinct_indices(size, n_vertices));
            }
            // Cover every vertex so degrees stay positive.
            let mut covered = vec![false; n_vertices];
            for e in &edges {
                for &v in e {
                    covered[v] = true;
                }
            }
            if covered.iter().all(|&c| c) {
                return HypergraphModel::from_edges(n_vertices, &edges).unwrap();
            }
        }
    }

    #[test]
    fn incidence_entries_must_be_unit() {
        let m = SparseMatrix::from_triplets(2, 1, vec![(0, 0, 1.0), (1, 0, 2.0)]).unwrap();
        match HypergraphModel::new(m) {
            Err(Error::InvalidArgument(msg)) => assert!(msg.contains("expected exactly 1")),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn empty_edges_are_rejected() {
        match HypergraphModel::from_edges(3, &[vec![0, 1], vec![]]) {
            Err(Error::EmptyHyperedge { edge }) => assert_eq!(edge, 1),
            other => panic!("expected empty-edge rejection, got {other:?}"),
        }
    }

    #[test]
    fn membership_caches_agree_with_the_incidence() {
        let hg = toy_chain();
        assert_eq!(hg.edge_members(0), &[0, 1]);
        assert_eq!(hg.edge_members(1), &[1, 2]);
        assert_eq!(hg.vertex_edges(0), &[0]);
        assert_eq!(hg.vertex_edges(1), &[0, 1]);
        assert_eq!(hg.vertex_edges(2), &[1]);
        assert_eq!(hg.incidence().get(1, 1), 1.0);
        assert_eq!(hg.incidence().get(0, 1), 0.0);
    }

    #[test]
    fn degrees_match_hand_computation() {
        let hg = toy_chain();
        let deg = degrees(&hg, &[2.0, 3.0]).unwrap();
        assert_eq!(deg.vertex, vec![2.0, 5.0, 3.0]);
        assert_eq!(deg.edge, vec![2.0, 2.0]);
    }

    #[test]
    fn isolated_vertices_are_rejected() {
        let hg = HypergraphModel::from_edges(4, &[vec![0, 1], vec![1, 2]]).unwrap();
        match degrees(&hg, &[1.0, 1.0]) {
            Err(Error::IsolatedVertex { vertex }) => assert_eq!(vertex, 3),
            other => panic!("expected isolation error, got {other:?}"),
        }
        // Zero weights can isolate a vertex that has edges.
        let hg = toy_chain();
        match degrees(&hg, &[0.0, 1.0]) {
            Err(Error::IsolatedVertex { vertex }) => assert_eq!(vertex, 0),
            other => panic!("expected isolation error, got {other:?}"),
        }
    }

    #[test]
    fn single_edge_adjacency_is_the_half_matrix() {
        let hg = HypergraphModel::from_edges(2, &[vec![0, 1]]).unwrap();
        let a = build_adjacency(&hg, &[1.0]).unwrap();
        for u in 0..2 {
            for v in 0..2 {
                assert!((a.get(u, v) - 0.5).abs() < 1e-15, "entry ({u},{v})");
            }
        }
    }

    #[test]
    fn chain_adjacency_matches_hand_computation() {
        let hg = toy_chain();
        let a = build_adjacency(&hg, &[1.0, 1.0]).unwrap();
        let s = 1.0 / (2.0 * 2.0_f64.sqrt());
        assert!((a.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((a.get(1, 1) - 0.5).abs() < 1e-15);
        assert!((a.get(2, 2) - 0.5).abs() < 1e-15);
        assert!((a.get(0, 1) - s).abs() < 1e-15);
        assert!((a.get(1, 2) - s).abs() < 1e-15);
        assert_eq!(a.get(0, 2), 0.0);
    }

    #[test]
    fn adjacency_is_bitwise_symmetric() {
        let mut rng = RngStream::new(5);
        for _ in 0..5 {
            let hg = random_hypergraph(30, 40, &mut rng);
            let w: Vec<f64> = (0..40).map(|_| rng.uniform() + 0.1).collect();
            let a = build_adjacency(&hg, &w).unwrap();
            assert!(a.is_symmetric(0.0));
        }
    }

    #[test]
    fn adjacency_spectral_radius_is_at_most_one() {
        let mut rng = RngStream::new(9);
        for trial in 0..5 {
            let hg = random_hypergraph(25, 35, &mut rng);
            let w: Vec<f64> = (0..35).map(|_| rng.uniform() + 0.05).collect();
            let a = build_adjacency(&hg, &w).unwrap();
            let rho = spectral_radius_estimate(&a, 300, trial as u64).unwrap();
            assert!(rho <= 1.0 + 1e-8, "trial {trial}: spectral radius {rho}");
        }
    }

    #[test]
    fn system_matrix_matches_its_dense_form() {
        let mut rng = RngStream::new(13);
        let hg = random_hypergraph(20, 30, &mut rng);
        let w = vec![1.0; 30];
        let sys = SystemMatrix::from_model(&hg, &w, 1.0 / 9.0).unwrap();
        assert!((sys.rhs_scale() - 0.1).abs() < 1e-15);
        assert!((sys.feedback_scale() - 0.9).abs() < 1e-15);
        let dense = sys.to_dense();
        let x: Vec<f64> = (0..20).map(|_| rng.normal()).collect();
        let via_op = sys.apply(&x);
        let via_dense = dense.matvec(&x).unwrap();
        for (a, b) in via_op.iter().zip(via_dense.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn system_matrix_is_positive_definite_for_positive_theta() {
        let mut rng = RngStream::new(17);
        let hg = random_hypergraph(25, 30, &mut rng);
        let sys = SystemMatrix::from_model(&hg, &vec![1.0; 30], 1.0 / 9.0).unwrap();
        for _ in 0..20 {
            let x: Vec<f64> = (0..25).map(|_| rng.normal()).collect();
            let norm_sq: f64 = x.iter().map(|v| v * v).sum();
            if norm_sq == 0.0 {
                continue;
            }
            let xx = sys.apply(&x);
            let quad: f64 = x.iter().zip(xx.iter()).map(|(a, b)| a * b).sum();
            assert!(quad > 0.0, "quadratic form {quad} not positive");
        }
    }

    #[test]
    fn system_matrix_rejects_bad_inputs() {
        let asym = SparseMatrix::from_triplets(2, 2, vec![(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            SystemMatrix::new(asym, 0.5),
            Err(Error::NonSymmetric { .. })
        ));
        let hg = toy_chain();
        let a = build_adjacency(&hg, &[1.0, 1.0]).unwrap();
        assert!(SystemMatrix::new(a.clone(), 0.0).is_err());
        assert!(SystemMatrix::new(a, f64::INFINITY).is_err());
    }

    #[test]
    fn quadratic_is_zero_exactly_on_degree_aligned_vectors() {
        let hg = HypergraphModel::from_edges(2, &[vec![0, 1]]).unwrap();
        // Equal degrees, equal values: perfectly smooth.
        assert!(laplacian_quadratic(&hg, &[1.0], &[1.0, 1.0]).unwrap().abs() < 1e-15);
        // Maximally rough assignment on one edge of two unit-degree
        // vertices: the single pair contributes (1 - (-1))^2 / delta = 2.
        let rough = laplacian_quadratic(&hg, &[1.0], &[1.0, -1.0]).unwrap();
        assert!((rough - 2.0).abs() < 1e-15);
        // The zero vector is always perfectly smooth.
        assert_eq!(laplacian_quadratic(&hg, &[1.0], &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_matches_the_dense_identity() {
        let mut rng = RngStream::new(23);
        for _ in 0..5 {
            let hg = random_hypergraph(18, 26, &mut rng);
            let w: Vec<f64> = (0..26).map(|_| rng.uniform() + 0.2).collect();
            let f: Vec<f64> = (0..18).map(|_| rng.normal()).collect();
            let omega = laplacian_quadratic(&hg, &w, &f).unwrap();
            let a = build_adjacency(&hg, &w).unwrap();
            let af = a.matvec(&f).unwrap();
            let faf: f64 = f.iter().zip(af.iter()).map(|(x, y)| x * y).sum();
            let ff: f64 = f.iter().map(|v| v * v).sum();
            let dense_form = ff - faf;
            assert!(
                (omega - dense_form).abs() <= 1e-11 * (1.0 + dense_form.abs()),
                "edge-wise {omega} vs dense {dense_form}"
            );
        }
    }

    #[test]
    fn segments_cover_lookup_and_round_trip() {
        let segs = VertexSegments::from_lens(&[
            (VertexType::Image, 3),
            (VertexType::User, 2),
            (VertexType::Tag, 4),
        ])
        .unwrap();
        assert_eq!(segs.dim(), 9);
        assert_eq!(segs.range(VertexType::User), Some((3, 5)));
        assert_eq!(segs.count(VertexType::Tag), 4);
        assert_eq!(segs.type_of(0), Some(VertexType::Image));
        assert_eq!(segs.type_of(4), Some(VertexType::User));
        assert_eq!(segs.type_of(8), Some(VertexType::Tag));
        assert_eq!(segs.type_of(9), None);
        assert_eq!(segs.range(VertexType::Geo), None);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("segments.tsv");
        segs.save(&path).unwrap();
        let back = VertexSegments::load(&path).unwrap();
        assert_eq!(segs, back);
    }

    #[test]
    fn segments_reject_gaps_and_duplicates() {
        assert!(VertexSegments::new(vec![(VertexType::Image, 0, 2), (VertexType::User, 3, 5)])
            .is_err());
        assert!(VertexSegments::new(vec![(VertexType::Image, 1, 2)]).is_err());
        assert!(VertexSegments::new(vec![(VertexType::Image, 0, 0)]).is_err());
        assert!(VertexSegments::new(vec![
            (VertexType::Image, 0, 2),
            (VertexType::Image, 2, 4)
        ])
        .is_err());
    }

    #[test]
    fn vertex_type_codes_round_trip() {
        for ty in VertexType::ALL {
            let parsed: VertexType = ty.code().parse().unwrap();
            assert_eq!(parsed, ty);
        }
        assert!("Xyz".parse::<VertexType>().is_err());
    }
}
