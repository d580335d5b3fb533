//! Ranking evaluation: top-k tag selection and macro-averaged F1.
//!
//! Tags are ordered by descending score; equal scores break toward the
//! lower index so runs are reproducible bit for bit. Recommendation only
//! proposes *new* tags: the tags an image already carries are excluded
//! from its ranked list before cutoffs apply. For each image and cutoff
//! `k`, precision is hits over the returned count, recall is hits over
//! the held-out count, and their harmonic mean is 0 whenever both are 0.
//! Per-cutoff scores are macro-averaged over images.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::hypergraph::{HypergraphModel, SystemMatrix, VertexSegments, VertexType};
use crate::{Error, Result};

use super::dataset::Dataset;
use super::query::build_query;
use super::solver::PreparedSolver;

/// Default evaluation cutoffs.
pub const DEFAULT_EVAL_AT: [usize; 4] = [1, 2, 5, 10];

/// The `k` highest-scoring tags, descending score, ascending index on
/// ties. Returns fewer than `k` only when the tag span is smaller.
pub fn top_tags(f: &[f64], segments: &VertexSegments, k: usize) -> Result<Vec<usize>> {
    top_tags_excluding(f, segments, k, &[])
}

/// Like [`top_tags`], but skips the tags in `exclude` (ascending sorted) —
/// typically the tags an image already carries, which are not candidates
/// for recommendation.
pub fn top_tags_excluding(
    f: &[f64],
    segments: &VertexSegments,
    k: usize,
    exclude: &[usize],
) -> Result<Vec<usize>> {
    let (tag_start, tag_end) = segments
        .range(VertexType::Tag)
        .ok_or_else(|| Error::InvalidArgument("segments carry no tag span".into()))?;
    if f.len() != segments.dim() {
        return Err(Error::DimensionMismatch {
            context: "ranking vector vs segments",
            expected: segments.dim(),
            got: f.len(),
        });
    }
    let mut tags: Vec<usize> = (tag_start..tag_end)
        .filter(|t| exclude.binary_search(t).is_err())
        .collect();
    tags.sort_by(|&a, &b| {
        f[b].partial_cmp(&f[a])
            .expect("ranking scores are finite")
            .then(a.cmp(&b))
    });
    tags.truncate(k);
    Ok(tags)
}

/// The tags `image` already shares an edge with, ascending. These are the
/// tags recommendation must not propose again.
pub fn observed_tags(
    hg: &HypergraphModel,
    segments: &VertexSegments,
    image: usize,
) -> Result<Vec<usize>> {
    let (tag_start, tag_end) = segments
        .range(VertexType::Tag)
        .ok_or_else(|| Error::InvalidArgument("segments carry no tag span".into()))?;
    if image >= hg.n_vertices() {
        return Err(Error::IndexOutOfRange {
            context: "observed tags of image",
            index: image,
            limit: hg.n_vertices(),
        });
    }
    let mut tags: Vec<usize> = hg
        .vertex_edges(image)
        .iter()
        .flat_map(|&e| hg.edge_members(e).iter().copied())
        .filter(|&v| v >= tag_start && v < tag_end)
        .collect();
    tags.sort_unstable();
    tags.dedup();
    Ok(tags)
}

/// F1 between a returned list and the held-out tags.
pub fn f1_score(returned: &[usize], truth: &[usize]) -> f64 {
    if returned.is_empty() || truth.is_empty() {
        return 0.0;
    }
    let hits = returned.iter().filter(|t| truth.contains(t)).count() as f64;
    let precision = hits / returned.len() as f64;
    let recall = hits / truth.len() as f64;
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Per-image evaluation record.
#[derive(Debug, Clone, Serialize)]
pub struct ImageEval {
    pub image: usize,
    /// Hits at each cutoff, aligned with the report's `at` list.
    pub hits: Vec<usize>,
    /// F1 at each cutoff, aligned with the report's `at` list.
    pub f1: Vec<f64>,
}

/// Evaluation of one ranking configuration over a dataset.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    /// Cutoffs the scores are reported at.
    pub at: Vec<usize>,
    /// Macro-averaged F1 per cutoff.
    pub macro_f1: Vec<f64>,
    pub images: Vec<ImageEval>,
}

impl EvalReport {
    /// Macro F1 at a specific cutoff, if it was evaluated.
    pub fn macro_f1_at(&self, k: usize) -> Option<f64> {
        self.at
            .iter()
            .position(|&a| a == k)
            .map(|i| self.macro_f1[i])
    }
}

/// Build an [`EvalReport`] incrementally, one image at a time.
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    at: Vec<usize>,
    images: Vec<ImageEval>,
}

impl ReportBuilder {
    pub fn new(at: &[usize]) -> Result<Self> {
        if at.is_empty() {
            return Err(Error::InvalidArgument(
                "evaluation needs at least one cutoff".into(),
            ));
        }
        if at.iter().any(|&k| k == 0) {
            return Err(Error::InvalidArgument(
                "evaluation cutoffs must be >= 1".into(),
            ));
        }
        Ok(ReportBuilder {
            at: at.to_vec(),
            images: Vec::new(),
        })
    }

    /// Score one image's ranking vector against its held-out tags.
    /// `observed` (ascending) lists the tags the image already carries;
    /// they are excluded from the recommendation list.
    pub fn push(
        &mut self,
        image: usize,
        f: &[f64],
        segments: &VertexSegments,
        truth: &[usize],
        observed: &[usize],
    ) -> Result<()> {
        let mut hits = Vec::with_capacity(self.at.len());
        let mut f1 = Vec::with_capacity(self.at.len());
        for &k in &self.at {
            let top = top_tags_excluding(f, segments, k, observed)?;
            hits.push(top.iter().filter(|t| truth.contains(t)).count());
            f1.push(f1_score(&top, truth));
        }
        self.images.push(ImageEval { image, hits, f1 });
        Ok(())
    }

    pub fn finish(self) -> EvalReport {
        let n = self.images.len().max(1) as f64;
        let macro_f1 = (0..self.at.len())
            .map(|i| self.images.iter().map(|img| img.f1[i]).sum::<f64>() / n)
            .collect();
        EvalReport {
            at: self.at,
            macro_f1,
            images: self.images,
        }
    }
}

/// Rank every held-out image with a prepared solver and score the run.
pub fn evaluate(
    dataset: &Dataset,
    sys: &SystemMatrix,
    solver: &PreparedSolver,
    at: &[usize],
) -> Result<EvalReport> {
    let mut builder = ReportBuilder::new(at)?;
    for image in dataset.truth.images() {
        let truth = dataset
            .truth
            .tags_for(image)
            .expect("iterating truth images");
        let y = build_query(&dataset.hypergraph, sys, &dataset.segments, image, truth)?;
        let f = solver.rank(sys, &y)?;
        let observed = observed_tags(&dataset.hypergraph, &dataset.segments, image)?;
        builder.push(image, &f, &dataset.segments, truth, &observed)?;
    }
    Ok(builder.finish())
}

/// Write a report as JSON lines: one summary line, then one line per
/// image.
pub fn write_report_jsonl<P: AsRef<Path>>(path: P, report: &EvalReport) -> Result<()> {
    #[derive(Serialize)]
    struct SummaryLine<'a> {
        kind: &'static str,
        at: &'a [usize],
        macro_f1: &'a [f64],
        n_images: usize,
    }
    #[derive(Serialize)]
    struct ImageLine<'a> {
        kind: &'static str,
        #[serde(flatten)]
        eval: &'a ImageEval,
    }
    let mut out = String::new();
    out.push_str(
        &serde_json::to_string(&SummaryLine {
            kind: "summary",
            at: &report.at,
            macro_f1: &report.macro_f1,
            n_images: report.images.len(),
        })
        .expect("summary serializes"),
    );
    out.push('\n');
    for eval in &report.images {
        out.push_str(
            &serde_json::to_string(&ImageLine {
                kind: "image",
                eval,
            })
            .expect("image line serializes"),
        );
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}
