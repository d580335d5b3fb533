//! End-to-end tag ranking on shared-photo hypergraphs.
//!
//! This module ties the numerical layers together: synthetic corpus
//! generation, per-image query construction, interchangeable solver
//! back-ends, ranking evaluation, hyperedge-weight learning, and a timing
//! harness. Two protocols are offered:
//!
//! * [`run_baseline`] ranks every ground-truth image once with uniform
//!   hyperedge weights and reports macro-averaged F1 at the requested
//!   cutoffs.
//! * [`run_alternating`] interleaves ranking with weight learning: each
//!   outer pass rebuilds the system operator from the current weights,
//!   prepares the solver once, ranks every ground-truth image, and (on all
//!   but the final pass) takes projected descent steps on the edge weights
//!   after each image. The final pass only ranks, so the reported quality
//!   reflects the learned weights.

mod bench;
mod dataset;
mod eval;
mod query;
mod solver;
mod synth;

pub use bench::{run_bench, write_bench_csv, write_bench_jsonl, BenchRow};
pub use dataset::{Dataset, GroundTruth, INCIDENCE_FILE, SEGMENTS_FILE, TRUTH_FILE};
pub use eval::{
    evaluate, f1_score, observed_tags, top_tags, top_tags_excluding, write_report_jsonl,
    EvalReport, ImageEval, ReportBuilder, DEFAULT_EVAL_AT,
};
pub use query::{build_query, resolve_owner};
pub use solver::{
    prepare, rank_iterative, PreparedSolver, SolverKind, SolverSettings, DEFAULT_LEAF_THRESHOLD,
    DEFAULT_RESIDUAL_PROBES,
};
pub use synth::{
    generate, SynthSpec, DEFAULT_IN_CANDIDATE_CAP, DEFAULT_OUT_CANDIDATE_CAP, DEFAULT_P_IN,
    DEFAULT_P_OUT,
};

use serde::Serialize;
use std::fs;
use std::path::Path;

use crate::hypergraph::SystemMatrix;
use crate::learning::{learn_weights, objective, FrozenSmoothness, LearnConfig, WeightState};
use crate::{Error, Result};

/// Default diffusion trade-off. Query mass keeps weight 1/(1+theta) = 0.9
/// through the smoothing operator.
pub const DEFAULT_THETA: f64 = 1.0 / 9.0;
/// Default number of outer rank/learn passes.
pub const DEFAULT_OUTER_PASSES: usize = 2;
/// Default per-pass leaf-size schedule for the block back-end: early passes
/// use small leaves while weights are still moving, later passes the full
/// default leaf size. Entries past the end repeat the last value.
pub const DEFAULT_PASS_LEAF_THRESHOLDS: [usize; 2] = [50, DEFAULT_LEAF_THRESHOLD];

/// Settings for a single uniform-weight evaluation sweep.
#[derive(Debug, Clone)]
pub struct BaselineConfig {
    pub theta: f64,
    pub solver: SolverKind,
    pub settings: SolverSettings,
    /// Ranking cutoffs for F1.
    pub at: Vec<usize>,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            theta: DEFAULT_THETA,
            solver: SolverKind::Direct,
            settings: SolverSettings::default(),
            at: DEFAULT_EVAL_AT.to_vec(),
        }
    }
}

/// Rank every ground-truth image with uniform hyperedge weights.
pub fn run_baseline(dataset: &Dataset, cfg: &BaselineConfig) -> Result<EvalReport> {
    let weights = vec![1.0; dataset.hypergraph.n_edges()];
    let sys = SystemMatrix::from_model(&dataset.hypergraph, &weights, cfg.theta)?;
    let prepared = prepare(&sys, cfg.solver, &cfg.settings)?;
    evaluate(dataset, &sys, &prepared, &cfg.at)
}

/// Settings for the alternating rank/learn protocol.
#[derive(Debug, Clone)]
pub struct AlternatingConfig {
    pub theta: f64,
    pub solver: SolverKind,
    pub settings: SolverSettings,
    pub learn: LearnConfig,
    /// Total passes; the last one ranks without learning.
    pub outer_passes: usize,
    /// Per-pass leaf sizes for the block back-end; the last entry repeats
    /// for any passes beyond the schedule.
    pub pass_leaf_thresholds: Vec<usize>,
    /// Ranking cutoffs for F1.
    pub at: Vec<usize>,
}

impl Default for AlternatingConfig {
    fn default() -> Self {
        AlternatingConfig {
            theta: DEFAULT_THETA,
            solver: SolverKind::Direct,
            settings: SolverSettings::default(),
            learn: LearnConfig::default(),
            outer_passes: DEFAULT_OUTER_PASSES,
            pass_leaf_thresholds: DEFAULT_PASS_LEAF_THRESHOLDS.to_vec(),
            at: DEFAULT_EVAL_AT.to_vec(),
        }
    }
}

/// What one outer pass did.
#[derive(Debug, Clone, Serialize)]
pub struct PassSummary {
    /// 1-based pass number.
    pub pass: usize,
    /// Leaf size the block back-end used this pass.
    pub leaf_threshold: usize,
    /// Macro F1 at each cutoff, ranked with the weights this pass started
    /// from.
    pub macro_f1: Vec<f64>,
    /// Weights pinned at zero when the pass ended.
    pub n_active: usize,
    /// Whether weight updates ran during this pass.
    pub learned: bool,
    /// Total objective decrease accumulated over the pass's updates.
    pub objective_drop: f64,
}

/// Result of [`run_alternating`]: per-pass summaries, the full per-pass
/// evaluation reports, and the weights the final pass ranked with.
#[derive(Debug, Clone)]
pub struct AlternatingOutcome {
    pub at: Vec<usize>,
    pub passes: Vec<PassSummary>,
    pub reports: Vec<EvalReport>,
    pub final_weights: Vec<f64>,
}

impl AlternatingOutcome {
    /// Report for the last pass (ranking quality under learned weights).
    pub fn final_report(&self) -> &EvalReport {
        self.reports.last().expect("at least one pass")
    }
}

/// Alternate ranking sweeps with hyperedge-weight learning.
///
/// Pass `p` ranks with the weights produced by pass `p - 1` (pass 1 starts
/// uniform). On every pass except the last, each ranked image contributes
/// projected descent steps to a single shared weight state; the per-edge
/// gains for those steps are frozen at the weights the pass started from,
/// matching the operator the ranking used. Pinned-at-zero bookkeeping
/// resets at each pass boundary.
pub fn run_alternating(dataset: &Dataset, cfg: &AlternatingConfig) -> Result<AlternatingOutcome> {
    if cfg.outer_passes == 0 {
        return Err(Error::InvalidArgument(
            "alternating protocol needs at least one pass".into(),
        ));
    }
    if cfg.pass_leaf_thresholds.is_empty() {
        return Err(Error::InvalidArgument(
            "pass leaf-size schedule must not be empty".into(),
        ));
    }
    if dataset.truth.is_empty() {
        return Err(Error::InvalidArgument(
            "alternating protocol needs ground-truth images".into(),
        ));
    }
    let hg = &dataset.hypergraph;
    let mut weights = WeightState::uniform(hg.n_edges())?;
    let mut passes = Vec::with_capacity(cfg.outer_passes);
    let mut reports = Vec::with_capacity(cfg.outer_passes);
    // The graph is fixed across passes, so each image's already-carried
    // tags (excluded from recommendation) are too.
    let observed_by_image: Vec<(usize, Vec<usize>)> = dataset
        .truth
        .images()
        .map(|img| Ok((img, observed_tags(hg, &dataset.segments, img)?)))
        .collect::<Result<_>>()?;

    for pass in 1..=cfg.outer_passes {
        weights.reset_active();
        let schedule_idx = (pass - 1).min(cfg.pass_leaf_thresholds.len() - 1);
        let threshold = cfg.pass_leaf_thresholds[schedule_idx];
        let settings = SolverSettings {
            leaf_threshold: threshold,
            // Fresh sketches each pass so no pass reuses another's
            // random projections.
            seed: cfg.settings.seed.wrapping_add((pass - 1) as u64),
            ..cfg.settings.clone()
        };
        let sys = SystemMatrix::from_model(hg, weights.weights(), cfg.theta)?;
        let prepared = prepare(&sys, cfg.solver, &settings)?;
        let learn_this_pass = pass < cfg.outer_passes;
        let freeze_weights = weights.weights().to_vec();

        let mut builder = ReportBuilder::new(&cfg.at)?;
        let mut objective_drop = 0.0;
        for (image, observed) in &observed_by_image {
            let image = *image;
            let truth = dataset.truth.tags_for(image).expect("image comes from truth");
            let y = build_query(hg, &sys, &dataset.segments, image, truth)?;
            let f = prepared.rank(&sys, &y)?;
            builder.push(image, &f, &dataset.segments, truth, observed)?;
            if learn_this_pass {
                let frozen = FrozenSmoothness::new(hg, &freeze_weights, &f)?;
                let before = objective(&frozen, weights.weights(), cfg.learn.kappa);
                let mut trace = Vec::new();
                let summary = learn_weights(&mut weights, &frozen, &cfg.learn, &mut trace)?;
                objective_drop += before - summary.final_objective;
            }
        }
        let report = builder.finish();
        passes.push(PassSummary {
            pass,
            leaf_threshold: threshold,
            macro_f1: report.macro_f1.clone(),
            n_active: weights.n_active(),
            learned: learn_this_pass,
            objective_drop,
        });
        reports.push(report);
    }

    Ok(AlternatingOutcome {
        at: cfg.at.clone(),
        passes,
        reports,
        final_weights: weights.weights().to_vec(),
    })
}

/// Write pass summaries as JSON lines.
pub fn write_pass_summaries_jsonl<P: AsRef<Path>>(
    path: P,
    passes: &[PassSummary],
) -> Result<()> {
    let mut out = String::new();
    for p in passes {
        out.push_str(&serde_json::to_string(p).expect("pass summaries serialize"));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}
