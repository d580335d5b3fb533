//! Hyperedge weight learning by projected steepest descent.
//!
//! Given a ranking vector `f` computed at some reference weights, each
//! edge gets a frozen gain `c_e = (sum_{u in e} f_u / sqrt(d_u))^2 /
//! delta(e)` — how much that edge's smoothness term rewards weight. The
//! inner loop then minimizes
//!
//! ```text
//! O(w) = -sum_e c_e w_e + kappa * sum_e w_e^2
//! ```
//!
//! over the simplex `{ w >= 0, sum w = const }`: concentrate weight on
//! edges the ranking flows along, with a ridge term pulling back toward
//! uniformity. The gradient is `-c_e + 2 kappa w_e`. Descent directions
//! are the gradient with its mean over free coordinates removed (so the
//! equality constraint is preserved); coordinates driven negative are
//! clamped to zero and pinned for the rest of the loop, with the lost mass
//! redistributed over the remaining free coordinates. A step that would
//! raise the objective is retried with the step size halved, with no
//! regrowth, until a floor is reached.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::hypergraph::{degrees, HypergraphModel};
use crate::{Error, Result};

/// Default ridge coefficient.
pub const DEFAULT_KAPPA: f64 = 0.1;
/// Default initial step size.
pub const DEFAULT_MU: f64 = 0.05;
/// Default descent steps per invocation. Callers that learn repeatedly
/// (once per ranked image) accumulate plenty of total movement, so the
/// per-call budget stays modest.
pub const DEFAULT_INNER_STEPS: usize = 10;
/// Step sizes below this end the inner loop.
pub const DEFAULT_MU_FLOOR: f64 = 1e-14;

/// Per-edge gains frozen at the weights that produced the ranking vector.
#[derive(Debug, Clone)]
pub struct FrozenSmoothness {
    edge_gain: Vec<f64>,
}

impl FrozenSmoothness {
    /// Evaluate the gains of `f` with degrees taken at `freeze_weights`.
    pub fn new(hg: &HypergraphModel, freeze_weights: &[f64], f: &[f64]) -> Result<Self> {
        if f.len() != hg.n_vertices() {
            return Err(Error::DimensionMismatch {
                context: "frozen smoothness vector",
                expected: hg.n_vertices(),
                got: f.len(),
            });
        }
        let deg = degrees(hg, freeze_weights)?;
        let g: Vec<f64> = f
            .iter()
            .zip(deg.vertex.iter())
            .map(|(fi, di)| fi / di.sqrt())
            .collect();
        let mut edge_gain = Vec::with_capacity(hg.n_edges());
        for e in 0..hg.n_edges() {
            let mut sum = 0.0;
            for &v in hg.edge_members(e) {
                sum += g[v];
            }
            edge_gain.push(sum * sum / deg.edge[e]);
        }
        Ok(FrozenSmoothness { edge_gain })
    }

    pub fn n_edges(&self) -> usize {
        self.edge_gain.len()
    }

    pub fn edge_gain(&self) -> &[f64] {
        &self.edge_gain
    }
}

/// Edge weights plus the set of coordinates currently pinned at zero.
#[derive(Debug, Clone)]
pub struct WeightState {
    weights: Vec<f64>,
    active: Vec<bool>,
    total: f64,
}

impl WeightState {
    /// All-ones weights — the unweighted baseline. The preserved simplex
    /// total is therefore the number of edges.
    pub fn uniform(n_edges: usize) -> Result<Self> {
        if n_edges == 0 {
            return Err(Error::InvalidArgument(
                "weight state needs at least one edge".into(),
            ));
        }
        Ok(WeightState {
            weights: vec![1.0; n_edges],
            active: vec![false; n_edges],
            total: n_edges as f64,
        })
    }

    /// Start from explicit weights; their sum becomes the preserved total.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument(
                "weight state needs at least one edge".into(),
            ));
        }
        for (e, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "weight {e} is {w}, expected finite and non-negative"
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument(
                "weights must carry positive total mass".into(),
            ));
        }
        let active = vec![false; weights.len()];
        Ok(WeightState {
            weights,
            active,
            total,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The conserved simplex mass.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn n_edges(&self) -> usize {
        self.weights.len()
    }

    pub fn n_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn is_active(&self, e: usize) -> bool {
        self.active[e]
    }

    /// Unpin every coordinate — called at the start of an outer pass so a
    /// fresh ranking can resurrect edges zeroed under the previous one.
    pub fn reset_active(&mut self) {
        for a in self.active.iter_mut() {
            *a = false;
        }
    }
}

/// `O(w) = -sum_e c_e w_e + kappa ||w||^2`.
pub fn objective(frozen: &FrozenSmoothness, weights: &[f64], kappa: f64) -> f64 {
    let mut linear = 0.0;
    let mut sq = 0.0;
    for (c, w) in frozen.edge_gain.iter().zip(weights.iter()) {
        linear += c * w;
        sq += w * w;
    }
    -linear + kappa * sq
}

/// `dO/dw_e = -c_e + 2 kappa w_e`.
pub fn gradient(frozen: &FrozenSmoothness, weights: &[f64], kappa: f64) -> Vec<f64> {
    frozen
        .edge_gain
        .iter()
        .zip(weights.iter())
        .map(|(c, w)| -c + 2.0 * kappa * w)
        .collect()
}

/// One projected descent step of size `mu`, updating weights in place.
///
/// Pinned coordinates do not move; newly clamped ones join the pinned set.
/// Fails with [`Error::DegenerateSimplex`] if no free coordinate remains
/// to carry the simplex mass.
pub fn steepest_descent_step(
    state: &mut WeightState,
    frozen: &FrozenSmoothness,
    kappa: f64,
    mu: f64,
) -> Result<()> {
    let n = state.weights.len();
    if frozen.n_edges() != n {
        return Err(Error::DimensionMismatch {
            context: "steepest_descent_step gains",
            expected: n,
            got: frozen.n_edges(),
        });
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step size must be positive and finite, got {mu}"
        )));
    }
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "kappa must be finite and non-negative, got {kappa}"
        )));
    }

    let g = gradient(frozen, &state.weights, kappa);

    // Project the gradient onto the constraint plane restricted to free
    // coordinates: remove its mean there, leave pinned ones untouched.
    let free: Vec<usize> = (0..n).filter(|&e| !state.active[e]).collect();
    if free.is_empty() {
        return Err(Error::DegenerateSimplex { n });
    }
    let mean: f64 = free.iter().map(|&e| g[e]).sum::<f64>() / free.len() as f64;
    for &e in &free {
        state.weights[e] -= mu * (g[e] - mean);
    }

    // Clamp-and-redistribute until feasible: restore the exact total over
    // the free coordinates, pin any that land negative, repeat. Every
    // round either finishes or pins at least one coordinate.
    loop {
        let free: Vec<usize> = (0..n).filter(|&e| !state.active[e]).collect();
        if free.is_empty() {
            return Err(Error::DegenerateSimplex { n });
        }
        let sum: f64 = state.weights.iter().sum();
        let adjust = (state.total - sum) / free.len() as f64;
        for &e in &free {
            state.weights[e] += adjust;
        }
        let mut clamped = false;
        for &e in &free {
            if state.weights[e] < 0.0 {
                state.weights[e] = 0.0;
                state.active[e] = true;
                clamped = true;
            }
        }
        if !clamped {
            break;
        }
    }
    Ok(())
}

/// Configuration for [`learn_weights`].
#[derive(Debug, Clone)]
pub struct LearnConfig {
    pub kappa: f64,
    /// Initial step size; halves on rejected steps and never regrows.
    pub mu: f64,
    pub inner_steps: usize,
    pub mu_floor: f64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            kappa: DEFAULT_KAPPA,
            mu: DEFAULT_MU,
            inner_steps: DEFAULT_INNER_STEPS,
            mu_floor: DEFAULT_MU_FLOOR,
        }
    }
}

/// One accepted inner step, for trace output.
#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub step: usize,
    pub objective: f64,
    pub n_active: usize,
    pub mu: f64,
}

/// What the inner loop did.
#[derive(Debug, Clone)]
pub struct LearnSummary {
    pub steps_taken: usize,
    pub final_objective: f64,
    pub final_mu: f64,
    /// True when the loop stopped because the step size hit the floor.
    pub floor_hit: bool,
}

/// Run up to `inner_steps` accepted descent steps.
///
/// Each step is admitted only if it does not raise the frozen objective;
/// a raising step is retried with `mu` halved. Once `mu` falls below
/// `mu_floor` the loop ends early. One [`TraceEntry`] is pushed per
/// accepted step.
pub fn learn_weights(
    state: &mut WeightState,
    frozen: &FrozenSmoothness,
    cfg: &LearnConfig,
    trace: &mut Vec<TraceEntry>,
) -> Result<LearnSummary> {
    if !(cfg.mu.is_finite() && cfg.mu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "initial step size must be positive and finite, got {}",
            cfg.mu
        )));
    }
    if !(cfg.mu_floor.is_finite() && cfg.mu_floor > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step floor must be positive and finite, got {}",
            cfg.mu_floor
        )));
    }
    let mut mu = cfg.mu;
    let mut obj = objective(frozen, &state.weights, cfg.kappa);
    let mut steps_taken = 0;
    let mut floor_hit = false;

    'outer: for step in 1..=cfg.inner_steps {
        loop {
            if mu < cfg.mu_floor {
                floor_hit = true;
                break 'outer;
            }
            let mut candidate = state.clone();
            steepest_descent_step(&mut candidate, frozen, cfg.kappa, mu)?;
            let cand_obj = objective(frozen, &candidate.weights, cfg.kappa);
            if cand_obj <= obj {
                *state = candidate;
                obj = cand_obj;
                break;
            }
            mu *= 0.5;
        }
        steps_taken = step;
        trace.push(TraceEntry {
            step,
            objective: obj,
            n_active: state.n_active(),
            mu,
        });
    }

    Ok(LearnSummary {
        steps_taken,
        final_objective: obj,
        final_mu: mu,
        floor_hit,
    })
}

/// Write one JSON object per line, one line per trace entry.
pub fn write_trace_jsonl<P: AsRef<Path>>(path: P, entries: &[TraceEntry]) -> Result<()> {
    let mut out = String::new();
    for entry in entries {
        out.push_str(&serde_json::to_string(entry).expect("trace entries serialize"));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}
