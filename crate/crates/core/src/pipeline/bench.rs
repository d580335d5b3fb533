//! Timing harness comparing solver back-ends across corpus sizes.
//!
//! For each requested size a synthetic corpus is generated, the system
//! operator is built once, and every back-end is timed on its one-time
//! preparation plus a fixed number of ranking queries. Rows go to a CSV
//! table (and optionally JSON lines) for plotting.

use std::fs;
use std::hint::black_box;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::hypergraph::SystemMatrix;
use crate::{Error, Result};

use super::query::build_query;
use super::solver::{prepare, SolverKind, SolverSettings};
use super::synth::{generate, SynthSpec};

/// One timed (size, solver) cell.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    /// Total vertices of the generated corpus.
    pub size: usize,
    pub solver: String,
    /// One-time preparation cost.
    pub prep_seconds: f64,
    /// Mean ranking cost per query.
    pub per_query_seconds: f64,
    /// Queries timed.
    pub queries: usize,
    /// Preparation plus all queries.
    pub total_seconds: f64,
}

/// Time every solver on every corpus size.
pub fn run_bench(
    sizes: &[usize],
    solvers: &[SolverKind],
    theta: f64,
    settings: &SolverSettings,
    queries_per_size: usize,
) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() || solvers.is_empty() {
        return Err(Error::InvalidArgument(
            "bench needs at least one size and one solver".into(),
        ));
    }
    if queries_per_size == 0 {
        return Err(Error::InvalidArgument(
            "bench needs at least one query per size".into(),
        ));
    }
    let mut rows = Vec::with_capacity(sizes.len() * solvers.len());
    for &size in sizes {
        let spec = SynthSpec::scaled(size, settings.seed);
        let dataset = generate(&spec)?;
        let weights = vec![1.0; dataset.hypergraph.n_edges()];
        let sys = SystemMatrix::from_model(&dataset.hypergraph, &weights, theta)?;
        let images: Vec<usize> = dataset.truth.images().take(queries_per_size).collect();
        // Queries are built once outside the timers: their cost is shared
        // by all back-ends and is not what this harness compares.
        let queries: Vec<Vec<f64>> = images
            .iter()
            .map(|&img| {
                let truth = dataset.truth.tags_for(img).expect("truth image");
                build_query(&dataset.hypergraph, &sys, &dataset.segments, img, truth)
            })
            .collect::<Result<_>>()?;

        for &kind in solvers {
            let prep_start = Instant::now();
            let prepared = prepare(&sys, kind, settings)?;
            let prep_seconds = prep_start.elapsed().as_secs_f64();

            let solve_start = Instant::now();
            for y in &queries {
                let f = prepared.rank(&sys, y)?;
                black_box(f);
            }
            let solve_seconds = solve_start.elapsed().as_secs_f64();

            rows.push(BenchRow {
                size: dataset.segments.dim(),
                solver: kind.name().to_string(),
                prep_seconds,
                per_query_seconds: solve_seconds / queries.len() as f64,
                queries: queries.len(),
                total_seconds: prep_seconds + solve_seconds,
            });
        }
    }
    Ok(rows)
}

/// Write rows as a CSV table with a header line.
pub fn write_bench_csv<P: AsRef<Path>>(path: P, rows: &[BenchRow]) -> Result<()> {
    let mut out = String::from("size,solver,prep_seconds,per_query_seconds,queries,total_seconds\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.9},{:.9},{},{:.9}\n",
            r.size, r.solver, r.prep_seconds, r.per_query_seconds, r.queries, r.total_seconds
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write rows as JSON lines.
pub fn write_bench_jsonl<P: AsRef<Path>>(path: P, rows: &[BenchRow]) -> Result<()> {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("bench rows serialize"));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_produces_one_row_per_size_and_solver() {
        let rows = run_bench(
            &[150],
            &SolverKind::ALL,
            1.0 / 9.0,
            &SolverSettings {
                leaf_threshold: 40,
                ..SolverSettings::default()
            },
            3,
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert!(row.prep_seconds >= 0.0);
            assert!(row.per_query_seconds > 0.0);
            assert!(row.total_seconds >= row.prep_seconds);
            assert_eq!(row.queries, 3);
        }
        let solvers: Vec<&str> = rows.iter().map(|r| r.solver.as_str()).collect();
        assert_eq!(solvers, vec!["direct", "block-rsvd", "cg"]);
    }

    #[test]
    fn csv_has_a_header_and_one_line_per_row() {
        let rows = vec![BenchRow {
            size: 100,
            solver: "direct".into(),
            prep_seconds: 0.5,
            per_query_seconds: 0.001,
            queries: 4,
            total_seconds: 0.504,
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bench.csv");
        write_bench_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            "size,solver,prep_seconds,per_query_seconds,queries,total_seconds"
        );
        assert!(lines[1].starts_with("100,direct,"));
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let settings = SolverSettings::default();
        assert!(run_bench(&[], &SolverKind::ALL, 0.1, &settings, 1).is_err());
        assert!(run_bench(&[100], &[], 0.1, &settings, 1).is_err());
        assert!(run_bench(&[100], &SolverKind::ALL, 0.1, &settings, 0).is_err());
    }
}
