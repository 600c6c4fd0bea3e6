use serde::Serialize;

use super::RunRecord;
use crate::tuner::scoring;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub runs: usize,
    pub verified: usize,
    /// `"verified/runs"`, or `"n/a"` for an empty batch.
    pub solve_rate: String,
    /// Among verified runs with reported timings.
    pub median_elapsed_s: Option<f64>,
    /// Among verified runs.
    pub median_iterations: Option<f64>,
    /// Tuning score, when the per-run time limit is known.
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    pub records: Vec<RunRecord>,
    pub summary: BatchSummary,
}

fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

/// Bundles records with their aggregates. `maxtime` is the per-run
/// wall-clock limit; without it no score is computed.
pub fn run_manifest(records: Vec<RunRecord>, maxtime: Option<f64>) -> BatchReport {
    let verified: Vec<&RunRecord> = records.iter().filter(|r| r.verified).collect();
    let solve_rate = if records.is_empty() {
        "n/a".to_string()
    } else {
        format!("{}/{}", verified.len(), records.len())
    };
    let summary = BatchSummary {
        runs: records.len(),
        verified: verified.len(),
        solve_rate,
        median_elapsed_s: median(verified.iter().filter_map(|r| r.reported_elapsed()).collect()),
        median_iterations: median(verified.iter().map(|r| r.iterations as f64).collect()),
        score: maxtime.and_then(|t| scoring(&records, t).ok()),
    };
    BatchReport { records, summary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{EpaParams, InstanceSpec};
    use crate::harness::RunStatus;
    use crate::heuristics::Budget;
    use crate::tuner::Assignment;
    use std::time::Duration;

    fn record(verified: bool, elapsed: f64) -> RunRecord {
        RunRecord {
            instance: InstanceSpec::Epa(EpaParams { length: 3, distance: 3, rows: 3 }),
            algorithm: "x".into(),
            assignment: Assignment::new(),
            seed: 1,
            status: if verified { RunStatus::Solved } else { RunStatus::Timeout },
            budget: Budget::seconds(4.0),
            elapsed: Duration::from_secs_f64(elapsed),
            iterations: 10,
            final_cost: 0,
            verified,
            solution: None,
            error: None,
        }
    }

    #[test]
    fn empty_report() {
        let r = run_manifest(vec![], None);
        assert_eq!(r.summary.solve_rate, "n/a");
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["records"].as_array().unwrap().len(), 0);
        assert!(json["summary"]["median_elapsed_s"].is_null());
    }

    #[test]
    fn solve_rate_and_median() {
        let records = vec![record(true, 1.0), record(false, 4.0), record(true, 3.0), record(false, 4.0)];
        let r = run_manifest(records, Some(4.0));
        assert_eq!(r.summary.solve_rate, "2/4");
        assert_eq!(r.summary.median_elapsed_s, Some(2.0));
        let score = r.summary.score.unwrap();
        assert!((score - (2.0 + 3.0 / 16.0 + 1.0 / 16.0)).abs() < 1e-12);
    }

    #[test]
    fn iteration_runs_hide_timings() {
        let mut rec = record(true, 1.0);
        rec.budget = Budget::Iterations(5);
        let r = run_manifest(vec![rec], None);
        assert_eq!(r.summary.median_elapsed_s, None);
        assert_eq!(r.summary.median_iterations, Some(10.0));
    }
}
