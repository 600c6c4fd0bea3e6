use std::cmp::Ordering;

use serde::Serialize;

use super::{Assignment, TuneError};
use crate::harness::RunRecord;

/// Verified runs score 1 each plus a speed bonus; the bonuses of a whole
/// batch add up to at most 1, and faster runs earn more of it:
/// `sum_verified 1 + (maxtime - elapsed) / (maxtime * |records|)`.
/// Elapsed times are clamped to `[0, maxtime]`.
pub fn scoring(records: &[RunRecord], maxtime: f64) -> Result<f64, TuneError> {
    if !(maxtime > 0.0) {
        return Err(TuneError::Config(format!("maxtime must be positive, got {maxtime}")));
    }
    let n = records.len() as f64;
    Ok(records
        .iter()
        .filter(|r| r.verified)
        .map(|r| {
            let elapsed = r.elapsed.as_secs_f64().clamp(0.0, maxtime);
            1.0 + (maxtime - elapsed) / (maxtime * n)
        })
        .sum())
}

/// Evaluates one assignment on the development instances under a per-run
/// wall-clock budget.
pub trait GridRunner {
    fn evaluate(&mut self, assignment: &Assignment, budget_s: f64) -> Result<Vec<RunRecord>, TuneError>;
}

impl<F> GridRunner for F
where
    F: FnMut(&Assignment, f64) -> Result<Vec<RunRecord>, TuneError>,
{
    fn evaluate(&mut self, assignment: &Assignment, budget_s: f64) -> Result<Vec<RunRecord>, TuneError> {
        self(assignment, budget_s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoredAssignment {
    pub assignment: Assignment,
    pub score: f64,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TuningRound {
    pub budget_s: f64,
    /// Best first.
    pub entries: Vec<ScoredAssignment>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TuneReport {
    pub winner: ScoredAssignment,
    pub rounds: Vec<TuningRound>,
}

/// Grid size, first-round budget and shrink factor for [`hyper_tune`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TuneProfile {
    pub gridsize: usize,
    pub init_runtime: f64,
    pub scale: usize,
}

impl TuneProfile {
    /// 100 points at 0.1 s, then 10 at 1 s.
    pub const DESK: TuneProfile = TuneProfile {
        gridsize: 100,
        init_runtime: 0.1,
        scale: 10,
    };
    /// 1000 points at 0.5 s, 100 at 5 s, 10 at 50 s.
    pub const FULL: TuneProfile = TuneProfile {
        gridsize: 1000,
        init_runtime: 0.5,
        scale: 10,
    };

    pub fn named(name: &str) -> Option<Self> {
        match name {
            "desk" => Some(Self::DESK),
            "full" => Some(Self::FULL),
            _ => None,
        }
    }
}

fn rank(a: &ScoredAssignment, b: &ScoredAssignment) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.assignment.cmp_values(&b.assignment))
}

/// Successive narrowing: evaluate the grid, keep the best
/// `ceil(len / scale)` and multiply the budget by `scale`, until at most
/// `scale` assignments were evaluated in a round; the best of that round
/// wins. Equal scores are ordered by assignment values, never by
/// evaluation order.
pub fn hyper_tune<R: GridRunner + ?Sized>(
    runner: &mut R,
    grid: Vec<Assignment>,
    init_runtime: f64,
    scale: usize,
) -> Result<TuneReport, TuneError> {
    if grid.is_empty() {
        return Err(TuneError::Config("the grid is empty".into()));
    }
    if scale < 2 {
        return Err(TuneError::Config(format!("scale must be at least 2, got {scale}")));
    }
    if !(init_runtime > 0.0) {
        return Err(TuneError::Config(format!(
            "initial runtime must be positive, got {init_runtime}"
        )));
    }
    let mut rounds = Vec::new();
    let mut grid = grid;
    let mut budget = init_runtime;
    loop {
        let mut entries = grid
            .iter()
            .map(|a| {
                let records = runner.evaluate(a, budget)?;
                Ok(ScoredAssignment {
                    assignment: a.clone(),
                    score: scoring(&records, budget)?,
                    records,
                })
            })
            .collect::<Result<Vec<_>, TuneError>>()?;
        entries.sort_by(rank);
        let done = entries.len() <= scale;
        let keep = entries.len().div_ceil(scale);
        grid = entries[..keep].iter().map(|e| e.assignment.clone()).collect();
        let winner = entries[0].clone();
        rounds.push(TuningRound {
            budget_s: budget,
            entries,
        });
        if done {
            return Ok(TuneReport { winner, rounds });
        }
        budget *= scale as f64;
    }
}
