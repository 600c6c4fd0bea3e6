//! Parallel multi-seed execution and reporting.
//!
//! [`exec_batch`] runs one solver with one assignment over every
//! (instance, seed) pair of a [`BatchPlan`]. Workers pull run indices from a
//! shared counter and send results to a single collector, which places them
//! by index, so the record order never depends on scheduling. Every matrix a
//! solver claims is re-checked with the design verifier before it can count.

mod report;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::designs::{format_matrix, verify, DesignFamily, DesignMatrix, InstanceSpec, OrderedParams};
use crate::heuristics::{Algorithm, Budget, SearchError, SearchOutcome, SearchResult};
use crate::tuner::{Assignment, GridRunner, TuneError};

pub use report::{run_manifest, BatchReport, BatchSummary};

/// Environment variable that overrides the default worker count.
pub const PARALLELISM_ENV: &str = "DESIGNFORGE_PARALLELISM";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("{algorithm} does not support {family}")]
    Unsupported {
        algorithm: String,
        family: DesignFamily,
    },
    #[error("invalid batch: {0}")]
    Plan(String),
}

/// Something that can attempt an instance. [`Algorithm`] is the built-in
/// implementation; tests plug in fakes.
pub trait Solver: Sync {
    fn name(&self) -> &str;
    fn supports(&self, family: DesignFamily) -> bool;
    fn solve(
        &self,
        instance: &InstanceSpec,
        seed: u64,
        budget: Budget,
        assignment: &Assignment,
    ) -> Result<SearchOutcome, SearchError>;
}

impl Solver for Algorithm {
    fn name(&self) -> &str {
        Algorithm::name(*self)
    }

    fn supports(&self, family: DesignFamily) -> bool {
        Algorithm::supports(*self, family)
    }

    fn solve(
        &self,
        instance: &InstanceSpec,
        seed: u64,
        budget: Budget,
        assignment: &Assignment,
    ) -> Result<SearchOutcome, SearchError> {
        self.run(instance, seed, budget, assignment)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchPlan {
    pub instances: Vec<InstanceSpec>,
    pub seeds_per_instance: usize,
    /// Run `i` (instance-major) uses seed `seed_base + i`.
    pub seed_base: u64,
    pub budget: Budget,
    pub parallelism: usize,
}

impl BatchPlan {
    pub fn new(instances: Vec<InstanceSpec>, seeds_per_instance: usize, budget: Budget) -> Self {
        Self {
            instances,
            seeds_per_instance,
            seed_base: 0,
            budget,
            parallelism: default_parallelism(),
        }
    }

    pub fn total_runs(&self) -> usize {
        self.instances.len() * self.seeds_per_instance
    }
}

/// `DESIGNFORGE_PARALLELISM` if set to a positive integer, otherwise the
/// number of available CPUs.
pub fn default_parallelism() -> usize {
    std::env::var(PARALLELISM_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// A matrix was returned and the verifier accepted it.
    Solved,
    /// A matrix was returned but the verifier rejected it.
    Unverified,
    /// The budget ran out.
    Timeout,
    /// A complete search showed no design exists.
    Infeasible,
    /// The solver returned an error or panicked.
    Error,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Solved => "solved",
            RunStatus::Unverified => "unverified",
            RunStatus::Timeout => "timeout",
            RunStatus::Infeasible => "infeasible",
            RunStatus::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: InstanceSpec,
    pub algorithm: String,
    pub assignment: Assignment,
    pub seed: u64,
    pub status: RunStatus,
    pub budget: Budget,
    pub elapsed: Duration,
    pub iterations: u64,
    pub final_cost: u64,
    /// Set only by the harness, after its own verifier call.
    pub verified: bool,
    pub solution: Option<DesignMatrix>,
    pub error: Option<String>,
}

impl RunRecord {
    /// Wall-clock seconds, or `None` for iteration-budget runs, whose
    /// timings would make otherwise identical reports differ.
    pub fn reported_elapsed(&self) -> Option<f64> {
        self.budget.is_wall_clock().then(|| self.elapsed.as_secs_f64())
    }
}

impl Serialize for RunRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("family", &self.instance.family())?;
        map.serialize_entry("params", &OrderedParams(&self.instance))?;
        map.serialize_entry("algorithm", &self.algorithm)?;
        map.serialize_entry("assignment", &self.assignment)?;
        map.serialize_entry("seed", &self.seed)?;
        map.serialize_entry("status", &self.status)?;
        map.serialize_entry("elapsed_s", &self.reported_elapsed())?;
        map.serialize_entry("iterations", &self.iterations)?;
        map.serialize_entry("verified", &self.verified)?;
        if self.verified {
            if let Some(m) = &self.solution {
                map.serialize_entry("solution", &format_matrix(m))?;
            }
        }
        if let Some(e) = &self.error {
            map.serialize_entry("error", e)?;
        }
        map.end()
    }
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "solver panicked".into())
}

/// One run, with panics caught and any claimed solution re-verified.
pub fn execute_run(
    solver: &dyn Solver,
    instance: &InstanceSpec,
    seed: u64,
    budget: Budget,
    assignment: &Assignment,
) -> RunRecord {
    let start = Instant::now();
    let attempt = catch_unwind(AssertUnwindSafe(|| solver.solve(instance, seed, budget, assignment)));
    let wall = start.elapsed();
    let mut record = RunRecord {
        instance: *instance,
        algorithm: solver.name().to_string(),
        assignment: assignment.clone(),
        seed,
        status: RunStatus::Error,
        budget,
        elapsed: wall,
        iterations: 0,
        final_cost: 0,
        verified: false,
        solution: None,
        error: None,
    };
    let outcome = match attempt {
        Ok(Ok(outcome)) => outcome,
        Ok(Err(e)) => {
            record.error = Some(e.to_string());
            return record;
        }
        Err(payload) => {
            record.error = Some(format!("panic: {}", panic_message(payload)));
            return record;
        }
    };
    record.elapsed = outcome.elapsed;
    record.iterations = outcome.iterations;
    record.final_cost = outcome.final_cost;
    match outcome.result {
        SearchResult::Solved(m) => {
            match verify(instance, &m) {
                Ok(report) if report.valid => {
                    record.status = RunStatus::Solved;
                    record.verified = true;
                }
                Ok(report) => {
                    record.status = RunStatus::Unverified;
                    record.error = report.violation.map(|v| v.to_string());
                }
                Err(e) => {
                    record.status = RunStatus::Unverified;
                    record.error = Some(e.to_string());
                }
            }
            record.solution = Some(m);
        }
        SearchResult::Exhausted { proven_infeasible } => {
            record.status = if proven_infeasible {
                RunStatus::Infeasible
            } else {
                RunStatus::Timeout
            };
        }
    }
    record
}

/// Runs every (instance, seed) pair of the plan. Records come back in
/// instance-major, seed-minor order.
pub fn exec_batch(
    plan: &BatchPlan,
    solver: &dyn Solver,
    assignment: &Assignment,
) -> Result<Vec<RunRecord>, HarnessError> {
    if plan.parallelism == 0 {
        return Err(HarnessError::Plan("parallelism must be at least 1".into()));
    }
    if let Some(bad) = plan.instances.iter().find(|i| !solver.supports(i.family())) {
        return Err(HarnessError::Unsupported {
            algorithm: solver.name().to_string(),
            family: bad.family(),
        });
    }
    let total = plan.total_runs();
    let seeds = plan.seeds_per_instance.max(1);
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, RunRecord)>();
    let mut slots: Vec<Option<RunRecord>> = vec![None; total];
    thread::scope(|scope| {
        for _ in 0..plan.parallelism.min(total) {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= total {
                    break;
                }
                let instance = &plan.instances[idx / seeds];
                let seed = plan.seed_base.wrapping_add(idx as u64);
                let record = execute_run(solver, instance, seed, plan.budget, assignment);
                if tx.send((idx, record)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (idx, record) in rx {
            slots[idx] = Some(record);
        }
    });
    Ok(slots
        .into_iter()
        .map(|r| r.expect("every run index is executed exactly once"))
        .collect())
}

/// Evaluates assignments for the tuner by running a batch per assignment
/// with a wall-clock budget.
pub struct HarnessRunner<'a> {
    pub solver: &'a dyn Solver,
    pub instances: Vec<InstanceSpec>,
    pub seeds_per_instance: usize,
    pub seed_base: u64,
    pub parallelism: usize,
}

impl GridRunner for HarnessRunner<'_> {
    fn evaluate(&mut self, assignment: &Assignment, budget_s: f64) -> Result<Vec<RunRecord>, TuneError> {
        let plan = BatchPlan {
            instances: self.instances.clone(),
            seeds_per_instance: self.seeds_per_instance,
            seed_base: self.seed_base,
            budget: Budget::seconds(budget_s),
            parallelism: self.parallelism,
        };
        exec_batch(&plan, self.solver, assignment).map_err(|e| TuneError::Runner(e.to_string()))
    }
}
