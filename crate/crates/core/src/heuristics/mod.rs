//! Cost models and search drivers.
//!
//! Each family with a cost model has a state type that keeps its violation
//! tallies up to date under local moves, so a move's cost change is computed
//! in time proportional to the rows it touches:
//!
//! | family        | state              | move                          | drivers                 |
//! |---------------|--------------------|-------------------------------|-------------------------|
//! | EPA           | [`EpaState`]       | swap two cells of a row       | local search, SA        |
//! | PA            | [`PaState`]        | rewrite one cell              | SA                      |
//! | SymmW / SkewW | [`WeighingState`]  | rewrite one stored cell       | SA (constant or resets) |
//! | BTD           | [`BtdState`]       | swap two cells of a row       | genetic algorithm       |
//! | FR            | [`FlorentineSearch`] | place / remove a symbol     | randomized DFS          |
//!
//! All randomness comes from [`SearchRng`], so a run is fully determined by
//! its instance, seed, hyperparameters and (in iteration mode) its budget.

mod algorithm;
mod anneal;
mod btd;
mod epa;
mod florentine;
mod genetic;
mod local_search;
mod pa;
mod weighing;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::designs::{DesignFamily, DesignMatrix};

pub use algorithm::Algorithm;
pub use anneal::{anneal, sa_constant_temperature, sa_with_resets, Neighborhood, ResetSchedule};
pub use btd::{BtdState, RowSwap};
pub use epa::{EpaState, SwapMove};
pub use florentine::{dfs_florentine, FlorentineSearch};
pub use genetic::{ga_btd, GaConfig};
pub use local_search::local_search_epa;
pub use pa::{CellMove, PaState};
pub use weighing::{StoredCellMove, WeighingState};

/// Wall-clock budgets are polled once every this many iterations.
pub const DEADLINE_CHECK_INTERVAL: u64 = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{algorithm} does not support {family}")]
    Unsupported {
        algorithm: String,
        family: DesignFamily,
    },
    #[error("state does not satisfy structural constraints: {0}")]
    Structure(String),
}

/// How long a search may run. Iteration budgets make runs reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    WallClock(Duration),
    Iterations(u64),
}

impl Budget {
    pub fn seconds(secs: f64) -> Self {
        Budget::WallClock(Duration::from_secs_f64(secs.max(0.0)))
    }

    pub fn is_wall_clock(&self) -> bool {
        matches!(self, Budget::WallClock(_))
    }
}

/// Tracks elapsed time and decides when a run must stop.
#[derive(Debug, Clone)]
pub(crate) struct Stopwatch {
    start: Instant,
    budget: Budget,
}

impl Stopwatch {
    pub fn start(budget: Budget) -> Self {
        Self {
            start: Instant::now(),
            budget,
        }
    }

    /// Cheap check for tight loops: the clock is read only every
    /// [`DEADLINE_CHECK_INTERVAL`] iterations.
    pub fn should_stop(&self, iterations: u64) -> bool {
        match self.budget {
            Budget::Iterations(limit) => iterations >= limit,
            Budget::WallClock(limit) => {
                iterations % DEADLINE_CHECK_INTERVAL == 0 && self.start.elapsed() >= limit
            }
        }
    }

    /// Reads the clock on every call; for drivers whose iterations are heavy.
    pub fn should_stop_now(&self, iterations: u64) -> bool {
        match self.budget {
            Budget::Iterations(limit) => iterations >= limit,
            Budget::WallClock(limit) => self.start.elapsed() >= limit,
        }
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }
}

/// The portable generator behind every search: ChaCha8 seeded from a `u64`
/// via `SeedableRng::seed_from_u64`. Integer draws always go through `u64`
/// ranges so the stream does not depend on the platform's pointer width.
#[derive(Debug, Clone)]
pub struct SearchRng(ChaCha8Rng);

impl SearchRng {
    pub fn from_seed(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform index in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n as u64) as usize
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.0.gen::<f64>()
    }

    /// Fisher-Yates shuffle driven by [`SearchRng::below`].
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// Two distinct indices in `0..n`, `n >= 2`.
    pub fn distinct_pair(&mut self, n: usize) -> (usize, usize) {
        let a = self.below(n);
        let mut b = self.below(n - 1);
        if b >= a {
            b += 1;
        }
        (a, b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    Solved(DesignMatrix),
    /// The budget ran out, or (with `proven_infeasible`) a complete search
    /// traversed its whole tree without finding a design.
    Exhausted { proven_infeasible: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub result: SearchResult,
    pub elapsed: Duration,
    pub iterations: u64,
    /// 0 when solved; otherwise the lowest cost seen during the run.
    pub final_cost: u64,
}

impl SearchOutcome {
    pub fn is_solved(&self) -> bool {
        matches!(self.result, SearchResult::Solved(_))
    }

    pub fn solution(&self) -> Option<&DesignMatrix> {
        match &self.result {
            SearchResult::Solved(m) => Some(m),
            SearchResult::Exhausted { .. } => None,
        }
    }

    /// Everything except the elapsed time, for reproducibility checks.
    pub fn fingerprint(&self) -> (SearchResult, u64, u64) {
        (self.result.clone(), self.iterations, self.final_cost)
    }
}
