//! Randomized depth-first search for Florentine rectangles.
//!
//! Cells are filled row by row, left to right. A symbol can go into a cell
//! when it is unused in the current row and, for every earlier position `q`
//! in the row, the triple `(row[q], symbol, pos - q)` has not been used by
//! any earlier row. Those triples live in an occupancy table that is
//! updated on placement and rolled back on backtrack, so a feasibility check
//! costs `O(pos)`.

use super::{Budget, SearchOutcome, SearchResult, SearchRng, Stopwatch};
use crate::designs::{DesignMatrix, FrParams};

/// Partially filled rectangle plus its step-occupancy table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlorentineSearch {
    params: FrParams,
    /// Filled cells in row-major order.
    placed: Vec<u32>,
    /// `used[(a * n + b) * n + s]`: some row has `b` exactly `s` places
    /// right of `a`.
    used: Vec<bool>,
}

impl FlorentineSearch {
    pub fn new(params: FrParams) -> Self {
        let n = params.symbols;
        Self {
            params,
            placed: Vec::with_capacity(params.rows * n),
            used: vec![false; n * n * n],
        }
    }

    pub fn filled(&self) -> usize {
        self.placed.len()
    }

    pub fn is_complete(&self) -> bool {
        self.placed.len() == self.params.rows * self.params.symbols
    }

    fn slot(&self, a: u32, b: u32, step: usize) -> usize {
        let n = self.params.symbols;
        (a as usize * n + b as usize) * n + step
    }

    /// Earlier symbols of the row the next cell belongs to.
    fn current_row_prefix(&self) -> &[u32] {
        let n = self.params.symbols;
        let start = self.placed.len() / n * n;
        &self.placed[start..]
    }

    /// Symbols not yet used in the row of the next cell, ascending.
    pub fn row_candidates(&self) -> Vec<u32> {
        let n = self.params.symbols;
        let mut free = vec![true; n];
        for &s in self.current_row_prefix() {
            free[s as usize] = false;
        }
        (0..n as u32).filter(|&s| free[s as usize]).collect()
    }

    pub fn can_place(&self, symbol: u32) -> bool {
        let prefix = self.current_row_prefix();
        let pos = prefix.len();
        !prefix.contains(&symbol)
            && prefix
                .iter()
                .enumerate()
                .all(|(q, &a)| !self.used[self.slot(a, symbol, pos - q)])
    }

    /// Places `symbol` in the next cell if allowed.
    pub fn try_place(&mut self, symbol: u32) -> bool {
        if self.is_complete() || !self.can_place(symbol) {
            return false;
        }
        let pos = self.current_row_prefix().len();
        for q in 0..pos {
            let a = self.current_row_prefix()[q];
            let slot = self.slot(a, symbol, pos - q);
            self.used[slot] = true;
        }
        self.placed.push(symbol);
        true
    }

    /// Removes the last placed symbol and releases its triples.
    pub fn pop(&mut self) -> Option<u32> {
        let symbol = self.placed.pop()?;
        let pos = self.current_row_prefix().len();
        for q in 0..pos {
            let a = self.current_row_prefix()[q];
            let slot = self.slot(a, symbol, pos - q);
            self.used[slot] = false;
        }
        Some(symbol)
    }

    fn scratch_occupancy(&self) -> Vec<bool> {
        let n = self.params.symbols;
        let mut used = vec![false; n * n * n];
        for row in self.placed.chunks(n) {
            for q in 0..row.len() {
                for p in q + 1..row.len() {
                    used[self.slot(row[q], row[p], p - q)] = true;
                }
            }
        }
        used
    }

    /// Whether the occupancy table matches the filled cells.
    pub fn tallies_consistent(&self) -> bool {
        self.used == self.scratch_occupancy()
    }

    /// The filled rectangle; `None` until every cell is placed.
    pub fn to_matrix(&self) -> Option<DesignMatrix> {
        self.is_complete().then(|| {
            DesignMatrix::new(
                self.params.rows,
                self.params.symbols,
                self.placed.iter().map(|&v| v as i32).collect(),
            )
            .expect("state shape is fixed")
        })
    }
}

struct Frame {
    candidates: Vec<u32>,
    next: usize,
}

/// Iterations count placement attempts. If the whole tree is traversed the
/// outcome is marked proven infeasible. `final_cost` is the number of cells
/// left unfilled at the deepest point reached.
pub fn dfs_florentine(params: FrParams, rng: &mut SearchRng, budget: Budget) -> SearchOutcome {
    let clock = Stopwatch::start(budget);
    let total = params.rows * params.symbols;
    let mut search = FlorentineSearch::new(params);
    let mut iterations = 0u64;
    let mut deepest = 0;
    let mut frames: Vec<Frame> = Vec::with_capacity(total);
    let new_frame = |search: &FlorentineSearch, rng: &mut SearchRng| {
        let mut candidates = search.row_candidates();
        rng.shuffle(&mut candidates);
        Frame { candidates, next: 0 }
    };

    let result = if total == 0 {
        SearchResult::Solved(DesignMatrix::zeros(params.rows, params.symbols))
    } else {
        frames.push(new_frame(&search, rng));
        loop {
            if search.is_complete() {
                break SearchResult::Solved(search.to_matrix().expect("complete"));
            }
            let Some(frame) = frames.last_mut() else {
                break SearchResult::Exhausted {
                    proven_infeasible: true,
                };
            };
            if frame.next < frame.candidates.len() {
                if clock.should_stop(iterations) {
                    break SearchResult::Exhausted {
                        proven_infeasible: false,
                    };
                }
                iterations += 1;
                let symbol = frame.candidates[frame.next];
                frame.next += 1;
                if search.try_place(symbol) {
                    deepest = deepest.max(search.filled());
                    if !search.is_complete() {
                        frames.push(new_frame(&search, rng));
                    }
                }
            } else {
                frames.pop();
                if !frames.is_empty() {
                    search.pop();
                }
            }
        }
    };
    let final_cost = match result {
        SearchResult::Solved(_) => 0,
        SearchResult::Exhausted { .. } => (total - deepest) as u64,
    };
    SearchOutcome {
        result,
        elapsed: clock.elapsed(),
        iterations,
        final_cost,
    }
}
