//! Balanced ternary designs as a cost-minimisation problem.
//!
//! Every row always holds exactly `p1` ones and `p2` twos, so only the
//! column sums and pairwise products can be wrong. Cost is
//! `sum_b |colsum_b - K| + sum_{v<w} |lambda_vw - L|`.

use super::{Neighborhood, SearchError, SearchRng};
use crate::designs::{BtdParams, DesignMatrix};

/// Swap the entries at blocks `a` and `b` of `row`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowSwap {
    pub row: usize,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BtdState {
    params: BtdParams,
    cells: Vec<u8>,
    col_sums: Vec<i32>,
    /// Row inner products, `V x V`, symmetric.
    lambda: Vec<i32>,
    cost: u64,
}

impl BtdState {
    /// Rejects parameters whose rows cannot hold `p1 + p2` nonzero entries.
    pub fn check_params(params: &BtdParams) -> Result<(), SearchError> {
        if params.singles + params.doubles > params.blocks {
            return Err(SearchError::Config(format!(
                "p1 + p2 = {} exceeds B = {}",
                params.singles + params.doubles,
                params.blocks
            )));
        }
        Ok(())
    }

    pub fn random(params: BtdParams, rng: &mut SearchRng) -> Result<Self, SearchError> {
        Self::check_params(&params)?;
        let mut cells = Vec::with_capacity(params.elements * params.blocks);
        for _ in 0..params.elements {
            cells.extend(Self::random_row(&params, rng));
        }
        Ok(Self::from_cells(params, cells))
    }

    pub(crate) fn random_row(params: &BtdParams, rng: &mut SearchRng) -> Vec<u8> {
        let mut row = vec![0u8; params.blocks];
        row[..params.singles].fill(1);
        row[params.singles..params.singles + params.doubles].fill(2);
        rng.shuffle(&mut row);
        row
    }

    pub fn from_matrix(params: BtdParams, m: &DesignMatrix) -> Result<Self, SearchError> {
        Self::check_params(&params)?;
        if m.rows() != params.elements || m.cols() != params.blocks {
            return Err(SearchError::Structure(format!(
                "expected {}x{}, got {}x{}",
                params.elements,
                params.blocks,
                m.rows(),
                m.cols()
            )));
        }
        for (r, row) in m.iter_rows().enumerate() {
            let ones = row.iter().filter(|&&v| v == 1).count();
            let twos = row.iter().filter(|&&v| v == 2).count();
            let zeros = row.iter().filter(|&&v| v == 0).count();
            if ones != params.singles || twos != params.doubles || ones + twos + zeros != row.len() {
                return Err(SearchError::Structure(format!(
                    "row {r} does not hold {} ones and {} twos",
                    params.singles, params.doubles
                )));
            }
        }
        Ok(Self::from_cells(
            params,
            m.entries().iter().map(|&v| v as u8).collect(),
        ))
    }

    /// Builds tallies from scratch. Rows are trusted to have the right
    /// multiplicities.
    pub(crate) fn from_cells(params: BtdParams, cells: Vec<u8>) -> Self {
        let mut state = Self {
            params,
            cells,
            col_sums: Vec::new(),
            lambda: Vec::new(),
            cost: 0,
        };
        state.col_sums = state.scratch_col_sums();
        state.lambda = state.scratch_lambda();
        state.cost = state.recompute_cost();
        state
    }

    pub fn params(&self) -> BtdParams {
        self.params
    }

    pub fn row(&self, r: usize) -> &[u8] {
        let b = self.params.blocks;
        &self.cells[r * b..(r + 1) * b]
    }

    fn cell(&self, r: usize, c: usize) -> i32 {
        self.cells[r * self.params.blocks + c] as i32
    }

    fn scratch_col_sums(&self) -> Vec<i32> {
        (0..self.params.blocks)
            .map(|c| (0..self.params.elements).map(|r| self.cell(r, c)).sum())
            .collect()
    }

    fn scratch_lambda(&self) -> Vec<i32> {
        let v = self.params.elements;
        let mut lambda = vec![0; v * v];
        for a in 0..v {
            for b in a + 1..v {
                let dot = (0..self.params.blocks)
                    .map(|c| self.cell(a, c) * self.cell(b, c))
                    .sum();
                lambda[a * v + b] = dot;
                lambda[b * v + a] = dot;
            }
        }
        lambda
    }

    fn col_penalty(&self, sum: i32) -> u64 {
        (sum - self.params.block_size as i32).unsigned_abs() as u64
    }

    fn pair_penalty(&self, dot: i32) -> u64 {
        (dot - self.params.pair_index as i32).unsigned_abs() as u64
    }

    pub fn recompute_cost(&self) -> u64 {
        let v = self.params.elements;
        let lambda = self.scratch_lambda();
        let cols: u64 = self
            .scratch_col_sums()
            .iter()
            .map(|&s| self.col_penalty(s))
            .sum();
        let mut pairs = 0;
        for a in 0..v {
            for b in a + 1..v {
                pairs += self.pair_penalty(lambda[a * v + b]);
            }
        }
        cols + pairs
    }

    pub fn tallies_consistent(&self) -> bool {
        self.col_sums == self.scratch_col_sums()
            && self.lambda == self.scratch_lambda()
            && self.cost == self.recompute_cost()
    }
}

impl Neighborhood for BtdState {
    type Move = RowSwap;

    fn cost(&self) -> u64 {
        self.cost
    }

    fn random_move(&self, rng: &mut SearchRng) -> Option<RowSwap> {
        if self.params.blocks < 2 || self.params.elements == 0 {
            return None;
        }
        let row = rng.below(self.params.elements);
        let (a, b) = rng.distinct_pair(self.params.blocks);
        Some(RowSwap { row, a, b })
    }

    fn delta(&self, mv: &RowSwap) -> i64 {
        let (x, y) = (self.cell(mv.row, mv.a), self.cell(mv.row, mv.b));
        if x == y {
            return 0;
        }
        let shift = y - x;
        let mut delta = 0i64;
        for (col, inc) in [(mv.a, shift), (mv.b, -shift)] {
            let s = self.col_sums[col];
            delta += self.col_penalty(s + inc) as i64 - self.col_penalty(s) as i64;
        }
        let v = self.params.elements;
        for w in (0..v).filter(|&w| w != mv.row) {
            let inc = shift * (self.cell(w, mv.a) - self.cell(w, mv.b));
            if inc != 0 {
                let l = self.lambda[mv.row * v + w];
                delta += self.pair_penalty(l + inc) as i64 - self.pair_penalty(l) as i64;
            }
        }
        delta
    }

    fn apply(&mut self, mv: &RowSwap) {
        let (x, y) = (self.cell(mv.row, mv.a), self.cell(mv.row, mv.b));
        if x == y {
            return;
        }
        let delta = self.delta(mv);
        let shift = y - x;
        self.col_sums[mv.a] += shift;
        self.col_sums[mv.b] -= shift;
        let v = self.params.elements;
        for w in (0..v).filter(|&w| w != mv.row) {
            let inc = shift * (self.cell(w, mv.a) - self.cell(w, mv.b));
            self.lambda[mv.row * v + w] += inc;
            self.lambda[w * v + mv.row] += inc;
        }
        let b = self.params.blocks;
        self.cells.swap(mv.row * b + mv.a, mv.row * b + mv.b);
        self.cost = (self.cost as i64 + delta) as u64;
    }

    fn to_matrix(&self) -> DesignMatrix {
        DesignMatrix::new(
            self.params.elements,
            self.params.blocks,
            self.cells.iter().map(|&v| v as i32).collect(),
        )
        .expect("state shape is fixed")
    }
}
