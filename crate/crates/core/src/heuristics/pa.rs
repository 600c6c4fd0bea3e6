//! Packing arrays as a cost-minimisation problem.
//!
//! Cost is `sum_{i<j} max(0, agree(i, j) - 1)` where `agree` counts columns
//! in which two rows hold the same symbol. It is zero exactly when every
//! pair of columns sees each ordered symbol pair at most once.

use super::{Neighborhood, SearchError, SearchRng};
use crate::designs::{DesignMatrix, PaParams};

/// Overwrite cell `(row, col)` with `symbol`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellMove {
    pub row: usize,
    pub col: usize,
    pub symbol: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaState {
    params: PaParams,
    cells: Vec<u32>,
    /// Column agreement counts, `N x N`, symmetric.
    agree: Vec<u32>,
    cost: u64,
}

fn penalty(agree: u32) -> u64 {
    agree.saturating_sub(1) as u64
}

impl PaState {
    pub fn random(params: PaParams, rng: &mut SearchRng) -> Self {
        let cells = (0..params.rows * params.cols)
            .map(|_| rng.below(params.symbols) as u32)
            .collect();
        Self::from_cells(params, cells)
    }

    pub fn from_matrix(params: PaParams, m: &DesignMatrix) -> Result<Self, SearchError> {
        if m.rows() != params.rows || m.cols() != params.cols {
            return Err(SearchError::Structure(format!(
                "expected {}x{}, got {}x{}",
                params.rows,
                params.cols,
                m.rows(),
                m.cols()
            )));
        }
        if let Some(v) = m
            .entries()
            .iter()
            .find(|&&v| v < 0 || v as usize >= params.symbols)
        {
            return Err(SearchError::Structure(format!("symbol {v} out of range")));
        }
        Ok(Self::from_cells(
            params,
            m.entries().iter().map(|&v| v as u32).collect(),
        ))
    }

    fn from_cells(params: PaParams, cells: Vec<u32>) -> Self {
        let n = params.rows;
        let mut state = Self {
            params,
            cells,
            agree: vec![0; n * n],
            cost: 0,
        };
        for i in 0..n {
            for j in i + 1..n {
                let a = state.agreement(i, j);
                state.agree[i * n + j] = a;
                state.agree[j * n + i] = a;
            }
        }
        state.cost = state.recompute_cost();
        state
    }

    pub fn params(&self) -> PaParams {
        self.params
    }

    fn cell(&self, r: usize, c: usize) -> u32 {
        self.cells[r * self.params.cols + c]
    }

    fn agreement(&self, i: usize, j: usize) -> u32 {
        (0..self.params.cols)
            .filter(|&c| self.cell(i, c) == self.cell(j, c))
            .count() as u32
    }

    pub fn recompute_cost(&self) -> u64 {
        let n = self.params.rows;
        let mut total = 0;
        for i in 0..n {
            for j in i + 1..n {
                total += penalty(self.agreement(i, j));
            }
        }
        total
    }

    pub fn tallies_consistent(&self) -> bool {
        let n = self.params.rows;
        (0..n).all(|i| (0..n).all(|j| i == j || self.agree[i * n + j] == self.agreement(i, j)))
            && self.cost == self.recompute_cost()
    }

    fn agreement_change(&self, mv: &CellMove, other: usize) -> i64 {
        let old = self.cell(mv.row, mv.col);
        let theirs = self.cell(other, mv.col);
        (theirs == mv.symbol) as i64 - (theirs == old) as i64
    }
}

impl Neighborhood for PaState {
    type Move = CellMove;

    fn cost(&self) -> u64 {
        self.cost
    }

    fn random_move(&self, rng: &mut SearchRng) -> Option<CellMove> {
        let v = self.params.symbols;
        if v < 2 || self.params.rows == 0 {
            return None;
        }
        let row = rng.below(self.params.rows);
        let col = rng.below(self.params.cols);
        let current = self.cell(row, col) as usize;
        let mut symbol = rng.below(v - 1);
        if symbol >= current {
            symbol += 1;
        }
        Some(CellMove {
            row,
            col,
            symbol: symbol as u32,
        })
    }

    fn delta(&self, mv: &CellMove) -> i64 {
        let n = self.params.rows;
        let mut delta = 0i64;
        for j in (0..n).filter(|&j| j != mv.row) {
            let change = self.agreement_change(mv, j);
            if change != 0 {
                let old = self.agree[mv.row * n + j];
                let new = (old as i64 + change) as u32;
                delta += penalty(new) as i64 - penalty(old) as i64;
            }
        }
        delta
    }

    fn apply(&mut self, mv: &CellMove) {
        let n = self.params.rows;
        let delta = self.delta(mv);
        for j in (0..n).filter(|&j| j != mv.row) {
            let change = self.agreement_change(mv, j);
            if change != 0 {
                let new = (self.agree[mv.row * n + j] as i64 + change) as u32;
                self.agree[mv.row * n + j] = new;
                self.agree[j * n + mv.row] = new;
            }
        }
        let k = self.params.cols;
        self.cells[mv.row * k + mv.col] = mv.symbol;
        self.cost = (self.cost as i64 + delta) as u64;
    }

    fn to_matrix(&self) -> DesignMatrix {
        DesignMatrix::new(
            self.params.rows,
            self.params.cols,
            self.cells.iter().map(|&v| v as i32).collect(),
        )
        .expect("state shape is fixed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::verify_pa;
    use proptest::prelude::*;

    #[test]
    fn orthogonal_array_has_zero_cost() {
        // OA(9, 4, 3, 2): rows (a, b, a+b, a+2b) mod 3.
        let rows: Vec<Vec<i32>> = (0..3)
            .flat_map(|a| (0..3).map(move |b| vec![a, b, (a + b) % 3, (a + 2 * b) % 3]))
            .collect();
        let m = DesignMatrix::from_rows(&rows).unwrap();
        let p = PaParams { rows: 9, cols: 4, symbols: 3 };
        assert_eq!(PaState::from_matrix(p, &m).unwrap().cost(), 0);
    }

    #[test]
    fn single_symbol_has_no_moves() {
        let p = PaParams { rows: 2, cols: 2, symbols: 1 };
        let mut rng = SearchRng::from_seed(0);
        let s = PaState::random(p, &mut rng);
        assert_eq!(s.cost(), 1);
        assert!(s.random_move(&mut rng).is_none());
    }

    #[test]
    fn out_of_range_symbol_rejected() {
        let p = PaParams { rows: 1, cols: 2, symbols: 2 };
        let m = DesignMatrix::from_rows(&[[0, 2]]).unwrap();
        assert!(PaState::from_matrix(p, &m).is_err());
    }

    proptest! {
        #[test]
        fn delta_matches_recomputation(seed in any::<u64>(), n in 2usize..9, k in 1usize..6, v in 2usize..5) {
            let p = PaParams { rows: n, cols: k, symbols: v };
            let mut rng = SearchRng::from_seed(seed);
            let mut s = PaState::random(p, &mut rng);
            for _ in 0..50 {
                let mv = s.random_move(&mut rng).unwrap();
                prop_assert_ne!(mv.symbol, s.cell(mv.row, mv.col));
                let before = s.cost();
                let delta = s.delta(&mv);
                s.apply(&mv);
                prop_assert_eq!(s.cost() as i64, before as i64 + delta);
                prop_assert!(s.tallies_consistent());
            }
            prop_assert_eq!(s.cost() == 0, verify_pa(&p, &s.to_matrix()).unwrap().valid);
        }
    }
}
