//! Equidistant permutation arrays as a cost-minimisation problem.
//!
//! Rows are kept as permutations at all times; the cost is
//! `sum_{i<j} |dist(i, j) - d|` over Hamming distances.

use super::{Neighborhood, SearchError, SearchRng};
use crate::designs::{DesignMatrix, EpaParams};

/// Swap the symbols at positions `a` and `b` of `row`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapMove {
    pub row: usize,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpaState {
    params: EpaParams,
    cells: Vec<u32>,
    /// Pairwise Hamming distances, `m x m`, symmetric.
    dist: Vec<u32>,
    cost: u64,
}

impl EpaState {
    pub fn random(params: EpaParams, rng: &mut SearchRng) -> Self {
        let n = params.length;
        let mut cells = Vec::with_capacity(params.rows * n);
        for _ in 0..params.rows {
            let mut row: Vec<u32> = (0..n as u32).collect();
            rng.shuffle(&mut row);
            cells.extend(row);
        }
        Self::from_cells(params, cells)
    }

    /// Starts from an existing array whose rows must be permutations.
    pub fn from_matrix(params: EpaParams, m: &DesignMatrix) -> Result<Self, SearchError> {
        let n = params.length;
        if m.rows() != params.rows || m.cols() != n {
            return Err(SearchError::Structure(format!(
                "expected {}x{n}, got {}x{}",
                params.rows,
                m.rows(),
                m.cols()
            )));
        }
        for (r, row) in m.iter_rows().enumerate() {
            let mut seen = vec![false; n];
            for &v in row {
                if v < 0 || v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
                    return Err(SearchError::Structure(format!("row {r} is not a permutation")));
                }
            }
        }
        Ok(Self::from_cells(
            params,
            m.entries().iter().map(|&v| v as u32).collect(),
        ))
    }

    fn from_cells(params: EpaParams, cells: Vec<u32>) -> Self {
        let m = params.rows;
        let mut state = Self {
            params,
            cells,
            dist: vec![0; m * m],
            cost: 0,
        };
        for i in 0..m {
            for j in i + 1..m {
                let d = state.hamming(i, j);
                state.dist[i * m + j] = d;
                state.dist[j * m + i] = d;
            }
        }
        state.cost = state.recompute_cost();
        state
    }

    pub fn params(&self) -> EpaParams {
        self.params
    }

    fn row(&self, r: usize) -> &[u32] {
        let n = self.params.length;
        &self.cells[r * n..(r + 1) * n]
    }

    fn hamming(&self, i: usize, j: usize) -> u32 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .filter(|(a, b)| a != b)
            .count() as u32
    }

    fn penalty(&self, dist: u32) -> u64 {
        (dist as i64 - self.params.distance as i64).unsigned_abs()
    }

    /// Cost computed directly from the rows, ignoring the tallies.
    pub fn recompute_cost(&self) -> u64 {
        let m = self.params.rows;
        let mut total = 0;
        for i in 0..m {
            for j in i + 1..m {
                total += self.penalty(self.hamming(i, j));
            }
        }
        total
    }

    /// Whether the distance table matches the rows.
    pub fn tallies_consistent(&self) -> bool {
        let m = self.params.rows;
        (0..m).all(|i| {
            (0..m).all(|j| i == j || self.dist[i * m + j] == self.hamming(i, j))
        }) && self.cost == self.recompute_cost()
    }

    /// This row's share of the cost: `sum_j |dist(row, j) - d|`.
    pub fn row_cost(&self, row: usize) -> u64 {
        let m = self.params.rows;
        (0..m)
            .filter(|&j| j != row)
            .map(|j| self.penalty(self.dist[row * m + j]))
            .sum()
    }

    /// Distance change between `mv.row` and `other` if the move is applied.
    fn distance_change(&self, mv: &SwapMove, other: usize) -> i64 {
        let r = self.row(mv.row);
        let o = self.row(other);
        let (x, y) = (r[mv.a], r[mv.b]);
        let before = (x != o[mv.a]) as i64 + (y != o[mv.b]) as i64;
        let after = (y != o[mv.a]) as i64 + (x != o[mv.b]) as i64;
        after - before
    }
}

impl Neighborhood for EpaState {
    type Move = SwapMove;

    fn cost(&self) -> u64 {
        self.cost
    }

    fn random_move(&self, rng: &mut SearchRng) -> Option<SwapMove> {
        let n = self.params.length;
        if n < 2 || self.params.rows == 0 {
            return None;
        }
        let row = rng.below(self.params.rows);
        let (a, b) = rng.distinct_pair(n);
        Some(SwapMove { row, a, b })
    }

    fn delta(&self, mv: &SwapMove) -> i64 {
        if mv.a == mv.b {
            return 0;
        }
        let m = self.params.rows;
        let mut delta = 0i64;
        for j in (0..m).filter(|&j| j != mv.row) {
            let change = self.distance_change(mv, j);
            if change != 0 {
                let old = self.dist[mv.row * m + j];
                let new = (old as i64 + change) as u32;
                delta += self.penalty(new) as i64 - self.penalty(old) as i64;
            }
        }
        delta
    }

    fn apply(&mut self, mv: &SwapMove) {
        if mv.a == mv.b {
            return;
        }
        let m = self.params.rows;
        let delta = self.delta(mv);
        for j in (0..m).filter(|&j| j != mv.row) {
            let change = self.distance_change(mv, j);
            if change != 0 {
                let new = (self.dist[mv.row * m + j] as i64 + change) as u32;
                self.dist[mv.row * m + j] = new;
                self.dist[j * m + mv.row] = new;
            }
        }
        let n = self.params.length;
        self.cells.swap(mv.row * n + mv.a, mv.row * n + mv.b);
        self.cost = (self.cost as i64 + delta) as u64;
    }

    fn to_matrix(&self) -> DesignMatrix {
        DesignMatrix::new(
            self.params.rows,
            self.params.length,
            self.cells.iter().map(|&v| v as i32).collect(),
        )
        .expect("state shape is fixed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::verify_epa;
    use proptest::prelude::*;

    #[test]
    fn latin_square_rows_have_zero_cost() {
        let p = EpaParams { length: 3, distance: 3, rows: 3 };
        let m = DesignMatrix::from_rows(&[[0, 1, 2], [1, 2, 0], [2, 0, 1]]).unwrap();
        let s = EpaState::from_matrix(p, &m).unwrap();
        assert_eq!(s.cost(), 0);
    }

    #[test]
    fn rejects_non_permutation_rows() {
        let p = EpaParams { length: 3, distance: 2, rows: 2 };
        let m = DesignMatrix::from_rows(&[[0, 0, 2], [1, 2, 0]]).unwrap();
        assert!(EpaState::from_matrix(p, &m).is_err());
    }

    #[test]
    fn identical_rows_cost_d_each() {
        let p = EpaParams { length: 4, distance: 3, rows: 3 };
        let m = DesignMatrix::from_rows(&[[0, 1, 2, 3]; 3]).unwrap();
        assert_eq!(EpaState::from_matrix(p, &m).unwrap().cost(), 9);
    }

    proptest! {
        #[test]
        fn delta_matches_recomputation(seed in any::<u64>(), n in 2usize..7, m in 2usize..7, d in 1usize..7) {
            let p = EpaParams { length: n, distance: d.min(n), rows: m };
            let mut rng = SearchRng::from_seed(seed);
            let mut s = EpaState::random(p, &mut rng);
            for _ in 0..50 {
                let mv = s.random_move(&mut rng).unwrap();
                let before = s.cost();
                let delta = s.delta(&mv);
                s.apply(&mv);
                prop_assert_eq!(s.cost() as i64, before as i64 + delta);
                prop_assert!(s.tallies_consistent());
            }
            prop_assert_eq!(s.cost() == 0, verify_epa(&p, &s.to_matrix()).unwrap().valid);
        }

        #[test]
        fn row_costs_sum_to_twice_total(seed in any::<u64>()) {
            let p = EpaParams { length: 6, distance: 4, rows: 5 };
            let s = EpaState::random(p, &mut SearchRng::from_seed(seed));
            let sum: u64 = (0..5).map(|r| s.row_cost(r)).sum();
            prop_assert_eq!(sum, 2 * s.cost());
        }
    }
}
