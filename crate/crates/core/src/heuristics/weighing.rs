//! Symmetric and skew weighing matrices as a cost-minimisation problem.
//!
//! Only the upper triangle is free: the lower triangle mirrors it (negated
//! for skew matrices, whose diagonal is pinned to zero), so every state is
//! structurally symmetric or skew. Cost compares the Gram matrix `W W^T` to
//! `w I`: `sum_{i<j} |G_ij| + sum_i |G_ii - w|`.

use super::{Neighborhood, SearchError, SearchRng};
use crate::designs::{DesignMatrix, WeighingKind, WeighingParams};

/// Set stored cell `(i, j)`, `i <= j`, to `value`; its mirror follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoredCellMove {
    pub i: usize,
    pub j: usize,
    pub value: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeighingState {
    params: WeighingParams,
    kind: WeighingKind,
    cells: Vec<i8>,
    gram: Vec<i32>,
    /// Free positions: `i <= j` for symmetric, `i < j` for skew.
    stored: Vec<(usize, usize)>,
    cost: u64,
}

impl WeighingState {
    pub fn random(params: WeighingParams, kind: WeighingKind, rng: &mut SearchRng) -> Self {
        let n = params.order;
        let mut state = Self::empty(params, kind);
        for idx in 0..state.stored.len() {
            let (i, j) = state.stored[idx];
            let v = rng.below(3) as i8 - 1;
            state.cells[i * n + j] = v;
            state.cells[j * n + i] = state.mirror(v);
        }
        state.rebuild();
        state
    }

    /// Starts from a matrix that must already be symmetric (or skew with a
    /// zero diagonal) with entries in `{-1, 0, 1}`.
    pub fn from_matrix(
        params: WeighingParams,
        kind: WeighingKind,
        m: &DesignMatrix,
    ) -> Result<Self, SearchError> {
        let n = params.order;
        if m.rows() != n || m.cols() != n {
            return Err(SearchError::Structure(format!(
                "expected {n}x{n}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let mut state = Self::empty(params, kind);
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                if !(-1..=1).contains(&v) {
                    return Err(SearchError::Structure(format!("entry {v} at ({i}, {j})")));
                }
                state.cells[i * n + j] = v as i8;
            }
        }
        for i in 0..n {
            for j in i..n {
                let ok = if i == j {
                    kind == WeighingKind::Symmetric || state.cells[i * n + i] == 0
                } else {
                    state.cells[j * n + i] == state.mirror(state.cells[i * n + j])
                };
                if !ok {
                    return Err(SearchError::Structure(format!(
                        "entries ({i}, {j}) and ({j}, {i}) break the required structure"
                    )));
                }
            }
        }
        state.rebuild();
        Ok(state)
    }

    fn empty(params: WeighingParams, kind: WeighingKind) -> Self {
        let n = params.order;
        let stored = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .filter(|&(i, j)| kind == WeighingKind::Symmetric || i != j)
            .collect();
        Self {
            params,
            kind,
            cells: vec![0; n * n],
            gram: vec![0; n * n],
            stored,
            cost: 0,
        }
    }

    fn mirror(&self, v: i8) -> i8 {
        match self.kind {
            WeighingKind::Symmetric => v,
            WeighingKind::Skew => -v,
        }
    }

    fn rebuild(&mut self) {
        self.gram = self.scratch_gram();
        self.cost = self.recompute_cost();
    }

    fn cell(&self, i: usize, j: usize) -> i32 {
        self.cells[i * self.params.order + j] as i32
    }

    fn scratch_gram(&self) -> Vec<i32> {
        let n = self.params.order;
        let mut g = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                let dot = (0..n).map(|c| self.cell(a, c) * self.cell(b, c)).sum();
                g[a * n + b] = dot;
                g[b * n + a] = dot;
            }
        }
        g
    }

    fn penalty(&self, a: usize, b: usize, g: i32) -> u64 {
        if a == b {
            (g - self.params.weight as i32).unsigned_abs() as u64
        } else {
            g.unsigned_abs() as u64
        }
    }

    pub fn recompute_cost(&self) -> u64 {
        let n = self.params.order;
        let g = self.scratch_gram();
        let mut total = 0;
        for a in 0..n {
            for b in a..n {
                total += self.penalty(a, b, g[a * n + b]);
            }
        }
        total
    }

    pub fn tallies_consistent(&self) -> bool {
        self.gram == self.scratch_gram() && self.cost == self.recompute_cost()
    }

    /// Calls `f(a, b, increment)` for every Gram entry `a <= b` the move
    /// changes. Only rows `i` and `j` of `W` change, so only Gram rows and
    /// columns `i` and `j` do.
    fn for_each_change(&self, mv: &StoredCellMove, mut f: impl FnMut(usize, usize, i32)) {
        let n = self.params.order;
        let (i, j) = (mv.i, mv.j);
        let old = self.cell(i, j);
        let new = mv.value as i32;
        if old == new {
            return;
        }
        let d1 = new - old;
        let canonical = |a: usize, b: usize| if a <= b { (a, b) } else { (b, a) };
        if i == j {
            for b in (0..n).filter(|&b| b != i) {
                let inc = d1 * self.cell(b, i);
                if inc != 0 {
                    let (x, y) = canonical(i, b);
                    f(x, y, inc);
                }
            }
            f(i, i, new * new - old * old);
            return;
        }
        let old_m = self.cell(j, i);
        let new_m = self.mirror(mv.value) as i32;
        let d2 = new_m - old_m;
        for b in (0..n).filter(|&b| b != i && b != j) {
            let inc_i = d1 * self.cell(b, j);
            if inc_i != 0 {
                let (x, y) = canonical(i, b);
                f(x, y, inc_i);
            }
            let inc_j = d2 * self.cell(b, i);
            if inc_j != 0 {
                let (x, y) = canonical(j, b);
                f(x, y, inc_j);
            }
        }
        let inc_ij = d1 * self.cell(j, j) + d2 * self.cell(i, i);
        if inc_ij != 0 {
            f(i, j, inc_ij);
        }
        f(i, i, new * new - old * old);
        f(j, j, new_m * new_m - old_m * old_m);
    }
}

impl Neighborhood for WeighingState {
    type Move = StoredCellMove;

    fn cost(&self) -> u64 {
        self.cost
    }

    fn random_move(&self, rng: &mut SearchRng) -> Option<StoredCellMove> {
        if self.stored.is_empty() {
            return None;
        }
        let (i, j) = self.stored[rng.below(self.stored.len())];
        let current = self.cell(i, j) as i8;
        let mut value = rng.below(2) as i8 - 1;
        if value >= current {
            value += 1;
        }
        Some(StoredCellMove { i, j, value })
    }

    fn delta(&self, mv: &StoredCellMove) -> i64 {
        let n = self.params.order;
        let mut delta = 0i64;
        self.for_each_change(mv, |a, b, inc| {
            let g = self.gram[a * n + b];
            delta += self.penalty(a, b, g + inc) as i64 - self.penalty(a, b, g) as i64;
        });
        delta
    }

    fn apply(&mut self, mv: &StoredCellMove) {
        let n = self.params.order;
        let mut changes = Vec::with_capacity(2 * n + 3);
        self.for_each_change(mv, |a, b, inc| changes.push((a, b, inc)));
        let mut delta = 0i64;
        for (a, b, inc) in changes {
            let g = self.gram[a * n + b];
            delta += self.penalty(a, b, g + inc) as i64 - self.penalty(a, b, g) as i64;
            self.gram[a * n + b] = g + inc;
            self.gram[b * n + a] = g + inc;
        }
        self.cells[mv.i * n + mv.j] = mv.value;
        self.cells[mv.j * n + mv.i] = self.mirror(mv.value);
        self.cost = (self.cost as i64 + delta) as u64;
    }

    fn to_matrix(&self) -> DesignMatrix {
        let n = self.params.order;
        DesignMatrix::new(n, n, self.cells.iter().map(|&v| v as i32).collect())
            .expect("state shape is fixed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::verify_weighing;
    use proptest::prelude::*;

    fn kind_strategy() -> impl Strategy<Value = WeighingKind> {
        prop_oneof![Just(WeighingKind::Symmetric), Just(WeighingKind::Skew)]
    }

    #[test]
    fn conference_like_skew_matrix_has_zero_cost() {
        // Skew W(4, 3).
        let m = DesignMatrix::from_rows(&[
            [0, 1, 1, 1],
            [-1, 0, 1, -1],
            [-1, -1, 0, 1],
            [-1, 1, -1, 0],
        ])
        .unwrap();
        let p = WeighingParams { order: 4, weight: 3 };
        let s = WeighingState::from_matrix(p, WeighingKind::Skew, &m).unwrap();
        assert_eq!(s.cost(), 0);
        assert!(WeighingState::from_matrix(p, WeighingKind::Symmetric, &m).is_err());
    }

    #[test]
    fn skew_never_touches_diagonal() {
        let p = WeighingParams { order: 5, weight: 4 };
        let mut rng = SearchRng::from_seed(9);
        let s = WeighingState::random(p, WeighingKind::Skew, &mut rng);
        for _ in 0..200 {
            let mv = s.random_move(&mut rng).unwrap();
            assert!(mv.i < mv.j);
        }
    }

    #[test]
    fn order_one_skew_has_no_moves() {
        let p = WeighingParams { order: 1, weight: 1 };
        let mut rng = SearchRng::from_seed(0);
        let s = WeighingState::random(p, WeighingKind::Skew, &mut rng);
        assert!(s.random_move(&mut rng).is_none());
        assert_eq!(s.cost(), 1);
    }

    proptest! {
        #[test]
        fn delta_matches_recomputation(seed in any::<u64>(), n in 1usize..9, w in 1usize..9, kind in kind_strategy()) {
            let p = WeighingParams { order: n, weight: w.min(n) };
            let mut rng = SearchRng::from_seed(seed);
            let mut s = WeighingState::random(p, kind, &mut rng);
            prop_assert!(s.tallies_consistent());
            for _ in 0..60 {
                let Some(mv) = s.random_move(&mut rng) else { break };
                let before = s.cost();
                let delta = s.delta(&mv);
                s.apply(&mv);
                prop_assert_eq!(s.cost() as i64, before as i64 + delta);
                prop_assert!(s.tallies_consistent());
            }
            let m = s.to_matrix();
            prop_assert_eq!(s.cost() == 0, verify_weighing(&p, kind, &m).unwrap().valid);
            prop_assert!(WeighingState::from_matrix(p, kind, &m).is_ok());
        }
    }
}
