//! Best-improvement local search for EPAs.
//!
//! Each step picks a random row among those that contribute to the cost and
//! applies the best swap within it, even if that swap makes things worse.
//! Ties between equally good swaps are broken uniformly at random.

use super::{Budget, EpaState, Neighborhood, SearchOutcome, SearchResult, SearchRng, Stopwatch, SwapMove};

pub fn local_search_epa(state: &mut EpaState, rng: &mut SearchRng, budget: Budget) -> SearchOutcome {
    let clock = Stopwatch::start(budget);
    let p = state.params();
    let mut iterations = 0u64;
    let mut best = state.cost();
    let mut bad_rows = Vec::with_capacity(p.rows);
    while state.cost() > 0 && !clock.should_stop(iterations) {
        iterations += 1;
        bad_rows.clear();
        bad_rows.extend((0..p.rows).filter(|&r| state.row_cost(r) > 0));
        let row = bad_rows[rng.below(bad_rows.len())];

        let mut chosen: Option<(i64, SwapMove)> = None;
        let mut ties = 0usize;
        for a in 0..p.length {
            for b in a + 1..p.length {
                let mv = SwapMove { row, a, b };
                let delta = state.delta(&mv);
                match chosen {
                    Some((d, _)) if delta > d => {}
                    Some((d, _)) if delta == d => {
                        // Reservoir sampling over the tied moves.
                        ties += 1;
                        if rng.below(ties) == 0 {
                            chosen = Some((delta, mv));
                        }
                    }
                    _ => {
                        ties = 1;
                        chosen = Some((delta, mv));
                    }
                }
            }
        }
        if let Some((_, mv)) = chosen {
            state.apply(&mv);
            best = best.min(state.cost());
        }
    }
    let result = if state.cost() == 0 {
        SearchResult::Solved(state.to_matrix())
    } else {
        SearchResult::Exhausted {
            proven_infeasible: false,
        }
    };
    SearchOutcome {
        result,
        elapsed: clock.elapsed(),
        iterations,
        final_cost: best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{verify_epa, EpaParams};

    #[test]
    fn solves_small_instances() {
        for (n, d, m) in [(4, 4, 4), (5, 3, 4), (5, 4, 5)] {
            let p = EpaParams { length: n, distance: d, rows: m };
            let mut rng = SearchRng::from_seed(11);
            let mut s = EpaState::random(p, &mut rng);
            let out = local_search_epa(&mut s, &mut rng, Budget::Iterations(100_000));
            let sol = out.solution().unwrap_or_else(|| panic!("EPA({n},{d},{m}) not solved"));
            assert!(verify_epa(&p, sol).unwrap().valid);
        }
    }

    #[test]
    fn single_symbol_rows_just_spend_the_budget() {
        // n = 1, d = 1 is unreachable and there are no swaps.
        let p = EpaParams { length: 1, distance: 1, rows: 2 };
        let mut rng = SearchRng::from_seed(0);
        let mut s = EpaState::random(p, &mut rng);
        let out = local_search_epa(&mut s, &mut rng, Budget::Iterations(50));
        assert_eq!(out.iterations, 50);
        assert_eq!(out.final_cost, 1);
    }

    #[test]
    fn same_seed_same_run() {
        let p = EpaParams { length: 8, distance: 6, rows: 9 };
        let run = |seed| {
            let mut rng = SearchRng::from_seed(seed);
            let mut s = EpaState::random(p, &mut rng);
            local_search_epa(&mut s, &mut rng, Budget::Iterations(2000)).fingerprint()
        };
        assert_eq!(run(5), run(5));
    }
}
