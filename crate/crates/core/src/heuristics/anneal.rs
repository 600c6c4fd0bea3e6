//! Simulated annealing over any [`Neighborhood`].
//!
//! The constant-temperature and periodic-reset variants share one loop:
//! constant temperature is the reset schedule with `cooling_rate = 1` and no
//! resets, which makes the two bit-identical on the same seed.

use super::{Budget, SearchOutcome, SearchResult, SearchRng, Stopwatch};
use crate::designs::DesignMatrix;

/// A search state with incrementally maintained cost.
pub trait Neighborhood {
    type Move: Copy;

    fn cost(&self) -> u64;

    /// A uniformly random move, or `None` when the neighbourhood is empty.
    fn random_move(&self, rng: &mut SearchRng) -> Option<Self::Move>;

    /// Cost change the move would cause, without applying it.
    fn delta(&self, mv: &Self::Move) -> i64;

    fn apply(&mut self, mv: &Self::Move);

    fn to_matrix(&self) -> DesignMatrix;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResetSchedule {
    pub initial_temperature: f64,
    /// Multiplier applied to the temperature after every iteration.
    pub cooling_rate: f64,
    /// Restore the initial temperature every this many iterations.
    pub reset_period: Option<u64>,
}

impl ResetSchedule {
    pub fn constant(temperature: f64) -> Self {
        Self {
            initial_temperature: temperature,
            cooling_rate: 1.0,
            reset_period: None,
        }
    }
}

/// Runs annealing until the cost reaches zero or the budget is spent.
pub fn anneal<S: Neighborhood>(
    state: &mut S,
    rng: &mut SearchRng,
    budget: Budget,
    schedule: ResetSchedule,
) -> SearchOutcome {
    let clock = Stopwatch::start(budget);
    let mut temperature = schedule.initial_temperature;
    let mut iterations = 0u64;
    let mut best = state.cost();
    while state.cost() > 0 && !clock.should_stop(iterations) {
        iterations += 1;
        if let Some(mv) = state.random_move(rng) {
            let delta = state.delta(&mv);
            if delta <= 0 || rng.unit() < (-(delta as f64) / temperature).exp() {
                state.apply(&mv);
                best = best.min(state.cost());
            }
        }
        temperature *= schedule.cooling_rate;
        if let Some(period) = schedule.reset_period {
            if period > 0 && iterations % period == 0 {
                temperature = schedule.initial_temperature;
            }
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

pub fn sa_constant_temperature<S: Neighborhood>(
    state: &mut S,
    rng: &mut SearchRng,
    budget: Budget,
    temperature: f64,
) -> SearchOutcome {
    anneal(state, rng, budget, ResetSchedule::constant(temperature))
}

pub fn sa_with_resets<S: Neighborhood>(
    state: &mut S,
    rng: &mut SearchRng,
    budget: Budget,
    initial_temperature: f64,
    cooling_rate: f64,
    reset_period: u64,
) -> SearchOutcome {
    anneal(
        state,
        rng,
        budget,
        ResetSchedule {
            initial_temperature,
            cooling_rate,
            reset_period: Some(reset_period),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{verify, EpaParams, InstanceSpec, PaParams};
    use crate::heuristics::{EpaState, PaState};

    #[test]
    fn constant_and_unit_cooling_reset_agree() {
        let p = PaParams { rows: 9, cols: 4, symbols: 3 };
        for seed in 0..4 {
            let mut rng_a = SearchRng::from_seed(seed);
            let mut a = PaState::random(p, &mut rng_a);
            let out_a =
                sa_constant_temperature(&mut a, &mut rng_a, Budget::Iterations(5000), 0.3);
            let mut rng_b = SearchRng::from_seed(seed);
            let mut b = PaState::random(p, &mut rng_b);
            let out_b = sa_with_resets(&mut b, &mut rng_b, Budget::Iterations(5000), 0.3, 1.0, 100);
            assert_eq!(out_a.fingerprint(), out_b.fingerprint());
        }
    }

    #[test]
    fn solves_small_epa() {
        let p = EpaParams { length: 5, distance: 3, rows: 4 };
        let mut rng = SearchRng::from_seed(3);
        let mut s = EpaState::random(p, &mut rng);
        let out = sa_constant_temperature(&mut s, &mut rng, Budget::Iterations(200_000), 0.5);
        let m = out.solution().expect("small EPA should be solved");
        assert!(verify(&InstanceSpec::Epa(p), m).unwrap().valid);
    }

    #[test]
    fn zero_budget_reports_initial_cost() {
        let p = PaParams { rows: 9, cols: 4, symbols: 3 };
        let mut rng = SearchRng::from_seed(0);
        let mut s = PaState::random(p, &mut rng);
        let initial = s.cost();
        let out = sa_constant_temperature(&mut s, &mut rng, Budget::Iterations(0), 1.0);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.final_cost, initial);
    }
}
