//! Generational genetic algorithm for balanced ternary designs.
//!
//! Individuals are [`BtdState`]s, so every row keeps its `p1` ones and `p2`
//! twos. Parents are chosen by tournament; a child takes each row from one
//! parent or the other with equal probability, then each row is mutated with
//! probability `mutation_rate` by swapping two of its entries. There is no
//! elitism, but the best individual ever seen is remembered. One iteration
//! is one generation.

use super::{
    Budget, BtdState, Neighborhood, RowSwap, SearchError, SearchOutcome, SearchResult, SearchRng,
    Stopwatch,
};
use crate::designs::BtdParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaConfig {
    pub population: usize,
    pub mutation_rate: f64,
    pub tournament_size: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 100,
            mutation_rate: 0.2,
            tournament_size: 3,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.population == 0 {
            return Err(SearchError::Config("population must be positive".into()));
        }
        if self.tournament_size == 0 {
            return Err(SearchError::Config("tournament_size must be positive".into()));
        }
        if !(self.mutation_rate > 0.0 && self.mutation_rate <= 1.0) {
            return Err(SearchError::Config(format!(
                "mutation_rate {} is outside (0, 1]",
                self.mutation_rate
            )));
        }
        Ok(())
    }
}

fn tournament<'a>(population: &'a [BtdState], size: usize, rng: &mut SearchRng) -> &'a BtdState {
    let mut winner = &population[rng.below(population.len())];
    for _ in 1..size {
        let challenger = &population[rng.below(population.len())];
        if challenger.cost() < winner.cost() {
            winner = challenger;
        }
    }
    winner
}

fn breed(
    params: BtdParams,
    a: &BtdState,
    b: &BtdState,
    config: &GaConfig,
    rng: &mut SearchRng,
) -> BtdState {
    let mut cells = Vec::with_capacity(params.elements * params.blocks);
    for r in 0..params.elements {
        let parent = if rng.unit() < 0.5 { a } else { b };
        cells.extend_from_slice(parent.row(r));
    }
    let mut child = BtdState::from_cells(params, cells);
    if params.blocks >= 2 {
        for row in 0..params.elements {
            if rng.unit() < config.mutation_rate {
                let (a, b) = rng.distinct_pair(params.blocks);
                child.apply(&RowSwap { row, a, b });
            }
        }
    }
    child
}

pub fn ga_btd(
    params: BtdParams,
    config: GaConfig,
    rng: &mut SearchRng,
    budget: Budget,
) -> Result<SearchOutcome, SearchError> {
    config.validate()?;
    BtdState::check_params(&params)?;
    let clock = Stopwatch::start(budget);
    let mut population = (0..config.population)
        .map(|_| BtdState::random(params, rng))
        .collect::<Result<Vec<_>, _>>()?;
    let fittest = |pop: &[BtdState]| {
        pop.iter()
            .min_by_key(|s| s.cost())
            .cloned()
            .expect("population is non-empty")
    };
    let mut best = fittest(&population);
    let mut generations = 0u64;
    while best.cost() > 0 && !clock.should_stop_now(generations) {
        generations += 1;
        population = (0..config.population)
            .map(|_| {
                let a = tournament(&population, config.tournament_size, rng);
                let b = tournament(&population, config.tournament_size, rng);
                breed(params, a, b, &config, rng)
            })
            .collect();
        let champion = fittest(&population);
        if champion.cost() < best.cost() {
            best = champion;
        }
    }
    let result = if best.cost() == 0 {
        SearchResult::Solved(best.to_matrix())
    } else {
        SearchResult::Exhausted {
            proven_infeasible: false,
        }
    };
    Ok(SearchOutcome {
        result,
        elapsed: clock.elapsed(),
        iterations: generations,
        final_cost: best.cost(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::verify_btd;

    fn small() -> BtdParams {
        // V = 3, B = 3, p1 = 2, p2 = 0: the complement of the identity.
        BtdParams {
            elements: 3,
            blocks: 3,
            singles: 2,
            doubles: 0,
            replication: 2,
            block_size: 2,
            pair_index: 1,
        }
    }

    #[test]
    fn solves_a_tiny_design() {
        let p = small();
        let out = ga_btd(p, GaConfig::default(), &mut SearchRng::from_seed(2), Budget::Iterations(500)).unwrap();
        assert!(verify_btd(&p, out.solution().expect("solved")).unwrap().valid);
    }

    #[test]
    fn rejects_bad_configuration() {
        let bad = GaConfig { population: 0, ..GaConfig::default() };
        assert!(ga_btd(small(), bad, &mut SearchRng::from_seed(0), Budget::Iterations(1)).is_err());
        let bad = GaConfig { mutation_rate: 1.5, ..GaConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn population_of_one_only_returns_valid_designs() {
        let p = small();
        let cfg = GaConfig { population: 1, mutation_rate: 1.0, tournament_size: 1 };
        for seed in 0..10 {
            let out = ga_btd(p, cfg, &mut SearchRng::from_seed(seed), Budget::Iterations(200)).unwrap();
            if let Some(m) = out.solution() {
                assert!(verify_btd(&p, m).unwrap().valid);
            }
        }
    }

    #[test]
    fn best_cost_never_increases_with_budget() {
        let p = BtdParams {
            elements: 7,
            blocks: 7,
            singles: 3,
            doubles: 0,
            replication: 3,
            block_size: 3,
            pair_index: 1,
        };
        let cfg = GaConfig { population: 30, ..GaConfig::default() };
        let short = ga_btd(p, cfg, &mut SearchRng::from_seed(8), Budget::Iterations(5)).unwrap();
        let long = ga_btd(p, cfg, &mut SearchRng::from_seed(8), Budget::Iterations(50)).unwrap();
        assert!(long.final_cost <= short.final_cost);
        let again = ga_btd(p, cfg, &mut SearchRng::from_seed(8), Budget::Iterations(50)).unwrap();
        assert_eq!(long.fingerprint(), again.fingerprint());
    }
}
