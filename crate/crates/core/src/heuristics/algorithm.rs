//! The built-in search strategies, addressed by name.

use std::fmt;
use std::str::FromStr;

use super::{
    anneal, dfs_florentine, ga_btd, local_search_epa, Budget, BtdState, EpaState, GaConfig,
    PaState, ResetSchedule, SearchError, SearchOutcome, SearchRng, WeighingState,
};
use crate::designs::{DesignFamily, InstanceSpec, WeighingKind};
use crate::tuner::{Assignment, HyperparameterSpec, ParamKind, ParamValue};

/// Temperature used by the EPA annealer in its published form.
pub const EPA_TEMPERATURE: f64 = 0.444444;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    LocalSearch,
    SaConst,
    SaReset,
    Genetic,
    Dfs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::LocalSearch,
        Algorithm::SaConst,
        Algorithm::SaReset,
        Algorithm::Genetic,
        Algorithm::Dfs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LocalSearch => "local-search",
            Algorithm::SaConst => "sa-const",
            Algorithm::SaReset => "sa-reset",
            Algorithm::Genetic => "ga",
            Algorithm::Dfs => "dfs",
        }
    }

    pub fn supports(self, family: DesignFamily) -> bool {
        use DesignFamily::*;
        match self {
            Algorithm::LocalSearch => family == Epa,
            Algorithm::SaConst | Algorithm::SaReset => matches!(family, Epa | Pa | SymmW | SkewW),
            Algorithm::Genetic => family == Btd,
            Algorithm::Dfs => family == Fr,
        }
    }

    /// The strategy used when none is named.
    pub fn default_for(family: DesignFamily) -> Self {
        match family {
            DesignFamily::Pa | DesignFamily::Epa => Algorithm::SaConst,
            DesignFamily::SymmW | DesignFamily::SkewW => Algorithm::SaReset,
            DesignFamily::Btd => Algorithm::Genetic,
            DesignFamily::Fr => Algorithm::Dfs,
        }
    }

    /// Tunable parameters with their tuning ranges and defaults.
    pub fn hyper_specs(self) -> Vec<HyperparameterSpec> {
        match self {
            Algorithm::LocalSearch | Algorithm::Dfs => Vec::new(),
            Algorithm::SaConst => vec![HyperparameterSpec::real("T", 0.01, 5.0, EPA_TEMPERATURE)],
            // Weighing costs move in steps of 2 or more, hence the hotter start.
            Algorithm::SaReset => vec![
                HyperparameterSpec::real("T0", 0.01, 5.0, 2.0),
                HyperparameterSpec::real("cooling_rate", 0.5, 1.0, 0.9999),
                HyperparameterSpec::integer("reset_period", 100, 1_000_000, 100_000),
            ],
            Algorithm::Genetic => vec![
                HyperparameterSpec::integer("population", 10, 500, 100),
                HyperparameterSpec::real("mutation_rate", 0.01, 1.0, 0.2),
                HyperparameterSpec::integer("tournament_size", 1, 10, 3),
            ],
        }
    }

    /// Fills in defaults and checks names and kinds. Values outside the
    /// tuning range are allowed; the drivers enforce the hard limits.
    pub fn resolve(self, assignment: &Assignment) -> Result<Assignment, SearchError> {
        let specs = self.hyper_specs();
        for (name, _) in assignment.iter() {
            if !specs.iter().any(|s| s.name == name) {
                return Err(SearchError::Config(format!(
                    "{} has no hyperparameter `{name}`",
                    self.name()
                )));
            }
        }
        let mut out = Assignment::new();
        for spec in specs {
            let value = match (spec.kind, assignment.get(&spec.name)) {
                (_, None) => spec.value(spec.default),
                (ParamKind::Real, Some(v)) => ParamValue::Real(v.as_f64()),
                (ParamKind::Integer, Some(ParamValue::Int(v))) => ParamValue::Int(v),
                (ParamKind::Integer, Some(ParamValue::Real(v))) => {
                    if v.fract() != 0.0 {
                        return Err(SearchError::Config(format!(
                            "{} must be an integer, got {v}",
                            spec.name
                        )));
                    }
                    ParamValue::Int(v as i64)
                }
            };
            out.set(&spec.name, value);
        }
        Ok(out)
    }

    pub fn run(
        self,
        instance: &InstanceSpec,
        seed: u64,
        budget: Budget,
        assignment: &Assignment,
    ) -> Result<SearchOutcome, SearchError> {
        if !self.supports(instance.family()) {
            return Err(SearchError::Unsupported {
                algorithm: self.name().to_string(),
                family: instance.family(),
            });
        }
        let hyper = self.resolve(assignment)?;
        let real = |name: &str| hyper.get(name).map(ParamValue::as_f64).unwrap_or_default();
        let int = |name: &str| real(name) as i64;
        let positive = |name: &str| {
            let v = real(name);
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(SearchError::Config(format!("{name} must be positive, got {v}")))
            }
        };
        let mut rng = SearchRng::from_seed(seed);
        match self {
            Algorithm::LocalSearch => {
                let InstanceSpec::Epa(p) = *instance else { unreachable!() };
                let mut state = EpaState::random(p, &mut rng);
                Ok(local_search_epa(&mut state, &mut rng, budget))
            }
            Algorithm::SaConst => {
                let t = positive("T")?;
                Ok(anneal_instance(instance, &mut rng, budget, ResetSchedule::constant(t)))
            }
            Algorithm::SaReset => {
                let t0 = positive("T0")?;
                let cooling = positive("cooling_rate")?;
                if cooling > 1.0 {
                    return Err(SearchError::Config(format!(
                        "cooling_rate must be in (0, 1], got {cooling}"
                    )));
                }
                let period = int("reset_period");
                if period < 1 {
                    return Err(SearchError::Config(format!(
                        "reset_period must be positive, got {period}"
                    )));
                }
                let schedule = ResetSchedule {
                    initial_temperature: t0,
                    cooling_rate: cooling,
                    reset_period: Some(period as u64),
                };
                Ok(anneal_instance(instance, &mut rng, budget, schedule))
            }
            Algorithm::Genetic => {
                let InstanceSpec::Btd(p) = *instance else { unreachable!() };
                let population = int("population");
                let tournament = int("tournament_size");
                if population < 1 || tournament < 1 {
                    return Err(SearchError::Config(
                        "population and tournament_size must be positive".into(),
                    ));
                }
                let config = GaConfig {
                    population: population as usize,
                    mutation_rate: real("mutation_rate"),
                    tournament_size: tournament as usize,
                };
                BtdState::check_params(&p)?;
                ga_btd(p, config, &mut rng, budget)
            }
            Algorithm::Dfs => {
                let InstanceSpec::Fr(p) = *instance else { unreachable!() };
                Ok(dfs_florentine(p, &mut rng, budget))
            }
        }
    }
}

fn anneal_instance(
    instance: &InstanceSpec,
    rng: &mut SearchRng,
    budget: Budget,
    schedule: ResetSchedule,
) -> SearchOutcome {
    match *instance {
        InstanceSpec::Epa(p) => anneal(&mut EpaState::random(p, rng), rng, budget, schedule),
        InstanceSpec::Pa(p) => anneal(&mut PaState::random(p, rng), rng, budget, schedule),
        InstanceSpec::SymmW(p) => {
            let mut s = WeighingState::random(p, WeighingKind::Symmetric, rng);
            anneal(&mut s, rng, budget, schedule)
        }
        InstanceSpec::SkewW(p) => {
            let mut s = WeighingState::random(p, WeighingKind::Skew, rng);
            anneal(&mut s, rng, budget, schedule)
        }
        _ => unreachable!("checked by supports()"),
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                SearchError::Config(format!("unknown algorithm `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{
        verify, BtdParams, EpaParams, FrParams, PaParams, WeighingParams,
    };

    fn hyper(text: &str) -> Assignment {
        Assignment::parse(text).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("tabu".parse::<Algorithm>().is_err());
    }

    #[test]
    fn unsupported_pairing_is_an_error() {
        let fr = InstanceSpec::Fr(FrParams { rows: 1, symbols: 3 });
        assert!(matches!(
            Algorithm::SaConst.run(&fr, 0, Budget::Iterations(10), &Assignment::new()),
            Err(SearchError::Unsupported { .. })
        ));
    }

    #[test]
    fn configuration_errors_precede_search() {
        let epa = InstanceSpec::Epa(EpaParams { length: 5, distance: 5, rows: 5 });
        let run = |alg: Algorithm, h: &str| alg.run(&epa, 0, Budget::Iterations(10), &hyper(h));
        assert!(matches!(run(Algorithm::SaConst, "T=0"), Err(SearchError::Config(_))));
        assert!(matches!(run(Algorithm::SaConst, "T=-1"), Err(SearchError::Config(_))));
        assert!(matches!(run(Algorithm::SaConst, "gamma=1"), Err(SearchError::Config(_))));
        assert!(matches!(run(Algorithm::SaReset, "cooling_rate=1.5"), Err(SearchError::Config(_))));
        assert!(matches!(run(Algorithm::SaReset, "reset_period=0"), Err(SearchError::Config(_))));
        assert!(matches!(run(Algorithm::SaReset, "reset_period=2.5"), Err(SearchError::Config(_))));
        let btd = InstanceSpec::Btd(BtdParams {
            elements: 3,
            blocks: 3,
            singles: 2,
            doubles: 0,
            replication: 2,
            block_size: 2,
            pair_index: 1,
        });
        let ga = |h: &str| Algorithm::Genetic.run(&btd, 0, Budget::Iterations(10), &hyper(h));
        assert!(matches!(ga("mutation_rate=0"), Err(SearchError::Config(_))));
        assert!(matches!(ga("population=0"), Err(SearchError::Config(_))));
        assert!(ga("population=5").is_ok());
    }

    #[test]
    fn resolve_fills_defaults_in_spec_order() {
        let r = Algorithm::SaReset.resolve(&hyper("reset_period=500,T0=1")).unwrap();
        assert_eq!(r.to_string(), "T0=1,cooling_rate=0.9999,reset_period=500");
        assert_eq!(r.get("T0"), Some(ParamValue::Real(1.0)));
    }

    fn solved(alg: Algorithm, instance: InstanceSpec, h: &str, iters: u64) {
        let out = alg.run(&instance, 1, Budget::Iterations(iters), &hyper(h)).unwrap();
        let m = out.solution().unwrap_or_else(|| panic!("{alg} did not solve {instance}"));
        assert!(verify(&instance, m).unwrap().valid);
        assert_eq!(out.final_cost, 0);
    }

    #[test]
    fn small_instances_of_every_family() {
        solved(Algorithm::SaConst, InstanceSpec::Epa(EpaParams { length: 6, distance: 6, rows: 6 }), "T=0.444444", 1_000_000);
        solved(Algorithm::SaConst, InstanceSpec::Pa(PaParams { rows: 4, cols: 6, symbols: 3 }), "", 1_000_000);
        solved(Algorithm::SaReset, InstanceSpec::SymmW(WeighingParams { order: 5, weight: 1 }), "", 1_000_000);
        solved(Algorithm::SaReset, InstanceSpec::SkewW(WeighingParams { order: 2, weight: 1 }), "", 1_000_000);
        solved(Algorithm::SaConst, InstanceSpec::SkewW(WeighingParams { order: 4, weight: 3 }), "T=0.5", 1_000_000);
        solved(Algorithm::LocalSearch, InstanceSpec::Epa(EpaParams { length: 5, distance: 5, rows: 5 }), "", 100_000);
        solved(Algorithm::Dfs, InstanceSpec::Fr(FrParams { rows: 1, symbols: 5 }), "", 10);
    }

    #[test]
    fn impossible_epa_exhausts_budget() {
        // Two permutations can never differ in exactly one position.
        let epa = InstanceSpec::Epa(EpaParams { length: 4, distance: 1, rows: 2 });
        for alg in [Algorithm::LocalSearch, Algorithm::SaConst] {
            let out = alg.run(&epa, 3, Budget::Iterations(500), &Assignment::new()).unwrap();
            assert_eq!(out.result, crate::heuristics::SearchResult::Exhausted { proven_infeasible: false });
            assert!(out.final_cost > 0);
        }
    }

    #[test]
    fn every_driver_is_deterministic() {
        let cases = [
            (Algorithm::LocalSearch, InstanceSpec::Epa(EpaParams { length: 9, distance: 7, rows: 12 })),
            (Algorithm::SaConst, InstanceSpec::Pa(PaParams { rows: 30, cols: 5, symbols: 6 })),
            (Algorithm::SaReset, InstanceSpec::SkewW(WeighingParams { order: 10, weight: 9 })),
            (Algorithm::Genetic, InstanceSpec::Btd(BtdParams {
                elements: 7,
                blocks: 7,
                singles: 3,
                doubles: 0,
                replication: 3,
                block_size: 3,
                pair_index: 1,
            })),
            (Algorithm::Dfs, InstanceSpec::Fr(FrParams { rows: 5, symbols: 9 })),
        ];
        for (alg, instance) in cases {
            let budget = Budget::Iterations(if alg == Algorithm::Genetic { 20 } else { 3000 });
            let a = alg.run(&instance, 42, budget, &Assignment::new()).unwrap();
            let b = alg.run(&instance, 42, budget, &Assignment::new()).unwrap();
            assert_eq!(a.fingerprint(), b.fingerprint(), "{alg}");
        }
    }
}
