//! Synthetic populations, Monte Carlo risk and simulation sweeps.

mod experiment;
mod risk;
mod sampling;
mod scenario;

pub use experiment::{
    replicate_seed, run_experiment, run_replicate, ExperimentConfig, ExperimentMethod, ResultRow,
    ResultTable, Sweep, SweepAxis, DEFAULT_TEST_SETS_PER_CLASS,
};
pub use risk::{monte_carlo_risk, monte_carlo_risks, RiskEstimate, SetRule, MIN_REPLICATIONS};
pub use sampling::{generate_training, sample_set, SetSizeDistribution};
pub use scenario::{
    scenario_models, scenario_population, support, Scenario, ScenarioConfig, ScenarioPopulation,
    SPARSE_ENTRY_COUNT,
};
