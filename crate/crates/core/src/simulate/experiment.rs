use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    plugin_classifier, pooled_moments, tune_and_fit, FittedSetClassifier, PluginVariant,
    TuningGrid, DEFAULT_ENRICH_DELTA,
};
use crate::model::{classify_bayes, classify_mean_qda, oracle_coefficients, ClassLabel, LabeledSet, SetSample};

use super::{generate_training, scenario_population, ScenarioConfig, ScenarioPopulation, SetSizeDistribution};

/// Test sets per class when a configuration does not say.
pub const DEFAULT_TEST_SETS_PER_CLASS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentMethod {
    #[serde(rename = "clips")]
    Clips,
    #[serde(rename = "plugin-full")]
    PluginFull,
    #[serde(rename = "plugin-diag")]
    PluginDiagonal,
    #[serde(rename = "plugin-enriched")]
    PluginEnriched,
    /// Majority vote with the tuned CLIPS coefficients.
    #[serde(rename = "qda-mv")]
    QdaMajorityVote,
    #[serde(rename = "oracle-bayes")]
    OracleBayes,
    #[serde(rename = "oracle-mean-qda")]
    OracleMeanQda,
}

impl ExperimentMethod {
    pub const ALL: [ExperimentMethod; 7] = [
        ExperimentMethod::Clips,
        ExperimentMethod::PluginFull,
        ExperimentMethod::PluginDiagonal,
        ExperimentMethod::PluginEnriched,
        ExperimentMethod::QdaMajorityVote,
        ExperimentMethod::OracleBayes,
        ExperimentMethod::OracleMeanQda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentMethod::Clips => "clips",
            ExperimentMethod::PluginFull => "plugin-full",
            ExperimentMethod::PluginDiagonal => "plugin-diag",
            ExperimentMethod::PluginEnriched => "plugin-enriched",
            ExperimentMethod::QdaMajorityVote => "qda-mv",
            ExperimentMethod::OracleBayes => "oracle-bayes",
            ExperimentMethod::OracleMeanQda => "oracle-mean-qda",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    fn uses_clips(self) -> bool {
        matches!(self, ExperimentMethod::Clips | ExperimentMethod::QdaMajorityVote)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    CovarianceSignal,
    MeanSignal,
    Dimension,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

fn default_test_sets() -> usize {
    DEFAULT_TEST_SETS_PER_CLASS
}

fn default_enrich_delta() -> f64 {
    DEFAULT_ENRICH_DELTA
}

fn default_methods() -> Vec<ExperimentMethod> {
    vec![
        ExperimentMethod::Clips,
        ExperimentMethod::PluginDiagonal,
        ExperimentMethod::PluginEnriched,
        ExperimentMethod::QdaMajorityVote,
        ExperimentMethod::OracleBayes,
        ExperimentMethod::OracleMeanQda,
    ]
}

/// A simulation sweep over one scenario parameter.
///
/// Each replicate draws independent training, tuning and test sets; CLIPS
/// penalties are chosen on the tuning sets over the default grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario_config: ScenarioConfig,
    pub sweep: Sweep,
    pub sets_per_class: usize,
    pub set_size: SetSizeDistribution,
    pub replicate_count: usize,
    #[serde(default = "default_test_sets")]
    pub test_sets_per_class: usize,
    /// Defaults to `sets_per_class`.
    #[serde(default)]
    pub tune_sets_per_class: Option<usize>,
    pub master_seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<ExperimentMethod>,
    #[serde(default = "default_enrich_delta")]
    pub enrich_delta: f64,
}

impl ExperimentConfig {
    pub fn tune_sets(&self) -> usize {
        self.tune_sets_per_class.unwrap_or(self.sets_per_class)
    }

    /// Scenario with the swept parameter set to `value`.
    pub fn scenario_at(&self, value: f64) -> Result<ScenarioConfig> {
        let mut config = self.scenario_config.clone();
        match self.sweep.axis {
            SweepAxis::CovarianceSignal => config.covariance_signal = value,
            SweepAxis::MeanSignal => config.mean_signal = value,
            SweepAxis::Dimension => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(Error::InvalidParameter(format!(
                        "sweep.values: dimension {value} is not a positive integer"
                    )));
                }
                config.dimension = value as usize;
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.replicate_count == 0 {
            return invalid("replicate_count must be at least 1");
        }
        if self.sweep.values.is_empty() {
            return invalid("sweep.values must be nonempty");
        }
        if self.methods.is_empty() {
            return invalid("methods must be nonempty");
        }
        if self.test_sets_per_class == 0 {
            return invalid("test_sets_per_class must be at least 1");
        }
        let needs_split = self.methods.iter().any(|m| m.uses_clips());
        let min_sets = if needs_split { 2 } else { 1 };
        if self.sets_per_class < min_sets {
            return invalid("sets_per_class must be at least 2 when clips or qda-mv is requested");
        }
        if needs_split && self.tune_sets() == 0 {
            return invalid("tune_sets_per_class must be at least 1");
        }
        if !(self.enrich_delta > 0.0 && self.enrich_delta.is_finite()) {
            return invalid("enrich_delta must be positive");
        }
        self.set_size
            .validate()
            .map_err(|e| Error::InvalidParameter(format!("set_size: {e}")))?;
        for &v in &self.sweep.values {
            self.scenario_at(v)?
                .validate()
                .map_err(|e| Error::InvalidParameter(format!("scenario_config at swept value {v}: {e}")))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub swept_value: f64,
    pub method: ExperimentMethod,
    /// Mean test error over the replicates where the method could be fitted.
    pub mean_error: Option<f64>,
    /// Standard deviation over those replicates divided by the square root of
    /// their number (0 for a single replicate).
    pub std_error: Option<f64>,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn row(&self, swept_value: f64, method: ExperimentMethod) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.swept_value == swept_value && r.method == method)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the random stream for one replicate of one sweep cell.
pub fn replicate_seed(master_seed: u64, sweep_index: usize, replicate_index: usize) -> u64 {
    let h = splitmix64(master_seed);
    let h = splitmix64(h ^ sweep_index as u64);
    splitmix64(h ^ (replicate_index as u64).rotate_left(32))
}

fn test_error<F: Fn(&SetSample) -> Result<ClassLabel>>(rule: F, test: &[LabeledSet]) -> Result<f64> {
    let mut wrong = 0;
    for s in test {
        if rule(&s.sample)? != s.label {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / test.len() as f64)
}

fn classifier_error(fit: &FittedSetClassifier, test: &[LabeledSet]) -> Result<f64> {
    test_error(|s| fit.classify(s), test)
}

/// Test errors of every requested method on one replicate, in method order;
/// `None` where fitting or evaluation failed.
pub fn run_replicate(
    config: &ExperimentConfig,
    population: &ScenarioPopulation,
    seed: u64,
) -> Result<Vec<Option<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (c1, c2) = (&population.class1, &population.class2);
    let training = generate_training(c1, c2, config.sets_per_class, &config.set_size, &mut rng)?;
    let tuning = generate_training(c1, c2, config.tune_sets(), &config.set_size, &mut rng)?;
    let test = generate_training(c1, c2, config.test_sets_per_class, &config.set_size, &mut rng)?;
    let split_seed: u64 = rng.random();

    let clips = if config.methods.iter().any(|m| m.uses_clips()) {
        TuningGrid::default_for(&training)
            .and_then(|grid| tune_and_fit(&training, &tuning, &grid, split_seed))
            .ok()
            .map(|outcome| outcome.classifier)
    } else {
        None
    };
    let moments = pooled_moments(&training).ok();
    let plugin = |variant| {
        moments
            .as_ref()
            .and_then(|m| plugin_classifier(m, variant).ok())
            .and_then(|fit| classifier_error(&fit, &test).ok())
    };

    Ok(config
        .methods
        .iter()
        .map(|&method| match method {
            ExperimentMethod::Clips => clips.as_ref().and_then(|f| classifier_error(f, &test).ok()),
            ExperimentMethod::QdaMajorityVote => clips
                .as_ref()
                .and_then(|f| classifier_error(&f.as_majority_vote(), &test).ok()),
            ExperimentMethod::PluginFull => plugin(PluginVariant::Full),
            ExperimentMethod::PluginDiagonal => plugin(PluginVariant::Diagonal),
            ExperimentMethod::PluginEnriched => plugin(PluginVariant::Enriched(config.enrich_delta)),
            ExperimentMethod::OracleBayes => oracle_coefficients(c1, c2)
                .and_then(|coeffs| test_error(|s| classify_bayes(&coeffs, s), &test))
                .ok(),
            ExperimentMethod::OracleMeanQda => test_error(|s| classify_mean_qda(c1, c2, s), &test).ok(),
        })
        .collect())
}

fn summarize(errors: &[f64]) -> (Option<f64>, Option<f64>) {
    let r = errors.len();
    if r == 0 {
        return (None, None);
    }
    let mean = errors.iter().sum::<f64>() / r as f64;
    if r == 1 {
        return (Some(mean), Some(0.0));
    }
    let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    (Some(mean), Some((var / r as f64).sqrt()))
}

/// Runs the sweep. Fitting failures are recorded as missing replicates of
/// the affected method; only an invalid configuration or population aborts.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let mut table = ResultTable::default();
    for (sweep_index, &value) in config.sweep.values.iter().enumerate() {
        let population = scenario_population(&config.scenario_at(value)?)?;
        let per_replicate: Vec<Vec<Option<f64>>> = (0..config.replicate_count)
            .into_par_iter()
            .map(|r| run_replicate(config, &population, replicate_seed(config.master_seed, sweep_index, r)))
            .collect::<Result<_>>()?;
        for (k, &method) in config.methods.iter().enumerate() {
            let errors: Vec<f64> = per_replicate.iter().filter_map(|errs| errs[k]).collect();
            let (mean_error, std_error) = summarize(&errors);
            table.rows.push(ResultRow {
                swept_value: value,
                method,
                mean_error,
                std_error,
                replicates: errors.len(),
            });
        }
    }
    Ok(table)
}
