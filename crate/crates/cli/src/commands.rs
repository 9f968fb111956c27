use std::io::Write;
use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use setclass::estimators::{
    fit_clips, plugin_classifier, pooled_moments, tune_and_fit, validation_split,
    ClipsHyperparameters, FittedSetClassifier, MethodTag, PluginVariant, TuningGrid,
};
use setclass::model::{
    classify_bayes, classify_majority_vote, classify_mean_qda, oracle_coefficients, ClassLabel,
    GaussianClassModel, SetSample,
};
use setclass::simulate::{
    generate_training, monte_carlo_risks, run_experiment, scenario_models, ExperimentConfig,
    ResultTable, Scenario, ScenarioConfig, SetSizeDistribution,
};

use crate::args::{GenerateArgs, MethodArg, PredictArgs, RiskArgs, ScenarioArgs, SimulateArgs, TrainArgs};
use crate::data::{csv_err, read_set_data, write_set_data, SetData};
use crate::error::{CliError, CliResult};
use crate::model_file::{load_model, save_model};
use crate::population::PopulationSpec;

/// Writes `contents` next to `path` and renames it into place, so a failed
/// command never leaves a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::input(format!("cannot write to {}: {e}", dir.display())))?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn method_tag(m: MethodArg) -> MethodTag {
    match m {
        MethodArg::Clips => MethodTag::Clips,
        MethodArg::PluginFull => MethodTag::PluginFull,
        MethodArg::PluginDiag => MethodTag::PluginDiagonal,
        MethodArg::PluginEnriched => MethodTag::PluginEnriched,
        MethodArg::QdaMv => MethodTag::QdaMajorityVote,
    }
}

fn fit_clips_for(args: &TrainArgs, sets: &[setclass::model::LabeledSet]) -> CliResult<FittedSetClassifier> {
    let split_seed = args.split_seed.unwrap_or(args.seed);
    if let (Some(l1), Some(lt), Some(l2)) = (args.clime_lambda, args.threshold_lambda, args.beta_lambda) {
        let mut hyper = ClipsHyperparameters::new(l1, lt, l2, split_seed);
        hyper.l1_cap = args.l1_cap;
        return fit_clips(sets, &hyper).map_err(|e| CliError::stage("clips", e));
    }
    if args.l1_cap.is_some() {
        return Err(CliError::input("--l1-cap needs all three penalties (tuning does not use it)"));
    }
    let (training, validation) =
        validation_split(sets, args.tune_fraction, args.seed).map_err(|e| CliError::stage("tuning split", e))?;
    let mut grid = TuningGrid::default_for(&training).map_err(|e| CliError::stage("tuning grid", e))?;
    if let Some(v) = args.clime_lambda {
        grid.clime_lambdas = vec![v];
    }
    if let Some(v) = args.threshold_lambda {
        grid.threshold_lambdas = vec![v];
    }
    if let Some(v) = args.beta_lambda {
        grid.beta_lambdas = vec![v];
    }
    let outcome = tune_and_fit(&training, &validation, &grid, split_seed).map_err(|e| CliError::stage("tuning", e))?;
    eprintln!(
        "tuned clime_lambda={} threshold_lambda={} beta_lambda={} validation_error={}",
        outcome.hyperparameters.clime_lambda,
        outcome.hyperparameters.threshold_lambda,
        outcome.hyperparameters.beta_lambda,
        outcome.validation_error
    );
    Ok(outcome.classifier)
}

pub fn train(args: &TrainArgs) -> CliResult<String> {
    let data = read_set_data(&args.data)?;
    let sets = data.labeled()?;
    let tag = method_tag(args.method);
    let fit = match tag {
        MethodTag::Clips => fit_clips_for(args, &sets)?,
        MethodTag::QdaMajorityVote => fit_clips_for(args, &sets)?.as_majority_vote(),
        _ => {
            let variant = match tag {
                MethodTag::PluginFull => PluginVariant::Full,
                MethodTag::PluginDiagonal => PluginVariant::Diagonal,
                _ => PluginVariant::Enriched(args.enrich_delta),
            };
            let moments = pooled_moments(&sets).map_err(|e| CliError::stage("pooled moments", e))?;
            plugin_classifier(&moments, variant).map_err(|e| CliError::stage(tag.name(), e))?
        }
    };
    write_atomic(&args.out, save_model(&fit).as_bytes())?;
    let c = &fit.coefficients;
    Ok(format!(
        "method={} beta_nonzero={} nabla_support={} beta0={}",
        tag.name(),
        c.linear_support_size(),
        c.quadratic_support_size(),
        c.constant
    ))
}

pub fn predict(args: &PredictArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.model)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", args.model.display())))?;
    let fit = load_model(&text)?;
    let data = read_set_data(&args.data)?;
    if data.dimension != fit.coefficients.dim() {
        return Err(CliError::input(format!(
            "data has {} features, model expects {}",
            data.dimension,
            fit.coefficients.dim()
        )));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["set_id", "predicted_label", "g_value"]).map_err(csv_err)?;
    for set in &data.sets {
        let g = fit.score(&set.sample).map_err(|e| CliError::stage("predict", e))?;
        let label = ClassLabel::from_score(g);
        w.write_record([set.set_id.clone(), label.to_string(), g.to_string()])
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    write_atomic(&args.out, &bytes)
}

pub fn read_experiment_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let config: ExperimentConfig =
        toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    config
        .validate()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(config)
}

pub fn result_table_csv(table: &ResultTable) -> CliResult<Vec<u8>> {
    let opt = |v: Option<f64>| v.map_or("NA".to_string(), |x| x.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["swept_value", "method", "mean_error", "std_error", "replicates"])
        .map_err(csv_err)?;
    for row in &table.rows {
        w.write_record([
            row.swept_value.to_string(),
            row.method.name().to_string(),
            opt(row.mean_error),
            opt(row.std_error),
            row.replicates.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::input(e.to_string()))
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let mut config = read_experiment_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(reps) = args.reps {
        config.replicate_count = reps;
        config
            .validate()
            .map_err(|e| CliError::input(format!("--reps: {e}")))?;
    }
    let table = run_experiment(&config).map_err(|e| CliError::stage("simulate", e))?;
    write_atomic(&args.out, &result_table_csv(&table)?)
}

fn population_models(args: &ScenarioArgs) -> CliResult<(GaussianClassModel, GaussianClassModel)> {
    match (&args.population, args.scenario) {
        (Some(path), _) => PopulationSpec::read(path)?.models(),
        (None, Some(s)) => {
            let scenario = Scenario::try_from(s).map_err(CliError::Input)?;
            let config = ScenarioConfig::new(scenario, args.dimension, args.covariance_signal, args.mean_signal)
                .with_structure_seed(args.structure_seed);
            scenario_models(&config).map_err(|e| CliError::stage("scenario", e))
        }
        (None, None) => Err(CliError::input("either --scenario or --population is required")),
    }
}

pub fn risk(args: &RiskArgs) -> CliResult<String> {
    let (c1, c2) = population_models(&args.population)?;
    let coeffs = oracle_coefficients(&c1, &c2).map_err(|e| CliError::stage("oracle coefficients", e))?;
    let bayes = |s: &SetSample| classify_bayes(&coeffs, s);
    let mean_qda = |s: &SetSample| classify_mean_qda(&c1, &c2, s);
    let vote = |s: &SetSample| classify_majority_vote(&coeffs, s);
    let names = ["oracle-bayes", "mean-qda", "majority-vote"];
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "m", "risk", "std_error"]).map_err(csv_err)?;
    for &m in &args.m {
        if m == 0 {
            return Err(CliError::input("--m values must be at least 1"));
        }
        let est = monte_carlo_risks(&[&bayes, &mean_qda, &vote], &c1, &c2, &SetSizeDistribution::Fixed(m), args.reps, &mut rng)
            .map_err(|e| CliError::stage("risk", e))?;
        for (name, e) in names.iter().zip(est) {
            w.write_record([name.to_string(), m.to_string(), e.risk.to_string(), e.standard_error.to_string()])
                .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    if let Some(out) = &args.out {
        write_atomic(out, &bytes)?;
    }
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn parse_set_size(text: &str) -> CliResult<SetSizeDistribution> {
    let bad = || CliError::input(format!("--set-size must be N or LOW-HIGH, got {text:?}"));
    let dist = match text.split_once('-') {
        Some((lo, hi)) => SetSizeDistribution::UniformRange(
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
        ),
        None => SetSizeDistribution::Fixed(text.trim().parse().map_err(|_| bad())?),
    };
    dist.validate().map_err(|e| CliError::input(format!("--set-size: {e}")))?;
    Ok(dist)
}

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let (c1, c2) = population_models(&args.population)?;
    let sizes = parse_set_size(&args.set_size)?;
    if args.sets_per_class == 0 {
        return Err(CliError::input("--sets-per-class must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let sets = generate_training(&c1, &c2, args.sets_per_class, &sizes, &mut rng)
        .map_err(|e| CliError::stage("generate", e))?;
    let mut data = SetData::from_labeled(&sets);
    if args.unlabeled {
        for s in &mut data.sets {
            s.label = None;
        }
    }
    let mut buf = Vec::new();
    write_set_data(&data, &mut buf)?;
    write_atomic(&args.out, &buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_size_syntax() {
        assert_eq!(parse_set_size("10").unwrap(), SetSizeDistribution::Fixed(10));
        assert_eq!(parse_set_size("5-15").unwrap(), SetSizeDistribution::UniformRange(5, 15));
        assert!(parse_set_size("0").is_err());
        assert!(parse_set_size("9-3").is_err());
        assert!(parse_set_size("x").is_err());
    }
}
