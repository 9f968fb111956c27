use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "setclass", version, about = "Set classification with covariance-engaged rules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a set classifier to a labelled data file and write a model file.
    Train(TrainArgs),
    /// Classify every set of a data file with a saved model.
    Predict(PredictArgs),
    /// Run a simulation sweep described by a TOML experiment file.
    Simulate(SimulateArgs),
    /// Monte Carlo risk of the oracle set rules for a known population.
    Risk(RiskArgs),
    /// Write synthetic sets from a population to a data file.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    #[value(name = "clips")]
    Clips,
    #[value(name = "plugin-full")]
    PluginFull,
    #[value(name = "plugin-diag")]
    PluginDiag,
    #[value(name = "plugin-enriched")]
    PluginEnriched,
    #[value(name = "qda-mv")]
    QdaMv,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// CLIME constraint level; tuned when omitted.
    #[arg(long)]
    pub clime_lambda: Option<f64>,
    /// Threshold on the precision-matrix difference; tuned when omitted.
    #[arg(long)]
    pub threshold_lambda: Option<f64>,
    /// Constraint level of the linear-coefficient program; tuned when omitted.
    #[arg(long)]
    pub beta_lambda: Option<f64>,
    /// Optional ℓ₁ bound in the linear-coefficient program.
    #[arg(long)]
    pub l1_cap: Option<f64>,
    /// Fraction of each class's sets held out for tuning.
    #[arg(long, default_value_t = 0.5)]
    pub tune_fraction: f64,
    #[arg(long, default_value_t = setclass::estimators::DEFAULT_ENRICH_DELTA)]
    pub enrich_delta: f64,
    /// Seeds the tuning split.
    #[arg(long)]
    pub seed: u64,
    /// Seeds CLIPS sample splitting; defaults to --seed.
    #[arg(long)]
    pub split_seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides master_seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides replicate_count.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Built-in scenario (1, 2 or 3).
    #[arg(long, conflicts_with = "population")]
    pub scenario: Option<u8>,
    #[arg(long, default_value_t = 100)]
    pub dimension: usize,
    /// ζ for scenario 1, ρ for scenarios 2 and 3.
    #[arg(long, default_value_t = 0.5)]
    pub covariance_signal: f64,
    /// u.
    #[arg(long, default_value_t = 0.0)]
    pub mean_signal: f64,
    #[arg(long, default_value_t = 0)]
    pub structure_seed: u64,
    /// TOML file with [class1] and [class2] tables of prior, mean, covariance.
    #[arg(long)]
    pub population: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    #[command(flatten)]
    pub population: ScenarioArgs,
    /// Set sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    /// Also write the table to this CSV file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub population: ScenarioArgs,
    #[arg(long)]
    pub sets_per_class: usize,
    /// Fixed set size, or `low-high` for sizes uniform on that range.
    #[arg(long)]
    pub set_size: String,
    /// Leave the label column empty.
    #[arg(long)]
    pub unlabeled: bool,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}
