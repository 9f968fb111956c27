use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, DenseMatrix, DenseVector};
use crate::model::GaussianClassModel;

/// Number of perturbed precision entries in scenario 1 when unspecified.
pub const SPARSE_ENTRY_COUNT: usize = 10;
const SUPPORT_DRAWS: usize = 100;

/// The three synthetic populations.
///
/// 1. `Σ₁⁻¹ = (1+√p) I` and `Σ₂⁻¹` equal to it plus `ζ` on a few random
///    symmetric off-diagonal pairs.
/// 2. `Σ₂ = I` and `Σ₁ = I` except for off-diagonals `ρ` in the leading
///    5×5 block.
/// 3. `Σ₁` the AR(1) Toeplitz matrix `ρ^|i−j| / (1−ρ²)` and `Σ₂` its diagonal.
///
/// In all three, `μ₁ = Σ₁ (u, u, 0, …, 0)ᵀ`, `μ₂ = 0` and the priors are 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Scenario {
    One,
    Two,
    Three,
}

impl TryFrom<u8> for Scenario {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Scenario::One),
            2 => Ok(Scenario::Two),
            3 => Ok(Scenario::Three),
            _ => Err(format!("scenario must be 1, 2 or 3, got {v}")),
        }
    }
}

impl From<Scenario> for u8 {
    fn from(s: Scenario) -> u8 {
        match s {
            Scenario::One => 1,
            Scenario::Two => 2,
            Scenario::Three => 3,
        }
    }
}

fn default_sparse_entry_count() -> usize {
    SPARSE_ENTRY_COUNT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub dimension: usize,
    /// `ζ` in scenario 1, `ρ` otherwise.
    pub covariance_signal: f64,
    /// `u`.
    pub mean_signal: f64,
    /// Perturbed pairs in scenario 1, capped at the `p(p−1)/2` available.
    #[serde(default = "default_sparse_entry_count")]
    pub sparse_entry_count: usize,
    /// Seeds the random support of scenario 1.
    #[serde(default)]
    pub structure_seed: u64,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, dimension: usize, covariance_signal: f64, mean_signal: f64) -> Self {
        Self {
            scenario,
            dimension,
            covariance_signal,
            mean_signal,
            sparse_entry_count: SPARSE_ENTRY_COUNT,
            structure_seed: 0,
        }
    }

    pub fn with_structure_seed(mut self, seed: u64) -> Self {
        self.structure_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.dimension;
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        if !self.covariance_signal.is_finite() {
            return invalid("covariance_signal must be finite".into());
        }
        if !self.mean_signal.is_finite() {
            return invalid("mean_signal must be finite".into());
        }
        if p < 2 {
            return invalid(format!("dimension must be at least 2, got {p}"));
        }
        match self.scenario {
            Scenario::One => {}
            Scenario::Two => {
                if p < 5 {
                    return invalid(format!("scenario 2 needs dimension at least 5, got {p}"));
                }
            }
            Scenario::Three => {
                if self.covariance_signal.abs() >= 1.0 {
                    return invalid(format!(
                        "scenario 3 needs |covariance_signal| < 1, got {}",
                        self.covariance_signal
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Class models of a scenario together with the exact precision difference
/// `∇ = Σ₂⁻¹ − Σ₁⁻¹` as constructed.
#[derive(Debug, Clone)]
pub struct ScenarioPopulation {
    pub class1: GaussianClassModel,
    pub class2: GaussianClassModel,
    pub precision_difference: DenseMatrix,
}

impl ScenarioPopulation {
    /// Nonzero positions of `∇`, both triangles, column-major order.
    pub fn difference_support(&self, tolerance: f64) -> Vec<(usize, usize)> {
        support(&self.precision_difference, tolerance)
    }
}

/// Positions `(i, j)` with `|a_ij| > tolerance`, column-major order.
pub fn support(a: &DenseMatrix, tolerance: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if a[(i, j)].abs() > tolerance {
                out.push((i, j));
            }
        }
    }
    out
}

fn class_mean(sigma1: &DenseMatrix, u: f64) -> DenseVector {
    let p = sigma1.nrows();
    let mut direction = DenseVector::zeros(p);
    direction[0] = u;
    direction[1] = u;
    sigma1 * direction
}

fn scenario_one(config: &ScenarioConfig) -> Result<(DenseMatrix, DenseMatrix, DenseMatrix)> {
    let p = config.dimension;
    let diag = 1.0 + (p as f64).sqrt();
    let omega1 = DenseMatrix::identity(p, p) * diag;
    let positions: Vec<(usize, usize)> = (0..p)
        .flat_map(|i| ((i + 1)..p).map(move |j| (i, j)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.structure_seed);
    let mut last_error = None;
    for _ in 0..SUPPORT_DRAWS {
        let mut nabla = DenseMatrix::zeros(p, p);
        let count = config.sparse_entry_count.min(positions.len());
        for k in index::sample(&mut rng, positions.len(), count) {
            let (i, j) = positions[k];
            nabla[(i, j)] = config.covariance_signal;
            nabla[(j, i)] = config.covariance_signal;
        }
        let omega2 = &omega1 + &nabla;
        match cholesky(&omega2) {
            Ok(factor) => {
                let sigma1 = DenseMatrix::identity(p, p) / diag;
                return Ok((sigma1, factor.inverse(), nabla));
            }
            Err(e @ Error::NotPositiveDefinite { .. }) => last_error = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_error.expect("at least one draw was made"))
}

pub fn scenario_population(config: &ScenarioConfig) -> Result<ScenarioPopulation> {
    config.validate()?;
    let p = config.dimension;
    let rho = config.covariance_signal;
    let (sigma1, sigma2, exact_difference) = match config.scenario {
        Scenario::One => {
            let (s1, s2, nabla) = scenario_one(config)?;
            (s1, s2, Some(nabla))
        }
        Scenario::Two => {
            let sigma1 = DenseMatrix::from_fn(p, p, |i, j| {
                if i == j {
                    1.0
                } else if i < 5 && j < 5 {
                    rho
                } else {
                    0.0
                }
            });
            (sigma1, DenseMatrix::identity(p, p), None)
        }
        Scenario::Three => {
            let scale = 1.0 / (1.0 - rho * rho);
            let sigma1 = DenseMatrix::from_fn(p, p, |i, j| scale * rho.powi(i.abs_diff(j) as i32));
            (sigma1, DenseMatrix::identity(p, p) * scale, None)
        }
    };
    let mean1 = class_mean(&sigma1, config.mean_signal);
    let class1 = GaussianClassModel::new(0.5, mean1, sigma1)?;
    let class2 = GaussianClassModel::new(0.5, DenseVector::zeros(p), sigma2)?;
    let precision_difference =
        exact_difference.unwrap_or_else(|| class2.precision() - class1.precision());
    Ok(ScenarioPopulation {
        class1,
        class2,
        precision_difference,
    })
}

pub fn scenario_models(config: &ScenarioConfig) -> Result<(GaussianClassModel, GaussianClassModel)> {
    let population = scenario_population(config)?;
    Ok((population.class1, population.class2))
}
