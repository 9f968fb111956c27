//! Versioned JSON model files.
//!
//! `∇` is stored as upper-triangle triplets `[i, j, value]`. Only entries
//! equal to `+0.0` bit for bit are omitted, so loading reproduces every
//! coefficient exactly.

use serde::{Deserialize, Serialize};

use setclass::estimators::{ClipsHyperparameters, FittedSetClassifier, MethodTag};
use setclass::linalg::{DenseMatrix, DenseVector};
use setclass::model::DiscriminantCoefficients;

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperparameterRecord {
    pub clime_lambda: f64,
    pub threshold_lambda: f64,
    pub beta_lambda: f64,
    pub l1_cap: Option<f64>,
    pub split_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub method: String,
    pub dimension: usize,
    pub prior_log_ratio: f64,
    pub constant: f64,
    pub linear: Vec<f64>,
    pub quadratic: Vec<(usize, usize, f64)>,
    pub hyperparameters: Option<HyperparameterRecord>,
}

impl ModelFile {
    pub fn from_classifier(fit: &FittedSetClassifier) -> Self {
        let c = &fit.coefficients;
        let p = c.dim();
        let mut quadratic = Vec::new();
        for i in 0..p {
            for j in i..p {
                let v = c.quadratic[(i, j)];
                if v.to_bits() != 0.0f64.to_bits() {
                    quadratic.push((i, j, v));
                }
            }
        }
        ModelFile {
            format_version: FORMAT_VERSION,
            method: fit.method.name().to_string(),
            dimension: p,
            prior_log_ratio: c.prior_log_ratio,
            constant: c.constant,
            linear: c.linear.iter().copied().collect(),
            quadratic,
            hyperparameters: fit.hyperparameters.as_ref().map(|h| HyperparameterRecord {
                clime_lambda: h.clime_lambda,
                threshold_lambda: h.threshold_lambda,
                beta_lambda: h.beta_lambda,
                l1_cap: h.l1_cap,
                split_seed: h.split_seed,
            }),
        }
    }

    pub fn to_classifier(&self) -> CliResult<FittedSetClassifier> {
        let bad = |m: String| CliError::input(format!("model file: {m}"));
        if self.format_version != FORMAT_VERSION {
            return Err(bad(format!("unsupported format_version {}", self.format_version)));
        }
        let method = MethodTag::from_name(&self.method)
            .ok_or_else(|| bad(format!("unknown method {:?}", self.method)))?;
        let p = self.dimension;
        if self.linear.len() != p {
            return Err(bad(format!("linear has {} entries, dimension is {p}", self.linear.len())));
        }
        let mut quadratic = DenseMatrix::zeros(p, p);
        for &(i, j, v) in &self.quadratic {
            if i > j || j >= p {
                return Err(bad(format!("quadratic entry ({i}, {j}) is not in the upper triangle of a {p}×{p} matrix")));
            }
            quadratic[(i, j)] = v;
            quadratic[(j, i)] = v;
        }
        let coefficients = DiscriminantCoefficients::new(
            self.prior_log_ratio,
            self.constant,
            DenseVector::from_vec(self.linear.clone()),
            quadratic,
        )
        .map_err(|e| bad(e.to_string()))?;
        Ok(FittedSetClassifier {
            coefficients,
            method,
            hyperparameters: self.hyperparameters.as_ref().map(|h| ClipsHyperparameters {
                clime_lambda: h.clime_lambda,
                threshold_lambda: h.threshold_lambda,
                beta_lambda: h.beta_lambda,
                l1_cap: h.l1_cap,
                split_seed: h.split_seed,
            }),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model files serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::input(format!("model file: {e}")))
    }
}

pub fn save_model(fit: &FittedSetClassifier) -> String {
    ModelFile::from_classifier(fit).to_json()
}

pub fn load_model(text: &str) -> CliResult<FittedSetClassifier> {
    ModelFile::from_json(text)?.to_classifier()
}
