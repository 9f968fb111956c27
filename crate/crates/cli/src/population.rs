//! Population specifications for `risk` and `generate`: either a built-in
//! scenario or a TOML file giving each class's prior, mean and covariance.

use std::path::Path;

use serde::Deserialize;

use setclass::linalg::{DenseMatrix, DenseVector};
use setclass::model::GaussianClassModel;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub prior: f64,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub class1: ClassSpec,
    pub class2: ClassSpec,
}

impl ClassSpec {
    fn model(&self, name: &str) -> CliResult<GaussianClassModel> {
        let p = self.mean.len();
        if self.covariance.len() != p || self.covariance.iter().any(|r| r.len() != p) {
            return Err(CliError::input(format!("{name}.covariance must be {p}×{p}")));
        }
        let cov = DenseMatrix::from_fn(p, p, |i, j| self.covariance[i][j]);
        GaussianClassModel::new(self.prior, DenseVector::from_vec(self.mean.clone()), cov)
            .map_err(|e| CliError::input(format!("{name}: {e}")))
    }
}

impl PopulationSpec {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::input(format!("population file: {e}")))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn models(&self) -> CliResult<(GaussianClassModel, GaussianClassModel)> {
        let c1 = self.class1.model("class1")?;
        let c2 = self.class2.model("class2")?;
        if c1.dim() != c2.dim() {
            return Err(CliError::input("class1 and class2 have different dimensions"));
        }
        if (c1.prior() + c2.prior() - 1.0).abs() > 1e-12 {
            return Err(CliError::input("class priors must sum to 1"));
        }
        Ok((c1, c2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_checks() {
        let text = "[class1]\nprior = 0.5\nmean = [1.0]\ncovariance = [[1.0]]\n[class2]\nprior = 0.5\nmean = [-1.0]\ncovariance = [[1.0]]\n";
        let (c1, c2) = PopulationSpec::parse(text).unwrap().models().unwrap();
        assert_eq!(c1.mean()[0], 1.0);
        assert_eq!(c2.mean()[0], -1.0);
        let bad = text.replace("prior = 0.5\nmean = [-1.0]", "prior = 0.4\nmean = [-1.0]");
        assert!(PopulationSpec::parse(&bad).unwrap().models().is_err());
        let bad = text.replace("covariance = [[1.0]]\n[class2]", "covariance = [[-1.0]]\n[class2]");
        assert!(PopulationSpec::parse(&bad).unwrap().models().is_err());
    }
}
