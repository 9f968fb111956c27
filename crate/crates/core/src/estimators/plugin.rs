use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::model::{oracle_coefficients, GaussianClassModel};

use super::{ClassMoments, FittedSetClassifier, MethodTag, PooledMoments};

/// Ridge added to each covariance by the enriched variant when unspecified.
pub const DEFAULT_ENRICH_DELTA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PluginVariant {
    Full,
    /// Off-diagonal covariance entries are dropped.
    Diagonal,
    /// `Σ̂_k + δ I` with the given `δ > 0`.
    Enriched(f64),
}

impl PluginVariant {
    fn tag(self) -> MethodTag {
        match self {
            PluginVariant::Full => MethodTag::PluginFull,
            PluginVariant::Diagonal => MethodTag::PluginDiagonal,
            PluginVariant::Enriched(_) => MethodTag::PluginEnriched,
        }
    }

    fn covariance(self, moments: &ClassMoments) -> DenseMatrix {
        let cov = &moments.covariance;
        match self {
            PluginVariant::Full => cov.clone(),
            PluginVariant::Diagonal => DenseMatrix::from_diagonal(&cov.diagonal()),
            PluginVariant::Enriched(delta) => cov + DenseMatrix::identity(cov.nrows(), cov.ncols()) * delta,
        }
    }
}

/// Plug-in estimate of the Bayes set rule from pooled moments.
pub fn plugin_classifier(
    moments: &PooledMoments,
    variant: PluginVariant,
) -> Result<FittedSetClassifier> {
    if let PluginVariant::Enriched(delta) = variant {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "enrichment delta must be positive, got {delta}"
            )));
        }
    }
    let model = |m: &ClassMoments| -> Result<GaussianClassModel> {
        GaussianClassModel::new(m.prior, DenseVector::clone(&m.mean), variant.covariance(m))
    };
    let coefficients = oracle_coefficients(&model(&moments.class1)?, &model(&moments.class2)?)?;
    Ok(FittedSetClassifier {
        coefficients,
        method: variant.tag(),
        hyperparameters: None,
    })
}
