//! Training procedures for set classifiers.
//!
//! * [`pooled_moments`] and [`plugin_classifier`]: maximum-likelihood moments
//!   pooled over sets, plugged into the Bayes rule (full, diagonal or ridge
//!   enriched covariance).
//! * [`fit_clips`]: sample-split CLIPS estimation. The quadratic coefficient is
//!   a thresholded difference of CLIME precision estimates, the linear
//!   coefficient solves an ℓ₁ linear program directly, and the constant is a
//!   one-parameter logistic fit on the held-out half.
//! * [`tune`]: validation grid search over the three CLIPS penalties.

mod beta;
mod clime;
mod clips;
mod intercept;
mod moments;
mod plugin;
mod tune;

pub use beta::{direct_beta, direct_beta_parts};
pub use clime::{clime, threshold_difference};
pub use clips::{fit_clips, split_training};
pub use intercept::{fit_beta0, InterceptLikelihood};
pub use moments::{pooled_moments, ClassMoments, PooledMoments};
pub use plugin::{plugin_classifier, PluginVariant, DEFAULT_ENRICH_DELTA};
pub use tune::{tune, tune_and_fit, validation_split, TuneOutcome, TuningGrid};

use crate::error::{Error, Result};
use crate::model::{
    classify_bayes, classify_majority_vote, discriminant_g, majority_vote_score, ClassLabel,
    DiscriminantCoefficients, SetSample,
};

/// Penalty levels and sample-splitting seed for CLIPS.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipsHyperparameters {
    /// CLIME constraint level.
    pub clime_lambda: f64,
    /// Hard threshold applied to the precision-matrix difference.
    pub threshold_lambda: f64,
    /// Constraint level of the direct linear-coefficient program.
    pub beta_lambda: f64,
    /// Optional bound on `‖θ_k‖₁` in that program.
    pub l1_cap: Option<f64>,
    pub split_seed: u64,
}

impl ClipsHyperparameters {
    pub fn new(clime_lambda: f64, threshold_lambda: f64, beta_lambda: f64, split_seed: u64) -> Self {
        Self {
            clime_lambda,
            threshold_lambda,
            beta_lambda,
            l1_cap: None,
            split_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("clime_lambda", self.clime_lambda),
            ("threshold_lambda", self.threshold_lambda),
            ("beta_lambda", self.beta_lambda),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(cap) = self.l1_cap {
            if !(cap > 0.0) {
                return Err(Error::InvalidParameter(format!("l1_cap must be positive, got {cap}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodTag {
    PluginFull,
    PluginDiagonal,
    PluginEnriched,
    Clips,
    /// CLIPS coefficients evaluated by majority vote over observations.
    QdaMajorityVote,
}

impl MethodTag {
    pub const ALL: [MethodTag; 5] = [
        MethodTag::Clips,
        MethodTag::PluginFull,
        MethodTag::PluginDiagonal,
        MethodTag::PluginEnriched,
        MethodTag::QdaMajorityVote,
    ];

    /// Command-line / file name of the method.
    pub fn name(self) -> &'static str {
        match self {
            MethodTag::PluginFull => "plugin-full",
            MethodTag::PluginDiagonal => "plugin-diag",
            MethodTag::PluginEnriched => "plugin-enriched",
            MethodTag::Clips => "clips",
            MethodTag::QdaMajorityVote => "qda-mv",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

/// A trained set classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedSetClassifier {
    pub coefficients: DiscriminantCoefficients,
    pub method: MethodTag,
    pub hyperparameters: Option<ClipsHyperparameters>,
}

impl FittedSetClassifier {
    /// The discriminant `g` for weighted rules; the average vote for
    /// majority vote. Positive means class 1 in both cases.
    pub fn score(&self, set: &SetSample) -> Result<f64> {
        match self.method {
            MethodTag::QdaMajorityVote => majority_vote_score(&self.coefficients, set),
            _ => discriminant_g(&self.coefficients, &set.statistics()),
        }
    }

    pub fn classify(&self, set: &SetSample) -> Result<ClassLabel> {
        match self.method {
            MethodTag::QdaMajorityVote => classify_majority_vote(&self.coefficients, set),
            _ => classify_bayes(&self.coefficients, set),
        }
    }

    /// Same coefficients, evaluated by majority vote.
    pub fn as_majority_vote(&self) -> Self {
        Self {
            method: MethodTag::QdaMajorityVote,
            ..self.clone()
        }
    }
}

/// Per-set summaries used to evaluate discriminants quickly:
/// `tr(∇T)` with `T = S + x̄x̄ᵀ` equals `x̄ᵀ∇x̄ + tr(∇S)`.
#[derive(Debug, Clone)]
pub(crate) struct SetFeatures {
    pub m: usize,
    pub mean: crate::linalg::DenseVector,
    pub second_moment: crate::linalg::DenseMatrix,
    pub label: ClassLabel,
}

impl SetFeatures {
    pub fn from_labeled(set: &crate::model::LabeledSet) -> Self {
        let stats = set.sample.statistics();
        Self {
            m: stats.m,
            second_moment: stats.second_moment(),
            mean: stats.mean,
            label: set.label,
        }
    }

    /// `x̄ᵀ∇x̄/2 + tr(∇S)/2` for ∇ given by its nonzero entries.
    pub fn quadratic_term(&self, nabla: &SparseSymmetric) -> f64 {
        nabla
            .entries
            .iter()
            .map(|&(i, j, v)| v * self.second_moment[(i, j)])
            .sum::<f64>()
            / 2.0
    }
}

/// Nonzero entries `(i, j, value)` of a symmetric matrix, both triangles.
#[derive(Debug, Clone, Default)]
pub(crate) struct SparseSymmetric {
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSymmetric {
    pub fn from_dense(a: &crate::linalg::DenseMatrix) -> Self {
        let mut entries = Vec::new();
        for j in 0..a.ncols() {
            for i in 0..a.nrows() {
                let v = a[(i, j)];
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }
}

pub(crate) fn count_classes(sets: &[crate::model::LabeledSet]) -> [usize; 2] {
    let mut counts = [0, 0];
    for s in sets {
        counts[s.label.index()] += 1;
    }
    counts
}

pub(crate) fn require_both_classes(sets: &[crate::model::LabeledSet]) -> Result<[usize; 2]> {
    let counts = count_classes(sets);
    if counts[0] == 0 {
        return Err(Error::MissingClass(1));
    }
    if counts[1] == 0 {
        return Err(Error::MissingClass(2));
    }
    Ok(counts)
}
