use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::model::{ClassLabel, DiscriminantCoefficients, LabeledSet};

use super::intercept::intercept_likelihood;
use super::{
    clime, count_classes, direct_beta, pooled_moments, threshold_difference, ClipsHyperparameters,
    FittedSetClassifier, MethodTag, PooledMoments, SetFeatures, SparseSymmetric,
};

/// Indices of the two halves: `⌊N_k/2⌋` sets of each class go to the first,
/// chosen by a seeded shuffle; both lists are in ascending order.
pub(crate) fn split_indices(training: &[LabeledSet], seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first = Vec::new();
    let mut second = Vec::new();
    for label in [ClassLabel::One, ClassLabel::Two] {
        let mut idx: Vec<usize> = (0..training.len()).filter(|&i| training[i].label == label).collect();
        idx.shuffle(&mut rng);
        let half = idx.len() / 2;
        first.extend_from_slice(&idx[..half]);
        second.extend_from_slice(&idx[half..]);
    }
    first.sort_unstable();
    second.sort_unstable();
    (first, second)
}

/// Seeded split of the training sets into the batch used for `(∇, β)` and the
/// batch used for the constant.
pub fn split_training(training: &[LabeledSet], seed: u64) -> (Vec<LabeledSet>, Vec<LabeledSet>) {
    let (a, b) = split_indices(training, seed);
    let pick = |idx: Vec<usize>| idx.into_iter().map(|i| training[i].clone()).collect();
    (pick(a), pick(b))
}

/// Everything CLIPS needs from the training data, independent of penalties.
pub(crate) struct PreparedSplit {
    pub prior_log_ratio: f64,
    pub moments: PooledMoments,
    pub holdout: Vec<SetFeatures>,
}

impl PreparedSplit {
    pub fn new(training: &[LabeledSet], split_seed: u64) -> Result<Self> {
        let counts = count_classes(training);
        for (k, &n) in counts.iter().enumerate() {
            match n {
                0 => return Err(Error::MissingClass(k as u8 + 1)),
                1 => {
                    return Err(Error::InvalidParameter(format!(
                        "CLIPS needs at least two sets of class {}",
                        k + 1
                    )))
                }
                _ => {}
            }
        }
        let prior_log_ratio = (counts[0] as f64 / counts[1] as f64).ln();
        let (first, second) = split_indices(training, split_seed);
        let batch1: Vec<LabeledSet> = first.iter().map(|&i| training[i].clone()).collect();
        Ok(Self {
            prior_log_ratio,
            moments: pooled_moments(&batch1)?,
            holdout: second.iter().map(|&i| SetFeatures::from_labeled(&training[i])).collect(),
        })
    }

    pub fn intercept(&self, beta: &DenseVector, nabla: &SparseSymmetric) -> Result<f64> {
        intercept_likelihood(&self.holdout, beta, nabla, self.prior_log_ratio)?.minimize()
    }
}

/// CLIPS: sparse precision-difference and linear coefficients from one half
/// of the training sets, the constant from the other half.
pub fn fit_clips(training: &[LabeledSet], hyper: &ClipsHyperparameters) -> Result<FittedSetClassifier> {
    hyper.validate()?;
    let split = PreparedSplit::new(training, hyper.split_seed)?;
    let omega1 = clime(&split.moments.class1.covariance, hyper.clime_lambda)?;
    let omega2 = clime(&split.moments.class2.covariance, hyper.clime_lambda)?;
    let nabla = threshold_difference(&omega1, &omega2, hyper.threshold_lambda)?;
    let beta = direct_beta(&split.moments, hyper.beta_lambda, hyper.l1_cap)?;
    let constant = split.intercept(&beta, &SparseSymmetric::from_dense(&nabla))?;
    assemble(split.prior_log_ratio, constant, beta, nabla, hyper.clone())
}

pub(crate) fn assemble(
    prior_log_ratio: f64,
    constant: f64,
    beta: DenseVector,
    nabla: DenseMatrix,
    hyper: ClipsHyperparameters,
) -> Result<FittedSetClassifier> {
    Ok(FittedSetClassifier {
        coefficients: DiscriminantCoefficients::new(prior_log_ratio, constant, beta, nabla)?,
        method: MethodTag::Clips,
        hyperparameters: Some(hyper),
    })
}
