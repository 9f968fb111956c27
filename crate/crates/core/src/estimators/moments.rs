use crate::error::{Error, Result};
use crate::linalg::{symmetrize, DenseMatrix, DenseVector};
use crate::model::{ClassLabel, LabeledSet};

use super::require_both_classes;

/// Maximum-likelihood moments of one class, pooled over its sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMoments {
    pub set_count: usize,
    pub observation_count: usize,
    pub prior: f64,
    pub mean: DenseVector,
    /// Divisor `n_k`.
    pub covariance: DenseMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PooledMoments {
    pub class1: ClassMoments,
    pub class2: ClassMoments,
}

impl PooledMoments {
    pub fn class(&self, label: ClassLabel) -> &ClassMoments {
        match label {
            ClassLabel::One => &self.class1,
            ClassLabel::Two => &self.class2,
        }
    }

    pub fn dim(&self) -> usize {
        self.class1.mean.len()
    }

    pub fn total_sets(&self) -> usize {
        self.class1.set_count + self.class2.set_count
    }
}

fn class_moments(sets: &[&LabeledSet], total_sets: usize, p: usize) -> ClassMoments {
    let n: usize = sets.iter().map(|s| s.sample.size()).sum();
    let mut mean = DenseVector::zeros(p);
    for s in sets {
        for x in s.sample.observations() {
            mean += x;
        }
    }
    mean /= n as f64;
    let mut covariance = DenseMatrix::zeros(p, p);
    for s in sets {
        for x in s.sample.observations() {
            let d = x - &mean;
            covariance.ger(1.0, &d, &d, 1.0);
        }
    }
    covariance /= n as f64;
    ClassMoments {
        set_count: sets.len(),
        observation_count: n,
        prior: sets.len() as f64 / total_sets as f64,
        mean,
        covariance: symmetrize(&covariance),
    }
}

/// Class proportions, means and covariances with set membership ignored.
pub fn pooled_moments(training: &[LabeledSet]) -> Result<PooledMoments> {
    require_both_classes(training)?;
    let p = training[0].sample.dim();
    if let Some(bad) = training.iter().find(|s| s.sample.dim() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: bad.sample.dim(),
        });
    }
    let of = |label| -> Vec<&LabeledSet> { training.iter().filter(|s| s.label == label).collect() };
    let total = training.len();
    Ok(PooledMoments {
        class1: class_moments(&of(ClassLabel::One), total, p),
        class2: class_moments(&of(ClassLabel::Two), total, p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SetSample;

    fn set(points: &[&[f64]], label: ClassLabel) -> LabeledSet {
        LabeledSet::new(
            SetSample::new(points.iter().map(|p| DenseVector::from_row_slice(p)).collect()).unwrap(),
            label,
        )
    }

    #[test]
    fn singleton_per_class() {
        let data = vec![set(&[&[1.0, 2.0]], ClassLabel::One), set(&[&[-1.0, 0.5]], ClassLabel::Two)];
        let m = pooled_moments(&data).unwrap();
        assert_eq!(m.class1.mean, DenseVector::from_row_slice(&[1.0, 2.0]));
        assert_eq!(m.class2.mean, DenseVector::from_row_slice(&[-1.0, 0.5]));
        assert_eq!(m.class1.covariance, DenseMatrix::zeros(2, 2));
        assert_eq!(m.class1.prior, 0.5);
        assert_eq!(m.class2.prior, 0.5);
    }

    #[test]
    fn two_singleton_sets() {
        let data = vec![
            set(&[&[0.0, 0.0]], ClassLabel::One),
            set(&[&[2.0, 2.0]], ClassLabel::One),
            set(&[&[5.0, 5.0], &[6.0, 6.0]], ClassLabel::Two),
        ];
        let m = pooled_moments(&data).unwrap();
        assert_eq!(m.class1.mean, DenseVector::from_row_slice(&[1.0, 1.0]));
        assert_eq!(m.class1.covariance, DenseMatrix::from_element(2, 2, 1.0));
        assert_eq!(m.class1.set_count, 2);
        assert_eq!(m.class1.observation_count, 2);
        assert_eq!(m.class2.observation_count, 2);
        assert!((m.class1.prior + m.class2.prior - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_class() {
        let data = vec![set(&[&[0.0]], ClassLabel::Two)];
        assert_eq!(pooled_moments(&data), Err(Error::MissingClass(1)));
        let data = vec![set(&[&[0.0]], ClassLabel::One)];
        assert_eq!(pooled_moments(&data), Err(Error::MissingClass(2)));
    }
}
