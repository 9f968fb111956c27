use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{ClassLabel, GaussianClassModel, SetSample};

use super::{sample_set, SetSizeDistribution};

/// A set classification rule as evaluated by the risk estimators.
pub type SetRule<'a> = &'a dyn Fn(&SetSample) -> Result<ClassLabel>;

/// Smallest number of Monte Carlo test sets accepted.
pub const MIN_REPLICATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub risk: f64,
    pub standard_error: f64,
}

/// Monte Carlo misclassification risk of a set rule.
///
/// The `reps` test sets are stratified by class: `round(π₁·reps)` come from
/// class 1 and the rest from class 2, and the class-conditional error rates
/// `R̂_k` are combined as `π₁R̂₁ + π₂R̂₂`. The standard error is
/// `√(Σ π_k² R̂_k(1−R̂_k)/n_k)`.
pub fn monte_carlo_risk<F, R>(
    rule: F,
    class1: &GaussianClassModel,
    class2: &GaussianClassModel,
    sizes: &SetSizeDistribution,
    reps: usize,
    rng: &mut R,
) -> Result<RiskEstimate>
where
    F: Fn(&SetSample) -> Result<ClassLabel>,
    R: Rng + ?Sized,
{
    let rules: [SetRule; 1] = [&rule];
    Ok(monte_carlo_risks(&rules, class1, class2, sizes, reps, rng)?[0])
}

/// [`monte_carlo_risk`] for several rules evaluated on the same test sets.
pub fn monte_carlo_risks<R: Rng + ?Sized>(
    rules: &[SetRule],
    class1: &GaussianClassModel,
    class2: &GaussianClassModel,
    sizes: &SetSizeDistribution,
    reps: usize,
    rng: &mut R,
) -> Result<Vec<RiskEstimate>> {
    if reps < MIN_REPLICATIONS {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_REPLICATIONS} Monte Carlo replications required, got {reps}"
        )));
    }
    sizes.validate()?;
    let pi1 = class1.prior();
    let pi2 = class2.prior();
    let n1 = ((pi1 * reps as f64).round() as usize).clamp(1, reps - 1);
    let counts = [n1, reps - n1];
    let mut errors = vec![[0usize; 2]; rules.len()];
    for (k, (model, label)) in [(class1, ClassLabel::One), (class2, ClassLabel::Two)]
        .into_iter()
        .enumerate()
    {
        for _ in 0..counts[k] {
            let m = sizes.draw(rng);
            let set = sample_set(model, m, rng)?;
            for (rule, err) in rules.iter().zip(errors.iter_mut()) {
                if rule(&set)? != label {
                    err[k] += 1;
                }
            }
        }
    }
    Ok(errors
        .into_iter()
        .map(|err| {
            let rate = [err[0] as f64 / counts[0] as f64, err[1] as f64 / counts[1] as f64];
            let risk = pi1 * rate[0] + pi2 * rate[1];
            let variance = pi1 * pi1 * rate[0] * (1.0 - rate[0]) / counts[0] as f64
                + pi2 * pi2 * rate[1] * (1.0 - rate[1]) / counts[1] as f64;
            RiskEstimate {
                risk,
                standard_error: variance.sqrt(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrix, DenseVector};
    use crate::model::{
        classify_bayes, classify_majority_vote, classify_mean_qda, oracle_coefficients,
        DiscriminantCoefficients,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn scalar(prior: f64, mean: f64, var: f64) -> GaussianClassModel {
        GaussianClassModel::new(prior, DenseVector::from_element(1, mean), DenseMatrix::from_element(1, 1, var)).unwrap()
    }

    fn phi(x: f64) -> f64 {
        Normal::standard().cdf(x)
    }

    fn location_risk(m: usize, reps: usize, seed: u64) -> RiskEstimate {
        let (c1, c2) = (scalar(0.5, 1.0, 1.0), scalar(0.5, -1.0, 1.0));
        let coeffs = oracle_coefficients(&c1, &c2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        monte_carlo_risk(
            |s| classify_bayes(&coeffs, s),
            &c1,
            &c2,
            &SetSizeDistribution::Fixed(m),
            reps,
            &mut rng,
        )
        .unwrap()
    }

    #[test]
    fn identical_classes_zero_rule() {
        let c = scalar(0.3, 0.0, 1.0);
        let c2 = scalar(0.7, 0.0, 1.0);
        let zero = DiscriminantCoefficients::zeros(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let est = monte_carlo_risk(|s| classify_bayes(&zero, s), &c, &c2, &SetSizeDistribution::Fixed(3), 500, &mut rng).unwrap();
        assert_eq!(est.risk, 0.3);
        assert_eq!(est.standard_error, 0.0);
    }

    #[test]
    fn location_model_matches_normal_cdf() {
        for (m, target) in [(1, phi(-1.0)), (4, phi(-2.0))] {
            let est = location_risk(m, 40_000, 10 + m as u64);
            assert!((est.risk - target).abs() < 4.0 * est.standard_error, "m={m} {est:?} vs {target}");
        }
    }

    #[test]
    fn risk_decays_in_set_size() {
        let sizes = [1usize, 2, 4, 8];
        let risks: Vec<f64> = sizes.iter().map(|&m| location_risk(m, 100_000, 20 + m as u64).risk).collect();
        assert!(risks.windows(2).all(|w| w[1] < w[0]), "{risks:?}");
        for (&m, r) in sizes.iter().zip(&risks) {
            let exact = phi(-(m as f64).sqrt());
            assert!((r - exact).abs() < 0.005);
        }
    }

    #[test]
    fn too_few_replications() {
        let c = scalar(0.5, 0.0, 1.0);
        let zero = DiscriminantCoefficients::zeros(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(monte_carlo_risk(|s| classify_bayes(&zero, s), &c, &c, &SetSizeDistribution::Fixed(1), 99, &mut rng).is_err());
    }

    #[test]
    fn mean_qda_loses_to_bayes_in_scale_model() {
        let (c1, c2) = (scalar(0.5, 0.0, 1.0), scalar(0.5, 0.0, 4.0));
        let coeffs = oracle_coefficients(&c1, &c2).unwrap();
        let bayes = |s: &SetSample| classify_bayes(&coeffs, s);
        let mean_qda = |s: &SetSample| classify_mean_qda(&c1, &c2, s);
        let vote = |s: &SetSample| classify_majority_vote(&coeffs, s);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let est = monte_carlo_risks(&[&bayes, &mean_qda, &vote], &c1, &c2, &SetSizeDistribution::Fixed(5), 20_000, &mut rng).unwrap();
        let gap = est[1].risk - est[0].risk;
        let se = (est[0].standard_error.powi(2) + est[1].standard_error.powi(2)).sqrt();
        assert!(gap > 3.0 * se, "{est:?}");
        assert!(est[2].risk > est[0].risk - 3.0 * se);
    }
}
