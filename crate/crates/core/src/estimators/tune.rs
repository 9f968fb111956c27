use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::model::{ClassLabel, LabeledSet};

use super::clips::{assemble, PreparedSplit};
use super::{
    clime, direct_beta, pooled_moments, threshold_difference, ClipsHyperparameters,
    FittedSetClassifier, SetFeatures, SparseSymmetric,
};

/// Candidate values for each CLIPS penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningGrid {
    pub clime_lambdas: Vec<f64>,
    pub threshold_lambdas: Vec<f64>,
    pub beta_lambdas: Vec<f64>,
}

const GRID_POINTS: usize = 7;

fn log_grid(center: f64) -> Vec<f64> {
    (0..GRID_POINTS)
        .map(|i| center * 10f64.powf(-1.0 + 2.0 * i as f64 / (GRID_POINTS - 1) as f64))
        .collect()
}

impl TuningGrid {
    pub fn new(clime_lambdas: Vec<f64>, threshold_lambdas: Vec<f64>, beta_lambdas: Vec<f64>) -> Self {
        Self {
            clime_lambdas,
            threshold_lambdas,
            beta_lambdas,
        }
    }

    pub fn single(hyper: &ClipsHyperparameters) -> Self {
        Self::new(vec![hyper.clime_lambda], vec![hyper.threshold_lambda], vec![hyper.beta_lambda])
    }

    /// Seven log-spaced points over `[0.1, 10] × √(log p / (N m̄))`, with `N`
    /// the number of sets and `m̄` their mean size.
    ///
    /// The threshold grid is divided by the mean diagonal `s̄` of the pooled
    /// class covariances and the linear-coefficient grid multiplied by `√s̄`,
    /// so the grids follow the units of the quantities they bound.
    pub fn default_for(training: &[LabeledSet]) -> Result<Self> {
        let moments = pooled_moments(training)?;
        let p = moments.dim();
        let n = training.len() as f64;
        let mean_size = training.iter().map(|s| s.sample.size()).sum::<usize>() as f64 / n;
        let rate = ((p.max(2) as f64).ln() / (n * mean_size)).sqrt();
        let scale = (moments.class1.covariance.diagonal().sum() + moments.class2.covariance.diagonal().sum())
            / (2 * p) as f64;
        let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
        Ok(Self::new(
            log_grid(rate),
            log_grid(rate / scale),
            log_grid(rate * scale.sqrt()),
        ))
    }

    fn validate(&self) -> Result<()> {
        for (name, values) in [
            ("clime", &self.clime_lambdas),
            ("threshold", &self.threshold_lambdas),
            ("beta", &self.beta_lambdas),
        ] {
            if values.is_empty() {
                return Err(Error::InvalidParameter(format!("empty {name} lambda grid")));
            }
            if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidParameter(format!("{name} lambdas must be positive")));
            }
        }
        Ok(())
    }
}

/// Seeded split of labelled sets into training and validation parts:
/// `round(fraction·N_k)` sets of each class, at least one and leaving at
/// least one, go to validation. Both parts keep the input order.
pub fn validation_split(
    sets: &[LabeledSet],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<LabeledSet>, Vec<LabeledSet>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "validation fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let counts = super::require_both_classes(sets)?;
    if let Some(k) = counts.iter().position(|&n| n < 2) {
        return Err(Error::InvalidParameter(format!(
            "a validation split needs at least two sets of class {}",
            k + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut held_out = vec![false; sets.len()];
    for label in [ClassLabel::One, ClassLabel::Two] {
        let mut idx: Vec<usize> = (0..sets.len()).filter(|&i| sets[i].label == label).collect();
        let n = idx.len();
        let take = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
        idx.shuffle(&mut rng);
        for &i in &idx[..take] {
            held_out[i] = true;
        }
    }
    let (validation, training): (Vec<_>, Vec<_>) = sets
        .iter()
        .cloned()
        .zip(held_out)
        .partition(|(_, h)| *h);
    Ok((
        training.into_iter().map(|(s, _)| s).collect(),
        validation.into_iter().map(|(s, _)| s).collect(),
    ))
}

fn descending(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneOutcome {
    pub hyperparameters: ClipsHyperparameters,
    pub validation_error: f64,
    /// CLIPS fitted on `training` at the selected penalties.
    pub classifier: FittedSetClassifier,
}

/// Grid search for the CLIPS penalties by validation misclassification rate.
///
/// Cells whose fit fails (an infeasible CLIME column or linear program, a
/// failed intercept fit) count as error 1. Among cells with the smallest
/// error, the one largest in `(λ₁, λ′, λ₂)` lexicographic order wins.
pub fn tune(
    training: &[LabeledSet],
    validation: &[LabeledSet],
    grid: &TuningGrid,
    split_seed: u64,
) -> Result<(ClipsHyperparameters, f64)> {
    let outcome = tune_and_fit(training, validation, grid, split_seed)?;
    Ok((outcome.hyperparameters, outcome.validation_error))
}

struct Best {
    error: f64,
    hyper: ClipsHyperparameters,
    constant: f64,
    beta: DenseVector,
    nabla: DenseMatrix,
}

/// [`tune`], also returning the classifier fitted at the chosen penalties.
pub fn tune_and_fit(
    training: &[LabeledSet],
    validation: &[LabeledSet],
    grid: &TuningGrid,
    split_seed: u64,
) -> Result<TuneOutcome> {
    grid.validate()?;
    if validation.is_empty() {
        return Err(Error::InvalidParameter("empty validation split".into()));
    }
    let split = PreparedSplit::new(training, split_seed)?;
    let p = split.moments.dim();
    if let Some(bad) = validation.iter().find(|s| s.sample.dim() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: bad.sample.dim(),
        });
    }
    let validation: Vec<SetFeatures> = validation.iter().map(SetFeatures::from_labeled).collect();

    let beta_lambdas = descending(&grid.beta_lambdas);
    let betas: Vec<Option<(DenseVector, Vec<f64>)>> = beta_lambdas
        .iter()
        .map(|&l| {
            direct_beta(&split.moments, l, None).ok().map(|b| {
                let proj = validation.iter().map(|f| f.mean.dot(&b)).collect();
                (b, proj)
            })
        })
        .collect();

    let mut best: Option<Best> = None;
    let mut consider = |error: f64, make: &dyn Fn() -> Best| {
        // A failed cell never displaces a fitted one at equal error.
        let better = |b: &Best| error < b.error || (error == b.error && !b.constant.is_finite());
        if best.as_ref().is_none_or(better) {
            let mut b = make();
            b.error = error;
            best = Some(b);
        }
    };

    for l1 in descending(&grid.clime_lambdas) {
        let omegas = clime(&split.moments.class1.covariance, l1)
            .and_then(|o1| Ok((o1, clime(&split.moments.class2.covariance, l1)?)));
        for lt in descending(&grid.threshold_lambdas) {
            let nabla = omegas
                .as_ref()
                .ok()
                .and_then(|(o1, o2)| threshold_difference(o1, o2, lt).ok());
            let sparse = nabla.as_ref().map(SparseSymmetric::from_dense);
            let quad: Option<Vec<f64>> = sparse
                .as_ref()
                .map(|s| validation.iter().map(|f| f.quadratic_term(s)).collect());
            for (l2, fitted) in beta_lambdas.iter().zip(&betas) {
                let hyper = ClipsHyperparameters::new(l1, lt, *l2, split_seed);
                let cell = match (&nabla, &sparse, &quad, fitted) {
                    (Some(nabla), Some(sparse), Some(quad), Some((beta, proj))) => split
                        .intercept(beta, sparse)
                        .ok()
                        .map(|constant| (nabla, beta, proj, quad, constant)),
                    _ => None,
                };
                match cell {
                    Some((nabla, beta, proj, quad, constant)) => {
                        let wrong = validation
                            .iter()
                            .zip(proj.iter().zip(quad))
                            .filter(|(f, (lin, q))| {
                                let g = split.prior_log_ratio / f.m as f64 + constant + *lin + *q;
                                ClassLabel::from_score(g) != f.label
                            })
                            .count();
                        let error = wrong as f64 / validation.len() as f64;
                        consider(error, &|| Best {
                            error,
                            hyper: hyper.clone(),
                            constant,
                            beta: beta.clone(),
                            nabla: nabla.clone(),
                        });
                    }
                    None => consider(1.0, &|| Best {
                        error: 1.0,
                        hyper: hyper.clone(),
                        constant: f64::NAN,
                        beta: DenseVector::zeros(0),
                        nabla: DenseMatrix::zeros(0, 0),
                    }),
                }
            }
        }
    }

    let best = best.expect("grids are nonempty");
    if !best.constant.is_finite() {
        return Err(Error::TuningFailed);
    }
    let classifier = assemble(split.prior_log_ratio, best.constant, best.beta, best.nabla, best.hyper.clone())?;
    Ok(TuneOutcome {
        hyperparameters: best.hyper,
        validation_error: best.error,
        classifier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::fit_clips;
    use crate::model::SetSample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn sets(rng: &mut ChaCha8Rng, n: usize, m: usize, p: usize, shift: f64, label: ClassLabel) -> Vec<LabeledSet> {
        (0..n)
            .map(|_| {
                let obs = (0..m)
                    .map(|_| {
                        DenseVector::from_fn(p, |i, _| {
                            rng.sample::<f64, _>(StandardNormal) + if i == 0 { shift } else { 0.0 }
                        })
                    })
                    .collect();
                LabeledSet::new(SetSample::new(obs).unwrap(), label)
            })
            .collect()
    }

    fn two_class(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> Vec<LabeledSet> {
        let mut v = sets(rng, n, 4, 3, shift, ClassLabel::One);
        v.extend(sets(rng, n, 4, 3, 0.0, ClassLabel::Two));
        v
    }

    #[test]
    fn single_point_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let training = two_class(&mut rng, 10, 1.0);
        let validation = two_class(&mut rng, 10, 1.0);
        let hyper = ClipsHyperparameters::new(0.3, 0.2, 0.1, 7);
        let outcome = tune_and_fit(&training, &validation, &TuningGrid::single(&hyper), 7).unwrap();
        assert_eq!(outcome.hyperparameters, hyper);
        assert_eq!(outcome.classifier, fit_clips(&training, &hyper).unwrap());
        let wrong = validation
            .iter()
            .filter(|s| outcome.classifier.classify(&s.sample).unwrap() != s.label)
            .count();
        assert_eq!(outcome.validation_error, wrong as f64 / validation.len() as f64);
    }

    #[test]
    fn ties_prefer_largest_penalties() {
        // With β and ∇ forced to zero everywhere, every cell predicts the
        // same labels, so all errors tie.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let training = two_class(&mut rng, 8, 0.0);
        let validation = two_class(&mut rng, 8, 0.0);
        let grid = TuningGrid::new(vec![0.5, 0.8], vec![50.0, 80.0], vec![50.0, 90.0, 70.0]);
        let (hyper, _) = tune(&training, &validation, &grid, 3).unwrap();
        assert_eq!(
            (hyper.clime_lambda, hyper.threshold_lambda, hyper.beta_lambda),
            (0.8, 80.0, 90.0)
        );
    }

    #[test]
    fn infeasible_cells_are_skipped() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // p = 3 with singleton sets and few of them: Σ̂ is singular, small λ₁
        // makes CLIME infeasible.
        let mut training = sets(&mut rng, 4, 1, 3, 2.0, ClassLabel::One);
        training.extend(sets(&mut rng, 4, 1, 3, 0.0, ClassLabel::Two));
        let validation = two_class(&mut rng, 5, 2.0);
        let grid = TuningGrid::new(vec![1e-4, 1.0], vec![0.1], vec![5.0]);
        let (hyper, error) = tune(&training, &validation, &grid, 0).unwrap();
        assert_eq!(hyper.clime_lambda, 1.0);
        assert!(error < 1.0);
    }

    #[test]
    fn default_grid_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let training = two_class(&mut rng, 10, 1.0);
        let grid = TuningGrid::default_for(&training).unwrap();
        for g in [&grid.clime_lambdas, &grid.threshold_lambdas, &grid.beta_lambdas] {
            assert_eq!(g.len(), 7);
            assert!((g[6] / g[0] - 100.0).abs() < 1e-9);
            assert!(g.windows(2).all(|w| w[0] < w[1]));
        }
        let rate = (3f64.ln() / (20.0 * 4.0)).sqrt();
        assert!((grid.clime_lambdas[3] - rate).abs() < 1e-12);
    }

    #[test]
    fn validation_split_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut data = sets(&mut rng, 10, 2, 2, 0.0, ClassLabel::One);
        data.extend(sets(&mut rng, 3, 2, 2, 0.0, ClassLabel::Two));
        let (train, val) = validation_split(&data, 0.3, 4).unwrap();
        let count = |v: &[LabeledSet], l| v.iter().filter(|s| s.label == l).count();
        assert_eq!((count(&val, ClassLabel::One), count(&val, ClassLabel::Two)), (3, 1));
        assert_eq!((count(&train, ClassLabel::One), count(&train, ClassLabel::Two)), (7, 2));
        assert_eq!((train.clone(), val.clone()), validation_split(&data, 0.3, 4).unwrap());
        assert!(validation_split(&data, 1.0, 4).is_err());
    }

    #[test]
    fn empty_grid_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let training = two_class(&mut rng, 4, 1.0);
        let grid = TuningGrid::new(vec![], vec![0.1], vec![0.1]);
        assert!(matches!(tune(&training, &training, &grid, 0), Err(Error::InvalidParameter(_))));
    }
}
