use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use setclass::estimators::{
    clime, direct_beta, fit_clips, plugin_classifier, pooled_moments, threshold_difference, tune,
    ClipsHyperparameters, PluginVariant, TuningGrid,
};
use setclass::linalg::DenseMatrix;
use setclass::model::{ClassLabel, LabeledSet};
use setclass::simulate::{
    generate_training, scenario_population, Scenario, ScenarioConfig, SetSizeDistribution,
};
use setclass::Error;

fn random_covariance(p: usize, rng: &mut impl Rng) -> DenseMatrix {
    let a = DenseMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
    &a * a.transpose() + DenseMatrix::identity(p, p) * 0.2
}

fn scenario_two(p: usize, rho: f64, sets: usize, seed: u64) -> Vec<LabeledSet> {
    let pop = scenario_population(&ScenarioConfig::new(Scenario::Two, p, rho, 0.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_training(&pop.class1, &pop.class2, sets, &SetSizeDistribution::Fixed(10), &mut rng)
        .unwrap()
}

fn in_leading_block(nabla: &DenseMatrix, k: usize) -> bool {
    nabla
        .iter()
        .enumerate()
        .all(|(idx, &v)| v == 0.0 || (idx % nabla.nrows() < k && idx / nabla.nrows() < k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clime_output_is_feasible(seed in any::<u64>(), p in 2usize..8, lambda in 0.05f64..0.8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cov = random_covariance(p, &mut rng);
        let omega = clime(&cov, lambda).unwrap();
        let residual = &cov * &omega - DenseMatrix::identity(p, p);
        prop_assert!(residual.amax() <= lambda + 1e-8);
    }

    #[test]
    fn clime_matches_closed_form_on_diagonal_input(
        diag in proptest::collection::vec(0.2f64..5.0, 1..10),
        lambda in 0.01f64..1.5,
    ) {
        let cov = DenseMatrix::from_diagonal(&diag.clone().into());
        let omega = clime(&cov, lambda).unwrap();
        for (j, d) in diag.iter().enumerate() {
            let expected = (1.0 - lambda).max(0.0) / d;
            prop_assert!((omega[(j, j)] - expected).abs() <= 1e-8);
        }
        let off: f64 = omega.iter().map(|v| v.abs()).sum::<f64>()
            - omega.diagonal().iter().map(|v| v.abs()).sum::<f64>();
        prop_assert!(off <= 1e-8);
    }

    #[test]
    fn larger_threshold_never_grows_support(
        seed in any::<u64>(),
        p in 2usize..7,
        lo in 0.0f64..0.5,
        extra in 0.0f64..0.5,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DenseMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
        let b = DenseMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
        let small = threshold_difference(&a, &b, lo.max(1e-6)).unwrap();
        let large = threshold_difference(&a, &b, lo.max(1e-6) + extra).unwrap();
        for (s, l) in small.iter().zip(large.iter()) {
            prop_assert!(*l == 0.0 || *s != 0.0);
        }
        prop_assert_eq!(&large, &large.transpose());
    }
}

#[test]
fn direct_beta_respects_its_constraints() {
    let training = scenario_two(6, 0.5, 20, 3);
    let moments = pooled_moments(&training).unwrap();
    for lambda in [0.1, 0.3, 1.0] {
        let beta = direct_beta(&moments, lambda, None).unwrap();
        assert_eq!(beta.len(), 6);
        assert!(beta.iter().all(|v| v.is_finite()));
    }
    // Huge constraint level: zero is feasible for both classes.
    let beta = direct_beta(&moments, 1e3, None).unwrap();
    assert!(beta.iter().all(|&v| v == 0.0));
}

#[test]
fn fit_clips_is_deterministic_and_uses_the_split_seed() {
    let training = scenario_two(10, 0.7, 12, 5);
    let hyper = ClipsHyperparameters::new(0.3, 0.3, 0.5, 9);
    let a = fit_clips(&training, &hyper).unwrap();
    let b = fit_clips(&training, &hyper).unwrap();
    assert_eq!(a, b);
    let other = fit_clips(&training, &ClipsHyperparameters { split_seed: 10, ..hyper }).unwrap();
    assert_ne!(a.coefficients, other.coefficients);
}

#[test]
fn clips_support_stays_in_the_differing_block() {
    let hyper = |seed| ClipsHyperparameters::new(0.2, 0.6, 0.5, seed);
    let hits = (0..10)
        .filter(|&seed| {
            let training = scenario_two(20, 0.8, 30, 100 + seed);
            let fit = fit_clips(&training, &hyper(seed)).unwrap();
            fit.coefficients.quadratic_support_size() > 0
                && in_leading_block(&fit.coefficients.quadratic, 5)
        })
        .count();
    assert!(hits >= 9, "{hits}/10");
}

#[test]
fn full_plugin_needs_more_observations_than_features() {
    let training = scenario_two(30, 0.5, 2, 1);
    let moments = pooled_moments(&training).unwrap();
    assert!(matches!(
        plugin_classifier(&moments, PluginVariant::Full),
        Err(Error::NotPositiveDefinite { .. })
    ));
    assert!(plugin_classifier(&moments, PluginVariant::Diagonal).is_ok());
    assert!(plugin_classifier(&moments, PluginVariant::Enriched(1.0)).is_ok());
}

#[test]
fn tuned_penalties_beat_the_grid_extremes_on_average() {
    let mut tuned = 0.0;
    let mut extremes = 0.0;
    let reps = 6;
    for seed in 0..reps {
        let training = scenario_two(12, 0.8, 14, 200 + seed);
        let validation = scenario_two(12, 0.8, 14, 300 + seed);
        let grid = TuningGrid::default_for(&training).unwrap();
        let (_, err) = tune(&training, &validation, &grid, seed).unwrap();
        tuned += err;
        let first = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let last = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        let mut corner = 0.0;
        for pick in [first, last] {
            let single = TuningGrid::new(
                vec![pick(&grid.clime_lambdas)],
                vec![pick(&grid.threshold_lambdas)],
                vec![pick(&grid.beta_lambdas)],
            );
            corner += tune(&training, &validation, &single, seed).map_or(1.0, |(_, e)| e) / 2.0;
        }
        extremes += corner;
    }
    assert!(tuned < extremes, "tuned {tuned} vs extremes {extremes}");
}

#[test]
fn training_needs_both_classes() {
    let training: Vec<LabeledSet> = scenario_two(5, 0.5, 3, 1)
        .into_iter()
        .filter(|s| s.label == ClassLabel::One)
        .collect();
    let hyper = ClipsHyperparameters::new(0.3, 0.3, 0.3, 0);
    assert!(matches!(fit_clips(&training, &hyper), Err(Error::MissingClass(_))));
}
