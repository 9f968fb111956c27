use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use setclass::linalg::DenseMatrix;
use setclass::lp::{enumerate_vertices_oracle, solve, LpProblem, LpStatus};

fn random_problem(rng: &mut impl Rng) -> LpProblem {
    let n = rng.random_range(1..=6);
    let k = rng.random_range(1..=10);
    let g = DenseMatrix::from_fn(k, n, |_, _| rng.random_range(-5..=5) as f64);
    let h = (0..k).map(|_| rng.random_range(-3..=10) as f64).collect();
    let c = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    let lb = (0..n)
        .map(|_| if rng.random_bool(0.2) { f64::NEG_INFINITY } else { 0.0 })
        .collect();
    LpProblem::new(c, g, h, lb).unwrap()
}

fn assert_agrees(problem: &LpProblem) {
    let fast = solve(problem).unwrap();
    let slow = enumerate_vertices_oracle(problem).unwrap();
    assert_eq!(fast.status, slow.status, "{problem:?}");
    if fast.status == LpStatus::Optimal {
        let (a, b) = (fast.objective_value.unwrap(), slow.objective_value.unwrap());
        assert!((a - b).abs() <= 1e-8, "simplex {a} vs oracle {b} on {problem:?}");
        let z = fast.solution.unwrap();
        assert!(problem.max_violation(&z) <= 1e-8);
        assert!((problem.objective_at(&z) - a).abs() <= 1e-8);
    }
}

#[test]
fn simplex_matches_vertex_enumeration_on_seeded_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = [0usize; 3];
    for _ in 0..500 {
        let problem = random_problem(&mut rng);
        seen[match solve(&problem).unwrap().status {
            LpStatus::Optimal => 0,
            LpStatus::Infeasible => 1,
            LpStatus::Unbounded => 2,
        }] += 1;
        assert_agrees(&problem);
    }
    // The generator should exercise every outcome.
    assert!(seen.iter().all(|&c| c > 10), "{seen:?}");
}

#[test]
fn degenerate_vertices_agree() {
    // Many constraints through the origin.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.random_range(2..=4);
        let k = rng.random_range(n..=10);
        let g = DenseMatrix::from_fn(k, n, |_, _| rng.random_range(-2..=2) as f64);
        let h = (0..k).map(|i| if i % 2 == 0 { 0.0 } else { 1.0 }).collect();
        let c = (0..n).map(|_| rng.random_range(-3..=3) as f64).collect();
        let problem = LpProblem::nonnegative(c, g, h).unwrap();
        assert_agrees(&problem);
    }
}

proptest! {
    #[test]
    fn random_problems_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        assert_agrees(&random_problem(&mut rng));
    }

    #[test]
    fn scaling_the_objective_scales_the_optimum(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let problem = random_problem(&mut rng);
        let scaled = LpProblem::new(
            problem.objective().iter().map(|c| c * scale).collect(),
            problem.constraint_matrix().clone(),
            problem.constraint_rhs().to_vec(),
            problem.lower_bounds().to_vec(),
        )
        .unwrap();
        let (a, b) = (solve(&problem).unwrap(), solve(&scaled).unwrap());
        prop_assert_eq!(a.status, b.status);
        if let (Some(x), Some(y)) = (a.objective_value, b.objective_value) {
            prop_assert!((x * scale - y).abs() <= 1e-8 * (1.0 + y.abs()));
        }
    }
}
