use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::lp::{solve, LpProblem, LpStatus};

use super::PooledMoments;

/// Direct estimate of the linear coefficient `β = Σ₁⁻¹μ₁ − Σ₂⁻¹μ₂`.
///
/// Solves
///
/// ```text
/// minimize ‖θ₁ − θ₂‖₁  s.t.  ‖Σ̂_k θ_k − μ̂_k‖∞ ≤ λ,  k = 1, 2
///                           (and ‖θ_k‖₁ ≤ L when a cap is given)
/// ```
///
/// with `θ_k = θ_k⁺ − θ_k⁻` and an epigraph variable `t ≥ |θ₁ − θ₂|`, and
/// returns `θ̃₁ − θ̃₂`.
pub fn direct_beta(moments: &PooledMoments, beta_lambda: f64, l1_cap: Option<f64>) -> Result<DenseVector> {
    let (theta1, theta2) = direct_beta_parts(moments, beta_lambda, l1_cap)?;
    Ok(theta1 - theta2)
}

/// The optimal pair `(θ̃₁, θ̃₂)` behind [`direct_beta`].
pub fn direct_beta_parts(
    moments: &PooledMoments,
    beta_lambda: f64,
    l1_cap: Option<f64>,
) -> Result<(DenseVector, DenseVector)> {
    if !(beta_lambda > 0.0 && beta_lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta lambda must be positive, got {beta_lambda}"
        )));
    }
    let p = moments.dim();
    // Variable blocks: θ₁⁺, θ₁⁻, θ₂⁺, θ₂⁻, t.
    let n = 5 * p;
    let rows = 6 * p + if l1_cap.is_some() { 2 } else { 0 };
    let mut g = DenseMatrix::zeros(rows, n);
    let mut h = Vec::with_capacity(rows);

    for (k, class) in [&moments.class1, &moments.class2].into_iter().enumerate() {
        let plus = 2 * k * p;
        let minus = plus + p;
        let base = 2 * k * p;
        let cov = &class.covariance;
        for i in 0..p {
            for j in 0..p {
                let c = cov[(i, j)];
                g[(base + i, plus + j)] = c;
                g[(base + i, minus + j)] = -c;
                g[(base + p + i, plus + j)] = -c;
                g[(base + p + i, minus + j)] = c;
            }
        }
        h.extend((0..p).map(|i| beta_lambda + class.mean[i]));
        h.extend((0..p).map(|i| beta_lambda - class.mean[i]));
    }

    let t = 4 * p;
    let base = 4 * p;
    for i in 0..p {
        // θ₁ − θ₂ − t ≤ 0
        g[(base + i, i)] = 1.0;
        g[(base + i, p + i)] = -1.0;
        g[(base + i, 2 * p + i)] = -1.0;
        g[(base + i, 3 * p + i)] = 1.0;
        g[(base + i, t + i)] = -1.0;
        // θ₂ − θ₁ − t ≤ 0
        g[(base + p + i, i)] = -1.0;
        g[(base + p + i, p + i)] = 1.0;
        g[(base + p + i, 2 * p + i)] = 1.0;
        g[(base + p + i, 3 * p + i)] = -1.0;
        g[(base + p + i, t + i)] = -1.0;
    }
    h.extend(std::iter::repeat_n(0.0, 2 * p));

    if let Some(cap) = l1_cap {
        for k in 0..2 {
            for j in 0..2 * p {
                g[(6 * p + k, 2 * k * p + j)] = 1.0;
            }
            h.push(cap);
        }
    }

    let mut objective = vec![0.0; n];
    objective[t..].fill(1.0);
    let problem = LpProblem::nonnegative(objective, g, h)?;
    let sol = solve(&problem)?;
    match sol.status {
        LpStatus::Optimal => {
            let z = sol.solution.expect("optimal solutions carry a point");
            Ok((
                DenseVector::from_fn(p, |i, _| z[i] - z[p + i]),
                DenseVector::from_fn(p, |i, _| z[2 * p + i] - z[3 * p + i]),
            ))
        }
        LpStatus::Infeasible => Err(Error::Infeasible("direct beta")),
        LpStatus::Unbounded => Err(Error::Unbounded("direct beta")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::ClassMoments;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn moments(mean1: DenseVector, cov1: DenseMatrix, mean2: DenseVector, cov2: DenseMatrix) -> PooledMoments {
        let class = |mean, covariance| ClassMoments {
            set_count: 5,
            observation_count: 50,
            prior: 0.5,
            mean,
            covariance,
        };
        PooledMoments {
            class1: class(mean1, cov1),
            class2: class(mean2, cov2),
        }
    }

    #[test]
    fn equal_means_give_zero() {
        let cov = DenseMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let mu = DenseVector::from_row_slice(&[1.0, -3.0]);
        let m = moments(mu.clone(), cov.clone(), mu, cov);
        assert_eq!(direct_beta(&m, 0.1, None).unwrap(), DenseVector::zeros(2));
    }

    #[test]
    fn separable_gap() {
        let i3 = DenseMatrix::identity(3, 3);
        let m = moments(
            DenseVector::from_row_slice(&[1.0, 0.0, 0.0]),
            i3.clone(),
            DenseVector::zeros(3),
            i3.clone(),
        );
        let b = direct_beta(&m, 0.2, None).unwrap();
        assert!((b - DenseVector::from_row_slice(&[0.6, 0.0, 0.0])).amax() < 1e-12);

        let m = moments(
            DenseVector::from_row_slice(&[0.3, 0.0, 0.0]),
            i3.clone(),
            DenseVector::zeros(3),
            i3,
        );
        assert!(direct_beta(&m, 0.2, None).unwrap().amax() < 1e-12);
    }

    #[test]
    fn constraints_hold_on_random_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..8 {
            let p = rng.random_range(2..7);
            let make_cov = |rng: &mut ChaCha8Rng| {
                let b = DenseMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
                &b * b.transpose() / p as f64 + DenseMatrix::identity(p, p) * 0.3
            };
            let m = moments(
                DenseVector::from_fn(p, |_, _| rng.random_range(-1.0..1.0)),
                make_cov(&mut rng),
                DenseVector::from_fn(p, |_, _| rng.random_range(-1.0..1.0)),
                make_cov(&mut rng),
            );
            let lambda = 0.1;
            let (t1, t2) = direct_beta_parts(&m, lambda, None).unwrap();
            for (class, theta) in [(&m.class1, &t1), (&m.class2, &t2)] {
                let resid = &class.covariance * theta - &class.mean;
                assert!(resid.amax() <= lambda + 1e-8);
            }
            let beta = t1 - t2;
            // The exact inverse pair is feasible, so it bounds the optimum.
            let exact = crate::linalg::solve_pd(&m.class1.covariance, &m.class1.mean).unwrap()
                - crate::linalg::solve_pd(&m.class2.covariance, &m.class2.mean).unwrap();
            assert!(beta.lp_norm(1) <= exact.lp_norm(1) + 1e-8);
        }
    }

    #[test]
    fn cap_does_not_change_solution_when_loose() {
        let i2 = DenseMatrix::identity(2, 2);
        let m = moments(
            DenseVector::from_row_slice(&[1.0, -0.7]),
            i2.clone(),
            DenseVector::from_row_slice(&[0.0, 0.4]),
            i2,
        );
        let free = direct_beta(&m, 0.1, None).unwrap();
        let capped = direct_beta(&m, 0.1, Some(100.0)).unwrap();
        assert!((free - capped).amax() < 1e-12);
    }

    #[test]
    fn infeasible_when_lambda_too_small() {
        let singular = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let m = moments(
            DenseVector::from_row_slice(&[0.0, 1.0]),
            singular.clone(),
            DenseVector::zeros(2),
            singular,
        );
        assert_eq!(direct_beta(&m, 0.5, None), Err(Error::Infeasible("direct beta")));
    }
}
