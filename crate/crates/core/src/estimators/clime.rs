use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::lp::{solve, LpProblem, LpStatus};

/// Constrained ℓ₁-minimization precision estimate.
///
/// Column `j` minimizes `‖ω‖₁` subject to `‖Σ̂ω − e_j‖∞ ≤ λ`, written as a
/// linear program in `ω = u − v` with `u, v ≥ 0`. Columns are independent and
/// solved in parallel; the result is assembled in column order.
pub fn clime(covariance: &DenseMatrix, lambda: f64) -> Result<DenseMatrix> {
    let p = covariance.nrows();
    if covariance.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: covariance.ncols(),
        });
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("CLIME lambda must be positive, got {lambda}")));
    }
    let mut g = DenseMatrix::zeros(2 * p, 2 * p);
    g.view_mut((0, 0), (p, p)).copy_from(covariance);
    g.view_mut((0, p), (p, p)).copy_from(&(-covariance));
    g.view_mut((p, 0), (p, p)).copy_from(&(-covariance));
    g.view_mut((p, p), (p, p)).copy_from(covariance);

    let columns: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|j| {
            let mut rhs = vec![lambda; 2 * p];
            rhs[j] += 1.0;
            rhs[p + j] -= 1.0;
            let problem = LpProblem::nonnegative(vec![1.0; 2 * p], g.clone(), rhs)?;
            let sol = solve(&problem)?;
            match sol.status {
                LpStatus::Optimal => {
                    let z = sol.solution.expect("optimal solutions carry a point");
                    Ok((0..p).map(|i| z[i] - z[p + i]).collect())
                }
                LpStatus::Infeasible => Err(Error::InfeasibleColumn(j)),
                LpStatus::Unbounded => Err(Error::Unbounded("CLIME column")),
            }
        })
        .collect::<Result<_>>()?;

    Ok(DenseMatrix::from_fn(p, p, |i, j| columns[j][i]))
}

/// Hard-thresholded, symmetrized difference `Ω̃₂ − Ω̃₁`.
///
/// Entries with `|Ω̃₂,ij − Ω̃₁,ij| ≤ λ′` are zeroed; then each symmetric pair
/// takes the value of smaller magnitude (the upper-triangle entry on exact
/// magnitude ties). Every nonzero entry of the result exceeds `λ′` in
/// magnitude.
pub fn threshold_difference(
    omega1: &DenseMatrix,
    omega2: &DenseMatrix,
    threshold_lambda: f64,
) -> Result<DenseMatrix> {
    let p = omega1.nrows();
    for m in [omega1, omega2] {
        if m.nrows() != p || m.ncols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: m.nrows().max(m.ncols()),
            });
        }
    }
    if !(threshold_lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold lambda must be positive, got {threshold_lambda}"
        )));
    }
    let raw = |i: usize, j: usize| {
        let d = omega2[(i, j)] - omega1[(i, j)];
        if d.abs() > threshold_lambda {
            d
        } else {
            0.0
        }
    };
    let mut out = DenseMatrix::zeros(p, p);
    for i in 0..p {
        out[(i, i)] = raw(i, i);
        for j in (i + 1)..p {
            let upper = raw(i, j);
            let lower = raw(j, i);
            let v = if lower.abs() < upper.abs() { lower } else { upper };
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_feasible(cov: &DenseMatrix, omega: &DenseMatrix, lambda: f64) {
        let p = cov.nrows();
        let resid = cov * omega - DenseMatrix::identity(p, p);
        assert!(resid.amax() <= lambda + 1e-8, "residual {}", resid.amax());
    }

    #[test]
    fn identity_shrinks() {
        let cov = DenseMatrix::identity(5, 5);
        let omega = clime(&cov, 0.1).unwrap();
        assert!((omega - DenseMatrix::identity(5, 5) * 0.9).amax() < 1e-12);
        assert_eq!(clime(&cov, 1.0).unwrap(), DenseMatrix::zeros(5, 5));
        assert_eq!(clime(&cov, 1.5).unwrap(), DenseMatrix::zeros(5, 5));
    }

    #[test]
    fn diagonal_closed_form() {
        let cov = DenseMatrix::from_diagonal(&DenseVector::from_row_slice(&[2.0, 4.0]));
        let omega = clime(&cov, 0.1).unwrap();
        let expected = DenseMatrix::from_diagonal(&DenseVector::from_row_slice(&[0.45, 0.225]));
        assert!((omega - expected).amax() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let p = rng.random_range(1..8);
            let diag = DenseVector::from_fn(p, |_, _| rng.random_range(0.2..5.0));
            let lambda = rng.random_range(0.01..1.5);
            let omega = clime(&DenseMatrix::from_diagonal(&diag), lambda).unwrap();
            for i in 0..p {
                for j in 0..p {
                    let expected = if i == j { (1.0 - lambda).max(0.0) / diag[i] } else { 0.0 };
                    assert!((omega[(i, j)] - expected).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn feasible_on_random_covariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..6 {
            let p = 3 + trial;
            let n = if trial % 2 == 0 { 2 * p } else { p - 1 };
            let x = DenseMatrix::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0));
            let cov = x.transpose() * &x / n as f64;
            for lambda in [0.05, 0.2, 0.6] {
                match clime(&cov, lambda) {
                    Ok(omega) => assert_feasible(&cov, &omega, lambda),
                    Err(Error::InfeasibleColumn(_)) => assert!(n < p),
                    Err(e) => panic!("unexpected {e}"),
                }
            }
        }
    }

    #[test]
    fn infeasible_column_is_named() {
        // Singular Σ̂ with zero second row: e_2 cannot be approached.
        let cov = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(clime(&cov, 0.5), Err(Error::InfeasibleColumn(1)));
    }

    #[test]
    fn threshold_examples() {
        let a = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 1.0]);
        assert_eq!(threshold_difference(&a, &a, 0.1).unwrap(), DenseMatrix::zeros(2, 2));

        let zero = DenseMatrix::zeros(2, 2);
        let o2 = DenseMatrix::from_row_slice(2, 2, &[0.0, 0.3, 0.5, 0.0]);
        let d = threshold_difference(&zero, &o2, 0.1).unwrap();
        assert_eq!(d, DenseMatrix::from_row_slice(2, 2, &[0.0, 0.3, 0.3, 0.0]));

        let o2 = DenseMatrix::from_row_slice(2, 2, &[0.0, 0.05, 0.5, 0.0]);
        let d = threshold_difference(&zero, &o2, 0.1).unwrap();
        assert_eq!(d, DenseMatrix::zeros(2, 2));

        let o2 = DenseMatrix::from_row_slice(2, 2, &[0.0, -0.4, -0.7, 0.0]);
        let d = threshold_difference(&zero, &o2, 0.1).unwrap();
        assert_eq!(d[(0, 1)], -0.4);
        assert_eq!(d[(1, 0)], -0.4);
    }

    #[test]
    fn threshold_kills_small_and_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let p = rng.random_range(1..7);
            let o1 = DenseMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
            let o2 = DenseMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
            let small = rng.random_range(0.01..0.5);
            let large = small + rng.random_range(0.0..0.5);
            let a = threshold_difference(&o1, &o2, small).unwrap();
            let b = threshold_difference(&o1, &o2, large).unwrap();
            assert_eq!(a, a.transpose());
            for (x, y) in a.iter().zip(b.iter()) {
                assert!(*x == 0.0 || x.abs() > small);
                assert!(*y == 0.0 || y.abs() > large);
                if *x == 0.0 {
                    assert_eq!(*y, 0.0);
                }
            }
        }
    }
}
