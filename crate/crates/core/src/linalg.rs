//! Dense symmetric linear algebra and per-set summary statistics.
//!
//! Matrices are `nalgebra` dense matrices; this module adds the positive
//! definiteness contract shared by every estimator: inputs are symmetrized
//! when the asymmetry is at roundoff level, and a Cholesky pivot at or below
//! [`PIVOT_TOLERANCE`] is reported as [`Error::NotPositiveDefinite`].

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;
pub type DenseVector = DVector<f64>;

/// Smallest admissible Cholesky pivot.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Largest asymmetry `|a_ij - a_ji|` that is silently symmetrized away.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Lower-triangular factor `L` with `L Lᵀ = A`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    lower: DenseMatrix,
}

impl CholeskyFactor {
    pub fn lower(&self) -> &DenseMatrix {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// `2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.lower.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// Solves `L Lᵀ x = b` by forward then backward substitution.
    pub fn solve(&self, b: &DenseVector) -> Result<DenseVector> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let l = &self.lower;
        let mut y = b.clone();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        Ok(y)
    }

    /// `A⁻¹`, column by column; the result is symmetrized.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.dim();
        let mut inv = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DenseVector::zeros(n);
            e[j] = 1.0;
            let col = self.solve(&e).expect("dimension matches by construction");
            inv.set_column(j, &col);
        }
        symmetrize(&inv)
    }

    /// `L Lᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        &self.lower * self.lower.transpose()
    }
}

/// `(A + Aᵀ) / 2`.
pub fn symmetrize(a: &DenseMatrix) -> DenseMatrix {
    (a + a.transpose()) * 0.5
}

/// Largest `|a_ij - a_ji|`.
pub fn max_asymmetry(a: &DenseMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

fn check_square(a: &DenseMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.nrows() == 0 {
        return Err(Error::InvalidParameter("matrix dimension must be at least 1".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    Ok(())
}

/// Cholesky factorization of a symmetric positive-definite matrix.
pub fn cholesky(a: &DenseMatrix) -> Result<CholeskyFactor> {
    check_square(a)?;
    let asymmetry = max_asymmetry(a);
    if asymmetry > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let a = symmetrize(a);
    let n = a.nrows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = a[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if pivot <= PIVOT_TOLERANCE || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(CholeskyFactor { lower: l })
}

/// `log |A|` for symmetric positive-definite `A`.
pub fn log_det_pd(a: &DenseMatrix) -> Result<f64> {
    Ok(cholesky(a)?.log_det())
}

/// Solves `A x = b` for symmetric positive-definite `A`.
pub fn solve_pd(a: &DenseMatrix, b: &DenseVector) -> Result<DenseVector> {
    cholesky(a)?.solve(b)
}

/// Size, mean and divisor-`m` scatter of one set of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SetStatistics {
    pub m: usize,
    pub mean: DenseVector,
    pub scatter: DenseMatrix,
}

impl SetStatistics {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Raw second moment `S + x̄ x̄ᵀ = (1/m) Σ x_j x_jᵀ`.
    pub fn second_moment(&self) -> DenseMatrix {
        &self.scatter + &self.mean * self.mean.transpose()
    }
}

/// Mean and scatter `S = Σ (x_j - x̄)(x_j - x̄)ᵀ / m` of a set.
pub fn set_statistics(observations: &[DenseVector]) -> Result<SetStatistics> {
    let first = observations.first().ok_or(Error::EmptySet)?;
    let p = first.len();
    let m = observations.len();
    let mut mean = DenseVector::zeros(p);
    for x in observations {
        if x.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: x.len(),
            });
        }
        mean += x;
    }
    mean /= m as f64;
    let mut scatter = DenseMatrix::zeros(p, p);
    if m > 1 {
        for x in observations {
            let d = x - &mean;
            scatter.ger(1.0, &d, &d, 1.0);
        }
        scatter /= m as f64;
        scatter = symmetrize(&scatter);
    }
    Ok(SetStatistics { m, mean, scatter })
}

/// `tr(A B)` for square matrices of equal size, without forming the product.
pub fn trace_of_product(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.iter()
        .zip(b.transpose().iter())
        .map(|(x, y)| x * y)
        .sum()
}

/// `xᵀ A x`.
pub fn quadratic_form(a: &DenseMatrix, x: &DenseVector) -> f64 {
    x.dot(&(a * x))
}
