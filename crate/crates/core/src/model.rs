//! Gaussian class populations, discriminant coefficients, and the three set
//! decision rules: the Bayes set rule, QDA applied to the set mean, and a
//! majority vote over per-observation QDA decisions.
//!
//! With `x̄` and `S` the mean and divisor-`m` scatter of a set, the Bayes rule
//! assigns class 1 iff
//!
//! ```text
//! g = log(π₁/π₂)/m + β₀ + βᵀx̄ + x̄ᵀ∇x̄/2 + tr(∇S)/2 > 0
//! β₀ = {-log(|Σ₁|/|Σ₂|) - μ₁ᵀΣ₁⁻¹μ₁ + μ₂ᵀΣ₂⁻¹μ₂}/2
//! β  = Σ₁⁻¹μ₁ - Σ₂⁻¹μ₂
//! ∇  = Σ₂⁻¹ - Σ₁⁻¹
//! ```
//!
//! and class 2 otherwise, including the tie `g = 0`.

use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, max_asymmetry, quadratic_form, set_statistics, trace_of_product, CholeskyFactor,
    DenseMatrix, DenseVector, SetStatistics,
};

/// Class label; the numeric values are the labels used in data files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLabel {
    One = 1,
    Two = 2,
}

impl ClassLabel {
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            1 => Some(Self::One),
            2 => Some(Self::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Self::One => Self::Two,
            Self::Two => Self::One,
        }
    }

    /// `2 - 1{score > 0}`.
    pub fn from_score(score: f64) -> Self {
        if score > 0.0 {
            Self::One
        } else {
            Self::Two
        }
    }

    pub fn index(self) -> usize {
        self as usize - 1
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// One class's population `N(μ, Σ)` with prior `π`, plus cached
/// factorization, precision and log-determinant.
#[derive(Debug, Clone)]
pub struct GaussianClassModel {
    prior: f64,
    mean: DenseVector,
    covariance: DenseMatrix,
    cholesky: CholeskyFactor,
    precision: DenseMatrix,
    log_det: f64,
}

impl GaussianClassModel {
    pub fn new(prior: f64, mean: DenseVector, covariance: DenseMatrix) -> Result<Self> {
        if !(prior > 0.0 && prior < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "class prior must lie in (0, 1), got {prior}"
            )));
        }
        if covariance.nrows() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                found: covariance.nrows(),
            });
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("class mean"));
        }
        let cholesky = cholesky(&covariance)?;
        let precision = cholesky.inverse();
        let log_det = cholesky.log_det();
        Ok(Self {
            prior,
            mean,
            covariance,
            cholesky,
            precision,
            log_det,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn mean(&self) -> &DenseVector {
        &self.mean
    }

    pub fn covariance(&self) -> &DenseMatrix {
        &self.covariance
    }

    pub fn cholesky(&self) -> &CholeskyFactor {
        &self.cholesky
    }

    pub fn precision(&self) -> &DenseMatrix {
        &self.precision
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }
}

/// The coefficients `(log(π₁/π₂), β₀, β, ∇)` evaluated by every set rule.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantCoefficients {
    pub prior_log_ratio: f64,
    pub constant: f64,
    pub linear: DenseVector,
    pub quadratic: DenseMatrix,
}

impl DiscriminantCoefficients {
    pub fn new(
        prior_log_ratio: f64,
        constant: f64,
        linear: DenseVector,
        quadratic: DenseMatrix,
    ) -> Result<Self> {
        let p = linear.len();
        if quadratic.nrows() != p || quadratic.ncols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: quadratic.nrows(),
            });
        }
        if !prior_log_ratio.is_finite() || !constant.is_finite() {
            return Err(Error::NonFinite("discriminant constants"));
        }
        if linear.iter().chain(quadratic.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("discriminant coefficients"));
        }
        let asymmetry = max_asymmetry(&quadratic);
        if asymmetry > 1e-10 {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(Self {
            prior_log_ratio,
            constant,
            linear,
            quadratic,
        })
    }

    pub fn zeros(p: usize) -> Self {
        Self {
            prior_log_ratio: 0.0,
            constant: 0.0,
            linear: DenseVector::zeros(p),
            quadratic: DenseMatrix::zeros(p, p),
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    fn check_dim(&self, p: usize) -> Result<()> {
        if p != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p,
            });
        }
        Ok(())
    }

    /// Per-observation QDA score
    /// `log(π₁/π₂)/m + β₀ + βᵀx + xᵀ∇x/2` for a member of a set of size `m`.
    pub fn observation_score(&self, x: &DenseVector, m: usize) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.prior_log_ratio / m as f64
            + self.constant
            + self.linear.dot(x)
            + quadratic_form(&self.quadratic, x) / 2.0)
    }

    /// Number of nonzero entries of `β`.
    pub fn linear_support_size(&self) -> usize {
        self.linear.iter().filter(|v| **v != 0.0).count()
    }

    /// Number of nonzero entries of `∇` (both triangles).
    pub fn quadratic_support_size(&self) -> usize {
        self.quadratic.iter().filter(|v| **v != 0.0).count()
    }

    /// Coefficients with classes 1 and 2 exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            prior_log_ratio: -self.prior_log_ratio,
            constant: -self.constant,
            linear: -&self.linear,
            quadratic: -&self.quadratic,
        }
    }
}

/// A nonempty set of observations of uniform dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSample {
    observations: Vec<DenseVector>,
}

impl SetSample {
    pub fn new(observations: Vec<DenseVector>) -> Result<Self> {
        let first = observations.first().ok_or(Error::EmptySet)?;
        let p = first.len();
        if let Some(bad) = observations.iter().find(|x| x.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: bad.len(),
            });
        }
        if observations.iter().any(|x| x.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite("observation"));
        }
        Ok(Self { observations })
    }

    pub fn observations(&self) -> &[DenseVector] {
        &self.observations
    }

    pub fn size(&self) -> usize {
        self.observations.len()
    }

    pub fn dim(&self) -> usize {
        self.observations[0].len()
    }

    pub fn statistics(&self) -> SetStatistics {
        set_statistics(&self.observations).expect("nonempty and uniform by construction")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub sample: SetSample,
    pub label: ClassLabel,
}

impl LabeledSet {
    pub fn new(sample: SetSample, label: ClassLabel) -> Self {
        Self { sample, label }
    }
}

fn check_same_dim(class1: &GaussianClassModel, class2: &GaussianClassModel) -> Result<()> {
    if class1.dim() != class2.dim() {
        return Err(Error::DimensionMismatch {
            expected: class1.dim(),
            found: class2.dim(),
        });
    }
    Ok(())
}

/// Population coefficients of the Bayes set rule.
pub fn oracle_coefficients(
    class1: &GaussianClassModel,
    class2: &GaussianClassModel,
) -> Result<DiscriminantCoefficients> {
    check_same_dim(class1, class2)?;
    let beta1 = class1.precision() * class1.mean();
    let beta2 = class2.precision() * class2.mean();
    let constant = (-(class1.log_det() - class2.log_det()) - class1.mean().dot(&beta1)
        + class2.mean().dot(&beta2))
        / 2.0;
    let linear = beta1 - beta2;
    let quadratic = crate::linalg::symmetrize(&(class2.precision() - class1.precision()));
    DiscriminantCoefficients::new(
        (class1.prior() / class2.prior()).ln(),
        constant,
        linear,
        quadratic,
    )
}

/// The set discriminant `g`; positive values favour class 1.
pub fn discriminant_g(coeffs: &DiscriminantCoefficients, stats: &SetStatistics) -> Result<f64> {
    coeffs.check_dim(stats.dim())?;
    if stats.m == 0 {
        return Err(Error::EmptySet);
    }
    Ok(coeffs.prior_log_ratio / stats.m as f64
        + coeffs.constant
        + coeffs.linear.dot(&stats.mean)
        + quadratic_form(&coeffs.quadratic, &stats.mean) / 2.0
        + trace_of_product(&coeffs.quadratic, &stats.scatter) / 2.0)
}

/// Bayes set rule: class 1 iff `g > 0`.
pub fn classify_bayes(coeffs: &DiscriminantCoefficients, set: &SetSample) -> Result<ClassLabel> {
    Ok(ClassLabel::from_score(discriminant_g(coeffs, &set.statistics())?))
}

/// QDA applied to the set mean, treating `x̄` as one draw from
/// `N(μ_k, Σ_k/m)`.
pub fn mean_qda_score(
    class1: &GaussianClassModel,
    class2: &GaussianClassModel,
    set: &SetSample,
) -> Result<f64> {
    let coeffs = oracle_coefficients(class1, class2)?;
    coeffs.check_dim(set.dim())?;
    let m = set.size() as f64;
    let log_det_ratio = class1.log_det() - class2.log_det();
    // β₀′ differs from β₀ only in the weight 1/m on the log-determinant ratio.
    let constant = coeffs.constant + 0.5 * (1.0 - 1.0 / m) * log_det_ratio;
    let mean = set.statistics().mean;
    Ok(coeffs.prior_log_ratio / m
        + constant
        + coeffs.linear.dot(&mean)
        + quadratic_form(&coeffs.quadratic, &mean) / 2.0)
}

pub fn classify_mean_qda(
    class1: &GaussianClassModel,
    class2: &GaussianClassModel,
    set: &SetSample,
) -> Result<ClassLabel> {
    Ok(ClassLabel::from_score(mean_qda_score(class1, class2, set)?))
}

/// Average of `sign(s_j)` over the set's per-observation scores.
pub fn majority_vote_score(coeffs: &DiscriminantCoefficients, set: &SetSample) -> Result<f64> {
    let m = set.size();
    let mut votes = 0.0;
    for x in set.observations() {
        let s = coeffs.observation_score(x, m)?;
        votes += if s > 0.0 {
            1.0
        } else if s < 0.0 {
            -1.0
        } else {
            0.0
        };
    }
    Ok(votes / m as f64)
}

pub fn classify_majority_vote(
    coeffs: &DiscriminantCoefficients,
    set: &SetSample,
) -> Result<ClassLabel> {
    Ok(ClassLabel::from_score(majority_vote_score(coeffs, set)?))
}
