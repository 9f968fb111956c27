use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::model::{ClassLabel, LabeledSet};

use super::{require_both_classes, SetFeatures, SparseSymmetric};

const GRADIENT_TOLERANCE: f64 = 1e-10;
const NEWTON_ITERATIONS: usize = 100;
const BISECTION_ITERATIONS: usize = 400;
const BRACKET_MARGIN: f64 = 50.0;

/// Negative log-likelihood of the one-parameter logistic model
/// `P(class 1) = σ(M_i θ + o_i)`, averaged over sets.
#[derive(Debug, Clone, PartialEq)]
pub struct InterceptLikelihood {
    sizes: Vec<f64>,
    offsets: Vec<f64>,
    is_class1: Vec<bool>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl InterceptLikelihood {
    pub fn new(sizes: Vec<f64>, offsets: Vec<f64>, is_class1: Vec<bool>) -> Result<Self> {
        let n = sizes.len();
        if offsets.len() != n || is_class1.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: offsets.len().max(is_class1.len()),
            });
        }
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if !is_class1.iter().any(|&c| c) {
            return Err(Error::MissingClass(1));
        }
        if is_class1.iter().all(|&c| c) {
            return Err(Error::MissingClass(2));
        }
        if sizes.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidParameter("set sizes must be positive".into()));
        }
        if offsets.iter().any(|o| !o.is_finite()) {
            return Err(Error::NonFinite("logistic offsets"));
        }
        Ok(Self {
            sizes,
            offsets,
            is_class1,
        })
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    fn terms(&self, theta: f64) -> impl Iterator<Item = (f64, f64, bool)> + '_ {
        self.sizes
            .iter()
            .zip(&self.offsets)
            .zip(&self.is_class1)
            .map(move |((&m, &o), &c)| (m, m * theta + o, c))
    }

    pub fn value(&self, theta: f64) -> f64 {
        let total: f64 = self
            .terms(theta)
            .map(|(_, z, c)| if c { log1p_exp(-z) } else { log1p_exp(z) })
            .sum();
        total / self.len() as f64
    }

    pub fn gradient(&self, theta: f64) -> f64 {
        let total: f64 = self
            .terms(theta)
            .map(|(m, z, c)| {
                // σ(z) − 1 computed as −σ(−z) to keep precision for large z.
                if c {
                    -m * sigmoid(-z)
                } else {
                    m * sigmoid(z)
                }
            })
            .sum();
        total / self.len() as f64
    }

    pub fn hessian(&self, theta: f64) -> f64 {
        let total: f64 = self
            .terms(theta)
            .map(|(m, z, _)| m * m * sigmoid(z) * sigmoid(-z))
            .sum();
        total / self.len() as f64
    }

    /// Minimizer of the likelihood.
    ///
    /// Damped Newton from 0; if that stalls, bisection on the gradient over a
    /// bracket extending 50 beyond the range of the per-set roots `−o_i/M_i`.
    /// A bracket without a sign change yields [`Error::NoConvergence`].
    pub fn minimize(&self) -> Result<f64> {
        if let Some(theta) = self.newton() {
            return Ok(theta);
        }
        self.bisect()
    }

    fn newton(&self) -> Option<f64> {
        let mut theta = 0.0;
        let mut value = self.value(theta);
        for _ in 0..NEWTON_ITERATIONS {
            let g = self.gradient(theta);
            if g.abs() <= GRADIENT_TOLERANCE {
                return Some(theta);
            }
            let h = self.hessian(theta);
            if !(h > 0.0) {
                return None;
            }
            let step = g / h;
            let mut t = 1.0;
            loop {
                let candidate = theta - t * step;
                let v = self.value(candidate);
                if v <= value {
                    theta = candidate;
                    value = v;
                    break;
                }
                t /= 2.0;
                if t < 1e-12 {
                    return None;
                }
            }
        }
        (self.gradient(theta).abs() <= GRADIENT_TOLERANCE).then_some(theta)
    }

    fn bisect(&self) -> Result<f64> {
        let roots = self.sizes.iter().zip(&self.offsets).map(|(m, o)| -o / m);
        let (lo, hi) = roots.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        });
        let (mut lo, mut hi) = (lo - BRACKET_MARGIN, hi + BRACKET_MARGIN);
        if !(self.gradient(lo) < 0.0 && self.gradient(hi) > 0.0) {
            return Err(Error::NoConvergence("intercept fit: no sign change in bracket"));
        }
        for _ in 0..BISECTION_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            let g = self.gradient(mid);
            if g.abs() <= GRADIENT_TOLERANCE || mid == lo || mid == hi {
                return Ok(mid);
            }
            if g < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NoConvergence("intercept fit"))
    }
}

pub(crate) fn intercept_likelihood(
    holdout: &[SetFeatures],
    beta: &DenseVector,
    nabla: &SparseSymmetric,
    prior_log_ratio: f64,
) -> Result<InterceptLikelihood> {
    let sizes = holdout.iter().map(|f| f.m as f64).collect();
    let offsets = holdout
        .iter()
        .map(|f| {
            let m = f.m as f64;
            prior_log_ratio + m * (f.mean.dot(beta) + f.quadratic_term(nabla))
        })
        .collect();
    let is_class1 = holdout.iter().map(|f| f.label == ClassLabel::One).collect();
    InterceptLikelihood::new(sizes, offsets, is_class1)
}

/// Constant term of CLIPS, fitted by logistic regression on held-out sets
/// with `β` and `∇` fixed.
pub fn fit_beta0(
    batch: &[LabeledSet],
    beta: &DenseVector,
    nabla: &DenseMatrix,
    prior_estimates: (f64, f64),
) -> Result<f64> {
    require_both_classes(batch)?;
    let p = beta.len();
    if nabla.nrows() != p || nabla.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: nabla.nrows(),
        });
    }
    if let Some(bad) = batch.iter().find(|s| s.sample.dim() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: bad.sample.dim(),
        });
    }
    let (pi1, pi2) = prior_estimates;
    if !(pi1 > 0.0 && pi2 > 0.0) {
        return Err(Error::InvalidParameter("prior estimates must be positive".into()));
    }
    let features: Vec<SetFeatures> = batch.iter().map(SetFeatures::from_labeled).collect();
    let nabla = SparseSymmetric::from_dense(nabla);
    intercept_likelihood(&features, beta, &nabla, (pi1 / pi2).ln())?.minimize()
}
