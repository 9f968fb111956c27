use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::model::{ClassLabel, GaussianClassModel, LabeledSet, SetSample};

/// Law of the number of observations in a set, drawn independently of the
/// label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetSizeDistribution {
    Fixed(usize),
    /// Uniform on `low..=high`.
    UniformRange(usize, usize),
}

impl SetSizeDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SetSizeDistribution::Fixed(0) => {
                Err(Error::InvalidParameter("set size must be at least 1".into()))
            }
            SetSizeDistribution::UniformRange(low, high) if low == 0 || low > high => Err(
                Error::InvalidParameter(format!("invalid set size range {low}..={high}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match *self {
            SetSizeDistribution::Fixed(m) => m,
            SetSizeDistribution::UniformRange(low, high) => rng.random_range(low..=high),
        }
    }

    pub fn min_size(&self) -> usize {
        match *self {
            SetSizeDistribution::Fixed(m) => m,
            SetSizeDistribution::UniformRange(low, _) => low,
        }
    }
}

/// `m` independent draws `μ + L z` with `z` standard normal.
pub fn sample_set<R: Rng + ?Sized>(model: &GaussianClassModel, m: usize, rng: &mut R) -> Result<SetSample> {
    if m == 0 {
        return Err(Error::EmptySet);
    }
    let p = model.dim();
    let lower = model.cholesky().lower();
    let observations = (0..m)
        .map(|_| {
            let z = DenseVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
            model.mean() + lower * z
        })
        .collect();
    SetSample::new(observations)
}

/// `sets_per_class` sets from class 1 followed by as many from class 2.
pub fn generate_training<R: Rng + ?Sized>(
    class1: &GaussianClassModel,
    class2: &GaussianClassModel,
    sets_per_class: usize,
    sizes: &SetSizeDistribution,
    rng: &mut R,
) -> Result<Vec<LabeledSet>> {
    sizes.validate()?;
    let mut out = Vec::with_capacity(2 * sets_per_class);
    for (model, label) in [(class1, ClassLabel::One), (class2, ClassLabel::Two)] {
        for _ in 0..sets_per_class {
            let m = sizes.draw(rng);
            out.push(LabeledSet::new(sample_set(model, m, rng)?, label));
        }
    }
    Ok(out)
}
