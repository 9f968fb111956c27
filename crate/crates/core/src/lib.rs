//! Covariance-engaged set classification.
//!
//! A *set* of observations is classified as a whole. Under Gaussian class
//! models the Bayes rule depends on the set through its size, mean and
//! scatter (see [`model`]). The [`estimators`] module fits that rule from
//! labelled training sets, either by plugging in pooled moments or by the
//! CLIPS procedure, which estimates the quadratic and linear coefficients
//! with linear programs ([`lp`]) and the constant with a one-parameter
//! logistic regression. [`simulate`] generates synthetic populations and
//! runs Monte Carlo risk estimates and experiment sweeps.

pub mod error;
pub mod estimators;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod simulate;

pub use error::{Error, Result};
