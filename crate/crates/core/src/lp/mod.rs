//! Dense linear programming in inequality form:
//!
//! ```text
//! minimize cᵀz  subject to  G z ≤ h,  z_i ≥ 0 or z_i free
//! ```
//!
//! [`solve`] runs a two-phase revised simplex method. [`enumerate_vertices_oracle`]
//! is an exhaustive reference solver for small problems, used to cross-check it.

mod oracle;
mod simplex;

pub use oracle::{enumerate_vertices_oracle, ORACLE_MAX_CONSTRAINTS, ORACLE_MAX_VARS};
pub use simplex::solve;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Primal feasibility tolerance.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-8;
/// Smallest admissible pivot element.
pub const PIVOT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    constraint_matrix: DenseMatrix,
    constraint_rhs: Vec<f64>,
    lower_bounds: Vec<f64>,
}

impl LpProblem {
    /// Each lower bound must be `0.0` or `f64::NEG_INFINITY`.
    pub fn new(
        objective: Vec<f64>,
        constraint_matrix: DenseMatrix,
        constraint_rhs: Vec<f64>,
        lower_bounds: Vec<f64>,
    ) -> Result<Self> {
        let n = objective.len();
        if constraint_matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: constraint_matrix.ncols(),
            });
        }
        if constraint_rhs.len() != constraint_matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: constraint_matrix.nrows(),
                found: constraint_rhs.len(),
            });
        }
        if lower_bounds.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: lower_bounds.len(),
            });
        }
        if objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("objective"));
        }
        if constraint_matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("constraint matrix"));
        }
        if constraint_rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("constraint right-hand side"));
        }
        if let Some(bad) = lower_bounds
            .iter()
            .find(|&&b| !(b == 0.0 || b == f64::NEG_INFINITY))
        {
            return Err(Error::InvalidParameter(format!(
                "lower bound {bad} is neither 0 nor -inf"
            )));
        }
        Ok(Self {
            objective,
            constraint_matrix,
            constraint_rhs,
            lower_bounds,
        })
    }

    /// All variables non-negative.
    pub fn nonnegative(
        objective: Vec<f64>,
        constraint_matrix: DenseMatrix,
        constraint_rhs: Vec<f64>,
    ) -> Result<Self> {
        let n = objective.len();
        Self::new(objective, constraint_matrix, constraint_rhs, vec![0.0; n])
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraint_matrix(&self) -> &DenseMatrix {
        &self.constraint_matrix
    }

    pub fn constraint_rhs(&self) -> &[f64] {
        &self.constraint_rhs
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower_bounds
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraint_rhs.len()
    }

    pub fn is_free(&self, var: usize) -> bool {
        self.lower_bounds[var] == f64::NEG_INFINITY
    }

    pub fn objective_at(&self, z: &[f64]) -> f64 {
        self.objective.iter().zip(z).map(|(c, x)| c * x).sum()
    }

    /// Largest violation of `G z ≤ h` and of the lower bounds; zero when feasible.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let g = &self.constraint_matrix;
        let mut worst = 0.0_f64;
        for i in 0..self.num_constraints() {
            let lhs: f64 = (0..self.num_vars()).map(|j| g[(i, j)] * z[j]).sum();
            worst = worst.max(lhs - self.constraint_rhs[i]);
        }
        for (j, &lb) in self.lower_bounds.iter().enumerate() {
            if lb == 0.0 {
                worst = worst.max(-z[j]);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub solution: Option<Vec<f64>>,
    /// Present iff `status == Optimal`.
    pub objective_value: Option<f64>,
    pub iterations: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            solution: None,
            objective_value: None,
            iterations,
        }
    }
}
