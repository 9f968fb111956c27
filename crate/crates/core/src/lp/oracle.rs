//! Exhaustive reference solver: every vertex and every extreme ray of the
//! (free-variable-split, hence pointed) feasible polyhedron is visited.
//! Independent of the simplex code path; intended for tiny problems in tests.

use itertools::Itertools;

use super::{LpProblem, LpSolution, LpStatus};
use crate::error::{Error, Result};

pub const ORACLE_MAX_VARS: usize = 8;
pub const ORACLE_MAX_CONSTRAINTS: usize = 12;

const SINGULAR: f64 = 1e-11;
const FEASIBLE: f64 = 1e-9;

/// Pointed reformulation: `A w ≤ c` with `w ≥ 0` folded into the rows.
struct Pointed {
    vars: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    /// (original variable, negated)
    origin: Vec<(usize, bool)>,
}

impl Pointed {
    fn new(problem: &LpProblem) -> Self {
        let mut origin = Vec::new();
        for var in 0..problem.num_vars() {
            origin.push((var, false));
            if problem.is_free(var) {
                origin.push((var, true));
            }
        }
        let vars = origin.len();
        let g = problem.constraint_matrix();
        let sign = |neg: bool| if neg { -1.0 } else { 1.0 };
        let mut rows: Vec<Vec<f64>> = (0..problem.num_constraints())
            .map(|i| origin.iter().map(|&(v, neg)| sign(neg) * g[(i, v)]).collect())
            .collect();
        let mut rhs = problem.constraint_rhs().to_vec();
        for j in 0..vars {
            let mut row = vec![0.0; vars];
            row[j] = -1.0;
            rows.push(row);
            rhs.push(0.0);
        }
        let cost = origin
            .iter()
            .map(|&(v, neg)| sign(neg) * problem.objective()[v])
            .collect();
        Self {
            vars,
            rows,
            rhs,
            cost,
            origin,
        }
    }

    fn feasible(&self, w: &[f64]) -> bool {
        self.rows.iter().zip(&self.rhs).all(|(row, &h)| {
            let lhs: f64 = row.iter().zip(w).map(|(a, x)| a * x).sum();
            lhs <= h + FEASIBLE * (1.0 + h.abs())
        })
    }

    fn in_recession_cone(&self, d: &[f64]) -> bool {
        self.rows.iter().all(|row| {
            let lhs: f64 = row.iter().zip(d).map(|(a, x)| a * x).sum();
            lhs <= FEASIBLE
        })
    }

    fn cost_of(&self, w: &[f64]) -> f64 {
        self.cost.iter().zip(w).map(|(c, x)| c * x).sum()
    }
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < SINGULAR {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Unit vector spanning the null space of `a` (rows × n) when it is exactly
/// one-dimensional.
fn null_direction(a: &[Vec<f64>], n: usize) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m.len() {
            break;
        }
        let piv = (row..m.len()).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < SINGULAR {
            continue;
        }
        m.swap(row, piv);
        let p = m[row][col];
        for v in m[row].iter_mut() {
            *v /= p;
        }
        for r in 0..m.len() {
            if r != row {
                let f = m[r][col];
                if f != 0.0 {
                    for k in 0..n {
                        m[r][k] -= f * m[row][k];
                    }
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    if pivot_cols.len() + 1 != n {
        return None;
    }
    let free = (0..n).find(|c| !pivot_cols.contains(c))?;
    let mut d = vec![0.0; n];
    d[free] = 1.0;
    for (r, &pc) in pivot_cols.iter().enumerate() {
        d[pc] = -m[r][free];
    }
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    Some(d.into_iter().map(|v| v / norm).collect())
}

/// Exact optimum by enumeration of basic feasible points and extreme rays.
///
/// Refuses problems with more than [`ORACLE_MAX_VARS`] variables or
/// [`ORACLE_MAX_CONSTRAINTS`] constraints.
pub fn enumerate_vertices_oracle(problem: &LpProblem) -> Result<LpSolution> {
    if problem.num_vars() > ORACLE_MAX_VARS || problem.num_constraints() > ORACLE_MAX_CONSTRAINTS {
        return Err(Error::TooLarge {
            vars: problem.num_vars(),
            constraints: problem.num_constraints(),
        });
    }
    let pointed = Pointed::new(problem);
    let n = pointed.vars;
    let total = pointed.rows.len();
    let mut examined = 0;

    let mut best: Option<(f64, Vec<f64>)> = None;
    for active in (0..total).combinations(n) {
        examined += 1;
        let a: Vec<Vec<f64>> = active.iter().map(|&i| pointed.rows[i].clone()).collect();
        let b: Vec<f64> = active.iter().map(|&i| pointed.rhs[i]).collect();
        let Some(w) = solve_square(a, b) else { continue };
        if !pointed.feasible(&w) {
            continue;
        }
        let value = pointed.cost_of(&w);
        if best.as_ref().is_none_or(|(bv, _)| value < *bv) {
            best = Some((value, w));
        }
    }

    let Some((_, w)) = best else {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, examined));
    };

    let cost_scale = 1.0 + pointed.cost.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    for active in (0..total).combinations(n - 1) {
        examined += 1;
        let a: Vec<Vec<f64>> = active.iter().map(|&i| pointed.rows[i].clone()).collect();
        let Some(d) = null_direction(&a, n) else { continue };
        for s in [1.0, -1.0] {
            let ray: Vec<f64> = d.iter().map(|v| s * v).collect();
            if pointed.in_recession_cone(&ray) && pointed.cost_of(&ray) < -1e-9 * cost_scale {
                return Ok(LpSolution::without_point(LpStatus::Unbounded, examined));
            }
        }
    }

    let mut z = vec![0.0; problem.num_vars()];
    for (&(var, neg), &value) in pointed.origin.iter().zip(&w) {
        if neg {
            z[var] -= value;
        } else {
            z[var] += value;
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: Some(problem.objective_at(&z)),
        solution: Some(z),
        iterations: examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn matches_hand_examples() {
        let p = LpProblem::nonnegative(vec![-1.0], DenseMatrix::from_element(1, 1, 1.0), vec![3.0])
            .unwrap();
        let s = enumerate_vertices_oracle(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value.unwrap() + 3.0).abs() < 1e-12);

        let g = DenseMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        let p = LpProblem::nonnegative(vec![-1.0, -1.0], g, vec![1.0, 0.5]).unwrap();
        let s = enumerate_vertices_oracle(&p).unwrap();
        assert!((s.objective_value.unwrap() + 1.0).abs() < 1e-12);

        let p = LpProblem::nonnegative(vec![0.0], DenseMatrix::from_element(1, 1, 1.0), vec![-1.0])
            .unwrap();
        assert_eq!(enumerate_vertices_oracle(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let p = LpProblem::nonnegative(vec![-1.0], DenseMatrix::zeros(0, 1), vec![]).unwrap();
        assert_eq!(enumerate_vertices_oracle(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn duplicate_rows_are_harmless() {
        let g = DenseMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 1.0, 1.0, 0.0]);
        let p = LpProblem::nonnegative(vec![-1.0, -2.0], g, vec![1.0, 1.0, 0.5]).unwrap();
        let oracle = enumerate_vertices_oracle(&p).unwrap();
        let simplex = super::super::solve(&p).unwrap();
        assert_eq!(oracle.status, LpStatus::Optimal);
        assert_eq!(simplex.status, LpStatus::Optimal);
        assert!((oracle.objective_value.unwrap() + 2.0).abs() < 1e-12);
        assert!((oracle.objective_value.unwrap() - simplex.objective_value.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn refuses_large_problems() {
        let p = LpProblem::nonnegative(vec![0.0; 9], DenseMatrix::zeros(1, 9), vec![1.0]).unwrap();
        assert!(matches!(
            enumerate_vertices_oracle(&p),
            Err(Error::TooLarge { .. })
        ));
    }
}
