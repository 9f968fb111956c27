//! Two-phase revised simplex with a dense explicit basis inverse.
//!
//! The inequality-form problem is brought to standard form by splitting free
//! variables into two non-negative columns and adding one slack per row. Rows
//! with a negative right-hand side are negated and receive an artificial
//! variable, so the initial basis (slacks plus artificials) is the identity.
//! Phase 1 minimizes the sum of artificials; phase 2 never lets an artificial
//! re-enter and pivots out any that remain basic at level zero.
//!
//! Pricing uses Dantzig's most-negative reduced cost until `10·(n+k)` pivots
//! have been made, then switches to Bland's smallest-index rule, which cannot
//! cycle. The basis inverse is rebuilt from scratch every
//! [`REINVERT_INTERVAL`] pivots to bound the drift of the product-form updates,
//! and the basic solution is refined once against the original rows at the end
//! of each phase.

use nalgebra::DMatrix;

use super::{LpProblem, LpSolution, LpStatus, FEASIBILITY_TOLERANCE, PIVOT_TOLERANCE};
use crate::error::{Error, Result};

const OPTIMALITY_TOLERANCE: f64 = 1e-9;
const REINVERT_INTERVAL: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

/// Dot product with independent partial sums, which the compiler can
/// vectorize (a single running sum cannot be reordered).
fn dot(a: &[f64], b: &[f64]) -> f64 {
    const LANES: usize = 8;
    let mut acc = [0.0; LANES];
    let chunks_a = a.chunks_exact(LANES);
    let chunks_b = b.chunks_exact(LANES);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for l in 0..LANES {
            acc[l] += ca[l] * cb[l];
        }
    }
    acc.iter().sum::<f64>() + tail
}

struct Tableau {
    rows: usize,
    /// Structural columns, column-major, `rows` entries each, row signs applied.
    structural: Vec<f64>,
    /// (original variable, negated copy of a free variable)
    structural_origin: Vec<(usize, bool)>,
    structural_cost: Vec<f64>,
    row_sign: Vec<f64>,
    /// Row index of each artificial column.
    artificial_row: Vec<usize>,
    b: Vec<f64>,

    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Row-major `rows × rows`.
    basis_inverse: Vec<f64>,
    x_basic: Vec<f64>,

    pivots: usize,
    pivots_since_reinvert: usize,
    bland_after: usize,
    pivot_limit: usize,
}

impl Tableau {
    fn new(problem: &LpProblem) -> Self {
        let rows = problem.num_constraints();
        let g = problem.constraint_matrix();
        let rhs = problem.constraint_rhs();
        let row_sign: Vec<f64> = rhs.iter().map(|&h| if h < 0.0 { -1.0 } else { 1.0 }).collect();

        let mut structural = Vec::new();
        let mut structural_origin = Vec::new();
        let mut structural_cost = Vec::new();
        for var in 0..problem.num_vars() {
            let copies: &[bool] = if problem.is_free(var) {
                &[false, true]
            } else {
                &[false]
            };
            for &negated in copies {
                let s = if negated { -1.0 } else { 1.0 };
                structural.extend((0..rows).map(|i| s * row_sign[i] * g[(i, var)]));
                structural_origin.push((var, negated));
                structural_cost.push(s * problem.objective()[var]);
            }
        }

        let artificial_row: Vec<usize> = (0..rows).filter(|&i| row_sign[i] < 0.0).collect();
        let b: Vec<f64> = rhs.iter().map(|h| h.abs()).collect();

        let n_struct = structural_origin.len();
        let n_cols = n_struct + rows + artificial_row.len();
        let mut basis = Vec::with_capacity(rows);
        let mut art = 0;
        for i in 0..rows {
            if row_sign[i] < 0.0 {
                basis.push(n_struct + rows + art);
                art += 1;
            } else {
                basis.push(n_struct + i);
            }
        }
        let mut is_basic = vec![false; n_cols];
        for &j in &basis {
            is_basic[j] = true;
        }
        let mut basis_inverse = vec![0.0; rows * rows];
        for i in 0..rows {
            basis_inverse[i * rows + i] = 1.0;
        }

        let scale = problem.num_vars() + rows;
        Self {
            rows,
            structural,
            structural_origin,
            structural_cost,
            row_sign,
            artificial_row,
            x_basic: b.clone(),
            b,
            basis,
            is_basic,
            basis_inverse,
            pivots: 0,
            pivots_since_reinvert: 0,
            bland_after: 10 * scale,
            pivot_limit: 50 * scale,
        }
    }

    fn n_struct(&self) -> usize {
        self.structural_origin.len()
    }

    fn n_cols(&self) -> usize {
        self.n_struct() + self.rows + self.artificial_row.len()
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.n_struct() + self.rows
    }

    fn cost(&self, col: usize, phase: Phase) -> f64 {
        match phase {
            Phase::One => {
                if self.is_artificial(col) {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => {
                if col < self.n_struct() {
                    self.structural_cost[col]
                } else {
                    0.0
                }
            }
        }
    }

    fn structural_column(&self, col: usize) -> &[f64] {
        &self.structural[col * self.rows..(col + 1) * self.rows]
    }

    /// `yᵀ A_col`.
    fn column_dot(&self, y: &[f64], col: usize) -> f64 {
        let ns = self.n_struct();
        if col < ns {
            dot(self.structural_column(col), y)
        } else if col < ns + self.rows {
            let i = col - ns;
            self.row_sign[i] * y[i]
        } else {
            y[self.artificial_row[col - ns - self.rows]]
        }
    }

    /// Dense copy of column `col` of the standard-form matrix.
    fn column(&self, col: usize) -> Vec<f64> {
        let ns = self.n_struct();
        if col < ns {
            self.structural_column(col).to_vec()
        } else {
            let mut e = vec![0.0; self.rows];
            if col < ns + self.rows {
                let i = col - ns;
                e[i] = self.row_sign[i];
            } else {
                e[self.artificial_row[col - ns - self.rows]] = 1.0;
            }
            e
        }
    }

    /// `B⁻¹ A_col`.
    fn ftran(&self, col: usize) -> Vec<f64> {
        let k = self.rows;
        let ns = self.n_struct();
        if col < ns {
            let a = self.structural_column(col);
            (0..k)
                .map(|r| dot(&self.basis_inverse[r * k..(r + 1) * k], a))
                .collect()
        } else {
            let (i, s) = if col < ns + k {
                (col - ns, self.row_sign[col - ns])
            } else {
                (self.artificial_row[col - ns - k], 1.0)
            };
            (0..k).map(|r| s * self.basis_inverse[r * k + i]).collect()
        }
    }

    /// Simplex multipliers `y = B⁻ᵀ c_B`.
    fn multipliers(&self, phase: Phase) -> Vec<f64> {
        let k = self.rows;
        let mut y = vec![0.0; k];
        for r in 0..k {
            let c = self.cost(self.basis[r], phase);
            if c != 0.0 {
                for (yc, binv) in y.iter_mut().zip(&self.basis_inverse[r * k..(r + 1) * k]) {
                    *yc += c * binv;
                }
            }
        }
        y
    }

    fn choose_entering(&self, phase: Phase) -> Option<usize> {
        let y = self.multipliers(phase);
        let bland = self.pivots >= self.bland_after;
        let mut best: Option<(usize, f64)> = None;
        for col in 0..self.n_cols() {
            if self.is_basic[col] || self.is_artificial(col) {
                continue;
            }
            let d = self.cost(col, phase) - self.column_dot(&y, col);
            if d < -OPTIMALITY_TOLERANCE {
                if bland {
                    return Some(col);
                }
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((col, d));
                }
            }
        }
        best.map(|(col, _)| col)
    }

    fn choose_leaving(&self, alpha: &[f64], phase: Phase) -> Option<usize> {
        let bland = self.pivots >= self.bland_after;
        let mut best: Option<(usize, f64)> = None;
        for (r, &a) in alpha.iter().enumerate() {
            if phase == Phase::Two && self.is_artificial(self.basis[r]) && a.abs() > PIVOT_TOLERANCE {
                return Some(r);
            }
            if a <= PIVOT_TOLERANCE {
                continue;
            }
            let ratio = self.x_basic[r].max(0.0) / a;
            match best {
                None => best = Some((r, ratio)),
                Some((br, bratio)) => {
                    let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                    let better = if tie {
                        if bland {
                            self.basis[r] < self.basis[br]
                        } else {
                            a > alpha[br]
                        }
                    } else {
                        ratio < bratio
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, r: usize, entering: usize, alpha: &[f64]) -> Result<()> {
        let k = self.rows;
        let ar = alpha[r];
        {
            let row = &mut self.basis_inverse[r * k..(r + 1) * k];
            for v in row.iter_mut() {
                *v /= ar;
            }
        }
        self.x_basic[r] /= ar;
        let pivot_row: Vec<f64> = self.basis_inverse[r * k..(r + 1) * k].to_vec();
        let xr = self.x_basic[r];
        for (i, &ai) in alpha.iter().enumerate() {
            if i == r || ai == 0.0 {
                continue;
            }
            let row = &mut self.basis_inverse[i * k..(i + 1) * k];
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= ai * p;
            }
            self.x_basic[i] -= ai * xr;
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[entering] = true;
        self.basis[r] = entering;
        self.pivots += 1;
        self.pivots_since_reinvert += 1;
        if self.pivots_since_reinvert >= REINVERT_INTERVAL {
            self.reinvert()?;
        }
        Ok(())
    }

    /// Rebuilds `B⁻¹` and `x_B = B⁻¹ b` from the current basis.
    fn reinvert(&mut self) -> Result<()> {
        let k = self.rows;
        self.pivots_since_reinvert = 0;
        if k == 0 {
            return Ok(());
        }
        let mut basis_matrix = DMatrix::<f64>::zeros(k, k);
        for (r, &col) in self.basis.iter().enumerate() {
            let c = self.column(col);
            for i in 0..k {
                basis_matrix[(i, r)] = c[i];
            }
        }
        let inverse = basis_matrix
            .lu()
            .try_inverse()
            .ok_or(Error::NoConvergence("simplex basis reinversion"))?;
        for i in 0..k {
            for j in 0..k {
                self.basis_inverse[i * k + j] = inverse[(i, j)];
            }
        }
        for i in 0..k {
            self.x_basic[i] = (0..k).map(|j| inverse[(i, j)] * self.b[j]).sum();
        }
        Ok(())
    }

    /// One step of iterative refinement of `x_B` against `B x_B = b`.
    fn refine(&mut self) {
        let k = self.rows;
        if self.pivots_since_reinvert == 0 {
            return;
        }
        let mut residual = self.b.clone();
        for (&col, &x) in self.basis.iter().zip(&self.x_basic) {
            if x == 0.0 {
                continue;
            }
            let ns = self.n_struct();
            if col < ns {
                for (r, a) in residual.iter_mut().zip(self.structural_column(col)) {
                    *r -= a * x;
                }
            } else if col < ns + k {
                residual[col - ns] -= self.row_sign[col - ns] * x;
            } else {
                residual[self.artificial_row[col - ns - k]] -= x;
            }
        }
        for i in 0..k {
            let row = &self.basis_inverse[i * k..(i + 1) * k];
            self.x_basic[i] += dot(row, &residual);
        }
    }

    fn run_phase(&mut self, phase: Phase) -> Result<PhaseOutcome> {
        loop {
            let Some(entering) = self.choose_entering(phase) else {
                return Ok(PhaseOutcome::Optimal);
            };
            if self.pivots >= self.pivot_limit {
                return Err(Error::IterationLimit(self.pivot_limit));
            }
            let alpha = self.ftran(entering);
            let Some(r) = self.choose_leaving(&alpha, phase) else {
                return Ok(PhaseOutcome::Unbounded);
            };
            self.pivot(r, entering, &alpha)?;
        }
    }

    fn artificial_level(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.x_basic)
            .filter(|(&col, _)| self.is_artificial(col))
            .map(|(_, &x)| x.max(0.0))
            .sum()
    }

    fn primal_point(&self, num_vars: usize) -> Vec<f64> {
        let mut z = vec![0.0; num_vars];
        for (&col, &x) in self.basis.iter().zip(&self.x_basic) {
            if col < self.n_struct() {
                let value = if x.abs() <= FEASIBILITY_TOLERANCE * 1e-3 { 0.0 } else { x };
                let (var, negated) = self.structural_origin[col];
                if negated {
                    z[var] -= value;
                } else {
                    z[var] += value;
                }
            }
        }
        z
    }
}

/// Solves an inequality-form linear program.
///
/// Returns `Err(IterationLimit)` if `50·(n+k)` pivots do not reach a
/// conclusion, which only happens under severe numerical trouble.
pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    let mut tableau = Tableau::new(problem);

    if !tableau.artificial_row.is_empty() {
        tableau.run_phase(Phase::One)?;
        tableau.refine();
        let scale = 1.0 + tableau.b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if tableau.artificial_level() > FEASIBILITY_TOLERANCE * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, tableau.pivots));
        }
    }

    match tableau.run_phase(Phase::Two)? {
        PhaseOutcome::Unbounded => Ok(LpSolution::without_point(
            LpStatus::Unbounded,
            tableau.pivots,
        )),
        PhaseOutcome::Optimal => {
            tableau.refine();
            let z = tableau.primal_point(problem.num_vars());
            Ok(LpSolution {
                status: LpStatus::Optimal,
                objective_value: Some(problem.objective_at(&z)),
                solution: Some(z),
                iterations: tableau.pivots,
            })
        }
    }
}
