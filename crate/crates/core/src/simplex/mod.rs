//! Bounded-variable primal simplex for the LP relaxation.
//!
//! Every row gets a logical variable so constraints become `A x + s = b`
//! with bounds on both `x` and `s`. Rows are scaled by powers of two so their
//! largest coefficient lies in [0.5, 1]; tolerances apply in that scaled
//! space. Phase 1 minimizes the sum of bound infeasibilities of the basic
//! variables; phase 2 the true objective. Pricing is Dantzig (largest reduced
//! cost) and switches to Bland's rule after a streak of degenerate pivots.

mod engine;
mod lu;

use crate::model::LpModel;
use crate::scalar::Scalar;

pub use engine::VarStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl LpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::IterationLimit => "iteration-limit",
        }
    }
}

/// Column bounds used for a solve. Start from the model's own bounds and
/// override per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> Bounds<T> {
    pub fn from_model(model: &LpModel<T>) -> Self {
        Bounds {
            lower: model.columns.iter().map(|c| c.lower).collect(),
            upper: model.columns.iter().map(|c| c.upper).collect(),
        }
    }

    pub fn set(&mut self, column: usize, lower: T, upper: T) {
        self.lower[column] = lower;
        self.upper[column] = upper;
    }

    pub fn fix(&mut self, column: usize, value: T) {
        self.set(column, value, value);
    }

    /// Intersects the column's range with `[lower, upper]`. Returns false when
    /// the result is empty.
    pub fn tighten(&mut self, column: usize, lower: T, upper: T) -> bool {
        self.lower[column] = self.lower[column].max(lower);
        self.upper[column] = self.upper[column].min(upper);
        self.lower[column] <= self.upper[column]
    }

    pub fn is_consistent(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| l <= u)
    }

    /// True when every range here lies inside the corresponding range of `other`.
    pub fn within(&self, other: &Bounds<T>) -> bool {
        self.lower.iter().zip(&other.lower).all(|(a, b)| a >= b) && self.upper.iter().zip(&other.upper).all(|(a, b)| a <= b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOptions<T> {
    pub feasibility_tol: T,
    pub optimality_tol: T,
    pub iteration_limit: usize,
    /// Degenerate pivots in a row before switching to Bland's rule.
    pub bland_after: usize,
    pub refactor_interval: usize,
}

impl<T: Scalar> Default for SimplexOptions<T> {
    fn default() -> Self {
        SimplexOptions {
            feasibility_tol: T::default_feasibility_tol(),
            optimality_tol: T::default_optimality_tol(),
            iteration_limit: 1_000_000,
            bland_after: 50,
            refactor_interval: 100,
        }
    }
}

/// Final basis of a solve, reusable as a warm start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub(crate) status: Vec<VarStatus>,
    pub(crate) head: Vec<usize>,
}

impl Basis {
    /// Status of structural column `j` (logicals follow the columns).
    pub fn status(&self, j: usize) -> VarStatus {
        self.status[j]
    }

    pub fn basic_variables(&self) -> &[usize] {
        &self.head
    }
}

/// Result of an LP solve. Objective, duals and reduced costs are in the
/// model's own sense: for maximization a nonbasic column at its lower bound
/// has reduced cost `<= 0` at optimality.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub objective: T,
    pub primal: Vec<T>,
    pub reduced_costs: Vec<T>,
    pub duals: Vec<T>,
    pub iterations: usize,
    pub basis: Option<Basis>,
}

impl<T: Scalar> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn column_status(&self, j: usize) -> Option<VarStatus> {
        self.basis.as_ref().map(|b| b.status(j))
    }

    /// `b'y + sum_j d_j x_j`, equal to the primal objective at an optimum.
    pub fn dual_objective(&self, model: &LpModel<T>) -> T {
        let by = model.rows.iter().zip(&self.duals).fold(T::zero(), |acc, (r, &y)| acc + r.rhs * y);
        self.reduced_costs.iter().zip(&self.primal).fold(by, |acc, (&d, &x)| acc + d * x)
    }
}

/// Solves the LP relaxation of `model` under `bounds` from a fresh basis.
pub fn solve_lp<T: Scalar>(model: &LpModel<T>, bounds: &Bounds<T>, options: &SimplexOptions<T>) -> LpSolution<T> {
    engine::Simplex::new(model, bounds, options).run(None)
}

/// Re-solves after a bound change, starting from `previous`'s basis when it
/// has one. Same contract as [`solve_lp`].
pub fn resolve<T: Scalar>(
    model: &LpModel<T>,
    previous: &LpSolution<T>,
    new_bounds: &Bounds<T>,
    options: &SimplexOptions<T>,
) -> LpSolution<T> {
    resolve_from_basis(model, previous.basis.as_ref(), new_bounds, options)
}

/// Like [`resolve`] but takes the starting basis directly, so callers can
/// keep bases without the rest of a solution.
pub fn resolve_from_basis<T: Scalar>(
    model: &LpModel<T>,
    basis: Option<&Basis>,
    bounds: &Bounds<T>,
    options: &SimplexOptions<T>,
) -> LpSolution<T> {
    engine::Simplex::new(model, bounds, options).run(basis)
}

#[cfg(test)]
mod tests;
