//! Dense complex linear systems with condition and residual checks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{OracleError, Result};

pub const MAX_CONDITION: f64 = 1e12;
pub const MAX_RESIDUAL: f64 = 1e-12;

/// `A x = b` with a name for every unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: DMatrix<Complex64>,
    pub rhs: DVector<Complex64>,
    pub labels: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: Vec<Complex64>,
    pub labels: Vec<&'static str>,
    /// 1-norm condition number.
    pub condition: f64,
    /// `‖Ax − b‖ / ‖b‖` (absolute when `b = 0`).
    pub residual: f64,
}

impl Solution {
    pub fn get(&self, label: &str) -> Option<Complex64> {
        self.labels.iter().position(|l| *l == label).map(|i| self.values[i])
    }
}

fn norm1(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

impl LinearSystem {
    pub fn new(matrix: DMatrix<Complex64>, rhs: DVector<Complex64>, labels: Vec<&'static str>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != rhs.len() || labels.len() != rhs.len() {
            return Err(OracleError::Input("system must be square with one label per unknown"));
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(OracleError::Input("labels must be unique"));
        }
        Ok(Self { matrix, rhs, labels })
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// LU solve with one step of iterative refinement.
    pub fn solve(&self) -> Result<Solution> {
        let lu = self.matrix.clone().lu();
        let inverse = lu.try_inverse().ok_or(OracleError::IllConditioned { cond: f64::INFINITY })?;
        let condition = norm1(&self.matrix) * norm1(&inverse);
        if !(condition < MAX_CONDITION) {
            return Err(OracleError::IllConditioned { cond: condition });
        }
        let mut x = lu.solve(&self.rhs).ok_or(OracleError::IllConditioned { cond: condition })?;
        let r = &self.rhs - &self.matrix * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
        }
        let bnorm = self.rhs.norm();
        let rnorm = (&self.rhs - &self.matrix * &x).norm();
        let residual = if bnorm > 0.0 { rnorm / bnorm } else { rnorm };
        if !(residual <= MAX_RESIDUAL) {
            return Err(OracleError::ResidualTooLarge { residual });
        }
        Ok(Solution { values: x.iter().copied().collect(), labels: self.labels.clone(), condition, residual })
    }
}
