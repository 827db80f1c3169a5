//! Quadratic control systems, their simulation, the benchmark systems, and
//! the randomized input-signal families used to generate training data.

pub mod burgers;
pub mod examples;
pub mod signal;
pub mod sim;

pub use burgers::{burgers_semidiscrete, BurgersConfig, BurgersModel};
pub use examples::{example_one, example_two};
pub use signal::{
    fixed_test_signals, sample_training_signals, FixedTestSignals, FnInput, Input, MultiSignal,
    SampledInput, SignalFamily, SignalSpec, SignalTerm, Waveform, ZeroInput,
};
pub use sim::{simulate, uniform_grid, Dynamics, SimOptions, Trajectory};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{quadratic_action, Matrix};
use crate::scalar::Scalar;

/// ẋ = A·x + H·(x⊗x) + B·u with A ∈ ℝⁿˣⁿ, H ∈ ℝⁿˣⁿ², B ∈ ℝⁿˣᵐ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticControlSystem<T> {
    n: usize,
    m: usize,
    pub a: Matrix<T>,
    pub h: Matrix<T>,
    pub b: Matrix<T>,
}

impl<T: Scalar> QuadraticControlSystem<T> {
    pub fn new(a: Matrix<T>, h: Matrix<T>, b: Matrix<T>) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() {
            return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        if h.rows() != n || h.cols() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "quadratic operator must be {n}x{}, got {}x{}",
                n * n,
                h.rows(),
                h.cols()
            )));
        }
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "input operator must have {n} rows, got {}",
                b.rows()
            )));
        }
        let m = b.cols();
        for (name, mat) in [("A", &a), ("H", &h), ("B", &b)] {
            if !mat.is_finite() {
                return Err(Error::NonFinite(format!("operator {name} contains NaN or Inf")));
            }
        }
        Ok(Self { n, m, a, h, b })
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    /// A·x + H·(x⊗x) + B·u with dimension checks.
    pub fn rhs(&self, x: &[T], u: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n || u.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "rhs: expected state {} / input {}, got {} / {}",
                self.n,
                self.m,
                x.len(),
                u.len()
            )));
        }
        let mut out = vec![T::zero(); self.n];
        self.rhs_into(x, u, &mut out);
        Ok(out)
    }

    /// Unchecked evaluation into a caller buffer; the quadratic term runs
    /// block-wise so the n²-sized Kronecker vector is never materialized.
    pub fn rhs_into(&self, x: &[T], u: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(u.len(), self.m);
        let quad = quadratic_action(&self.h, x);
        for i in 0..self.n {
            let mut acc = crate::linalg::dot(self.a.row(i), x) + quad[i];
            acc += crate::linalg::dot(self.b.row(i), u);
            out[i] = acc;
        }
    }

    /// Shape/finiteness re-validation for deserialized systems.
    pub fn validate(&self) -> Result<()> {
        if self.a.rows() != self.n
            || !self.a.is_square()
            || self.h.rows() != self.n
            || self.h.cols() != self.n * self.n
            || self.b.rows() != self.n
            || self.b.cols() != self.m
        {
            return Err(Error::Parse("inconsistent system dimensions".into()));
        }
        self.a.validate()?;
        self.h.validate()?;
        self.b.validate()
    }
}

/// Free-function form of [`QuadraticControlSystem::rhs`].
pub fn rhs<T: Scalar>(sys: &QuadraticControlSystem<T>, x: &[T], u: &[T]) -> Result<Vec<T>> {
    sys.rhs(x, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_on_first_benchmark_system() {
        let sys = example_one::<f64>();
        // A·x = (1, −5); H(x⊗x) = (2, −1); B·u = 0 → total (3, −6).
        let out = sys.rhs(&[1.0, 2.0], &[0.0]).unwrap();
        assert_eq!(out, vec![3.0, -6.0]);
    }

    #[test]
    fn rhs_zero_state_zero_input_is_zero() {
        let sys = example_one::<f64>();
        assert_eq!(sys.rhs(&[0.0, 0.0], &[0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn rhs_reduces_to_linear_part_without_quadratic_and_input_terms() {
        let a = Matrix::from_rows(&[&[-1.0, 0.5], &[0.0, -2.0]]);
        let sys = QuadraticControlSystem::new(
            a.clone(),
            Matrix::zeros(2, 4),
            Matrix::zeros(2, 1),
        )
        .unwrap();
        let x = [0.3, -0.7];
        assert_eq!(sys.rhs(&x, &[5.0]).unwrap(), a.matvec(&x));
    }

    #[test]
    fn rhs_rejects_dimension_mismatch() {
        let sys = example_one::<f64>();
        assert!(sys.rhs(&[1.0], &[0.0]).is_err());
        assert!(sys.rhs(&[1.0, 2.0], &[]).is_err());
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        let a = Matrix::<f64>::identity(2);
        assert!(QuadraticControlSystem::new(a.clone(), Matrix::zeros(2, 3), Matrix::zeros(2, 1))
            .is_err());
        assert!(QuadraticControlSystem::new(a.clone(), Matrix::zeros(2, 4), Matrix::zeros(3, 1))
            .is_err());
        assert!(QuadraticControlSystem::new(a, Matrix::zeros(2, 4), Matrix::zeros(2, 1)).is_ok());
    }
}
