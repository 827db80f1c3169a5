//! Error metrics for comparing learned trajectories against ground truth.
//!
//! The headline measure is the mean of entrywise absolute differences
//! between two snapshot matrices. The signed mean is recorded alongside it
//! because signed errors can cancel to near zero and hide large deviations;
//! the relative Frobenius (L2) error supports tolerance checks that should
//! scale with the size of the reference trajectory.

use serde::{Deserialize, Serialize};

use crate::linalg::{pairwise_sum, Matrix};
use crate::scalar::Scalar;

/// Entrywise and norm-based discrepancies between two equally shaped
/// snapshot matrices (states × samples).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryErrors<T> {
    /// Mean over all entries of |truth − approx|.
    pub mean_abs_error: T,
    /// Mean over all entries of (truth − approx), kept for transparency;
    /// cancellation can make this much smaller than `mean_abs_error`.
    pub signed_mean_error: T,
    /// ‖truth − approx‖_F / ‖truth‖_F; zero reference with a zero
    /// discrepancy gives 0, zero reference otherwise gives ∞.
    pub relative_l2_error: T,
}

/// Compares two snapshot matrices entry by entry.
///
/// # Panics
/// If the shapes differ or either matrix is empty.
pub fn trajectory_errors<T: Scalar>(truth: &Matrix<T>, approx: &Matrix<T>) -> TrajectoryErrors<T> {
    assert_eq!(
        (truth.rows(), truth.cols()),
        (approx.rows(), approx.cols()),
        "trajectory_errors: shape mismatch"
    );
    assert!(truth.rows() > 0 && truth.cols() > 0, "trajectory_errors: empty matrices");
    let count = cast_len::<T>(truth.rows() * truth.cols());
    let diff: Vec<T> = truth
        .data()
        .iter()
        .zip(approx.data().iter())
        .map(|(&a, &b)| a - b)
        .collect();
    let abs: Vec<T> = diff.iter().map(|d| d.abs()).collect();
    let diff_norm = crate::linalg::norm2(&diff);
    let truth_norm = truth.frobenius_norm();
    let relative_l2_error = if truth_norm > T::zero() {
        diff_norm / truth_norm
    } else if diff_norm == T::zero() {
        T::zero()
    } else {
        T::infinity()
    };
    TrajectoryErrors {
        mean_abs_error: pairwise_sum(&abs) / count,
        signed_mean_error: pairwise_sum(&diff) / count,
        relative_l2_error,
    }
}

/// Mean over all entries of |truth − approx|.
pub fn mean_abs_error<T: Scalar>(truth: &Matrix<T>, approx: &Matrix<T>) -> T {
    trajectory_errors(truth, approx).mean_abs_error
}

/// ‖truth − approx‖_F / ‖truth‖_F.
pub fn relative_l2_error<T: Scalar>(truth: &Matrix<T>, approx: &Matrix<T>) -> T {
    trajectory_errors(truth, approx).relative_l2_error
}

fn cast_len<T: Scalar>(len: usize) -> T {
    T::from_usize(len).expect("entry count representable in the scalar type")
}
