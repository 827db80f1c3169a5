//! Regressor assembly for least-squares operator inference: the stacked
//! data matrix D = [X; X⊗̃X; U] whose conditioning drives regularization.

use crate::error::Result;
use crate::linalg::{columnwise_self_kron, thin_svd};
use crate::scalar::Scalar;
use crate::Matrix;

/// The stacked regressor and its 2-norm condition number (σ_max/σ_min;
/// infinity when the smallest singular value is zero).
#[derive(Debug, Clone)]
pub struct Regressor<T> {
    pub d: Matrix<T>,
    pub cond: T,
}

impl<T: Scalar> Regressor<T> {
    pub fn rows(&self) -> usize {
        self.d.rows()
    }

    pub fn samples(&self) -> usize {
        self.d.cols()
    }
}

/// Stacks D = [X; X⊗̃X; U] ((n + n² + m) × 𝒩) where X⊗̃X kroneckers each
/// state column with itself, and reports the condition number of D.
pub fn assemble_regressor<T: Scalar>(x: &Matrix<T>, u: &Matrix<T>) -> Result<Regressor<T>> {
    assert_eq!(x.cols(), u.cols(), "assemble_regressor: column counts differ");
    let kron = columnwise_self_kron(x);
    let d = Matrix::vstack(&[x, &kron, u]);
    let svd = thin_svd(&d)?;
    let smax = svd.s[0];
    let smin = svd.s[svd.s.len() - 1];
    let cond = if smin > T::zero() { smax / smin } else { T::infinity() };
    Ok(Regressor { d, cond })
}
