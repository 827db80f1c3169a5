//! Linear-part stability checks: Hurwitz test and the skew/symmetric split
//! A = J − R with R symmetric positive definite.

use crate::error::{Error, Result};
use crate::linalg::{skew_part, spectral_abscissa, sym_eigen, sym_part, Matrix};
use crate::scalar::{cast, to_f64, Scalar};

/// Eigenvalue-based Hurwitz report for a square matrix.
#[derive(Debug, Clone, Copy)]
pub struct HurwitzReport<T> {
    pub hurwitz: bool,
    /// Largest real part over the spectrum.
    pub abscissa: T,
}

/// A is Hurwitz iff every eigenvalue has strictly negative real part.
pub fn is_hurwitz<T: Scalar>(a: &Matrix<T>) -> Result<HurwitzReport<T>> {
    let abscissa = spectral_abscissa(a)?;
    Ok(HurwitzReport { hurwitz: abscissa < T::zero(), abscissa })
}

/// Splits A = J − R with J = (A − Aᵀ)/2 skew and R = −(A + Aᵀ)/2, and
/// requires R to be positive definite.
///
/// Definiteness is judged against a relative floor: λ_min(R) must exceed
/// 1e-12 · max|λ(R)|, so a matrix whose symmetric part is merely
/// semidefinite at machine precision is rejected rather than certified.
pub fn monotone_decompose<T: Scalar>(a: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    a.require_square()?;
    let j = skew_part(a);
    let r = -&sym_part(a);
    let eig = sym_eigen(&r)?;
    let lambda_min = eig.values[0];
    let lambda_max_abs = eig
        .values
        .iter()
        .fold(T::zero(), |acc, &v| acc.max(v.abs()));
    let floor = cast::<T>(1e-12) * lambda_max_abs;
    if lambda_min <= floor {
        return Err(Error::NotMonotonicallyStable { max_sym_eig: to_f64(-lambda_min) });
    }
    Ok((j, r))
}
