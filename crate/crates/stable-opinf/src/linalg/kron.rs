//! Kronecker products and symmetric/skew splittings.
//!
//! Conventions used throughout: for x ∈ R^n the self-product x ⊗ x lives in
//! R^{n²} with entry (i·n + j) equal to x_i x_j, and a quadratic operator
//! H ∈ R^{n×n²} acts as H(x ⊗ x) = Σ_k x_k H_k x where H_k is the k-th
//! n-column block of H.

use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Self Kronecker product `x ⊗ x`, entry `i*n + j` = `x[i] * x[j]`.
pub fn kron_vec<T: Scalar>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let mut out = Vec::with_capacity(n * n);
    for &xi in x {
        for &xj in x {
            out.push(xi * xj);
        }
    }
    out
}

/// Applies [`kron_vec`] to every column of `x`: the result has `n²` rows and
/// one column per input column.
pub fn columnwise_self_kron<T: Scalar>(x: &Matrix<T>) -> Matrix<T> {
    let n = x.rows();
    let m = x.cols();
    let mut out = Matrix::zeros(n * n, m);
    for c in 0..m {
        for i in 0..n {
            for j in 0..n {
                out[(i * n + j, c)] = x[(i, c)] * x[(j, c)];
            }
        }
    }
    out
}

/// Skew-symmetric part `(A − Aᵀ)/2`.
pub fn skew_part<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    assert!(a.is_square(), "skew_part: matrix must be square");
    let half = T::from_f64(0.5).unwrap();
    Matrix::from_fn(a.rows(), a.cols(), |i, j| (a[(i, j)] - a[(j, i)]) * half)
}

/// Symmetric part `(A + Aᵀ)/2`.
pub fn sym_part<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    assert!(a.is_square(), "sym_part: matrix must be square");
    let half = T::from_f64(0.5).unwrap();
    Matrix::from_fn(a.rows(), a.cols(), |i, j| (a[(i, j)] + a[(j, i)]) * half)
}

/// Evaluates `H (x ⊗ x)` block-wise without materializing the Kronecker
/// vector: Σ_k x_k (H_k x).
pub fn quadratic_action<T: Scalar>(h: &Matrix<T>, x: &[T]) -> Vec<T> {
    let n = x.len();
    assert_eq!(h.rows(), n, "quadratic_action: row count");
    assert_eq!(h.cols(), n * n, "quadratic_action: column count");
    let mut out = vec![T::zero(); n];
    for i in 0..n {
        let row = h.row(i);
        let mut acc = T::zero();
        for (k, &xk) in x.iter().enumerate() {
            let block_row = &row[k * n..(k + 1) * n];
            acc += xk * crate::linalg::matrix::dot(block_row, x);
        }
        out[i] = acc;
    }
    out
}
