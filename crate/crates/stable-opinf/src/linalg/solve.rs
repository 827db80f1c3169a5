//! Least-squares and SPD solvers built on the QR and SVD kernels.

use crate::error::{Error, Result};
use crate::linalg::qr::Qr;
use crate::linalg::svd::thin_svd;
use crate::linalg::Matrix;
use crate::scalar::{cast, Scalar};

/// Solution of min ‖A·X − B‖_F together with conditioning diagnostics.
/// `cond` is σ_max/σ_min over the numerically nonzero spectrum of the
/// regression matrix (infinite sentinel for the all-zero matrix);
/// `min_norm` flags that A was rank-deficient and the minimal-Frobenius-norm
/// solution was returned.
#[derive(Debug, Clone)]
pub struct Lstsq<T> {
    pub solution: Matrix<T>,
    pub rank: usize,
    pub cond: T,
    pub min_norm: bool,
}

/// Solves min ‖A·X − B‖_F (+ ridge·‖X‖_F² when ridge > 0) for tall or square
/// A via Householder QR followed by an SVD of the small triangular factor.
/// Rank-deficient systems (possible only at ridge = 0) fall back to the
/// minimal-norm solution instead of failing.
pub fn lstsq<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, ridge: T) -> Result<Lstsq<T>> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "lstsq: A has {} rows, B has {}",
            a.rows(),
            b.rows()
        )));
    }
    if ridge < T::zero() {
        return Err(Error::InvalidArgument("lstsq: ridge must be nonnegative".into()));
    }
    let q = a.cols();
    // Ridge as rows appended to the system: [A; √ridge·I]·X ≈ [B; 0].
    let (a_eff, b_eff) = if ridge > T::zero() {
        let sr = ridge.sqrt();
        let mut reg = Matrix::zeros(q, q);
        for i in 0..q {
            reg[(i, i)] = sr;
        }
        (
            Matrix::vstack(&[a, &reg]),
            Matrix::vstack(&[b, &Matrix::zeros(q, b.cols())]),
        )
    } else {
        (a.clone(), b.clone())
    };
    if a_eff.rows() < q {
        return Err(Error::InvalidArgument(format!(
            "lstsq: underdetermined system {}x{} not supported (need rows ≥ cols)",
            a_eff.rows(),
            q
        )));
    }

    let qr = Qr::new(&a_eff);
    let r = qr.r();
    let bq = qr.apply_qt(&b_eff).block(0, 0, q, b_eff.cols());

    // SVD of R gives the spectrum of A (same singular values) plus a
    // rank-revealing solve that degrades gracefully to minimal norm.
    let svd = thin_svd(&r)?;
    let smax = svd.s[0];
    let tol = smax * T::epsilon() * cast::<T>(a_eff.rows().max(q) as f64);
    let rank = svd.s.iter().filter(|&&s| s > tol).count();
    let cond = if rank == 0 {
        T::infinity()
    } else {
        smax / svd.s[rank - 1]
    };
    // X = V·Σ⁺·Uᵀ·(QᵀB).
    let utb = svd.u.matmul_transpose_a(&bq);
    let scaled = Matrix::from_fn(q, utb.cols(), |i, j| {
        if i < rank {
            utb[(i, j)] / svd.s[i]
        } else {
            T::zero()
        }
    });
    let solution = svd.v.matmul(&scaled);
    Ok(Lstsq { solution, rank, cond, min_norm: rank < q })
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    m.require_square()?;
    let n = m.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if acc <= T::zero() {
                    return Err(Error::InvalidArgument(format!(
                        "cholesky: matrix not positive definite (pivot {} at index {i})",
                        crate::scalar::to_f64(acc)
                    )));
                }
                l[(i, i)] = acc.sqrt();
            } else {
                l[(i, j)] = acc / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Solves (L·Lᵀ)·X = B given the Cholesky factor L.
pub fn cholesky_solve<T: Scalar>(l: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = l.rows();
    assert_eq!(b.rows(), n, "cholesky_solve: shape");
    let mut x = b.clone();
    for j in 0..b.cols() {
        // Forward: L·y = b.
        for i in 0..n {
            let mut acc = x[(i, j)];
            for k in 0..i {
                acc -= l[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / l[(i, i)];
        }
        // Backward: Lᵀ·x = y.
        for i in (0..n).rev() {
            let mut acc = x[(i, j)];
            for k in i + 1..n {
                acc -= l[(k, i)] * x[(k, j)];
            }
            x[(i, j)] = acc / l[(i, i)];
        }
    }
    x
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
pub fn spd_inverse<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let l = cholesky(m)?;
    Ok(cholesky_solve(&l, &Matrix::identity(m.rows())))
}
