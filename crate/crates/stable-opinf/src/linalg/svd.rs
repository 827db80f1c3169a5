//! Thin singular value decomposition via one-sided Jacobi rotations.
//!
//! Tall inputs are first compressed by a Householder QR so the Jacobi sweeps
//! run on a small square factor; wide inputs go through transposition.
//! One-sided Jacobi is backward stable and orthogonalizes columns to machine
//! precision, comfortably inside the 1e-10 reconstruction contract.

use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, norm2, Matrix};
use crate::linalg::qr::Qr;
use crate::scalar::{cast, Scalar};

/// Factorization M = U·diag(s)·Vᵀ with k = min(rows, cols) columns in U and
/// V, singular values sorted descending.
#[derive(Debug, Clone)]
pub struct ThinSvd<T> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

pub fn thin_svd<T: Scalar>(m: &Matrix<T>) -> Result<ThinSvd<T>> {
    if m.rows() < m.cols() {
        let t = thin_svd(&m.transpose())?;
        return Ok(ThinSvd { u: t.v, s: t.s, v: t.u });
    }
    if m.rows() > m.cols() {
        // M = Q·R, then SVD of the small square R; U = Q·(U_R padded with 0).
        let qr = Qr::new(m);
        let inner = jacobi_svd(&qr.r())?;
        let mut padded = Matrix::zeros(m.rows(), m.cols());
        padded.set_block(0, 0, &inner.u);
        Ok(ThinSvd { u: qr.apply_q(&padded), s: inner.s, v: inner.v })
    } else {
        jacobi_svd(m)
    }
}

/// Smallest singular value.
pub fn min_singular_value<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    Ok(*thin_svd(m)?.s.last().expect("nonempty spectrum"))
}

/// Largest singular value (operator 2-norm).
pub fn spectral_norm<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    Ok(thin_svd(m)?.s[0])
}

/// One-sided Jacobi on a matrix with rows ≥ cols. Works on the transpose so
/// the rotated "columns" are contiguous rows in storage.
fn jacobi_svd<T: Scalar>(a: &Matrix<T>) -> Result<ThinSvd<T>> {
    let (rows, cols) = (a.rows(), a.cols());
    debug_assert!(rows >= cols);
    let mut wt = a.transpose();
    let mut vt = Matrix::identity(cols);
    let eps = T::epsilon();
    let mut converged = cols == 1;
    for _ in 0..60 {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(wt.row(p), wt.row(p));
                let beta = dot(wt.row(q), wt.row(q));
                let gamma = dot(wt.row(p), wt.row(q));
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (cast::<T>(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_rows(&mut wt, p, q, c, s);
                rotate_rows(&mut vt, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::EigenNoConvergence);
    }

    let sig: Vec<T> = (0..cols).map(|j| norm2(wt.row(j))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sig[j].partial_cmp(&sig[i]).expect("finite singular values"));

    let mut s = Vec::with_capacity(cols);
    let mut u = Matrix::zeros(rows, cols);
    let mut v = Matrix::zeros(cols, cols);
    let mut filled = vec![false; cols];
    for (dst, &src) in order.iter().enumerate() {
        s.push(sig[src]);
        for i in 0..cols {
            // Row src of vt is column src of V.
            v[(i, dst)] = vt[(src, i)];
        }
        if sig[src] > T::zero() {
            let inv = T::one() / sig[src];
            for i in 0..rows {
                u[(i, dst)] = wt[(src, i)] * inv;
            }
            filled[dst] = true;
        }
    }
    // Exactly-zero singular values leave U columns undefined; complete to an
    // orthonormal set so the factor contract holds for rank-deficient input.
    for j in 0..cols {
        if !filled[j] {
            complete_column(&mut u, &filled, j);
            filled[j] = true;
        }
    }
    Ok(ThinSvd { u, s, v })
}

/// Plane rotation of rows p < q: (r_p, r_q) ← (c·r_p − s·r_q, s·r_p + c·r_q).
fn rotate_rows<T: Scalar>(m: &mut Matrix<T>, p: usize, q: usize, c: T, s: T) {
    let cols = m.cols();
    let (head, tail) = m.data_mut().split_at_mut(q * cols);
    let rp = &mut head[p * cols..p * cols + cols];
    let rq = &mut tail[..cols];
    for (a, b) in rp.iter_mut().zip(rq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Fills column `j` with a unit vector orthogonal to every filled column:
/// best canonical basis candidate, two Gram–Schmidt passes.
fn complete_column<T: Scalar>(u: &mut Matrix<T>, filled: &[bool], j: usize) {
    let rows = u.rows();
    let mut best: Option<(T, Vec<T>)> = None;
    for k in 0..rows {
        let mut cand = vec![T::zero(); rows];
        cand[k] = T::one();
        for _ in 0..2 {
            for (c, &is_set) in filled.iter().enumerate() {
                if !is_set {
                    continue;
                }
                let col = u.col(c);
                let proj = dot(&cand, &col);
                for i in 0..rows {
                    cand[i] -= proj * col[i];
                }
            }
        }
        let n = norm2(&cand);
        if best.as_ref().map_or(true, |(bn, _)| n > *bn) {
            best = Some((n, cand));
        }
        // A residual this large cannot be beaten meaningfully; stop early.
        if n > cast::<T>(0.9) {
            break;
        }
    }
    let (n, cand) = best.expect("rows ≥ 1");
    debug_assert!(n > T::zero(), "orthogonal complement exhausted");
    for i in 0..rows {
        u[(i, j)] = cand[i] / n;
    }
}
