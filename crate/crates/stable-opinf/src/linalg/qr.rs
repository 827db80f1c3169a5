//! Householder QR for tall matrices: the workhorse behind least squares and
//! the preconditioning step of the thin SVD.

use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// QR factorization of a tall matrix (rows ≥ cols). `factors` stores R in the
/// upper triangle and the tail of each Householder vector below the diagonal
/// (leading element normalized to 1, not stored).
pub struct Qr<T> {
    factors: Matrix<T>,
    tau: Vec<T>,
}

impl<T: Scalar> Qr<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        let (rows, cols) = (a.rows(), a.cols());
        assert!(rows >= cols, "Qr: matrix must be tall ({rows}x{cols})");
        let mut f = a.clone();
        let mut tau = vec![T::zero(); cols];
        for k in 0..cols {
            // Householder vector for column k, rows k..: reflect onto ±‖x‖ e1.
            let mut sq = T::zero();
            for i in k + 1..rows {
                sq += f[(i, k)] * f[(i, k)];
            }
            let x0 = f[(k, k)];
            if sq == T::zero() {
                // Column already upper triangular; identity reflector.
                tau[k] = T::zero();
                continue;
            }
            let mu = (x0 * x0 + sq).sqrt();
            let beta = if x0 >= T::zero() { -mu } else { mu };
            tau[k] = (beta - x0) / beta;
            let inv = T::one() / (x0 - beta);
            let mut v = vec![T::zero(); rows - k - 1];
            for i in k + 1..rows {
                let vi = f[(i, k)] * inv;
                f[(i, k)] = vi;
                v[i - k - 1] = vi;
            }
            f[(k, k)] = beta;
            // Apply the reflector to the trailing columns. Sweeping whole rows
            // keeps the row-major storage in cache: w = tau·(vᵀ F), F -= v·w.
            let mut w: Vec<T> = f.row(k)[k + 1..].to_vec();
            for i in k + 1..rows {
                let vi = v[i - k - 1];
                for (wj, &fij) in w.iter_mut().zip(&f.row(i)[k + 1..]) {
                    *wj += vi * fij;
                }
            }
            for wj in &mut w {
                *wj *= tau[k];
            }
            for (fkj, &wj) in f.row_mut(k)[k + 1..].iter_mut().zip(&w) {
                *fkj -= wj;
            }
            for i in k + 1..rows {
                let vi = v[i - k - 1];
                for (fij, &wj) in f.row_mut(i)[k + 1..].iter_mut().zip(&w) {
                    *fij -= wj * vi;
                }
            }
        }
        Self { factors: f, tau }
    }

    pub fn rows(&self) -> usize {
        self.factors.rows()
    }

    pub fn cols(&self) -> usize {
        self.factors.cols()
    }

    /// The square upper-triangular factor (cols × cols).
    pub fn r(&self) -> Matrix<T> {
        let q = self.cols();
        Matrix::from_fn(q, q, |i, j| if j >= i { self.factors[(i, j)] } else { T::zero() })
    }

    fn apply_reflector(&self, k: usize, b: &mut Matrix<T>) {
        if self.tau[k] == T::zero() {
            return;
        }
        let rows = self.rows();
        // Row sweeps instead of column sweeps: w = tau·(vᵀ B), then B -= v·w.
        let mut w: Vec<T> = b.row(k).to_vec();
        for i in k + 1..rows {
            let vi = self.factors[(i, k)];
            for (wj, &bij) in w.iter_mut().zip(b.row(i)) {
                *wj += vi * bij;
            }
        }
        for wj in &mut w {
            *wj *= self.tau[k];
        }
        for (bkj, &wj) in b.row_mut(k).iter_mut().zip(&w) {
            *bkj -= wj;
        }
        for i in k + 1..rows {
            let vi = self.factors[(i, k)];
            for (bij, &wj) in b.row_mut(i).iter_mut().zip(&w) {
                *bij -= wj * vi;
            }
        }
    }

    /// Returns Qᵀ·B (reflectors applied first to last). B has `rows` rows.
    pub fn apply_qt(&self, b: &Matrix<T>) -> Matrix<T> {
        assert_eq!(b.rows(), self.rows(), "apply_qt: row mismatch");
        let mut out = b.clone();
        for k in 0..self.cols() {
            self.apply_reflector(k, &mut out);
        }
        out
    }

    /// Returns Q·B (reflectors applied last to first; each is an involution).
    pub fn apply_q(&self, b: &Matrix<T>) -> Matrix<T> {
        assert_eq!(b.rows(), self.rows(), "apply_q: row mismatch");
        let mut out = b.clone();
        for k in (0..self.cols()).rev() {
            self.apply_reflector(k, &mut out);
        }
        out
    }
}

/// Back substitution for an upper-triangular system R·X = B. Diagonal entries
/// must be nonzero; callers route rank-deficient systems through the SVD.
pub fn solve_upper_triangular<T: Scalar>(r: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = r.rows();
    assert!(r.is_square() && b.rows() == n, "solve_upper_triangular: shape");
    let mut x = b.clone();
    for j in 0..b.cols() {
        for i in (0..n).rev() {
            let mut acc = x[(i, j)];
            for k in i + 1..n {
                acc -= r[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / r[(i, i)];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nearly(a: &Matrix<f64>, b: &Matrix<f64>, tol: f64) {
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
        let d = (a - b).max_abs();
        assert!(d <= tol, "matrices differ by {d}");
    }

    #[test]
    fn qr_reconstructs_input() {
        let a = Matrix::from_rows(&[
            &[1.0, 2.0],
            &[3.0, -1.0],
            &[0.5, 4.0],
            &[-2.0, 1.0],
        ]);
        let qr = Qr::new(&a);
        // A = Q [R; 0]: lift R to full height and apply Q.
        let mut padded = Matrix::zeros(4, 2);
        padded.set_block(0, 0, &qr.r());
        nearly(&qr.apply_q(&padded), &a, 1e-14);
    }

    #[test]
    fn qt_then_q_is_identity() {
        let a = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 3.0], &[0.0, 1.0]]);
        let qr = Qr::new(&a);
        let b = Matrix::from_rows(&[&[1.0], &[2.0], &[3.0]]);
        nearly(&qr.apply_q(&qr.apply_qt(&b)), &b, 1e-14);
    }

    #[test]
    fn back_substitution_solves_triangular_system() {
        let r = Matrix::from_rows(&[&[2.0, 1.0], &[0.0, 4.0]]);
        let b = Matrix::from_rows(&[&[5.0], &[8.0]]);
        let x = solve_upper_triangular(&r, &b);
        nearly(&r.matmul(&x), &b, 1e-14);
        assert!((x[(1, 0)] - 2.0).abs() < 1e-15);
        assert!((x[(0, 0)] - 1.5).abs() < 1e-15);
    }
}
