//! Proper orthogonal decomposition: a reduced basis from the leading left
//! singular vectors of a snapshot matrix, selected by rank or by retained
//! energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::thin_svd;
use crate::scalar::{to_f64, Scalar};
use crate::Matrix;

/// How many modes to keep: an explicit rank, or the smallest rank whose
/// retained energy (Σ_{i≤n} σᵢ² / Σ σᵢ²) reaches the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PodCriterion<T> {
    Rank(usize),
    Energy(T),
}

/// Reduced basis V (orthonormal columns), the full singular spectrum of the
/// snapshot matrix, and the energy fraction the basis retains.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PodBasis<T> {
    pub v: Matrix<T>,
    pub singular_values: Vec<T>,
    pub retained_energy: T,
}

impl<T: Scalar> PodBasis<T> {
    pub fn full_dim(&self) -> usize {
        self.v.rows()
    }

    pub fn rank(&self) -> usize {
        self.v.cols()
    }

    /// Energy fraction a rank-`n` truncation of this spectrum would retain
    /// (1 for a zero spectrum, which loses nothing at any rank).
    pub fn energy_at(&self, n: usize) -> T {
        energy_fraction(&self.singular_values, n)
    }
}

fn energy_fraction<T: Scalar>(sigma: &[T], n: usize) -> T {
    let total: T = sigma.iter().map(|s| *s * *s).sum();
    if total == T::zero() {
        return T::one();
    }
    let kept: T = sigma.iter().take(n).map(|s| *s * *s).sum();
    kept / total
}

/// Fits a POD basis to snapshots Y (one state per row, one sample per
/// column). Rank requests above min(N, 𝒩) are rejected; energy thresholds
/// must lie in (0, 1].
pub fn pod_fit<T: Scalar>(y: &Matrix<T>, criterion: PodCriterion<T>) -> Result<PodBasis<T>> {
    let max_rank = y.rows().min(y.cols());
    let svd = thin_svd(y)?;
    let n = match criterion {
        PodCriterion::Rank(n) => {
            if n == 0 || n > max_rank {
                return Err(Error::InvalidArgument(format!(
                    "pod_fit: rank {n} outside 1..={max_rank}"
                )));
            }
            n
        }
        PodCriterion::Energy(theta) => {
            if !(theta > T::zero() && theta <= T::one()) {
                return Err(Error::InvalidArgument(format!(
                    "pod_fit: energy threshold {} outside (0, 1]",
                    to_f64(theta)
                )));
            }
            (1..=max_rank)
                .find(|&n| energy_fraction(&svd.s, n) >= theta)
                .unwrap_or(max_rank)
        }
    };
    let v = svd.u.block(0, 0, y.rows(), n);
    let retained_energy = energy_fraction(&svd.s, n);
    Ok(PodBasis { v, singular_values: svd.s, retained_energy })
}

/// X = VᵀY: full-order snapshots to reduced coordinates.
pub fn pod_project<T: Scalar>(basis: &PodBasis<T>, y: &Matrix<T>) -> Result<Matrix<T>> {
    if y.rows() != basis.full_dim() {
        return Err(Error::DimensionMismatch(format!(
            "pod_project: snapshots have {} rows, basis expects {}",
            y.rows(),
            basis.full_dim()
        )));
    }
    Ok(basis.v.matmul_transpose_a(y))
}

/// Ŷ = VX: reduced coordinates back to the full space.
pub fn pod_lift<T: Scalar>(basis: &PodBasis<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
    if x.rows() != basis.rank() {
        return Err(Error::DimensionMismatch(format!(
            "pod_lift: coordinates have {} rows, basis rank is {}",
            x.rows(),
            basis.rank()
        )));
    }
    Ok(basis.v.matmul(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_matrix(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> Matrix<f64> {
        Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn rank_one_snapshots_saturate_at_one_mode() {
        let u = [0.6, 0.0, 0.8];
        let vt = [1.0, -2.0, 0.5, 3.0];
        let y = Matrix::<f64>::from_fn(3, 4, |i, j| 2.5 * u[i] * vt[j]);
        let basis = pod_fit(&y, PodCriterion::Energy(0.99)).unwrap();
        assert_eq!(basis.rank(), 1);
        assert!((basis.retained_energy - 1.0).abs() < 1e-12);
        // The single mode is ±u.
        let got = basis.v.col(0);
        let s = got[0].signum() * u[0].signum();
        for (g, w) in got.iter().zip(&u) {
            assert!((g - s * w).abs() < 1e-10);
        }
    }

    #[test]
    fn orthogonal_snapshots_have_flat_spectrum() {
        // An orthogonal matrix has all singular values 1, so a rank-n basis
        // retains exactly n/N of the energy.
        let theta = std::f64::consts::FRAC_PI_6;
        let (c, s) = (theta.cos(), theta.sin());
        let y = Matrix::<f64>::from_rows(&[
            &[c, -s, 0.0],
            &[s, c, 0.0],
            &[0.0, 0.0, 1.0],
        ]);
        for n in 1..=3 {
            let basis = pod_fit(&y, PodCriterion::Rank(n)).unwrap();
            assert!((basis.retained_energy - n as f64 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_is_orthonormal_and_energy_monotone() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let y = random_matrix(&mut rng, 12, 30);
        let mut prev = 0.0;
        for n in 1..=12 {
            let basis = pod_fit(&y, PodCriterion::Rank(n)).unwrap();
            let gram = basis.v.matmul_transpose_a(&basis.v);
            assert!((&gram - &Matrix::identity(n)).max_abs() < 1e-10);
            assert!(basis.retained_energy >= prev);
            prev = basis.retained_energy;
        }
        assert!((prev - 1.0).abs() < 1e-12, "full rank must retain all energy");
    }

    #[test]
    fn energy_criterion_picks_smallest_sufficient_rank() {
        // Diagonal spectrum 4, 2, 1: energies 16/21, 20/21, 1.
        let y = Matrix::<f64>::from_rows(&[
            &[4.0, 0.0, 0.0],
            &[0.0, 2.0, 0.0],
            &[0.0, 0.0, 1.0],
        ]);
        assert_eq!(pod_fit(&y, PodCriterion::Energy(0.75)).unwrap().rank(), 1);
        assert_eq!(pod_fit(&y, PodCriterion::Energy(0.80)).unwrap().rank(), 2);
        assert_eq!(pod_fit(&y, PodCriterion::Energy(0.97)).unwrap().rank(), 3);
        assert_eq!(pod_fit(&y, PodCriterion::Energy(1.0)).unwrap().rank(), 3);
    }

    #[test]
    fn reconstruction_error_equals_tail_energy() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let y = random_matrix(&mut rng, 10, 25);
        for n in [2usize, 5, 9] {
            let basis = pod_fit(&y, PodCriterion::Rank(n)).unwrap();
            let recon = pod_lift(&basis, &pod_project(&basis, &y).unwrap()).unwrap();
            let err2 = (&y - &recon).frobenius_norm().powi(2);
            let tail: f64 = basis.singular_values[n..].iter().map(|s| s * s).sum();
            assert!(
                (err2 - tail).abs() <= 1e-8 * tail.max(1e-30),
                "rank {n}: error² {err2} vs tail {tail}"
            );
        }
    }

    #[test]
    fn snapshots_in_span_reconstruct_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let y = random_matrix(&mut rng, 8, 3);
        let basis = pod_fit(&y, PodCriterion::Rank(3)).unwrap();
        let recon = pod_lift(&basis, &pod_project(&basis, &y).unwrap()).unwrap();
        assert!((&y - &recon).max_abs() < 1e-10);
    }

    #[test]
    fn identity_basis_projection_is_identity() {
        let y = Matrix::<f64>::identity(4);
        let basis = pod_fit(&y, PodCriterion::Rank(4)).unwrap();
        let x = pod_project(&basis, &y).unwrap();
        let back = pod_lift(&basis, &x).unwrap();
        assert!((&back - &y).max_abs() < 1e-12);
    }

    #[test]
    fn invalid_requests_rejected() {
        let y = Matrix::<f64>::zeros(3, 2);
        assert!(pod_fit(&y, PodCriterion::Rank(0)).is_err());
        assert!(pod_fit(&y, PodCriterion::Rank(3)).is_err());
        assert!(pod_fit(&y, PodCriterion::Energy(0.0)).is_err());
        assert!(pod_fit(&y, PodCriterion::Energy(1.1)).is_err());
        let tall = Matrix::<f64>::zeros(5, 2);
        assert!(pod_project(&PodBasis {
            v: Matrix::identity(3),
            singular_values: vec![1.0, 1.0, 1.0],
            retained_energy: 1.0,
        }, &tall).is_err());
    }
}
