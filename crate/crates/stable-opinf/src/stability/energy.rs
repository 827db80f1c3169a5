//! Energy preservation of quadratic operators.
//!
//! H ∈ ℝⁿˣⁿ² is energy-preserving iff zᵀH(z⊗z) = 0 for all z, equivalently
//! iff every index-permutation sum H_ijk + H_ikj + H_jik + H_jki + H_kij +
//! H_kji vanishes (H_ijk = H[i, j·n+k]). Such operators add nothing to the
//! time derivative of ½‖x‖², which is what the trapping-radius certificate
//! needs from the quadratic term.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{norm2, quadratic_action, Matrix};
use crate::scalar::{cast, Scalar};

/// Outcome of the permutation-sum check.
#[derive(Debug, Clone, Copy)]
pub struct EnergyCheck<T> {
    pub preserving: bool,
    /// Largest |permutation sum| over all index triples.
    pub max_violation: T,
}

/// Default tolerance used when callers don't pin one: absolute 1e-12 scaled
/// up for operators with large entries.
pub fn default_energy_tol<T: Scalar>(h: &Matrix<T>) -> T {
    cast::<T>(1e-12) * T::one().max(h.max_abs())
}

/// Checks the permutation-sum condition over all i ≤ j ≤ k (the sum is
/// invariant under index permutations, so this index set covers all triples).
pub fn energy_preserving_check<T: Scalar>(h: &Matrix<T>, tol: T) -> EnergyCheck<T> {
    let n = h.rows();
    assert_eq!(h.cols(), n * n, "energy_preserving_check: H must be n x n²");
    let at = |i: usize, j: usize, k: usize| h[(i, j * n + k)];
    let mut max_violation = T::zero();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let s = at(i, j, k)
                    + at(i, k, j)
                    + at(j, i, k)
                    + at(j, k, i)
                    + at(k, i, j)
                    + at(k, j, i);
                max_violation = max_violation.max(s.abs());
            }
        }
    }
    EnergyCheck { preserving: max_violation <= tol, max_violation }
}

/// Monte-Carlo witness of zᵀH(z⊗z) = 0: the largest |zᵀH(z⊗z)| over random
/// unit vectors z. Deterministic per seed.
pub fn energy_preserving_sample_check<T: Scalar>(h: &Matrix<T>, trials: usize, seed: u64) -> T {
    let n = h.rows();
    assert_eq!(h.cols(), n * n, "energy_preserving_sample_check: H must be n x n²");
    assert!(trials >= 1, "energy_preserving_sample_check: trials must be ≥ 1");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..trials {
        let mut z: Vec<T> = (0..n)
            .map(|_| cast(<StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)))
            .collect();
        let nz = norm2(&z);
        if nz == T::zero() {
            continue;
        }
        for zi in &mut z {
            *zi /= nz;
        }
        let hzz = quadratic_action(h, &z);
        let e = crate::linalg::dot(&z, &hzz);
        worst = worst.max(e.abs());
    }
    worst
}

/// Rewrites an energy-preserving H as skew blocks (H₁, …, Hₙ) with identical
/// action: H(x⊗x) = Σₖ xₖ·Hₖ·x for all x.
///
/// Construction: symmetrize in the trailing indices, S_ijk = (H_ijk +
/// H_ikj)/2, then (Hₖ)_ij = (2/3)·(S_ijk − S_jik). Each block is exactly
/// skew (the formula is antisymmetric in i, j), and the action-equality is
/// covered by tests rather than trusted.
pub fn to_skew_block_form<T: Scalar>(h: &Matrix<T>, tol: T) -> Result<Vec<Matrix<T>>> {
    let n = h.rows();
    let check = energy_preserving_check(h, tol);
    if !check.preserving {
        return Err(Error::NotEnergyPreserving {
            violation: crate::scalar::to_f64(check.max_violation),
        });
    }
    let at = |i: usize, j: usize, k: usize| h[(i, j * n + k)];
    let half = cast::<T>(0.5);
    let two_thirds = cast::<T>(2.0) / cast::<T>(3.0);
    let s = |i: usize, j: usize, k: usize| (at(i, j, k) + at(i, k, j)) * half;
    let mut blocks = Vec::with_capacity(n);
    for k in 0..n {
        let mut hk = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = two_thirds * (s(i, j, k) - s(j, i, k));
                hk[(i, j)] = v;
                hk[(j, i)] = -v;
            }
        }
        blocks.push(hk);
    }
    Ok(blocks)
}

/// Concatenates blocks into the n × n² operator [H₁ … Hₙ].
pub fn blocks_to_hessian<T: Scalar>(blocks: &[Matrix<T>]) -> Matrix<T> {
    let n = blocks.len();
    assert!(n > 0, "blocks_to_hessian: no blocks");
    let mut h = Matrix::zeros(n, n * n);
    for (k, hk) in blocks.iter().enumerate() {
        assert_eq!((hk.rows(), hk.cols()), (n, n), "blocks_to_hessian: block shape");
        h.set_block(0, k * n, hk);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron_vec;
    use crate::model::example_one;
    use rand::Rng;

    fn random_skew(rng: &mut ChaCha12Rng, n: usize) -> Matrix<f64> {
        let g = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &g - &g.transpose()
    }

    #[test]
    fn first_benchmark_hessian_is_energy_preserving() {
        let h = example_one::<f64>().h;
        let check = energy_preserving_check(&h, 1e-12);
        assert!(check.preserving);
        assert_eq!(check.max_violation, 0.0);
        assert!(energy_preserving_sample_check(&h, 1000, 0) <= 1e-12);
    }

    #[test]
    fn single_entry_hessian_violates_with_known_magnitude() {
        // H_001 = 1 alone: permutation sum at (0,0,1) is H_001 + H_010 = 2
        // after the six-term sum counts it twice.
        let h = Matrix::<f64>::from_rows(&[&[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 0.0]]);
        let check = energy_preserving_check(&h, 1e-12);
        assert!(!check.preserving);
        assert_eq!(check.max_violation, 2.0);
        // Witness z = (1,1)/√2 gives |z₁²z₂| = 1/(2√2) ≈ 0.3536.
        let worst = energy_preserving_sample_check(&h, 1000, 0);
        assert!(worst > 0.1, "sampled witness too weak: {worst}");
    }

    #[test]
    fn zero_hessian_passes_everything() {
        let h = Matrix::<f64>::zeros(3, 9);
        assert!(energy_preserving_check(&h, 0.0).preserving);
        assert_eq!(energy_preserving_sample_check(&h, 100, 1), 0.0);
    }

    #[test]
    fn permutation_and_sample_checks_agree() {
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        for round in 0..200 {
            let n = rng.random_range(2..=5);
            let skew_built = round % 2 == 0;
            let h = if skew_built {
                let blocks: Vec<_> = (0..n).map(|_| random_skew(&mut rng, n)).collect();
                blocks_to_hessian(&blocks)
            } else {
                Matrix::from_fn(n, n * n, |_, _| rng.random_range(-1.0..1.0))
            };
            let eq4 = energy_preserving_check(&h, 1e-12).preserving;
            let sample = energy_preserving_sample_check(&h, 50, round as u64);
            if eq4 {
                assert!(sample <= 1e-10, "eq4 passed but sample violation {sample}");
            } else {
                assert!(sample > 1e-10, "eq4 failed but samples saw nothing");
            }
            // Skew-block construction must be exactly energy-preserving.
            if skew_built {
                assert_eq!(energy_preserving_check(&h, 0.0).max_violation, 0.0);
            }
        }
    }

    #[test]
    fn skew_block_form_of_first_benchmark() {
        let h = example_one::<f64>().h;
        let blocks = to_skew_block_form(&h, 1e-12).unwrap();
        assert_eq!(blocks[0], Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]));
        assert_eq!(blocks[1], Matrix::zeros(2, 2));
        // Reassembly reproduces the input exactly here.
        assert_eq!(blocks_to_hessian(&blocks), h);
    }

    #[test]
    fn skew_block_form_zero() {
        let h = Matrix::<f64>::zeros(3, 9);
        let blocks = to_skew_block_form(&h, 0.0).unwrap();
        for b in &blocks {
            assert_eq!(b.max_abs(), 0.0);
        }
    }

    #[test]
    fn skew_block_form_preserves_action() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for n in [2usize, 3, 5] {
            // Start from skew blocks, scramble the representation by moving
            // mass between equivalent entries... simplest scramble that
            // keeps the action: add any matrix with zero permutation sums
            // that is *not* in block-skew layout, e.g. a symmetric-in-(j,k)
            // redistribution of an existing block. Here we just take the
            // skew-built H itself (already a nontrivial instance) plus a
            // (j,k)-antisymmetric perturbation, which changes entries but
            // not the action on symmetric x⊗x.
            let blocks: Vec<_> = (0..n).map(|_| random_skew(&mut rng, n)).collect();
            let mut h = blocks_to_hessian(&blocks);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..j {
                        let bump = rng.random_range(-0.5..0.5);
                        h[(i, j * n + k)] += bump;
                        h[(i, k * n + j)] -= bump;
                    }
                }
            }
            let out = to_skew_block_form(&h, 1e-10).unwrap();
            let reassembled = blocks_to_hessian(&out);
            for hk in &out {
                assert_eq!((&hk.transpose() + hk).max_abs(), 0.0, "block not exactly skew");
            }
            for _ in 0..100 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let xx = kron_vec(&x);
                let want = h.matvec(&xx);
                let got = reassembled.matvec(&xx);
                for (a, b) in want.iter().zip(&got) {
                    assert!((a - b).abs() < 1e-12, "action mismatch: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn skew_block_form_rejects_non_energy_preserving_input() {
        let h = Matrix::<f64>::from_rows(&[&[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 0.0]]);
        assert!(to_skew_block_form(&h, 1e-12).is_err());
    }
}
