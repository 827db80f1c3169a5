//! Property tests: the algebraic identities behind the library, checked on
//! randomly generated inputs. These complement the deterministic unit tests
//! inside each module with quantified "for all" statements.

use approx::assert_relative_eq;
use proptest::prelude::*;

use stable_opinf::data::{assemble_regressor, estimate_derivatives, pod_fit, PodCriterion};
use stable_opinf::learn::{triangular_lr, TrainConfig};
use stable_opinf::linalg::{dot, kron_vec, norm2, skew_part, sym_part, Matrix};
use stable_opinf::stability::{
    blocks_to_hessian, energy_preserving_check, energy_preserving_sample_check, is_hurwitz,
    monotone_decompose, to_skew_block_form,
};

/// n×m matrix with entries in [-scale, scale].
fn matrix(n: usize, m: usize, scale: f64) -> impl Strategy<Value = Matrix<f64>> {
    prop::collection::vec(-scale..scale, n * m)
        .prop_map(move |data| Matrix::from_vec(n, m, data).unwrap())
}

/// A dimension together with a square matrix of that size.
fn sized_square(scale: f64) -> impl Strategy<Value = Matrix<f64>> {
    (1usize..=5).prop_flat_map(move |n| matrix(n, n, scale))
}

/// n skew matrices of size n×n, assembled into an n×n² quadratic operator.
fn skew_built_hessian() -> impl Strategy<Value = Matrix<f64>> {
    (2usize..=5)
        .prop_flat_map(|n| prop::collection::vec(matrix(n, n, 3.0), n))
        .prop_map(|blocks| {
            let skews: Vec<Matrix<f64>> = blocks.iter().map(|b| b - &b.transpose()).collect();
            blocks_to_hessian(&skews)
        })
}

proptest! {
    // kron_vec(x)ᵀ·kron_vec(x) = (xᵀx)²: the Kronecker square preserves the
    // squared norm squared.
    #[test]
    fn kronecker_square_norm_identity(x in prop::collection::vec(-10.0f64..10.0, 1..=6)) {
        let k = kron_vec(&x);
        let lhs = dot(&k, &k);
        let rhs = dot(&x, &x).powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
    }

    // skew_part is exactly antisymmetric and sym_part exactly symmetric,
    // entry by entry; their sum reconstructs the input.
    #[test]
    fn symmetry_split_is_exact(m in sized_square(100.0)) {
        let s = skew_part(&m);
        let y = sym_part(&m);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                prop_assert_eq!(s[(i, j)], -s[(j, i)]);
                prop_assert_eq!(y[(i, j)], y[(j, i)]);
                assert_relative_eq!(s[(i, j)] + y[(i, j)], m[(i, j)], max_relative = 1e-12,
                                    epsilon = 1e-12);
            }
        }
    }

    // Any operator assembled from skew blocks annihilates the state energy:
    // the index-permutation checker reports (near-)zero violation and the
    // sampled quadratic form vanishes.
    #[test]
    fn skew_blocks_always_preserve_energy(h in skew_built_hessian()) {
        let check = energy_preserving_check(&h, 1e-13);
        prop_assert!(check.preserving, "violation {:e}", check.max_violation);
        let sampled = energy_preserving_sample_check(&h, 50, 11);
        prop_assert!(sampled <= 1e-10 * h.max_abs().max(1.0), "sampled {sampled:e}");
    }

    // The permutation checker and the sampled xᵀH(x⊗x) check agree on
    // arbitrary operators, preserving or not.
    #[test]
    fn energy_checkers_agree(n in 2usize..=5, seed in 0u64..1000) {
        let h = {
            let mut v = Vec::with_capacity(n * n * n);
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            for _ in 0..n * n * n {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                v.push(((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0);
            }
            Matrix::from_vec(n, n * n, v).unwrap()
        };
        let check = energy_preserving_check(&h, 1e-12);
        let sampled = energy_preserving_sample_check(&h, 50, 7);
        if check.preserving {
            prop_assert!(sampled <= 1e-10, "checker says preserving, samples say {sampled:e}");
        } else if check.max_violation > 1e-8 {
            // Clear violations must show up in the sampled quadratic form too.
            prop_assert!(sampled > 1e-12, "violation {:e} invisible to samples",
                         check.max_violation);
        }
    }

    // Round trip through the skew-block representation preserves the action
    // on Kronecker squares.
    #[test]
    fn skew_block_form_round_trip(h in skew_built_hessian(),
                                  xs in prop::collection::vec(-2.0f64..2.0, 5)) {
        let n = h.rows();
        let blocks = to_skew_block_form(&h, 1e-10).unwrap();
        let rebuilt = blocks_to_hessian(&blocks);
        let x: Vec<f64> = xs.iter().cycle().take(n).copied().collect();
        let k = kron_vec(&x);
        let want = h.matvec(&k);
        let got = rebuilt.matvec(&k);
        let scale = norm2(&want).max(1.0);
        prop_assert!(norm2(&want.iter().zip(&got).map(|(a, b)| a - b).collect::<Vec<_>>())
                     <= 1e-12 * scale);
    }

    // A = J − R with J skew and R = MMᵀ + I ≻ 0: the decomposition recovers
    // the factors and certifies A as Hurwitz.
    #[test]
    fn monotone_decomposition_recovers_factors(j0 in sized_square(5.0)) {
        let n = j0.rows();
        let j = &j0 - &j0.transpose();
        let r = &j0.matmul_transpose_b(&j0) + &Matrix::identity(n);
        let a = &j - &r;
        let (jhat, rhat) = monotone_decompose(&a).unwrap();
        prop_assert!((&jhat - &j).max_abs() <= 1e-10 * j.max_abs().max(1.0));
        prop_assert!((&rhat - &r).max_abs() <= 1e-10 * r.max_abs().max(1.0));
        prop_assert!(is_hurwitz(&a).unwrap().hurwitz);
    }

    // The cyclic schedule is piecewise linear between its endpoints: exact at
    // the anchors, inside [lr_min, lr_max] everywhere.
    #[test]
    fn triangular_schedule_stays_in_range(half in 1usize..500, step in 0usize..5000,
                                          lr_min in 1e-7f64..1e-4, span in 1.1f64..100.0) {
        let cfg = TrainConfig::<f64> {
            cycle_length: 2 * half,
            lr_min,
            lr_max: lr_min * span,
            ..TrainConfig::default()
        };
        assert_relative_eq!(triangular_lr(0, &cfg), cfg.lr_min, max_relative = 1e-12);
        assert_relative_eq!(triangular_lr(half, &cfg), cfg.lr_max, max_relative = 1e-12);
        assert_relative_eq!(triangular_lr(2 * half, &cfg), cfg.lr_min, max_relative = 1e-12);
        let lr = triangular_lr(step, &cfg);
        prop_assert!(lr >= cfg.lr_min - 1e-15 && lr <= cfg.lr_max + 1e-15);
    }

    // Retained energy is non-decreasing in the rank and reaches 1 at full
    // rank.
    #[test]
    fn pod_energy_is_monotone_in_rank(m in (2usize..=6, 3usize..=10)
                                          .prop_flat_map(|(n, s)| matrix(n, s, 5.0))) {
        let full = m.rows().min(m.cols());
        let basis = pod_fit(&m, PodCriterion::Rank(full)).unwrap();
        let mut prev = 0.0;
        for k in 1..=full {
            let e = basis.energy_at(k);
            prop_assert!(e >= prev - 1e-12, "energy dropped from {prev} to {e} at rank {k}");
            prev = e;
        }
        prop_assert!((basis.energy_at(full) - 1.0).abs() <= 1e-10);
    }

    // Differentiation commutes with linear projection: the stencil applied to
    // P·X equals P applied to the stencil of X. This is what justifies
    // estimating derivatives in reduced coordinates.
    #[test]
    fn differentiation_commutes_with_projection(x in matrix(4, 9, 3.0), p in matrix(2, 4, 1.0)) {
        let dt = 0.05;
        let d_then_p = p.matmul(&estimate_derivatives(&x, dt).unwrap());
        let p_then_d = estimate_derivatives(&p.matmul(&x), dt).unwrap();
        prop_assert!((&d_then_p - &p_then_d).max_abs()
                     <= 1e-10 * d_then_p.max_abs().max(1.0));
    }

    // Slicing the stacked regressor recovers its three blocks exactly.
    #[test]
    fn regressor_blocks_slice_back(x in matrix(3, 7, 4.0), u in matrix(2, 7, 4.0)) {
        let reg = assemble_regressor(&x, &u).unwrap();
        let n = x.rows();
        let kron = stable_opinf::linalg::columnwise_self_kron(&x);
        let (bx, bk, bu) = (
            reg.d.block(0, 0, n, 7),
            reg.d.block(n, 0, n * n, 7),
            reg.d.block(n + n * n, 0, u.rows(), 7),
        );
        prop_assert_eq!(bx.data(), x.data());
        prop_assert_eq!(bk.data(), kron.data());
        prop_assert_eq!(bu.data(), u.data());
    }

    // Serialization round trip is bit-exact for matrices.
    #[test]
    fn matrix_serde_round_trip(m in sized_square(1e6)) {
        let json = serde_json::to_string(&m).unwrap();
        let back: Matrix<f64> = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(m.data(), back.data());
        prop_assert_eq!((m.rows(), m.cols()), (back.rows(), back.cols()));
    }
}
