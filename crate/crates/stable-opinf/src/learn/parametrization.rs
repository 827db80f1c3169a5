//! The unconstrained parametrization of certified quadratic systems and the
//! analytic gradient of the inference loss through it.
//!
//! Free matrices (J̄, R̄, H̄₁…H̄ₙ, B̂, optionally Q̄) materialize as
//!   J = J̄ − J̄ᵀ (skew), R = R̄R̄ᵀ + ε_R·I (positive definite),
//!   Hₖ = H̄ₖ − H̄ₖᵀ (skew), A = J − R, H = [H₁ … Hₙ], B = B̂,
//! and, in generalized mode with Q = Q̄Q̄ᵀ + ε_R·I,
//!   A = (J − R)·Q, H = [H₁Q … HₙQ].
//! Every point of the free space materializes to a system satisfying the
//! trapping-radius certificate hypotheses — optimization never leaves the
//! certified class.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::SnapshotDataset;
use crate::error::{Error, Result};
use crate::linalg::{columnwise_self_kron, skew_part, Matrix};
use crate::scalar::{cast, Scalar};
use crate::QuadraticControlSystem;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StableParametrization<T> {
    pub jbar: Matrix<T>,
    pub rbar: Matrix<T>,
    /// One free matrix per state dimension; block k of H comes from H̄ₖ.
    pub hbar: Vec<Matrix<T>>,
    pub bhat: Matrix<T>,
    /// Present in generalized mode only.
    pub qbar: Option<Matrix<T>>,
}

impl<T: Scalar> StableParametrization<T> {
    pub fn zeros(n: usize, m: usize, generalized: bool) -> Self {
        Self {
            jbar: Matrix::zeros(n, n),
            rbar: Matrix::zeros(n, n),
            hbar: (0..n).map(|_| Matrix::zeros(n, n)).collect(),
            bhat: Matrix::zeros(n, m),
            qbar: generalized.then(|| Matrix::zeros(n, n)),
        }
    }

    /// Draws every free entry i.i.d. N(0, std²) in a fixed order, so the
    /// initialization is deterministic per generator state.
    pub fn random<R: Rng>(n: usize, m: usize, generalized: bool, std: T, rng: &mut R) -> Self {
        let mut draw = |rows: usize, cols: usize| {
            Matrix::from_fn(rows, cols, |_, _| {
                std * cast::<T>(<StandardNormal as Distribution<f64>>::sample(
                    &StandardNormal,
                    rng,
                ))
            })
        };
        let jbar = draw(n, n);
        let rbar = draw(n, n);
        let hbar = (0..n).map(|_| draw(n, n)).collect();
        let bhat = draw(n, m);
        let qbar = generalized.then(|| draw(n, n));
        Self { jbar, rbar, hbar, bhat, qbar }
    }

    pub fn state_dim(&self) -> usize {
        self.jbar.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.bhat.cols()
    }

    pub fn is_generalized(&self) -> bool {
        self.qbar.is_some()
    }

    /// Q = Q̄Q̄ᵀ + floor·I (generalized mode only).
    pub fn q_matrix(&self, floor: T) -> Option<Matrix<T>> {
        self.qbar.as_ref().map(|qbar| {
            let mut q = qbar.matmul_transpose_b(qbar);
            for i in 0..q.rows() {
                q[(i, i)] += floor;
            }
            q
        })
    }

    /// Total function from the free space onto certified systems.
    pub fn materialize(&self, r_floor: T) -> QuadraticControlSystem<T> {
        let n = self.state_dim();
        let mut j_minus_r = &self.jbar - &self.jbar.transpose();
        let rr = self.rbar.matmul_transpose_b(&self.rbar);
        for i in 0..n {
            for l in 0..n {
                j_minus_r[(i, l)] -= rr[(i, l)];
            }
            j_minus_r[(i, i)] -= r_floor;
        }
        let q = self.q_matrix(r_floor);
        let a = match &q {
            Some(q) => j_minus_r.matmul(q),
            None => j_minus_r,
        };
        let mut h = Matrix::zeros(n, n * n);
        for (k, hbar_k) in self.hbar.iter().enumerate() {
            let hk = hbar_k - &hbar_k.transpose();
            let block = match &q {
                Some(q) => hk.matmul(q),
                None => hk,
            };
            h.set_block(0, k * n, &block);
        }
        QuadraticControlSystem::new(a, h, self.bhat.clone())
            .expect("materialization is total on finite parametrizations")
    }

    /// Entrywise map over the free matrices, pairing `self` with `other`
    /// (used for optimizer updates; shapes must match).
    pub fn zip_apply(&mut self, other: &Self, mut f: impl FnMut(&mut T, T)) {
        for (a, b) in self.free_iter_mut().zip(other.free_iter()) {
            for (x, y) in a.data_mut().iter_mut().zip(b.data().iter()) {
                f(x, *y);
            }
        }
    }

    pub fn free_iter(&self) -> impl Iterator<Item = &Matrix<T>> {
        [&self.jbar, &self.rbar]
            .into_iter()
            .chain(self.hbar.iter())
            .chain(std::iter::once(&self.bhat))
            .chain(self.qbar.iter())
    }

    pub fn free_iter_mut(&mut self) -> impl Iterator<Item = &mut Matrix<T>> {
        [&mut self.jbar, &mut self.rbar]
            .into_iter()
            .chain(self.hbar.iter_mut())
            .chain(std::iter::once(&mut self.bhat))
            .chain(self.qbar.iter_mut())
    }

    /// Number of free scalar parameters.
    pub fn free_len(&self) -> usize {
        self.free_iter().map(|m| m.data().len()).sum()
    }
}

/// Residual-relevant slices of a dataset, with the column-wise self-Kronecker
/// X⊗̃X precomputed once (it is reused every loss/gradient evaluation).
pub struct LossData<T> {
    pub x: Matrix<T>,
    pub u: Matrix<T>,
    pub xdot: Matrix<T>,
    pub kron: Matrix<T>,
}

impl<T: Scalar> LossData<T> {
    pub fn from_dataset(dataset: &SnapshotDataset<T>) -> Result<Self> {
        let xdot = dataset.require_xdot()?.clone();
        Ok(Self {
            x: dataset.x.clone(),
            u: dataset.u.clone(),
            xdot,
            kron: columnwise_self_kron(&dataset.x),
        })
    }

    pub fn check_dims(&self, n: usize, m: usize) -> Result<()> {
        if self.x.rows() != n || self.u.rows() != m {
            return Err(Error::DimensionMismatch(format!(
                "loss data is {}-state/{}-input, parametrization is {n}-state/{m}-input",
                self.x.rows(),
                self.u.rows()
            )));
        }
        Ok(())
    }
}

/// Residual E = Ẋ − A·X − H·(X⊗̃X) − B·U for a materialized system.
fn residual<T: Scalar>(sys: &QuadraticControlSystem<T>, data: &LossData<T>) -> Matrix<T> {
    let mut e = data.xdot.clone();
    let ax = sys.a.matmul(&data.x);
    let hk = sys.h.matmul(&data.kron);
    let bu = sys.b.matmul(&data.u);
    for (ei, (axi, (hki, bui))) in e
        .data_mut()
        .iter_mut()
        .zip(ax.data().iter().zip(hk.data().iter().zip(bu.data().iter())))
    {
        *ei = *ei - *axi - *hki - *bui;
    }
    e
}

/// ‖Ẋ − AX − H(X⊗̃X) − BU‖_F + l1_weight·‖H‖₁ with (A, H, B) materialized
/// from `p`. The l1 term penalizes the materialized H, not the free H̄ₖ.
pub fn loss<T: Scalar>(
    p: &StableParametrization<T>,
    data: &LossData<T>,
    l1_weight: T,
    r_floor: T,
) -> Result<T> {
    data.check_dims(p.state_dim(), p.input_dim())?;
    let sys = p.materialize(r_floor);
    let e = residual(&sys, data);
    Ok(e.frobenius_norm() + l1_weight * sys.h.l1_norm())
}

fn sign<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Loss together with its analytic gradient with respect to every free
/// matrix (chain rule through the skew maps, the Gram products, the block
/// concatenation, and — in generalized mode — the right-multiplication by
/// Q). The l1 term uses the sign subgradient with sign(0) = 0.
pub fn loss_and_gradient<T: Scalar>(
    p: &StableParametrization<T>,
    data: &LossData<T>,
    l1_weight: T,
    r_floor: T,
) -> Result<(T, StableParametrization<T>)> {
    data.check_dims(p.state_dim(), p.input_dim())?;
    let n = p.state_dim();
    let sys = p.materialize(r_floor);
    let e = residual(&sys, data);
    let fro = e.frobenius_norm();
    let loss = fro + l1_weight * sys.h.l1_norm();

    // d‖E‖_F/dE = E/‖E‖_F; at an exactly zero residual the subgradient 0 is
    // used so only the l1 term steers.
    let w = if fro > T::zero() { e.scale(T::one() / fro) } else { e };

    // Gradients with respect to the materialized operators.
    let g_a = -&w.matmul_transpose_b(&data.x);
    let mut g_h = -&w.matmul_transpose_b(&data.kron);
    for (gh, h) in g_h.data_mut().iter_mut().zip(sys.h.data().iter()) {
        *gh += l1_weight * sign(*h);
    }
    let g_b = -&w.matmul_transpose_b(&data.u);

    let mut grad = StableParametrization::zeros(n, p.input_dim(), p.is_generalized());
    grad.bhat = g_b;

    let q = p.q_matrix(r_floor);
    // dL/d(J−R) and per-block dL/dHₖ; identical to the operator gradients
    // in monotone mode, right-multiplied by Q (symmetric) in generalized
    // mode since A = (J−R)·Q and block k of H is Hₖ·Q.
    let g_s = match &q {
        Some(q) => g_a.matmul(q),
        None => g_a.clone(),
    };
    grad.jbar = &g_s - &g_s.transpose();
    grad.rbar = (-&(&g_s + &g_s.transpose())).matmul(&p.rbar);

    let mut g_q = match &q {
        Some(_) => {
            // Contribution of A = S·Q: Sᵀ·G_A with S = J − R.
            let mut s = skew_part(&p.jbar).scale(cast::<T>(2.0));
            let rr = p.rbar.matmul_transpose_b(&p.rbar);
            for i in 0..n {
                for l in 0..n {
                    s[(i, l)] -= rr[(i, l)];
                }
                s[(i, i)] -= r_floor;
            }
            Some(s.matmul_transpose_a(&g_a))
        }
        None => None,
    };

    for k in 0..n {
        let g_block = g_h.block(0, k * n, n, n);
        let g_hk = match &q {
            Some(q) => g_block.matmul(q),
            None => g_block.clone(),
        };
        grad.hbar[k] = &g_hk - &g_hk.transpose();
        if let Some(g_q) = g_q.as_mut() {
            // Contribution of block k = Hₖ·Q: Hₖᵀ·Gₖ.
            let hk = &p.hbar[k] - &p.hbar[k].transpose();
            let term = hk.matmul_transpose_a(&g_block);
            for (gq, t) in g_q.data_mut().iter_mut().zip(term.data().iter()) {
                *gq += *t;
            }
        }
    }

    if let Some(g_q) = g_q {
        // Q = Q̄Q̄ᵀ: dL/dQ̄ = (G_Q + G_Qᵀ)·Q̄.
        let qbar = p.qbar.as_ref().expect("g_q only exists in generalized mode");
        grad.qbar = Some((&g_q + &g_q.transpose()).matmul(qbar));
    }

    Ok((loss, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::example_one;
    use crate::stability::{energy_preserving_check, monotone_decompose};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn random_loss_data(rng: &mut ChaCha12Rng, n: usize, m: usize, samples: usize) -> LossData<f64> {
        let x = Matrix::from_fn(n, samples, |_, _| rng.random_range(-1.0..1.0));
        let u = Matrix::from_fn(m, samples, |_, _| rng.random_range(-1.0..1.0));
        let xdot = Matrix::from_fn(n, samples, |_, _| rng.random_range(-1.0..1.0));
        let kron = columnwise_self_kron(&x);
        LossData { x, u, xdot, kron }
    }

    #[test]
    fn zero_parametrization_materializes_to_floor() {
        let p = StableParametrization::<f64>::zeros(3, 2, false);
        let sys = p.materialize(1e-8);
        assert!((&sys.a + &Matrix::identity(3).scale(1e-8)).max_abs() == 0.0);
        assert_eq!(sys.h.max_abs(), 0.0);
        assert_eq!(sys.b.max_abs(), 0.0);
        assert!(monotone_decompose(&sys.a).is_ok());
    }

    #[test]
    fn hand_inverted_parametrization_reproduces_first_benchmark() {
        // J̄ = [[0,1],[0,0]] gives J = [[0,1],[−1,0]]; R̄ = diag(1,√2)
        // gives R = diag(1,2); H̄₁ = [[0,1],[0,0]] gives H₁ = [[0,1],[−1,0]].
        let p = StableParametrization::<f64> {
            jbar: Matrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
            rbar: Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 2.0_f64.sqrt()]]),
            hbar: vec![
                Matrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
                Matrix::zeros(2, 2),
            ],
            bhat: Matrix::from_rows(&[&[1.0], &[1.0]]),
            qbar: None,
        };
        let sys = p.materialize(0.0);
        let want = example_one::<f64>();
        assert!((&sys.a - &want.a).max_abs() < 1e-15);
        assert!((&sys.h - &want.h).max_abs() < 1e-15);
        assert_eq!(sys.b, want.b);
    }

    #[test]
    fn every_random_parametrization_is_certified() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for round in 0..100usize {
            let n = 2 + round % 5;
            let generalized = round % 3 == 0;
            let p = StableParametrization::<f64>::random(n, 1 + round % 2, generalized, 0.1, &mut rng);
            let sys = p.materialize(1e-8);
            let q = p.q_matrix(1e-8);
            match q {
                None => {
                    assert!(monotone_decompose(&sys.a).is_ok());
                    let check = energy_preserving_check(&sys.h, 1e-13);
                    assert!(check.preserving, "violation {}", check.max_violation);
                }
                Some(q) => {
                    assert!(
                        crate::stability::generalized_certificate(&sys, &q).is_ok(),
                        "generalized materialization must certify"
                    );
                }
            }
        }
    }

    #[test]
    fn loss_at_generating_system_is_pure_regularization() {
        // Build data exactly from a materialized system; the residual term
        // vanishes and only l1·‖H‖₁ remains.
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let p = StableParametrization::<f64>::random(2, 1, false, 0.4, &mut rng);
        let sys = p.materialize(1e-8);
        let x = Matrix::from_fn(2, 30, |_, _| rng.random_range(-1.0..1.0));
        let u = Matrix::from_fn(1, 30, |_, _| rng.random_range(-1.0..1.0));
        let kron = columnwise_self_kron(&x);
        let mut xdot = sys.a.matmul(&x);
        let hk = sys.h.matmul(&kron);
        let bu = sys.b.matmul(&u);
        for (d, (h, b)) in xdot.data_mut().iter_mut().zip(hk.data().iter().zip(bu.data())) {
            *d += *h + *b;
        }
        let data = LossData { x, u, xdot, kron };
        let l = loss(&p, &data, 1e-4, 1e-8).unwrap();
        assert!((l - 1e-4 * sys.h.l1_norm()).abs() < 1e-12);
        // With zero weight the loss is exactly the (zero) residual norm.
        assert!(loss(&p, &data, 0.0, 1e-8).unwrap() < 1e-12);
    }

    #[test]
    fn zero_everything_gives_zero_loss_and_gradient_of_residual() {
        let p = StableParametrization::<f64>::zeros(2, 1, false);
        let data = LossData {
            x: Matrix::zeros(2, 5),
            u: Matrix::zeros(1, 5),
            xdot: Matrix::zeros(2, 5),
            kron: Matrix::zeros(4, 5),
        };
        let (l, g) = loss_and_gradient(&p, &data, 1e-4, 0.0).unwrap();
        assert_eq!(l, 0.0);
        for m in g.free_iter() {
            assert_eq!(m.max_abs(), 0.0);
        }
    }

    fn fd_check(generalized: bool, seed: u64) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let n = 2 + (seed as usize) % 2;
        let m = 1 + (seed as usize) % 2;
        let p = StableParametrization::<f64>::random(n, m, generalized, 0.3, &mut rng);
        let data = random_loss_data(&mut rng, n, m, 10);
        let (_, grad) = loss_and_gradient(&p, &data, 1e-4, 1e-8).unwrap();
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        let num_free = p.free_len();
        for idx in 0..num_free {
            let probe = |delta: f64| {
                let mut q = p.clone();
                let mut seen = 0;
                for mat in q.free_iter_mut() {
                    let len = mat.data().len();
                    if idx < seen + len {
                        mat.data_mut()[idx - seen] += delta;
                        break;
                    }
                    seen += len;
                }
                loss(&q, &data, 1e-4, 1e-8).unwrap()
            };
            let fd = (probe(h) - probe(-h)) / (2.0 * h);
            let mut seen = 0;
            let mut analytic = 0.0;
            for mat in grad.free_iter() {
                let len = mat.data().len();
                if idx < seen + len {
                    analytic = mat.data()[idx - seen];
                    break;
                }
                seen += len;
            }
            let denom = fd.abs().max(analytic.abs());
            let err = (fd - analytic).abs();
            if err > 1e-9 {
                worst = worst.max(err / denom);
                assert!(
                    err <= 1e-5 * denom,
                    "entry {idx}: analytic {analytic} vs fd {fd} (rel {})",
                    err / denom
                );
            }
        }
        assert!(worst <= 1e-5, "worst relative gradient error {worst}");
    }

    #[test]
    fn gradient_matches_finite_differences_monotone() {
        for seed in 0..4 {
            fd_check(false, seed);
        }
    }

    #[test]
    fn gradient_matches_finite_differences_generalized() {
        for seed in 10..14 {
            fd_check(true, seed);
        }
    }

    #[test]
    fn residual_gradient_is_homogeneous_in_data_scale() {
        // At the zero parametrization (with zero floor) the residual is Ẋ
        // itself, so the Frobenius-norm loss is exactly linear in the scale
        // of Ẋ — a cheap algebraic consistency check of the norm (rather
        // than squared-norm) formulation.
        let data = {
            let mut rng = ChaCha12Rng::seed_from_u64(8);
            random_loss_data(&mut rng, 2, 1, 12)
        };
        let p = StableParametrization::<f64>::zeros(2, 1, false);
        let (l1, _) = loss_and_gradient(&p, &data, 0.0, 0.0).unwrap();
        let scaled = LossData {
            x: data.x.clone(),
            u: data.u.clone(),
            xdot: data.xdot.scale(2.0),
            kron: data.kron.clone(),
        };
        let (l2, _) = loss_and_gradient(&p, &scaled, 0.0, 0.0).unwrap();
        assert!((l2 - 2.0 * l1).abs() < 1e-12);
    }
}
