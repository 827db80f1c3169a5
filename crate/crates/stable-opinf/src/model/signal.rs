//! Input signals: damped-sinusoid specifications, the randomized families
//! used for training/test data, and the fixed test inputs of the benchmark
//! experiments.
//!
//! Randomness is reproducible and splittable: `sample_training_signals`
//! seeds one ChaCha12 generator per signal (base seed, stream = signal
//! index), so signal i is the same regardless of how many are drawn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::linalg::{norm2, Matrix};
use crate::scalar::{cast, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Waveform {
    Sin,
    Cos,
}

/// One damped sinusoid: amplitude·wave(frequency·t)·exp(−decay·t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalTerm<T> {
    pub waveform: Waveform,
    pub frequency: T,
    pub decay: T,
    pub amplitude: T,
}

impl<T: Scalar> SignalTerm<T> {
    pub fn eval(&self, t: T) -> T {
        let phase = self.frequency * t;
        let wave = match self.waveform {
            Waveform::Sin => phase.sin(),
            Waveform::Cos => phase.cos(),
        };
        self.amplitude * wave * (-self.decay * t).exp()
    }
}

/// A scalar signal u(t) = Σ terms, evaluable at any t ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec<T> {
    pub terms: Vec<SignalTerm<T>>,
}

impl<T: Scalar> SignalSpec<T> {
    pub fn new(terms: Vec<SignalTerm<T>>) -> Self {
        Self { terms }
    }

    pub fn eval(&self, t: T) -> T {
        let mut acc = T::zero();
        for term in &self.terms {
            acc += term.eval(t);
        }
        acc
    }

    pub fn sample(&self, t_grid: &[T]) -> Vec<T> {
        t_grid.iter().map(|&t| self.eval(t)).collect()
    }

    /// Upper bound on sup_{t≥0} |u(t)|: the amplitude sum, valid whenever no
    /// term grows (decay ≥ 0). Growing terms admit no finite bound.
    pub fn sup_bound(&self) -> Option<T> {
        if self.terms.iter().any(|term| term.decay < T::zero()) {
            return None;
        }
        Some(
            self.terms
                .iter()
                .fold(T::zero(), |acc, term| acc + term.amplitude.abs()),
        )
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| SignalTerm { amplitude: t.amplitude * factor, ..*t })
                .collect(),
        }
    }
}

/// Time-varying input for simulation: possibly vector-valued, with an
/// optional a-priori bound on ess sup ‖u(t)‖₂ for stability certificates.
pub trait Input<T: Scalar> {
    fn dim(&self) -> usize;
    fn eval_into(&self, t: T, out: &mut [T]);
    /// Known upper bound on ess sup_{t≥0} ‖u(t)‖₂, when available.
    fn sup_norm_bound(&self) -> Option<T> {
        None
    }
}

/// u ≡ 0 with the given channel count.
pub struct ZeroInput(pub usize);

impl<T: Scalar> Input<T> for ZeroInput {
    fn dim(&self) -> usize {
        self.0
    }

    fn eval_into(&self, _t: T, out: &mut [T]) {
        out.fill(T::zero());
    }

    fn sup_norm_bound(&self) -> Option<T> {
        Some(T::zero())
    }
}

/// One [`SignalSpec`] per input channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSignal<T> {
    pub channels: Vec<SignalSpec<T>>,
}

impl<T: Scalar> MultiSignal<T> {
    pub fn scalar(spec: SignalSpec<T>) -> Self {
        Self { channels: vec![spec] }
    }
}

impl<T: Scalar> Input<T> for MultiSignal<T> {
    fn dim(&self) -> usize {
        self.channels.len()
    }

    fn eval_into(&self, t: T, out: &mut [T]) {
        for (o, c) in out.iter_mut().zip(&self.channels) {
            *o = c.eval(t);
        }
    }

    fn sup_norm_bound(&self) -> Option<T> {
        // ‖u(t)‖₂ ≤ ‖(b₁,…,b_m)‖₂ for per-channel bounds bᵢ.
        let bounds: Option<Vec<T>> = self.channels.iter().map(|c| c.sup_bound()).collect();
        bounds.map(|b| norm2(&b))
    }
}

impl<T: Scalar> Input<T> for SignalSpec<T> {
    fn dim(&self) -> usize {
        1
    }

    fn eval_into(&self, t: T, out: &mut [T]) {
        out[0] = self.eval(t);
    }

    fn sup_norm_bound(&self) -> Option<T> {
        self.sup_bound()
    }
}

/// Closure-backed input for tests and ad-hoc experiments.
pub struct FnInput<T, F> {
    pub m: usize,
    pub f: F,
    pub bound: Option<T>,
}

impl<T: Scalar, F: Fn(T, &mut [T])> Input<T> for FnInput<T, F> {
    fn dim(&self) -> usize {
        self.m
    }

    fn eval_into(&self, t: T, out: &mut [T]) {
        (self.f)(t, out)
    }

    fn sup_norm_bound(&self) -> Option<T> {
        self.bound
    }
}

/// Piecewise-linear interpolation through samples on a time grid (clamped
/// outside the grid). `values` is m×N, one column per sample time.
#[derive(Debug, Clone)]
pub struct SampledInput<T> {
    pub t_grid: Vec<T>,
    pub values: Matrix<T>,
}

impl<T: Scalar> Input<T> for SampledInput<T> {
    fn dim(&self) -> usize {
        self.values.rows()
    }

    fn eval_into(&self, t: T, out: &mut [T]) {
        let n = self.t_grid.len();
        debug_assert_eq!(self.values.cols(), n);
        if t <= self.t_grid[0] {
            for (i, o) in out.iter_mut().enumerate() {
                *o = self.values[(i, 0)];
            }
            return;
        }
        if t >= self.t_grid[n - 1] {
            for (i, o) in out.iter_mut().enumerate() {
                *o = self.values[(i, n - 1)];
            }
            return;
        }
        let k = match self.t_grid.partition_point(|&tk| tk <= t) {
            0 => 1,
            k => k,
        };
        let (t0, t1) = (self.t_grid[k - 1], self.t_grid[k]);
        let w = (t - t0) / (t1 - t0);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.values[(i, k - 1)] * (T::one() - w) + self.values[(i, k)] * w;
        }
    }

    fn sup_norm_bound(&self) -> Option<T> {
        // Interpolated values are convex combinations of sample columns.
        let mut best = T::zero();
        for j in 0..self.values.cols() {
            best = best.max(norm2(&self.values.col(j)));
        }
        Some(best)
    }
}

/// The randomized input families used for data generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalFamily {
    /// sin(f₁t)e^{−f₂t} + sin(g₁t)e^{−g₂t}; f integers in {0,…,5}, g reals
    /// in [0, 0.5].
    Example2d,
    /// sin(f₁t)e^{−g₁t} + sin(f₂t)e^{−g₂t}; f ~ N(0, variance 2), g ~
    /// U(0.1, 1.1).
    BurgersTrain,
    /// The training form plus one cos(f₃t)e^{−g₃t} term, same distributions.
    BurgersTest,
}

/// Draws `count` independent signal specs; deterministic per (family, seed),
/// and signal i does not depend on `count`.
pub fn sample_training_signals<T: Scalar>(
    family: SignalFamily,
    count: usize,
    seed: u64,
) -> Vec<SignalSpec<T>> {
    // Variance 2 → standard deviation √2 for the frequency draws.
    let normal = Normal::new(0.0f64, 2.0f64.sqrt()).expect("valid std");
    (0..count)
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            match family {
                SignalFamily::Example2d => {
                    let f1 = rng.random_range(0..=5) as f64;
                    let f2 = rng.random_range(0..=5) as f64;
                    let g1 = rng.random_range(0.0..0.5);
                    let g2 = rng.random_range(0.0..0.5);
                    SignalSpec::new(vec![
                        sin_term(f1, f2),
                        sin_term(g1, g2),
                    ])
                }
                SignalFamily::BurgersTrain => {
                    let f1 = normal.sample(&mut rng);
                    let f2 = normal.sample(&mut rng);
                    let g1 = rng.random_range(0.1..1.1);
                    let g2 = rng.random_range(0.1..1.1);
                    SignalSpec::new(vec![sin_term(f1, g1), sin_term(f2, g2)])
                }
                SignalFamily::BurgersTest => {
                    let f1 = normal.sample(&mut rng);
                    let f2 = normal.sample(&mut rng);
                    let f3 = normal.sample(&mut rng);
                    let g1 = rng.random_range(0.1..1.1);
                    let g2 = rng.random_range(0.1..1.1);
                    let g3 = rng.random_range(0.1..1.1);
                    SignalSpec::new(vec![
                        sin_term(f1, g1),
                        sin_term(f2, g2),
                        cos_term(f3, g3),
                    ])
                }
            }
        })
        .collect()
}

fn sin_term<T: Scalar>(frequency: f64, decay: f64) -> SignalTerm<T> {
    SignalTerm {
        waveform: Waveform::Sin,
        frequency: cast(frequency),
        decay: cast(decay),
        amplitude: T::one(),
    }
}

fn cos_term<T: Scalar>(frequency: f64, decay: f64) -> SignalTerm<T> {
    SignalTerm {
        waveform: Waveform::Cos,
        frequency: cast(frequency),
        decay: cast(decay),
        amplitude: T::one(),
    }
}

/// The four fixed test inputs of the low-dimensional experiments. `w1`/`w2`
/// are the high-magnitude (10×) variants used for stress-testing stability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedTestSignals<T> {
    pub u1: SignalSpec<T>,
    pub u2: SignalSpec<T>,
    pub w1: SignalSpec<T>,
    pub w2: SignalSpec<T>,
}

pub fn fixed_test_signals<T: Scalar>() -> FixedTestSignals<T> {
    let term = |waveform, frequency: f64, decay: f64, amplitude: f64| SignalTerm {
        waveform,
        frequency: cast::<T>(frequency),
        decay: cast::<T>(decay),
        amplitude: cast::<T>(amplitude),
    };
    // u1(t) = sin(t)e^{−0.2t} + sin(2t)e^{−0.6t} + cos(3t)e^{−t}
    let u1 = SignalSpec::new(vec![
        term(Waveform::Sin, 1.0, 0.2, 1.0),
        term(Waveform::Sin, 2.0, 0.6, 1.0),
        term(Waveform::Cos, 3.0, 1.0, 1.0),
    ]);
    // u2(t) = −sin(2t)e^{−0.1t} − sin(t)e^{−0.3t} + cos(4t)e^{−0.5t}
    let u2 = SignalSpec::new(vec![
        term(Waveform::Sin, 2.0, 0.1, -1.0),
        term(Waveform::Sin, 1.0, 0.3, -1.0),
        term(Waveform::Cos, 4.0, 0.5, 1.0),
    ]);
    let w1 = u1.scaled(cast(10.0));
    let w2 = u2.scaled(cast(10.0));
    FixedTestSignals { u1, u2, w1, w2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_signals_evaluate_at_zero() {
        let s = fixed_test_signals::<f64>();
        // sin(0) + sin(0) + cos(0) = 1 for u1; −0 − 0 + 1 = 1 for u2.
        assert!((s.u1.eval(0.0) - 1.0).abs() < 1e-15);
        assert!((s.u2.eval(0.0) - 1.0).abs() < 1e-15);
        assert!((s.w1.eval(0.0) - 10.0).abs() < 1e-14);
        assert!((s.w2.eval(0.0) - 10.0).abs() < 1e-14);
    }

    #[test]
    fn fixed_signal_hand_value_at_one() {
        let s = fixed_test_signals::<f64>();
        let expected = 1.0f64.sin() * (-0.2f64).exp()
            + 2.0f64.sin() * (-0.6f64).exp()
            + 3.0f64.cos() * (-1.0f64).exp();
        assert!((s.u1.eval(1.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn sup_bound_caps_sampled_values() {
        let s = fixed_test_signals::<f64>();
        for spec in [&s.u1, &s.u2, &s.w1, &s.w2] {
            let bound = spec.sup_bound().unwrap();
            for k in 0..=1000 {
                let t = k as f64 * 0.01;
                assert!(spec.eval(t).abs() <= bound + 1e-12);
            }
        }
        assert_eq!(s.w1.sup_bound().unwrap(), 30.0);
    }

    #[test]
    fn sampling_is_deterministic_and_stable_under_count() {
        let a = sample_training_signals::<f64>(SignalFamily::BurgersTrain, 5, 42);
        let b = sample_training_signals::<f64>(SignalFamily::BurgersTrain, 5, 42);
        assert_eq!(a, b);
        // Drawing more signals must not change the earlier ones.
        let c = sample_training_signals::<f64>(SignalFamily::BurgersTrain, 8, 42);
        assert_eq!(&c[..5], &a[..]);
        // Different seed → different draws.
        let d = sample_training_signals::<f64>(SignalFamily::BurgersTrain, 5, 43);
        assert_ne!(a, d);
    }

    #[test]
    fn family_term_structure() {
        let train = sample_training_signals::<f64>(SignalFamily::BurgersTrain, 4, 1);
        for s in &train {
            assert_eq!(s.terms.len(), 2);
            assert!(s.terms.iter().all(|t| t.waveform == Waveform::Sin));
            for t in &s.terms {
                assert!(t.decay >= 0.1 && t.decay < 1.1);
            }
        }
        let test = sample_training_signals::<f64>(SignalFamily::BurgersTest, 4, 1);
        for s in &test {
            assert_eq!(s.terms.len(), 3);
            assert_eq!(s.terms[2].waveform, Waveform::Cos);
        }
        let ex = sample_training_signals::<f64>(SignalFamily::Example2d, 10, 1);
        for s in &ex {
            assert_eq!(s.terms.len(), 2);
            let f1 = s.terms[0].frequency;
            let f2 = s.terms[0].decay;
            assert_eq!(f1, f1.round());
            assert_eq!(f2, f2.round());
            assert!((0.0..=5.0).contains(&f1) && (0.0..=5.0).contains(&f2));
            assert!((0.0..0.5).contains(&s.terms[1].frequency));
            assert!((0.0..0.5).contains(&s.terms[1].decay));
        }
    }

    #[test]
    fn sampled_input_interpolates_linearly() {
        let inp = SampledInput {
            t_grid: vec![0.0, 1.0, 2.0],
            values: Matrix::from_rows(&[&[0.0, 2.0, 0.0]]),
        };
        let mut out = [0.0f64];
        inp.eval_into(0.5, &mut out);
        assert!((out[0] - 1.0).abs() < 1e-15);
        inp.eval_into(1.75, &mut out);
        assert!((out[0] - 0.5).abs() < 1e-15);
        // Clamped ends.
        inp.eval_into(-1.0, &mut out);
        assert_eq!(out[0], 0.0);
        inp.eval_into(5.0, &mut out);
        assert_eq!(out[0], 0.0);
        assert_eq!(Input::<f64>::sup_norm_bound(&inp), Some(2.0));
    }

    #[test]
    fn multi_signal_bound_is_vector_norm_of_channel_bounds() {
        let s = fixed_test_signals::<f64>();
        let multi = MultiSignal { channels: vec![s.u1.clone(), s.u1.clone()] };
        let expected = (2.0f64 * 9.0).sqrt(); // each channel bound 3
        assert!((Input::<f64>::sup_norm_bound(&multi).unwrap() - expected).abs() < 1e-12);
    }
}
