//! Additive i.i.d. Gaussian measurement noise, deterministic per seed.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::{cast, Scalar};
use crate::Matrix;

/// Perturbs every entry of `x` with independent N(0, sigma²) noise drawn
/// from a counter-based generator seeded with `seed`. `sigma = 0` returns
/// the input unchanged.
pub fn add_noise<T: Scalar>(x: &Matrix<T>, sigma: T, seed: u64) -> Matrix<T> {
    assert!(sigma >= T::zero(), "add_noise: sigma must be nonnegative");
    if sigma == T::zero() {
        return x.clone();
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = x.clone();
    for v in out.data_mut() {
        let g: f64 = StandardNormal.sample(&mut rng);
        *v += sigma * cast::<T>(g);
    }
    out
}
