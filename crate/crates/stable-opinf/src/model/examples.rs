//! The two fixed low-dimensional benchmark systems.

use crate::linalg::Matrix;
use crate::model::QuadraticControlSystem;
use crate::scalar::{cast, Scalar};

/// 2-state, 1-input system with a rotational quadratic coupling:
/// A = [[−1, 1], [−1, −2]], H = [[0, 1, 0, 0], [−1, 0, 0, 0]], B = [1; 1].
/// A splits as J − R with J = [[0,1],[−1,0]], R = diag(1, 2), and H is
/// energy-preserving (xᵀH(x⊗x) = x₁²x₂ − x₁²x₂ = 0).
pub fn example_one<T: Scalar>() -> QuadraticControlSystem<T> {
    let a = Matrix::from_rows(&[
        &[cast::<T>(-1.0), cast::<T>(1.0)],
        &[cast::<T>(-1.0), cast::<T>(-2.0)],
    ]);
    let h = Matrix::from_rows(&[
        &[T::zero(), T::one(), T::zero(), T::zero()],
        &[-T::one(), T::zero(), T::zero(), T::zero()],
    ]);
    let b = Matrix::from_rows(&[&[T::one()], &[T::one()]]);
    QuadraticControlSystem::new(a, h, b).expect("fixed dimensions")
}

/// Same quadratic and input operators as [`example_one`] with A scaled by
/// 0.01: much weaker damping (σ_min(R) = 0.01), so bounded inputs can push
/// the state two orders of magnitude further.
pub fn example_two<T: Scalar>() -> QuadraticControlSystem<T> {
    let one = example_one::<T>();
    QuadraticControlSystem::new(one.a.scale(cast(0.01)), one.h, one.b).expect("fixed dimensions")
}
