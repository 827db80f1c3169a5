//! Time-derivative estimation by 5-point, 4th-order finite-difference
//! stencils on uniform grids: central differences at interior samples and
//! one-sided stencils of the same order at the two first and two last
//! samples. Exact (to rounding) on polynomials of degree ≤ 4.

use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};
use crate::Matrix;

/// Spacing of a uniform grid; rejects grids with fewer than two points or
/// any interval deviating from the mean spacing by more than 1e-9 relative.
pub fn uniform_spacing<T: Scalar>(t_grid: &[T]) -> Result<T> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidArgument(
            "uniform_spacing: at least two time stamps required".into(),
        ));
    }
    let span = t_grid[t_grid.len() - 1] - t_grid[0];
    let dt = span / cast::<T>((t_grid.len() - 1) as f64);
    if !(dt > T::zero()) {
        return Err(Error::InvalidArgument(
            "uniform_spacing: grid must be strictly increasing".into(),
        ));
    }
    let tol = cast::<T>(1e-9) * dt;
    for w in t_grid.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "uniform_spacing: non-uniform grid (interval {} vs mean {})",
                w[1] - w[0],
                dt
            )));
        }
    }
    Ok(dt)
}

/// Differentiates each row of `x` (one variable per row, one sample per
/// column) on a uniform grid with spacing `dt`. Requires at least 5 samples.
pub fn estimate_derivatives<T: Scalar>(x: &Matrix<T>, dt: T) -> Result<Matrix<T>> {
    let samples = x.cols();
    if samples < 5 {
        return Err(Error::InvalidArgument(format!(
            "estimate_derivatives: need at least 5 samples, got {samples}"
        )));
    }
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::InvalidArgument("estimate_derivatives: dt must be positive".into()));
    }
    // All stencils share the 1/(12·dt) scale.
    let scale = T::one() / (cast::<T>(12.0) * dt);
    let c = |v: f64| cast::<T>(v);
    // One-sided weights at offsets 0..5 from the boundary sample.
    let first = [c(-25.0), c(48.0), c(-36.0), c(16.0), c(-3.0)];
    let second = [c(-3.0), c(-10.0), c(18.0), c(-6.0), c(1.0)];
    let central = [c(1.0), c(-8.0), c(8.0), c(-1.0)];

    let mut out = Matrix::zeros(x.rows(), samples);
    for i in 0..x.rows() {
        let row = x.row(i);
        let stencil5 =
            |w: &[T; 5], base: usize| (0..5).map(|j| w[j] * row[base + j]).fold(T::zero(), |a, b| a + b);
        out[(i, 0)] = scale * stencil5(&first, 0);
        out[(i, 1)] = scale * stencil5(&second, 0);
        for k in 2..samples - 2 {
            let v = central[0] * row[k - 2]
                + central[1] * row[k - 1]
                + central[2] * row[k + 1]
                + central[3] * row[k + 2];
            out[(i, k)] = scale * v;
        }
        // Right boundary: mirror the left stencils (reverse offsets, flip
        // signs).
        let last = samples - 1;
        let stencil5_rev = |w: &[T; 5], base: usize| {
            (0..5).map(|j| -w[j] * row[base - j]).fold(T::zero(), |a, b| a + b)
        };
        out[(i, last - 1)] = scale * stencil5_rev(&second, last);
        out[(i, last)] = scale * stencil5_rev(&first, last);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::uniform_grid;

    fn sample_fn(f: impl Fn(f64) -> f64, grid: &[f64]) -> Matrix<f64> {
        Matrix::from_fn(1, grid.len(), |_, k| f(grid[k]))
    }

    #[test]
    fn exact_on_quadratic_at_interior() {
        let grid = uniform_grid(0.0, 1.0, 11);
        let x = sample_fn(|t| t * t, &grid);
        let xdot = estimate_derivatives(&x, 0.1).unwrap();
        // t = 0.3 is the interior sample k = 3; derivative 0.6.
        assert!((xdot[(0, 3)] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn exact_on_quartics_everywhere() {
        let grid = uniform_grid(-1.0, 1.0, 17);
        let dt = uniform_spacing(&grid).unwrap();
        let x = sample_fn(|t| t.powi(4) - 2.0 * t.powi(3) + 0.5 * t * t - t + 3.0, &grid);
        let want = sample_fn(|t| 4.0 * t.powi(3) - 6.0 * t * t + t - 1.0, &grid);
        let got = estimate_derivatives(&x, dt).unwrap();
        assert!((&got - &want).max_abs() < 1e-9, "max error {}", (&got - &want).max_abs());
    }

    #[test]
    fn sine_error_within_taylor_bound() {
        let dt = 0.01;
        let grid = uniform_grid(0.0, 1.0, 101);
        let x = sample_fn(f64::sin, &grid);
        let got = estimate_derivatives(&x, dt).unwrap();
        let want = sample_fn(f64::cos, &grid);
        let err = (&got - &want).max_abs();
        assert!(err <= 5.0 * dt.powi(4), "error {err} above 5·dt⁴ = {}", 5.0 * dt.powi(4));
    }

    #[test]
    fn fourth_order_convergence() {
        // Halving dt must cut the error by ~16; require observed order ≥ 3.5
        // across dt ∈ {0.1, 0.05, 0.025} on a smooth non-polynomial signal.
        let mut errors = Vec::new();
        for &dt in &[0.1_f64, 0.05, 0.025] {
            let count = (2.0 / dt).round() as usize + 1;
            let grid = uniform_grid(0.0, 2.0, count);
            let x = sample_fn(|t| (1.3 * t).sin() * (-0.4 * t).exp(), &grid);
            let want = sample_fn(
                |t| (-0.4 * t).exp() * (1.3 * (1.3 * t).cos() - 0.4 * (1.3 * t).sin()),
                &grid,
            );
            let got = estimate_derivatives(&x, dt).unwrap();
            errors.push((&got - &want).max_abs());
        }
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 3.5, "observed order {order} (errors {errors:?})");
        }
    }

    #[test]
    fn input_validation() {
        let x = Matrix::<f64>::zeros(1, 4);
        assert!(estimate_derivatives(&x, 0.1).is_err());
        let x = Matrix::<f64>::zeros(1, 5);
        assert!(estimate_derivatives(&x, 0.0).is_err());
        assert!(uniform_spacing(&[0.0]).is_err());
        assert!(uniform_spacing(&[0.0, 0.1, 0.3]).is_err());
        assert!(uniform_spacing(&[0.0, 0.1, 0.2]).is_ok());
    }
}
