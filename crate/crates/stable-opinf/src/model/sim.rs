//! Fixed-substep classical Runge–Kutta simulation with divergence
//! detection. Determinism and reproducibility are the design priorities;
//! callers pick the substep count to match their system's stiffness.

use crate::error::{Error, Result};
use crate::linalg::{norm2, Matrix};
use crate::model::signal::Input;
use crate::model::QuadraticControlSystem;
use crate::scalar::{cast, to_f64, Scalar};

/// Right-hand side of an ODE ẋ = f(x, u) with a fixed input dimension.
/// Implemented by [`QuadraticControlSystem`] and by structure-exploiting
/// models that avoid materializing dense operators.
pub trait Dynamics<T: Scalar> {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn rhs_into(&self, x: &[T], u: &[T], out: &mut [T]);
}

impl<T: Scalar> Dynamics<T> for QuadraticControlSystem<T> {
    fn state_dim(&self) -> usize {
        self.state_dim()
    }

    fn input_dim(&self) -> usize {
        self.input_dim()
    }

    fn rhs_into(&self, x: &[T], u: &[T], out: &mut [T]) {
        QuadraticControlSystem::rhs_into(self, x, u, out)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimOptions<T> {
    /// Internal steps per output interval; the substep is spacing/substeps.
    pub substeps: usize,
    /// State norm beyond which the trajectory is declared divergent (well
    /// below overflow so the blow-up time is still representable).
    pub divergence_threshold: T,
}

impl<T: Scalar> Default for SimOptions<T> {
    fn default() -> Self {
        Self { substeps: 10, divergence_threshold: cast(1e12) }
    }
}

impl<T: Scalar> SimOptions<T> {
    pub fn with_substeps(substeps: usize) -> Self {
        Self { substeps, ..Self::default() }
    }
}

/// Simulation output: states column-per-sample on the requested grid.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub t: Vec<T>,
    /// n × |t| state snapshots; column k is x(t_k).
    pub states: Matrix<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn state_at(&self, k: usize) -> Vec<T> {
        self.states.col(k)
    }

    pub fn max_norm(&self) -> T {
        (0..self.states.cols())
            .map(|k| norm2(&self.states.col(k)))
            .fold(T::zero(), T::max)
    }
}

/// Integrates ẋ = f(x, u(t)) through `t_grid` with classical 4th-order
/// Runge–Kutta at a fixed substep per interval. Column 0 is exactly `x0`.
/// Divergence (non-finite state or norm above the threshold) aborts with the
/// blow-up time.
pub fn simulate<T: Scalar, D, I>(
    sys: &D,
    x0: &[T],
    input: &I,
    t_grid: &[T],
    opts: &SimOptions<T>,
) -> Result<Trajectory<T>>
where
    D: Dynamics<T> + ?Sized,
    I: Input<T> + ?Sized,
{
    let n = sys.state_dim();
    let m = sys.input_dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "simulate: initial state has {} entries, system expects {n}",
            x0.len()
        )));
    }
    if input.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "simulate: input has {} channels, system expects {m}",
            input.dim()
        )));
    }
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("simulate: empty time grid".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(
            "simulate: time grid must be finite and strictly increasing".into(),
        ));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("simulate: initial state".into()));
    }
    if opts.substeps == 0 {
        return Err(Error::InvalidArgument("simulate: substeps must be ≥ 1".into()));
    }

    let cols = t_grid.len();
    let mut states = Matrix::zeros(n, cols);
    let mut x = x0.to_vec();
    states.set_col(0, &x);

    let mut k1 = vec![T::zero(); n];
    let mut k2 = vec![T::zero(); n];
    let mut k3 = vec![T::zero(); n];
    let mut k4 = vec![T::zero(); n];
    let mut xs = vec![T::zero(); n];
    let mut u = vec![T::zero(); m];
    let half = cast::<T>(0.5);
    let sixth = T::one() / cast::<T>(6.0);
    let two = cast::<T>(2.0);

    for seg in 1..cols {
        let t0 = t_grid[seg - 1];
        let h = (t_grid[seg] - t0) / cast::<T>(opts.substeps as f64);
        for step in 0..opts.substeps {
            let t = t0 + h * cast::<T>(step as f64);

            input.eval_into(t, &mut u);
            sys.rhs_into(&x, &u, &mut k1);

            let th = t + half * h;
            input.eval_into(th, &mut u);
            for i in 0..n {
                xs[i] = x[i] + half * h * k1[i];
            }
            sys.rhs_into(&xs, &u, &mut k2);

            for i in 0..n {
                xs[i] = x[i] + half * h * k2[i];
            }
            sys.rhs_into(&xs, &u, &mut k3);

            input.eval_into(t + h, &mut u);
            for i in 0..n {
                xs[i] = x[i] + h * k3[i];
            }
            sys.rhs_into(&xs, &u, &mut k4);

            for i in 0..n {
                x[i] += h * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
            }

            let nrm = norm2(&x);
            // NaN fails is_finite, so blow-ups through NaN are caught too.
            if !(nrm.is_finite() && nrm <= opts.divergence_threshold) {
                return Err(Error::Diverged {
                    time: to_f64(t + h),
                    norm: to_f64(nrm),
                    threshold: to_f64(opts.divergence_threshold),
                });
            }
        }
        states.set_col(seg, &x);
    }
    Ok(Trajectory { t: t_grid.to_vec(), states })
}

/// Uniform grid of `count` samples on [t0, t1] (endpoints included).
pub fn uniform_grid<T: Scalar>(t0: T, t1: T, count: usize) -> Vec<T> {
    assert!(count >= 2, "uniform_grid: need at least 2 samples");
    let dt = (t1 - t0) / cast::<T>((count - 1) as f64);
    (0..count).map(|k| t0 + dt * cast::<T>(k as f64)).collect()
}
