//! Everything between raw trajectories and the learner's (X, U, Ẋ):
//! snapshot assembly, POD compression, derivative estimation, noise
//! injection, regressor assembly, and dataset persistence.

pub mod diff;
pub mod io;
pub mod noise;
pub mod pod;
pub mod regressor;

pub use diff::{estimate_derivatives, uniform_spacing};
pub use io::{read_matrix_binary, read_timeseries_csv, write_matrix_binary, write_timeseries_csv};
pub use noise::add_noise;
pub use pod::{pod_fit, pod_lift, pod_project, PodBasis, PodCriterion};
pub use regressor::{assemble_regressor, Regressor};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Dynamics;
use crate::scalar::Scalar;
use crate::Matrix;

/// Snapshots of one or more simulated trajectories: states X (n×𝒩), inputs
/// U (m×𝒩), optional derivatives Ẋ (n×𝒩), time stamps, and a free-text
/// provenance note (system, signals, seed).
///
/// Datasets built by [`SnapshotDataset::new`] hold a single trajectory with
/// strictly increasing time stamps; [`SnapshotDataset::merge`] aggregates
/// several trajectories column-wise for regression, after which stencil
/// differentiation is no longer available (the merged grid is not a
/// trajectory grid).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotDataset<T> {
    pub x: Matrix<T>,
    pub u: Matrix<T>,
    pub xdot: Option<Matrix<T>>,
    pub t_grid: Vec<T>,
    pub provenance: String,
}

impl<T: Scalar> SnapshotDataset<T> {
    pub fn new(
        x: Matrix<T>,
        u: Matrix<T>,
        t_grid: Vec<T>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let samples = t_grid.len();
        if samples == 0 {
            return Err(Error::InvalidArgument("dataset: empty time grid".into()));
        }
        if x.cols() != samples || u.cols() != samples {
            return Err(Error::DimensionMismatch(format!(
                "dataset: X has {} columns, U has {}, time grid has {samples}",
                x.cols(),
                u.cols()
            )));
        }
        if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(
                "dataset: time grid must be finite and strictly increasing".into(),
            ));
        }
        x.check_finite()?;
        u.check_finite()?;
        Ok(Self { x, u, xdot: None, t_grid, provenance: provenance.into() })
    }

    pub fn state_dim(&self) -> usize {
        self.x.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.u.rows()
    }

    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    pub fn with_xdot(mut self, xdot: Matrix<T>) -> Result<Self> {
        if xdot.rows() != self.state_dim() || xdot.cols() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "dataset: Ẋ is {}x{}, expected {}x{}",
                xdot.rows(),
                xdot.cols(),
                self.state_dim(),
                self.len()
            )));
        }
        xdot.check_finite()?;
        self.xdot = Some(xdot);
        Ok(self)
    }

    /// Uniform spacing of the time grid; rejects non-uniform grids
    /// (relative tolerance 1e-9 on each interval).
    pub fn uniform_spacing(&self) -> Result<T> {
        uniform_spacing(&self.t_grid)
    }

    /// Fills Ẋ by 5-point finite-difference stencils on the (uniform) grid.
    pub fn with_stencil_derivatives(self) -> Result<Self> {
        let dt = self.uniform_spacing()?;
        let xdot = estimate_derivatives(&self.x, dt)?;
        self.with_xdot(xdot)
    }

    /// Fills Ẋ by evaluating a known right-hand side at each snapshot
    /// (exact derivatives, up to the accuracy of the states themselves).
    pub fn with_exact_derivatives<D: Dynamics<T> + ?Sized>(self, sys: &D) -> Result<Self> {
        let n = self.state_dim();
        if sys.state_dim() != n || sys.input_dim() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "dataset: system is {}-state/{}-input, dataset is {}-state/{}-input",
                sys.state_dim(),
                sys.input_dim(),
                n,
                self.input_dim()
            )));
        }
        let mut xdot = Matrix::zeros(n, self.len());
        let mut out = vec![T::zero(); n];
        for k in 0..self.len() {
            let x = self.x.col(k);
            let u = self.u.col(k);
            sys.rhs_into(&x, &u, &mut out);
            for i in 0..n {
                xdot[(i, k)] = out[i];
            }
        }
        self.with_xdot(xdot)
    }

    /// Replaces the states with noisy copies (i.i.d. additive Gaussian,
    /// deterministic per seed) and drops any stored derivatives so they are
    /// re-estimated from the perturbed states.
    pub fn with_noisy_states(mut self, sigma: T, seed: u64) -> Self {
        self.x = add_noise(&self.x, sigma, seed);
        self.xdot = None;
        self
    }

    /// Projects states (and derivatives, if present) onto a POD basis:
    /// x̂ = Φᵀx. Inputs and the time grid are unchanged.
    pub fn projected(&self, basis: &PodBasis<T>) -> Result<Self> {
        let x = pod_project(basis, &self.x)?;
        let xdot = match &self.xdot {
            Some(d) => Some(pod_project(basis, d)?),
            None => None,
        };
        Ok(Self {
            x,
            u: self.u.clone(),
            xdot,
            t_grid: self.t_grid.clone(),
            provenance: self.provenance.clone(),
        })
    }

    /// Column-wise aggregation of several trajectories into one regression
    /// dataset. Either every part carries Ẋ or none does; time stamps are
    /// concatenated for provenance only.
    pub fn merge(parts: &[SnapshotDataset<T>]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("merge: no datasets".into()));
        }
        let n = parts[0].state_dim();
        let m = parts[0].input_dim();
        let with_xdot = parts[0].xdot.is_some();
        for (idx, p) in parts.iter().enumerate() {
            if p.state_dim() != n || p.input_dim() != m {
                return Err(Error::DimensionMismatch(format!(
                    "merge: dataset {idx} is {}x{}-dimensional, expected {n}x{m}",
                    p.state_dim(),
                    p.input_dim()
                )));
            }
            if p.xdot.is_some() != with_xdot {
                return Err(Error::InvalidArgument(
                    "merge: derivatives must be present in all datasets or none".into(),
                ));
            }
        }
        let x = Matrix::hstack(&parts.iter().map(|p| &p.x).collect::<Vec<_>>());
        let u = Matrix::hstack(&parts.iter().map(|p| &p.u).collect::<Vec<_>>());
        let xdot = if with_xdot {
            Some(Matrix::hstack(
                &parts.iter().map(|p| p.xdot.as_ref().unwrap()).collect::<Vec<_>>(),
            ))
        } else {
            None
        };
        let t_grid = parts.iter().flat_map(|p| p.t_grid.iter().copied()).collect();
        let provenance = parts
            .iter()
            .map(|p| p.provenance.as_str())
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join(" | ");
        Ok(Self { x, u, xdot, t_grid, provenance })
    }

    /// The derivatives, or an error for datasets that have not been
    /// differentiated yet.
    pub fn require_xdot(&self) -> Result<&Matrix<T>> {
        self.xdot.as_ref().ok_or_else(|| {
            Error::InvalidArgument("dataset: derivatives required but absent".into())
        })
    }
}
