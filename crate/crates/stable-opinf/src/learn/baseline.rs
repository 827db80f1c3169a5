//! Unconstrained least-squares operator inference: the comparison baseline
//! with no stability guarantee.

use crate::data::{assemble_regressor, SnapshotDataset};
use crate::error::{Error, Result};
use crate::linalg::lstsq;
use crate::scalar::{to_f64, Scalar};
use crate::QuadraticControlSystem;

/// Conditioning beyond which a warning accompanies the solution even when
/// the solver succeeds.
const COND_WARN: f64 = 1e12;

/// A least-squares fit: the recovered operators plus solver diagnostics.
#[derive(Debug, Clone)]
pub struct BaselineFit<T> {
    pub system: QuadraticControlSystem<T>,
    /// ‖Ẋ − A·X − H·(X⊗̃X) − B·U‖_F at the solution.
    pub residual: T,
    /// Condition number of the stacked regressor D.
    pub cond: T,
    /// Numerical rank the solver worked with.
    pub rank: usize,
    /// Present when D was rank-deficient (minimal-norm solution returned)
    /// or severely ill-conditioned.
    pub warning: Option<String>,
}

/// Solves min ‖Ẋ − [A, H, B]·D‖_F (+ ridge·‖[A,H,B]‖_F² when ridge > 0)
/// over the stacked operators, D = [X; X⊗̃X; U].
///
/// The kron block of D repeats every symmetric pair of rows (x_i·x_j and
/// x_j·x_i), so D is structurally rank-deficient for n ≥ 2; with ridge = 0
/// the minimal-norm solution is returned (H symmetrized across equivalent
/// entries, same action on every x⊗x) together with a warning.
pub fn fit_baseline<T: Scalar>(
    dataset: &SnapshotDataset<T>,
    ridge: T,
) -> Result<BaselineFit<T>> {
    if !(ridge >= T::zero() && ridge.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "fit_baseline: ridge must be nonnegative and finite, got {}",
            to_f64(ridge)
        )));
    }
    let xdot = dataset.require_xdot()?;
    let n = dataset.state_dim();
    let m = dataset.input_dim();
    let reg = assemble_regressor(&dataset.x, &dataset.u)?;
    let q = reg.rows();
    if dataset.len() < q && ridge == T::zero() {
        return Err(Error::InvalidArgument(format!(
            "fit_baseline: {} samples cannot determine {q} regressor rows without ridge",
            dataset.len()
        )));
    }
    // Row-space problem: Dᵀ·Oᵀ = Ẋᵀ.
    let ls = lstsq(&reg.d.transpose(), &xdot.transpose(), ridge)?;
    let operators = ls.solution.transpose();
    let a = operators.block(0, 0, n, n);
    let h = operators.block(0, n, n, n * n);
    let b = operators.block(0, n + n * n, n, m);
    let system = QuadraticControlSystem::new(a, h, b)?;

    let fit = operators.matmul(&reg.d);
    let residual = (xdot - &fit).frobenius_norm();

    let mut warnings = Vec::new();
    if ls.min_norm {
        warnings.push(format!(
            "regressor rank {} < {q}: returned the minimal-norm solution",
            ls.rank
        ));
    }
    if !(to_f64(reg.cond) < COND_WARN) {
        warnings.push(format!(
            "regressor condition number {:e} exceeds {COND_WARN:e}",
            to_f64(reg.cond)
        ));
    }
    Ok(BaselineFit {
        system,
        residual,
        cond: reg.cond,
        rank: ls.rank,
        warning: (!warnings.is_empty()).then(|| warnings.join("; ")),
    })
}
