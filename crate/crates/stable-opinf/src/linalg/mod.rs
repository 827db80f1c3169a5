//! Dense linear algebra: matrices, Kronecker helpers, QR, SVD, eigenvalues,
//! and solvers. Everything is pure, deterministic for a fixed input
//! ordering, and sized for the small dense problems of this crate.

pub mod eig;
pub mod kron;
pub mod matrix;
pub mod qr;
pub mod solve;
pub mod svd;

pub use eig::{eigenvalues, spectral_abscissa, sym_eigen, sym_min_eigenvalue, SymEigen};
pub use kron::{columnwise_self_kron, kron_vec, quadratic_action, skew_part, sym_part};
pub use matrix::{dot, norm2, pairwise_sum, Matrix};
pub use qr::Qr;
pub use solve::{cholesky, cholesky_solve, lstsq, spd_inverse, Lstsq};
pub use svd::{min_singular_value, spectral_norm, thin_svd, ThinSvd};
