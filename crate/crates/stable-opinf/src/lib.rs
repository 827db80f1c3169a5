//! Learning quadratic control systems ẋ = A·x + H·(x⊗x) + B·u from
//! trajectory data, with bounded-input bounded-state stability by
//! construction.
//!
//! The crate provides two learners: an unconstrained least-squares fit of
//! (A, H, B) against snapshot data ([`learn::fit_baseline`]), and a
//! parametrized gradient-descent fit ([`learn::fit_stable`]) whose every
//! iterate materializes into a system with A = J − R (J skew, R ≻ 0) and an
//! energy-preserving H. For such systems the state norm never exceeds
//! max(‖x₀‖, r) with trapping radius r = ‖B‖₂‖u‖∞/σ_min(R), and the
//! [`stability`] module turns that bound into runtime certificates.
//!
//! Supporting modules cover simulation of benchmark systems ([`model`]),
//! snapshot preparation — POD compression, stencil differentiation, noise
//! injection ([`data`]) — and evaluation metrics ([`metrics`]).
//!
//! Numeric code is generic over the floating-point type via
//! [`scalar::Scalar`]; the [`f64`]/[`f32`] alias modules pin the common
//! concrete choices.

pub mod data;
pub mod error;
pub mod learn;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use linalg::{
    columnwise_self_kron, kron_vec, min_singular_value, skew_part, sym_part, thin_svd, Matrix,
};
pub use model::{
    burgers_semidiscrete, example_one, example_two, fixed_test_signals, sample_training_signals,
    simulate, BurgersConfig, QuadraticControlSystem, SignalFamily, SignalSpec,
};
pub use stability::{
    energy_preserving_check, energy_preserving_sample_check, generalized_certificate, is_hurwitz,
    monotone_decompose, to_skew_block_form, trapping_radius, verify_bibs, StabilityCertificate,
};

/// Default double-precision instantiations.
pub mod f64 {
    pub type Matrix = crate::linalg::Matrix<f64>;
    pub type QuadraticControlSystem = crate::model::QuadraticControlSystem<f64>;
    pub type SignalSpec = crate::model::SignalSpec<f64>;
    pub type StabilityCertificate = crate::stability::StabilityCertificate<f64>;
    pub type StableParametrization = crate::learn::StableParametrization<f64>;
    pub type TrainConfig = crate::learn::TrainConfig<f64>;
    pub type SnapshotDataset = crate::data::SnapshotDataset<f64>;
    pub type PodBasis = crate::data::PodBasis<f64>;
}

/// Single-precision instantiations (reduced accuracy; the certificates keep
/// their meaning but the tight tolerances in this crate's tests assume f64).
pub mod f32 {
    pub type Matrix = crate::linalg::Matrix<f32>;
    pub type QuadraticControlSystem = crate::model::QuadraticControlSystem<f32>;
    pub type SignalSpec = crate::model::SignalSpec<f32>;
    pub type StabilityCertificate = crate::stability::StabilityCertificate<f32>;
    pub type StableParametrization = crate::learn::StableParametrization<f32>;
    pub type TrainConfig = crate::learn::TrainConfig<f32>;
    pub type SnapshotDataset = crate::data::SnapshotDataset<f32>;
    pub type PodBasis = crate::data::PodBasis<f32>;
}
