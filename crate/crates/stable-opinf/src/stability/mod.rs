//! Stability machinery: energy-preservation checks for quadratic operators,
//! monotone-stability decompositions, trapping-radius certificates, and
//! runtime verification of the bounded-input bounded-state guarantee.

pub mod certificate;
pub mod checks;
pub mod energy;

pub use certificate::{
    certificate_report, generalized_certificate, monotone_certificate, trapping_radius,
    verify_bibs, BibsReport, CertificateReport, StabilityCertificate,
};
pub use checks::{is_hurwitz, monotone_decompose, HurwitzReport};
pub use energy::{
    blocks_to_hessian, default_energy_tol, energy_preserving_check,
    energy_preserving_sample_check, to_skew_block_form, EnergyCheck,
};
