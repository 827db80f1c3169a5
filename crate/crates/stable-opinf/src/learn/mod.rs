//! The two learners — unconstrained least squares and the certified
//! parametrized learner — plus the serialized model document.

pub mod baseline;
pub mod parametrization;
pub mod train;

pub use baseline::{fit_baseline, BaselineFit};
pub use parametrization::{loss, loss_and_gradient, LossData, StableParametrization};
pub use train::{
    fit_from, fit_stable, fit_stable_generalized, triangular_lr, write_loss_history_csv,
    FitResult, TrainConfig,
};

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{to_f64, Scalar};
use crate::stability::{certificate_report, generalized_certificate, CertificateReport};
use crate::QuadraticControlSystem;

/// On-disk form of a learned model: dimensions, the free parametrization
/// (absent for the baseline), the materialized operators, the training
/// configuration echo, and the certificate report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDocument<T> {
    pub learner: String,
    pub n: usize,
    pub m: usize,
    pub parametrization: Option<StableParametrization<T>>,
    pub a: Matrix<T>,
    pub h: Matrix<T>,
    pub b: Matrix<T>,
    /// Materialized Q for generalized models.
    pub q: Option<Matrix<T>>,
    pub train_config: Option<TrainConfig<T>>,
    pub ridge: Option<f64>,
    /// Euclidean-Lyapunov (Q = I) certificate facts for (A, H, B) as-is.
    pub certificate: CertificateReport,
    /// Outcome of the Q-weighted structure check (generalized models only).
    pub generalized_certified: Option<bool>,
}

impl<T: Scalar> ModelDocument<T> {
    pub fn from_stable(fit: &FitResult<T>, cfg: &TrainConfig<T>) -> Result<Self> {
        let p = &fit.parametrization;
        let sys = p.materialize(cfg.r_floor);
        let q = p.q_matrix(cfg.r_floor);
        let generalized_certified =
            q.as_ref().map(|q| generalized_certificate(&sys, q).is_ok());
        Ok(Self {
            learner: if p.is_generalized() { "stable_generalized" } else { "stable" }.into(),
            n: sys.state_dim(),
            m: sys.input_dim(),
            parametrization: Some(p.clone()),
            certificate: certificate_report(&sys)?,
            a: sys.a,
            h: sys.h,
            b: sys.b,
            q,
            train_config: Some(cfg.clone()),
            ridge: None,
            generalized_certified,
        })
    }

    pub fn from_baseline(fit: &BaselineFit<T>, ridge: T) -> Result<Self> {
        let sys = &fit.system;
        Ok(Self {
            learner: "baseline".into(),
            n: sys.state_dim(),
            m: sys.input_dim(),
            parametrization: None,
            certificate: certificate_report(sys)?,
            a: sys.a.clone(),
            h: sys.h.clone(),
            b: sys.b.clone(),
            q: None,
            train_config: None,
            ridge: Some(to_f64(ridge)),
            generalized_certified: None,
        })
    }

    /// The materialized system, revalidated (documents may come from disk).
    pub fn system(&self) -> Result<QuadraticControlSystem<T>> {
        QuadraticControlSystem::new(self.a.clone(), self.h.clone(), self.b.clone())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(file, self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = BufReader::new(File::open(path)?);
        serde_json::from_reader(file).map_err(|e| Error::Parse(e.to_string()))
    }
}
