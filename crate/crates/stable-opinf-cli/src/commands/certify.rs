//! `certify`: run every stability check on a saved model and emit a
//! certificate report. Exit status is nonzero iff certification fails.

use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use stable_opinf::learn::ModelDocument;
use stable_opinf::stability::{certificate_report, generalized_certificate, CertificateReport};
use stable_opinf::{Matrix, QuadraticControlSystem};

use crate::commands::emit;

#[derive(clap::Args, Debug)]
pub struct CertifyArgs {
    /// Saved model document (or bare {a, h, b} system) JSON.
    #[arg(long)]
    pub model: PathBuf,
    /// Also write the report JSON to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Input sup-norm bound for reporting a concrete trapping radius
    /// (the report always includes the per-unit-input radius).
    #[arg(long)]
    pub u_bound: Option<f64>,
}

/// Everything `certify` derives from one model file.
#[derive(Debug, Serialize, Deserialize)]
pub struct CertifyReport {
    /// "stable" | "stable_generalized" | "baseline" | "system".
    pub learner: String,
    /// Hurwitz/monotone/energy-preservation facts and the per-unit-input
    /// trapping radius.
    pub report: CertificateReport,
    /// Q-weighted structure check for models that carry a generalized
    /// Lyapunov matrix.
    pub generalized_certified: Option<bool>,
    /// Trapping radius at the requested input bound, when one was given.
    pub trapping_radius_at_u_bound: Option<f64>,
    /// Overall verdict: the plain certificate, or the generalized one for
    /// models parametrized that way.
    pub certified: bool,
}

pub fn run(args: &CertifyArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.model)
        .with_context(|| format!("reading model {}", args.model.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.model.display()))?;
    let (learner, sys, q): (String, QuadraticControlSystem<f64>, Option<Matrix<f64>>) =
        if value.get("learner").is_some() {
            let doc: ModelDocument<f64> = serde_json::from_value(value)
                .with_context(|| format!("interpreting model document {}", args.model.display()))?;
            (doc.learner.clone(), doc.system()?, doc.q.clone())
        } else {
            let sys = crate::pipeline::bare_system(value)
                .with_context(|| format!("interpreting system {}", args.model.display()))?;
            ("system".into(), sys, None)
        };

    let report = certificate_report(&sys).context("running certificate checks")?;
    let generalized_certified = q.map(|q| generalized_certificate(&sys, &q).is_ok());
    let trapping_radius_at_u_bound = match (args.u_bound, report.trapping_radius_per_unit_input) {
        (Some(ub), Some(per_unit)) if ub >= 0.0 => Some(per_unit * ub),
        _ => None,
    };
    let certified = report.certified || generalized_certified == Some(true);
    let out = CertifyReport {
        learner,
        report,
        generalized_certified,
        trapping_radius_at_u_bound,
        certified,
    };
    let json = serde_json::to_string_pretty(&out).context("serializing report")?;
    emit(format!("{json}"));
    if let Some(path) = &args.out {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))?;
            }
        }
        std::fs::write(path, json + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if certified { 0 } else { 1 })
}
