//! `learn`: run data preparation (noise, optional POD, differentiation) on
//! the stored training trajectories, then fit both learners and write model
//! documents, certificates, the loss history, and a summary.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use stable_opinf::data::SnapshotDataset;
use stable_opinf::learn::{
    fit_baseline, fit_stable, fit_stable_generalized, write_loss_history_csv, ModelDocument,
};
use stable_opinf::stability::CertificateReport;
use stable_opinf::Matrix;

use crate::commands::{emit, load_dataset, noise_seed, pod};
use crate::config::ExperimentConfig;
use crate::pipeline::{Experiment, Manifest, RunDir};

/// Scalar facts about one `learn` run, for quick inspection without parsing
/// the model documents.
#[derive(Debug, Serialize, Deserialize)]
pub struct LearnSummary {
    pub state_dim: usize,
    pub input_dim: usize,
    pub samples: usize,
    pub trajectories: usize,
    pub noise_sigma: f64,
    pub derivative_mode: String,
    pub pod: Option<PodFacts>,
    pub baseline: BaselineFacts,
    pub stable: StableFacts,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PodFacts {
    pub full_dim: usize,
    pub rank: usize,
    pub retained_energy: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BaselineFacts {
    pub residual: f64,
    pub rank: usize,
    pub warning: Option<String>,
    pub certified: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StableFacts {
    pub learner: String,
    pub best_loss: f64,
    pub best_step: usize,
    pub final_loss: f64,
    pub certified: bool,
    pub generalized_certified: Option<bool>,
}

pub fn run(config: &ExperimentConfig, run_dir: &RunDir) -> Result<i32> {
    let exp = Experiment::build(config)?;
    run_dir.echo_config(config)?;
    let manifest = Manifest::load(run_dir)?;
    let records = manifest.ok_trajectories("train");
    if records.is_empty() {
        bail!("no healthy training trajectories in the manifest; run `simulate` first");
    }
    let mut log = Vec::new();

    // Dataprep: noise first (it perturbs the stored measurements), then
    // exact derivatives while the states are still full-dimensional, then
    // the POD projection, then stencil derivatives in the working space.
    let mut datasets = Vec::with_capacity(records.len());
    for (idx, rec) in records.iter().enumerate() {
        let mut ds = load_dataset(run_dir, rec)?;
        if config.noise_sigma > 0.0 {
            ds = ds.with_noisy_states(config.noise_sigma, noise_seed(config.seed, idx));
        }
        datasets.push(ds);
    }
    if config.noise_sigma > 0.0 {
        log.push(format!(
            "noise: sigma {} on {} trajectories (seeds derived from {})",
            config.noise_sigma,
            datasets.len(),
            config.seed
        ));
    }
    if config.derivative_mode == "exact" {
        datasets = datasets
            .into_iter()
            .map(|ds| ds.with_exact_derivatives(exp.truth.dynamics()))
            .collect::<stable_opinf::Result<Vec<_>>>()
            .context("exact derivative evaluation")?;
    }
    let mut pod_facts = None;
    if let Some(criterion) = config.pod_criterion() {
        let states: Vec<Matrix<f64>> = datasets.iter().map(|d| d.x.clone()).collect();
        let basis = pod::fit_basis_from_states(&states, criterion)?;
        pod::write_pod_artifacts(run_dir, &basis)?;
        log.push(format!(
            "pod: rank {} of {} states, retained energy {:.6}",
            basis.rank(),
            basis.full_dim(),
            basis.retained_energy
        ));
        pod_facts = Some(PodFacts {
            full_dim: basis.full_dim(),
            rank: basis.rank(),
            retained_energy: basis.retained_energy,
        });
        datasets = datasets
            .iter()
            .map(|d| d.projected(&basis))
            .collect::<stable_opinf::Result<Vec<_>>>()
            .context("projecting datasets")?;
    }
    if config.derivative_mode == "stencil" {
        datasets = datasets
            .into_iter()
            .map(|ds| ds.with_stencil_derivatives())
            .collect::<stable_opinf::Result<Vec<_>>>()
            .context("stencil differentiation")?;
    }
    let merged = SnapshotDataset::merge(&datasets).context("merging trajectories")?;
    let (n, m) = (merged.state_dim(), merged.input_dim());
    log.push(format!(
        "dataset: {} trajectories, {} samples, {n} states, {m} inputs, {} derivatives",
        datasets.len(),
        merged.len(),
        config.derivative_mode
    ));

    let models_dir = run_dir.models_dir()?;

    // Unconstrained least-squares learner.
    let baseline = fit_baseline(&merged, config.ridge).context("baseline fit")?;
    let baseline_doc =
        ModelDocument::from_baseline(&baseline, config.ridge).context("baseline document")?;
    baseline_doc.save(models_dir.join("baseline.json")).context("writing baseline.json")?;
    write_certificate(&models_dir.join("baseline_certificate.json"), &baseline_doc.certificate)?;
    log.push(format!(
        "baseline: residual {:.6e}, rank {}, certified {}{}",
        baseline.residual,
        baseline.rank,
        baseline_doc.certificate.certified,
        baseline.warning.as_deref().map(|w| format!(" ({w})")).unwrap_or_default()
    ));

    // Stability-constrained learner.
    let tc = config.train_config();
    let fit = if config.generalized {
        fit_stable_generalized(&merged, n, m, &tc).context("constrained fit (generalized)")?
    } else {
        fit_stable(&merged, n, m, &tc).context("constrained fit")?
    };
    let stable_doc = ModelDocument::from_stable(&fit, &tc).context("stable document")?;
    stable_doc.save(models_dir.join("stable.json")).context("writing stable.json")?;
    write_certificate(&models_dir.join("stable_certificate.json"), &stable_doc.certificate)?;
    write_loss_history_csv(models_dir.join("stable_history.csv"), &fit.history)
        .context("writing loss history")?;
    log.push(format!(
        "stable: best loss {:.6e} at step {}, certified {}",
        fit.best_loss, fit.best_step, stable_doc.certificate.certified
    ));

    let summary = LearnSummary {
        state_dim: n,
        input_dim: m,
        samples: merged.len(),
        trajectories: datasets.len(),
        noise_sigma: config.noise_sigma,
        derivative_mode: config.derivative_mode.clone(),
        pod: pod_facts,
        baseline: BaselineFacts {
            residual: baseline.residual,
            rank: baseline.rank,
            warning: baseline.warning.clone(),
            certified: baseline_doc.certificate.certified,
        },
        stable: StableFacts {
            learner: stable_doc.learner.clone(),
            best_loss: fit.best_loss,
            best_step: fit.best_step,
            final_loss: *fit.history.last().expect("nonempty history"),
            certified: stable_doc.certificate.certified,
            generalized_certified: stable_doc.generalized_certified,
        },
    };
    let json = serde_json::to_string_pretty(&summary).context("serializing summary")?;
    std::fs::write(models_dir.join("learn_summary.json"), json + "\n")
        .context("writing learn_summary.json")?;
    run_dir.log("learn", &log)?;

    let stable_ok =
        stable_doc.certificate.certified || stable_doc.generalized_certified == Some(true);
    emit(format!(
        "learn: stable model certified = {stable_ok}, baseline certified = {} \
         (models in {})",
        baseline_doc.certificate.certified,
        models_dir.display()
    ));
    if !stable_ok {
        eprintln!("learn: the constrained learner produced an uncertified model");
        return Ok(1);
    }
    Ok(0)
}

fn write_certificate(path: &std::path::Path, report: &CertificateReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report).context("serializing certificate")?;
    std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))
}
