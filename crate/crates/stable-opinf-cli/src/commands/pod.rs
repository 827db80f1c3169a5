//! `pod`: fit a reduced basis to the training snapshots and write the basis
//! matrix, the singular spectrum, and a summary.


use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use stable_opinf::data::{
    pod_fit, read_matrix_binary, write_matrix_binary, PodBasis, PodCriterion,
};
use stable_opinf::Matrix;

use crate::commands::{emit, fmt_e, load_states};
use crate::config::ExperimentConfig;
use crate::pipeline::{Manifest, RunDir};

/// Scalar facts about a stored basis; the matrix itself lives in basis.bin.
#[derive(Debug, Serialize, Deserialize)]
pub struct PodSummary {
    pub full_dim: usize,
    pub rank: usize,
    pub retained_energy: f64,
    pub singular_values: Vec<f64>,
}

pub fn run(config: &ExperimentConfig, run_dir: &RunDir) -> Result<i32> {
    let Some(criterion) = config.pod_criterion() else {
        bail!("config has no POD criterion; set pod_rank or pod_energy");
    };
    run_dir.echo_config(config)?;
    let manifest = Manifest::load(run_dir)?;
    let basis = fit_basis_from_manifest(run_dir, &manifest, criterion)?;
    write_pod_artifacts(run_dir, &basis)?;
    run_dir.log(
        "pod",
        &[format!(
            "rank {} of {} states, retained energy {:.6}",
            basis.rank(),
            basis.full_dim(),
            basis.retained_energy
        )],
    )?;
    emit(format!(
        "pod: rank {} basis retains {:.4}% of snapshot energy",
        basis.rank(),
        basis.retained_energy * 100.0
    ));
    Ok(0)
}

/// Stacks every healthy training trajectory and fits the basis.
pub fn fit_basis_from_manifest(
    run_dir: &RunDir,
    manifest: &Manifest,
    criterion: PodCriterion<f64>,
) -> Result<PodBasis<f64>> {
    let records = manifest.ok_trajectories("train");
    if records.is_empty() {
        bail!("no healthy training trajectories in the manifest");
    }
    let mut parts = Vec::with_capacity(records.len());
    for rec in records {
        let (_t, states) = load_states(run_dir, rec)?;
        parts.push(states);
    }
    let refs: Vec<&Matrix<f64>> = parts.iter().collect();
    let snapshots = Matrix::hstack(&refs);
    pod_fit(&snapshots, criterion).context("fitting POD basis")
}

/// Same snapshot stacking, but from in-memory state matrices (used by
/// `learn`, where noise may have been applied first).
pub fn fit_basis_from_states(
    states: &[Matrix<f64>],
    criterion: PodCriterion<f64>,
) -> Result<PodBasis<f64>> {
    let refs: Vec<&Matrix<f64>> = states.iter().collect();
    let snapshots = Matrix::hstack(&refs);
    pod_fit(&snapshots, criterion).context("fitting POD basis")
}

pub fn write_pod_artifacts(run_dir: &RunDir, basis: &PodBasis<f64>) -> Result<()> {
    let dir = run_dir.pod_dir()?;
    write_matrix_binary(dir.join("basis.bin"), &basis.v).context("writing pod/basis.bin")?;
    let summary = PodSummary {
        full_dim: basis.full_dim(),
        rank: basis.rank(),
        retained_energy: basis.retained_energy,
        singular_values: basis.singular_values.clone(),
    };
    let json = serde_json::to_string_pretty(&summary).context("serializing POD summary")?;
    std::fs::write(dir.join("pod.json"), json + "\n").context("writing pod/pod.json")?;
    let mut csv = String::from("mode,singular_value,cumulative_energy\n");
    for (k, s) in basis.singular_values.iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", k + 1, fmt_e(*s), fmt_e(basis.energy_at(k + 1))));
    }
    std::fs::write(dir.join("singular_values.csv"), csv)
        .context("writing pod/singular_values.csv")?;
    Ok(())
}

/// Reassembles the basis from a run's pod/ directory.
pub fn load_pod_basis(run_dir: &RunDir) -> Result<PodBasis<f64>> {
    let dir = run_dir.root().join("pod");
    let summary_path = dir.join("pod.json");
    let text = std::fs::read_to_string(&summary_path).with_context(|| {
        format!("reading {} (run `pod` or `learn` first)", summary_path.display())
    })?;
    let summary: PodSummary = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", summary_path.display()))?;
    let v = read_matrix_binary::<f64>(dir.join("basis.bin")).context("reading pod/basis.bin")?;
    if v.cols() != summary.rank || v.rows() != summary.full_dim {
        bail!(
            "pod/basis.bin is {}x{}, pod.json says {}x{}",
            v.rows(),
            v.cols(),
            summary.full_dim,
            summary.rank
        );
    }
    Ok(PodBasis {
        v,
        singular_values: summary.singular_values,
        retained_energy: summary.retained_energy,
    })
}
