//! Subcommand implementations. Each returns the process exit code: 0 for
//! success, 1 for certification/validation failures; I/O and config
//! problems surface as errors (exit code 2 in `main`).

pub mod certify;
pub mod diff;
pub mod eval;
pub mod learn;
pub mod pod;
pub mod simulate;


use anyhow::{bail, Context, Result};
use stable_opinf::data::{read_timeseries_csv, SnapshotDataset};
use stable_opinf::model::Input;
use stable_opinf::Matrix;

use crate::pipeline::{RunDir, TrajectoryRecord};

/// Prints a line to stdout, tolerating closed pipes (e.g. `… | head`).
pub fn emit(line: impl AsRef<str>) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{}", line.as_ref());
}

/// x0, x1, … column labels for an n-state system.
pub fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// u0, u1, … column labels for an m-channel input.
pub fn input_names(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("u{i}")).collect()
}

/// Full-precision float formatting for hand-rolled CSV tables.
pub fn fmt_e(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads a trajectory's states CSV back: (time grid, states, names).
pub fn load_states(run: &RunDir, record: &TrajectoryRecord) -> Result<(Vec<f64>, Matrix<f64>)> {
    let path = run.root().join(&record.csv);
    let (t, states, _names) = read_timeseries_csv::<f64>(&path)
        .with_context(|| format!("reading states {}", path.display()))?;
    if states.cols() != record.samples {
        bail!(
            "{}: expected {} samples, found {}",
            path.display(),
            record.samples,
            states.cols()
        );
    }
    Ok((t, states))
}

/// Input snapshots for a trajectory: the stored input CSV when present,
/// otherwise the manifest's signal evaluated on the trajectory's grid.
pub fn load_inputs(
    run: &RunDir,
    record: &TrajectoryRecord,
    t_grid: &[f64],
) -> Result<Matrix<f64>> {
    let path = run.root().join(&record.input_csv);
    if path.exists() {
        let (_t, u, _names) = read_timeseries_csv::<f64>(&path)
            .with_context(|| format!("reading inputs {}", path.display()))?;
        if u.cols() != t_grid.len() {
            bail!("{}: {} input samples for {} states", path.display(), u.cols(), t_grid.len());
        }
        Ok(u)
    } else {
        let mut u = Matrix::zeros(record.signal.dim(), t_grid.len());
        let mut buf = vec![0.0; record.signal.dim()];
        for (k, &t) in t_grid.iter().enumerate() {
            record.signal.eval_into(t, &mut buf);
            for (i, &v) in buf.iter().enumerate() {
                u[(i, k)] = v;
            }
        }
        Ok(u)
    }
}

/// A trajectory as a regression-ready dataset (states + inputs, no
/// derivatives yet).
pub fn load_dataset(run: &RunDir, record: &TrajectoryRecord) -> Result<SnapshotDataset<f64>> {
    let (t, states) = load_states(run, record)?;
    let u = load_inputs(run, record, &t)?;
    SnapshotDataset::new(states, u, t, record.name.clone())
        .with_context(|| format!("assembling dataset {}", record.name))
}

/// Per-trajectory noise seed: deterministic, distinct per trajectory, and
/// decoupled from the signal-sampling streams.
pub fn noise_seed(master: u64, index: usize) -> u64 {
    master.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(index as u64)
}
