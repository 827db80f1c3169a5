//! `diff`: estimate snapshot time derivatives for every stored trajectory
//! and write them as `<name>_xdot.csv` next to the states.

use anyhow::{Context, Result};
use stable_opinf::data::write_timeseries_csv;

use crate::commands::{emit, load_dataset, state_names};
use crate::config::ExperimentConfig;
use crate::pipeline::{Experiment, Manifest, RunDir};

pub fn run(config: &ExperimentConfig, run_dir: &RunDir) -> Result<i32> {
    run_dir.echo_config(config)?;
    let manifest = Manifest::load(run_dir)?;
    // The exact mode evaluates the ground-truth right-hand side, so it needs
    // the configured system; the stencil mode works from the CSVs alone.
    let exact = config.derivative_mode == "exact";
    let exp = if exact { Some(Experiment::build(config)?) } else { None };

    let mut log = Vec::new();
    let mut count = 0usize;
    for rec in manifest.trajectories.iter().filter(|r| r.status == "ok") {
        let ds = load_dataset(run_dir, rec)?;
        let ds = if let Some(exp) = &exp {
            ds.with_exact_derivatives(exp.truth.dynamics())
                .with_context(|| format!("exact derivatives for {}", rec.name))?
        } else {
            ds.with_stencil_derivatives()
                .with_context(|| format!("stencil derivatives for {}", rec.name))?
        };
        let names = state_names(ds.state_dim());
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let out = format!("data/{}_xdot.csv", rec.name);
        write_timeseries_csv(
            run_dir.root().join(&out),
            &ds.t_grid,
            ds.require_xdot()?,
            &name_refs,
        )
        .with_context(|| format!("writing {out}"))?;
        log.push(format!("{}: wrote {out} ({} mode)", rec.name, config.derivative_mode));
        count += 1;
    }
    run_dir.log("diff", &log)?;
    emit(format!("diff: wrote derivatives for {count} trajectories ({} mode)", config.derivative_mode));
    Ok(0)
}
