//! `simulate`: integrate the configured ground-truth system under every
//! train/test signal and write one states CSV (plus an input CSV) per
//! trajectory, with a manifest inventorying the batch.

use anyhow::{Context, Result};
use stable_opinf::data::write_timeseries_csv;
use stable_opinf::model::{simulate, Input};
use stable_opinf::Matrix;

use crate::commands::{emit, input_names, state_names};
use crate::config::ExperimentConfig;
use crate::pipeline::{Experiment, Manifest, NamedSignal, RunDir, TrajectoryRecord};

pub fn run(config: &ExperimentConfig, run_dir: &RunDir) -> Result<i32> {
    let exp = Experiment::build(config)?;
    run_dir.echo_config(config)?;
    let data_dir = run_dir.data_dir()?;
    let n = exp.truth.state_dim();
    let m = exp.truth.input_dim();
    let x_names = state_names(n);
    let x_name_refs: Vec<&str> = x_names.iter().map(|s| s.as_str()).collect();
    let u_names = input_names(m);
    let u_name_refs: Vec<&str> = u_names.iter().map(|s| s.as_str()).collect();

    let mut records = Vec::new();
    let mut log = Vec::new();
    let batches: [(&str, &[NamedSignal]); 2] =
        [("train", &exp.train), ("test", &exp.test)];
    for (kind, signals) in batches {
        for sig in signals {
            let csv = format!("data/{}.csv", sig.name);
            let input_csv = format!("data/{}_u.csv", sig.name);
            let mut record = TrajectoryRecord {
                name: sig.name.clone(),
                kind: kind.to_string(),
                csv: csv.clone(),
                input_csv: input_csv.clone(),
                signal: sig.spec.clone(),
                sup_input_bound: sig.spec.sup_norm_bound(),
                status: "ok".into(),
                blow_up_time: None,
                samples: exp.grid.len(),
            };
            match simulate(exp.truth.dynamics(), &exp.x0, &sig.spec, &exp.grid, &exp.sim_options) {
                Ok(traj) => {
                    write_timeseries_csv(
                        data_dir.join(format!("{}.csv", sig.name)),
                        &traj.t,
                        &traj.states,
                        &x_name_refs,
                    )
                    .with_context(|| format!("writing {csv}"))?;
                    let mut u = Matrix::zeros(m, exp.grid.len());
                    let mut buf = vec![0.0; m];
                    for (k, &t) in exp.grid.iter().enumerate() {
                        sig.spec.eval_into(t, &mut buf);
                        for (i, &v) in buf.iter().enumerate() {
                            u[(i, k)] = v;
                        }
                    }
                    write_timeseries_csv(
                        data_dir.join(format!("{}_u.csv", sig.name)),
                        &exp.grid,
                        &u,
                        &u_name_refs,
                    )
                    .with_context(|| format!("writing {input_csv}"))?;
                    log.push(format!(
                        "{}: wrote {} ({} samples, {} states)",
                        sig.name,
                        csv,
                        exp.grid.len(),
                        n
                    ));
                }
                Err(stable_opinf::Error::Diverged { time, norm, .. }) => {
                    record.status = "diverged".into();
                    record.blow_up_time = Some(time);
                    record.samples = 0;
                    log.push(format!(
                        "{}: diverged at t = {time:.6} (‖x‖ = {norm:.3e}); no CSV written",
                        sig.name
                    ));
                }
                Err(e) => return Err(e).context(format!("simulating {}", sig.name)),
            }
            records.push(record);
        }
    }

    let manifest = Manifest {
        experiment: config.experiment.clone(),
        seed: config.seed,
        state_dim: n,
        input_dim: m,
        samples: config.samples,
        t_start: config.t_start,
        t_end: config.t_end,
        x0: exp.x0.clone(),
        trajectories: records,
    };
    manifest.save(run_dir)?;
    log.push(format!(
        "manifest: {} trajectories ({} train, {} test)",
        manifest.trajectories.len(),
        exp.train.len(),
        exp.test.len()
    ));
    run_dir.log("simulate", &log)?;
    let diverged = manifest.trajectories.iter().filter(|r| r.status == "diverged").count();
    emit(format!(
        "simulate: {} trajectories into {} ({} diverged)",
        manifest.trajectories.len(),
        run_dir.root().display(),
        diverged
    ));
    Ok(0)
}
