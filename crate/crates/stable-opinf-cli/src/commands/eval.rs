//! `eval`: simulate ground truth and every learned model under each test
//! signal from the same initial condition and tabulate the discrepancies.
//! Unstable runs are marked with an `inf` sentinel and their blow-up time.

use anyhow::{bail, Context, Result};
use stable_opinf::data::{pod_lift, pod_project, PodBasis};
use stable_opinf::learn::ModelDocument;
use stable_opinf::linalg::norm2;
use stable_opinf::metrics::trajectory_errors;
use stable_opinf::model::{simulate, Input, Trajectory};
use stable_opinf::Matrix;

use crate::commands::{emit, fmt_e, pod::load_pod_basis};
use crate::config::ExperimentConfig;
use crate::pipeline::{Experiment, RunDir};

const HEADER: &str = "model,signal,status,mean_abs_error,signed_mean_error,\
                      relative_l2_error,max_norm,bibs_bound,within_bound,blow_up_time";

struct Row {
    model: String,
    signal: String,
    status: String,
    mean_abs: Option<f64>,
    signed_mean: Option<f64>,
    rel_l2: Option<f64>,
    max_norm: Option<f64>,
    bound: Option<f64>,
    within: Option<bool>,
    blow_up: Option<f64>,
}

impl Row {
    fn to_csv(&self) -> String {
        let opt = |v: &Option<f64>| v.map(fmt_e).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.model,
            self.signal,
            self.status,
            sentinel(&self.status, &self.mean_abs),
            sentinel(&self.status, &self.signed_mean),
            sentinel(&self.status, &self.rel_l2),
            opt(&self.max_norm),
            opt(&self.bound),
            self.within.map(|b| b.to_string()).unwrap_or_default(),
            opt(&self.blow_up),
        )
    }
}

/// Error columns carry `inf` for diverged runs so sorting and thresholding
/// treat them as worst-case.
fn sentinel(status: &str, value: &Option<f64>) -> String {
    match value {
        Some(v) => fmt_e(*v),
        None if status == "diverged" => "inf".into(),
        None => String::new(),
    }
}

pub fn run(config: &ExperimentConfig, run_dir: &RunDir) -> Result<i32> {
    let exp = Experiment::build(config)?;
    run_dir.echo_config(config)?;
    if exp.test.is_empty() {
        bail!("no test signals configured (set fixed_test_signals or test_signals)");
    }
    let models_dir = run_dir.root().join("models");
    let mut models: Vec<(String, ModelDocument<f64>)> = Vec::new();
    for name in ["stable", "baseline"] {
        let path = models_dir.join(format!("{name}.json"));
        if path.is_file() {
            let doc = ModelDocument::load(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            models.push((name.to_string(), doc));
        }
    }
    if models.is_empty() {
        bail!("no models found in {} (run `learn` first)", models_dir.display());
    }
    let basis: Option<PodBasis<f64>> =
        if config.uses_pod() { Some(load_pod_basis(run_dir)?) } else { None };

    let mut rows: Vec<Row> = Vec::new();
    let mut log = Vec::new();
    for sig in &exp.test {
        let truth = match simulate(
            exp.truth.dynamics(),
            &exp.x0,
            &sig.spec,
            &exp.grid,
            &exp.sim_options,
        ) {
            Ok(traj) => traj,
            Err(stable_opinf::Error::Diverged { time, .. }) => {
                log.push(format!("{}: ground truth diverged at t = {time:.6}", sig.name));
                rows.push(Row {
                    model: "truth".into(),
                    signal: sig.name.clone(),
                    status: "diverged".into(),
                    mean_abs: None,
                    signed_mean: None,
                    rel_l2: None,
                    max_norm: None,
                    bound: None,
                    within: None,
                    blow_up: Some(time),
                });
                continue;
            }
            Err(e) => return Err(e).context(format!("simulating truth under {}", sig.name)),
        };
        // Self-comparison row: the tabulated error of truth against itself
        // is computed, not assumed, and must be exactly zero.
        let self_err = trajectory_errors(&truth.states, &truth.states);
        rows.push(Row {
            model: "truth".into(),
            signal: sig.name.clone(),
            status: "ok".into(),
            mean_abs: Some(self_err.mean_abs_error),
            signed_mean: Some(self_err.signed_mean_error),
            rel_l2: Some(self_err.relative_l2_error),
            max_norm: Some(truth.max_norm()),
            bound: None,
            within: None,
            blow_up: None,
        });

        for (name, doc) in &models {
            rows.push(model_row(name, doc, sig, &truth, &exp, basis.as_ref())?);
        }
    }

    let eval_dir = run_dir.eval_dir()?;
    let mut csv = String::from(HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    let csv_path = eval_dir.join("errors.csv");
    std::fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;

    for row in &rows {
        if row.model == "truth" {
            continue;
        }
        log.push(match row.status.as_str() {
            "ok" => format!(
                "{} under {}: mean_abs_error {:.6e}, max ‖x‖ {:.6e}",
                row.model,
                row.signal,
                row.mean_abs.unwrap_or(f64::NAN),
                row.max_norm.unwrap_or(f64::NAN)
            ),
            _ => format!(
                "{} under {}: DIVERGED at t = {:.6}",
                row.model,
                row.signal,
                row.blow_up.unwrap_or(f64::NAN)
            ),
        });
    }
    run_dir.log("eval", &log)?;

    emit(format!("eval: {} rows -> {}", rows.len(), csv_path.display()));
    for line in &log {
        emit(format!("  {line}"));
    }
    Ok(0)
}

fn model_row(
    name: &str,
    doc: &ModelDocument<f64>,
    sig: &crate::pipeline::NamedSignal,
    truth: &Trajectory<f64>,
    exp: &Experiment,
    basis: Option<&PodBasis<f64>>,
) -> Result<Row> {
    let sys = doc.system().with_context(|| format!("reassembling {name} model"))?;
    let x0 = match basis {
        Some(b) => {
            let col = Matrix::from_fn(exp.x0.len(), 1, |i, _| exp.x0[i]);
            pod_project(b, &col)?.col(0)
        }
        None => exp.x0.clone(),
    };
    // The BIBS bound, when this model carries a certificate and the signal
    // has a known sup bound: ‖x(t)‖ ≤ max(‖x0‖, r·‖u‖∞).
    let bound = match (doc.certificate.trapping_radius_per_unit_input, sig.spec.sup_norm_bound()) {
        (Some(per_unit), Some(u_bound)) if doc.certificate.certified => {
            Some(norm2(&x0).max(per_unit * u_bound))
        }
        _ => None,
    };
    match simulate(&sys, &x0, &sig.spec, &exp.grid, &exp.rom_sim_options()) {
        Ok(traj) => {
            let compare = match basis {
                Some(b) => pod_lift(b, &traj.states)?,
                None => traj.states.clone(),
            };
            let err = trajectory_errors(&truth.states, &compare);
            let max_norm = traj.max_norm();
            Ok(Row {
                model: name.to_string(),
                signal: sig.name.clone(),
                status: "ok".into(),
                mean_abs: Some(err.mean_abs_error),
                signed_mean: Some(err.signed_mean_error),
                rel_l2: Some(err.relative_l2_error),
                max_norm: Some(max_norm),
                bound,
                within: bound.map(|b| max_norm <= b * (1.0 + 1e-6)),
                blow_up: None,
            })
        }
        Err(stable_opinf::Error::Diverged { time, .. }) => Ok(Row {
            model: name.to_string(),
            signal: sig.name.clone(),
            status: "diverged".into(),
            mean_abs: None,
            signed_mean: None,
            rel_l2: None,
            max_norm: None,
            bound,
            within: bound.map(|_| false),
            blow_up: Some(time),
        }),
        Err(e) => Err(e).context(format!("simulating {name} under {}", sig.name)),
    }
}
