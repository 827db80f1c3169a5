//! Experiment configuration: a flat `key = value` TOML document.
//!
//! A config names one of the built-in experiments (or `custom`) and may
//! override any subset of that experiment's defaults. The fully resolved
//! config — every key, including defaults the user never wrote — is echoed
//! into the run directory so no behavior is implicit.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use stable_opinf::learn::TrainConfig;
use stable_opinf::data::PodCriterion;

/// Flat experiment configuration. Field order here is the order keys appear
/// in the echoed file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `example1` | `example2` | `burgers` | `custom`.
    pub experiment: String,
    /// Master seed; training-signal draws, parameter initialization, and
    /// noise all derive from it deterministically.
    pub seed: u64,
    /// Sampled test signals are drawn with seed `seed + test_seed_offset`
    /// so they never coincide with training draws.
    pub test_seed_offset: u64,
    /// Number of training signals to draw.
    pub train_signals: usize,
    /// Number of sampled test signals to draw (the Burgers test family, or
    /// extra low-dimensional draws beyond the fixed four).
    pub test_signals: usize,
    /// Include the four fixed test inputs u1, u2, w1 (=10·u1), w2 (=10·u2).
    pub fixed_test_signals: bool,
    /// Snapshots per trajectory, equidistant on [t_start, t_end].
    pub samples: usize,
    pub t_start: f64,
    pub t_end: f64,
    /// Initial condition; empty means the zero vector.
    pub x0: Vec<f64>,
    /// Runge–Kutta substeps per output interval; 0 picks a default (10, or
    /// a viscosity-based count for the Burgers grid).
    pub substeps: usize,
    /// Standard deviation of additive Gaussian state noise (0 disables).
    pub noise_sigma: f64,
    /// `exact` (evaluate the ground-truth right-hand side) or `stencil`
    /// (5-point finite differences on the snapshots).
    pub derivative_mode: String,
    /// POD basis rank; 0 disables the projection step.
    pub pod_rank: usize,
    /// POD retained-energy criterion in (0, 1]; 0 disables. Mutually
    /// exclusive with `pod_rank`.
    pub pod_energy: f64,
    /// Ridge regularization for the unconstrained least-squares learner.
    pub ridge: f64,
    /// Gradient updates for the stability-constrained learner.
    pub updates: usize,
    pub lr_min: f64,
    pub lr_max: f64,
    pub cycle_length: usize,
    pub l1_weight: f64,
    pub init_std: f64,
    /// Learn a generalized quadratic Lyapunov certificate (V = xᵀQx) instead
    /// of fixing Q = I.
    pub generalized: bool,
    /// Ground-truth system JSON for `custom` experiments (a saved model
    /// document or a bare {a, h, b} system).
    pub model_file: String,
    /// Run directory; all outputs land under it.
    pub out_dir: String,
}

impl ExperimentConfig {
    /// Built-in experiment defaults.
    pub fn preset(experiment: &str) -> Result<Self> {
        let base = Self {
            experiment: "custom".into(),
            seed: 0,
            test_seed_offset: 1000,
            train_signals: 2,
            test_signals: 0,
            fixed_test_signals: true,
            samples: 200,
            t_start: 0.0,
            t_end: 10.0,
            x0: vec![],
            substeps: 0,
            noise_sigma: 0.0,
            derivative_mode: "stencil".into(),
            pod_rank: 0,
            pod_energy: 0.0,
            ridge: 0.0,
            updates: 12000,
            lr_min: 1e-6,
            lr_max: 1e-2,
            cycle_length: 2000,
            l1_weight: 1e-4,
            init_std: 0.1,
            generalized: false,
            model_file: String::new(),
            out_dir: "runs/custom".into(),
        };
        Ok(match experiment {
            "example1" => Self {
                experiment: "example1".into(),
                derivative_mode: "exact".into(),
                out_dir: "runs/example1".into(),
                ..base
            },
            "example2" => Self {
                experiment: "example2".into(),
                noise_sigma: 0.02,
                out_dir: "runs/example2".into(),
                ..base
            },
            "burgers" => Self {
                experiment: "burgers".into(),
                train_signals: 20,
                test_signals: 10,
                fixed_test_signals: false,
                samples: 1001,
                pod_rank: 9,
                ridge: 1e-8,
                out_dir: "runs/burgers".into(),
                ..base
            },
            "custom" => base,
            other => bail!(
                "unknown experiment {other:?} (expected example1, example2, burgers, or custom)"
            ),
        })
    }

    /// Loads a config file: the `experiment` key selects the preset, every
    /// other key overrides one of its fields. Unknown keys are errors.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let user: toml::Table = text
            .parse()
            .with_context(|| format!("parsing config {}", path.display()))?;
        let experiment = match user.get("experiment") {
            Some(toml::Value::String(s)) => s.clone(),
            Some(other) => bail!("config key `experiment` must be a string, got {other}"),
            None => "custom".to_string(),
        };
        let preset = Self::preset(&experiment)?;
        let mut table = toml::Table::try_from(&preset).context("serializing preset")?;
        for (key, value) in user {
            if !table.contains_key(&key) {
                bail!("unknown config key `{key}` in {}", path.display());
            }
            table.insert(key, value);
        }
        let config: Self = toml::Value::Table(table)
            .try_into()
            .with_context(|| format!("interpreting config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    /// The resolved config as a flat TOML document.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing config")
    }

    pub fn validate(&self) -> Result<()> {
        match self.experiment.as_str() {
            "example1" | "example2" | "burgers" | "custom" => {}
            other => bail!("unknown experiment {other:?}"),
        }
        if self.samples < 2 {
            bail!("samples must be ≥ 2, got {}", self.samples);
        }
        if self.derivative_mode == "stencil" && self.samples < 5 {
            bail!("stencil derivatives need ≥ 5 samples, got {}", self.samples);
        }
        if !(self.t_end > self.t_start) || !self.t_start.is_finite() || !self.t_end.is_finite() {
            bail!("need finite t_start < t_end, got [{}, {}]", self.t_start, self.t_end);
        }
        match self.derivative_mode.as_str() {
            "exact" => {
                if self.noise_sigma > 0.0 {
                    bail!(
                        "derivative_mode = \"exact\" is incompatible with noise_sigma > 0: \
                         exact derivatives of noise-corrupted states do not exist; \
                         use derivative_mode = \"stencil\""
                    );
                }
            }
            "stencil" => {}
            other => bail!("derivative_mode must be \"exact\" or \"stencil\", got {other:?}"),
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            bail!("noise_sigma must be finite and ≥ 0, got {}", self.noise_sigma);
        }
        if self.pod_rank > 0 && self.pod_energy > 0.0 {
            bail!("pod_rank and pod_energy are mutually exclusive; set one of them to 0");
        }
        if self.pod_energy < 0.0 || self.pod_energy > 1.0 {
            bail!("pod_energy must lie in (0, 1] (or 0 to disable), got {}", self.pod_energy);
        }
        if !self.ridge.is_finite() || self.ridge < 0.0 {
            bail!("ridge must be finite and ≥ 0, got {}", self.ridge);
        }
        if self.x0.iter().any(|v| !v.is_finite()) {
            bail!("x0 entries must be finite");
        }
        if self.out_dir.is_empty() {
            bail!("out_dir must not be empty");
        }
        if self.experiment == "custom" && self.model_file.is_empty() {
            bail!("custom experiments need model_file (ground-truth system JSON)");
        }
        self.train_config().validate().map_err(|e| anyhow!("training config: {e}"))?;
        Ok(())
    }

    /// The optimizer settings encoded in this config.
    pub fn train_config(&self) -> TrainConfig<f64> {
        TrainConfig {
            updates: self.updates,
            lr_min: self.lr_min,
            lr_max: self.lr_max,
            cycle_length: self.cycle_length,
            l1_weight: self.l1_weight,
            init_std: self.init_std,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }

    /// The POD criterion, or None when projection is disabled.
    pub fn pod_criterion(&self) -> Option<PodCriterion<f64>> {
        if self.pod_rank > 0 {
            Some(PodCriterion::Rank(self.pod_rank))
        } else if self.pod_energy > 0.0 {
            Some(PodCriterion::Energy(self.pod_energy))
        } else {
            None
        }
    }

    /// Whether any dataprep stage needs a POD basis.
    pub fn uses_pod(&self) -> bool {
        self.pod_criterion().is_some()
    }
}
