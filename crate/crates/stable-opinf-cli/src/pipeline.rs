//! Shared experiment plumbing: ground-truth systems, signal sets, time
//! grids, and the run-directory layout.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use stable_opinf::learn::ModelDocument;
use stable_opinf::model::{
    example_one, example_two, fixed_test_signals, sample_training_signals, uniform_grid,
    BurgersConfig, BurgersModel, Dynamics, SignalFamily, SignalSpec, SimOptions,
};
use stable_opinf::QuadraticControlSystem;

use crate::config::ExperimentConfig;

/// The system trajectories are generated from. Burgers' keeps its
/// structure-exploiting form instead of a dense quadratic operator.
pub enum GroundTruth {
    Dense(QuadraticControlSystem<f64>),
    Burgers(BurgersModel<f64>, BurgersConfig<f64>),
}

impl GroundTruth {
    pub fn dynamics(&self) -> &dyn Dynamics<f64> {
        match self {
            GroundTruth::Dense(sys) => sys,
            GroundTruth::Burgers(model, _) => model,
        }
    }

    pub fn state_dim(&self) -> usize {
        self.dynamics().state_dim()
    }

    pub fn input_dim(&self) -> usize {
        self.dynamics().input_dim()
    }
}

/// A signal plus the name its artifacts are filed under.
#[derive(Debug, Clone)]
pub struct NamedSignal {
    pub name: String,
    pub spec: SignalSpec<f64>,
}

/// Everything derived from a config that commands share: the ground truth,
/// the train/test signal sets, the sampling grid, and integrator options.
pub struct Experiment {
    pub truth: GroundTruth,
    pub train: Vec<NamedSignal>,
    pub test: Vec<NamedSignal>,
    pub grid: Vec<f64>,
    pub x0: Vec<f64>,
    pub sim_options: SimOptions<f64>,
}

impl Experiment {
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        let truth = match config.experiment.as_str() {
            "example1" => GroundTruth::Dense(example_one()),
            "example2" => GroundTruth::Dense(example_two()),
            "burgers" => {
                let bcfg = BurgersConfig::default();
                let model = BurgersModel::new(&bcfg).context("building Burgers model")?;
                GroundTruth::Burgers(model, bcfg)
            }
            "custom" => GroundTruth::Dense(load_system(Path::new(&config.model_file))?),
            other => bail!("unknown experiment {other:?}"),
        };
        if truth.input_dim() != 1 {
            bail!(
                "the CLI pipeline drives single-input systems; this one has {} input channels \
                 (the library API handles multi-input systems directly)",
                truth.input_dim()
            );
        }

        let train_family = match config.experiment.as_str() {
            "burgers" => SignalFamily::BurgersTrain,
            _ => SignalFamily::Example2d,
        };
        let test_family = match config.experiment.as_str() {
            "burgers" => SignalFamily::BurgersTest,
            _ => SignalFamily::Example2d,
        };
        let train = sample_training_signals(train_family, config.train_signals, config.seed)
            .into_iter()
            .enumerate()
            .map(|(i, spec)| NamedSignal { name: format!("train_{i:02}"), spec })
            .collect();
        let mut test: Vec<NamedSignal> = Vec::new();
        if config.fixed_test_signals {
            let fixed = fixed_test_signals::<f64>();
            for (name, spec) in
                [("u1", fixed.u1), ("u2", fixed.u2), ("w1", fixed.w1), ("w2", fixed.w2)]
            {
                test.push(NamedSignal { name: format!("test_{name}"), spec });
            }
        }
        let test_seed = config.seed.wrapping_add(config.test_seed_offset);
        for (i, spec) in sample_training_signals(test_family, config.test_signals, test_seed)
            .into_iter()
            .enumerate()
        {
            test.push(NamedSignal { name: format!("test_s{i:02}"), spec });
        }

        let grid = uniform_grid(config.t_start, config.t_end, config.samples);
        let x0 = if config.x0.is_empty() {
            vec![0.0; truth.state_dim()]
        } else if config.x0.len() == truth.state_dim() {
            config.x0.clone()
        } else {
            bail!(
                "x0 has {} entries, the {} system has {} states",
                config.x0.len(),
                config.experiment,
                truth.state_dim()
            );
        };
        let substeps = if config.substeps > 0 {
            config.substeps
        } else {
            match &truth {
                GroundTruth::Dense(_) => 10,
                GroundTruth::Burgers(_, bcfg) => {
                    let dt = (config.t_end - config.t_start) / (config.samples - 1) as f64;
                    bcfg.stable_substeps(dt).max(10)
                }
            }
        };
        Ok(Self { truth, train, test, grid, x0, sim_options: SimOptions::with_substeps(substeps) })
    }

    /// Integrator options for learned reduced models (moderate dynamics;
    /// the ground-truth substep count may be grid-stiffness driven).
    pub fn rom_sim_options(&self) -> SimOptions<f64> {
        SimOptions::with_substeps(10)
    }
}

/// Loads a ground-truth system from JSON: either a saved model document or
/// a bare system with fields a, h, b.
pub fn load_system(path: &Path) -> Result<QuadraticControlSystem<f64>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading model {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("learner").is_some() {
        let doc: ModelDocument<f64> = serde_json::from_value(value)
            .with_context(|| format!("interpreting model document {}", path.display()))?;
        Ok(doc.system()?)
    } else {
        bare_system(value).with_context(|| format!("interpreting system {}", path.display()))
    }
}

/// Accepts {a, h, b} with or without the redundant n/m fields and runs the
/// shape/finiteness validation of the constructor.
pub fn bare_system(value: serde_json::Value) -> Result<QuadraticControlSystem<f64>> {
    #[derive(Deserialize)]
    struct Operators {
        a: stable_opinf::Matrix<f64>,
        h: stable_opinf::Matrix<f64>,
        b: stable_opinf::Matrix<f64>,
    }
    let ops: Operators = serde_json::from_value(value).context("reading operators a, h, b")?;
    Ok(QuadraticControlSystem::new(ops.a, ops.h, ops.b)?)
}

/// Run-directory layout. Every command works inside one of these:
/// `config.echo.toml` and `run.log` at the root, artifacts in
/// `data/`, `pod/`, `models/`, `eval/`.
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("creating run directory {}", root.display()))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn subdir(&self, name: &str) -> Result<PathBuf> {
        let dir = self.root.join(name);
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(dir)
    }

    pub fn data_dir(&self) -> Result<PathBuf> {
        self.subdir("data")
    }

    pub fn pod_dir(&self) -> Result<PathBuf> {
        self.subdir("pod")
    }

    pub fn models_dir(&self) -> Result<PathBuf> {
        self.subdir("models")
    }

    pub fn eval_dir(&self) -> Result<PathBuf> {
        self.subdir("eval")
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    /// Writes the fully resolved config so reruns are self-describing.
    pub fn echo_config(&self, config: &ExperimentConfig) -> Result<()> {
        let path = self.root.join("config.echo.toml");
        fs::write(&path, config.to_toml()?)
            .with_context(|| format!("writing {}", path.display()))
    }

    /// Appends deterministic command output to the run log (no timestamps,
    /// so identical runs produce identical logs).
    pub fn log(&self, command: &str, lines: &[String]) -> Result<()> {
        use std::io::Write;
        let path = self.root.join("run.log");
        let mut file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .with_context(|| format!("opening {}", path.display()))?;
        for line in lines {
            writeln!(file, "[{command}] {line}")?;
        }
        Ok(())
    }
}

/// Inventory of the trajectories a `simulate` run produced; later stages
/// read their inputs from here.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub state_dim: usize,
    pub input_dim: usize,
    pub samples: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub x0: Vec<f64>,
    pub trajectories: Vec<TrajectoryRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub name: String,
    /// "train" or "test".
    pub kind: String,
    /// States CSV (t plus one column per state), relative to the run root.
    pub csv: String,
    /// Input CSV (t plus one column per channel), relative to the run root.
    pub input_csv: String,
    /// The signal that drove the trajectory.
    pub signal: SignalSpec<f64>,
    /// ‖u‖∞ bound of the signal, when available.
    pub sup_input_bound: Option<f64>,
    /// "ok" or "diverged".
    pub status: String,
    pub blow_up_time: Option<f64>,
    pub samples: usize,
}

impl Manifest {
    pub fn load(run: &RunDir) -> Result<Self> {
        let path = run.manifest_path();
        let text = fs::read_to_string(&path).with_context(|| {
            format!("reading {} (run `simulate` first to generate datasets)", path.display())
        })?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn save(&self, run: &RunDir) -> Result<()> {
        let path = run.manifest_path();
        let text = serde_json::to_string_pretty(self).context("serializing manifest")?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }

    /// Healthy trajectories of one kind, in manifest order.
    pub fn ok_trajectories(&self, kind: &str) -> Vec<&TrajectoryRecord> {
        self.trajectories.iter().filter(|t| t.kind == kind && t.status == "ok").collect()
    }
}
