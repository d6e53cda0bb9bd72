use std::path::{Path, PathBuf};

use credit_calib::calibration::{CalibrationConfig, CalibrationMethod};
use credit_calib::data::{FeatureSetKind, SplitFractions};
use credit_calib::models::{ModelKind, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::cli::GlobalArgs;
use crate::error::CliError;

/// Environment variable consulted when no dataset path is configured.
pub const DATASET_ENV: &str = "CREDIT_CSV";
pub const EFFECTIVE_CONFIG_FILE: &str = "run_config.json";

/// Every setting of a run. Loaded from `--config`, then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub features: FeatureSetKind,
    pub model: ModelKind,
    /// Seeds the split, network initialization, batch order and SURE start.
    pub seed: u64,
    pub bins: usize,
    pub out: PathBuf,
    pub fractions: SplitFractions,
    pub train: TrainConfig,
    pub calibration: CalibrationConfig,
    /// Calibration methods, e.g. `"platt"` or `"sure-sigmoid+platt"`.
    pub plan: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            features: FeatureSetKind::All,
            model: ModelKind::LogReg,
            seed: 42,
            bins: 10,
            out: PathBuf::from("runs"),
            fractions: SplitFractions::default(),
            train: TrainConfig::default(),
            calibration: CalibrationConfig::default(),
            plan: CalibrationMethod::ALL
                .iter()
                .map(ToString::to_string)
                .collect(),
        }
    }
}

impl RunConfig {
    pub fn resolve(global: &GlobalArgs) -> Result<Self, CliError> {
        let mut cfg = match &global.config {
            Some(path) => credit_calib::io::read_json::<RunConfig>(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = global.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &global.out {
            cfg.out = out.clone();
        }
        if let Some(f) = global.features {
            cfg.features = f;
        }
        if let Some(m) = global.model {
            cfg.model = m;
        }
        if let Some(b) = global.bins {
            cfg.bins = usize::try_from(b)
                .map_err(|_| CliError::Usage(format!("--bins {b} is too large")))?;
        }
        // one run seed drives every stochastic step
        cfg.train.seed = cfg.seed;
        cfg.calibration.sure.seed = cfg.seed;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.bins == 0 {
            return Err(CliError::Usage("bin count must be at least 1".into()));
        }
        self.train.validate()?;
        self.calibration.sure.validate()?;
        self.plan()?;
        Ok(())
    }

    pub fn plan(&self) -> Result<Vec<CalibrationMethod>, CliError> {
        self.plan
            .iter()
            .map(|s| s.parse().map_err(CliError::from))
            .collect()
    }

    /// Dataset path from the config or, failing that, the environment.
    pub fn dataset_path(&self) -> Result<PathBuf, CliError> {
        self.dataset
            .clone()
            .or_else(|| std::env::var_os(DATASET_ENV).map(PathBuf::from))
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "no dataset given: pass --data, set \"dataset\" in the config, or set {DATASET_ENV}"
                ))
            })
    }

    pub fn prepared_dir(&self) -> PathBuf {
        self.out.join(self.features.to_string()).join("prepared")
    }

    pub fn model_dir(&self) -> PathBuf {
        self.out
            .join(self.features.to_string())
            .join(self.model.to_string())
    }

    pub fn calibration_dir(&self) -> PathBuf {
        self.model_dir().join("calibration")
    }

    pub fn persist(&self, dir: &Path) -> Result<(), CliError> {
        credit_calib::io::write_json(dir.join(EFFECTIVE_CONFIG_FILE), self)?;
        Ok(())
    }
}
