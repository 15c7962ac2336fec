//! Experiment configuration, read from a single TOML file.
//!
//! ```toml
//! [model]
//! r1 = 1.1
//! r2 = "inf"
//! line1 = { premium = 1.0, claim_rate = 0.5, claims = { type = "deterministic", value = 1.0 } }
//! line2 = { premium = 1.0 }
//!
//! [sim]
//! seed = 42
//! n_paths = 10000
//!
//! [sweep]
//! points = [[0.0, 0.0]]
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ladder_wh::{WhConfig, DEFAULT_REJECTION_CUTOFF};
use crate::mc;
use crate::risk_model::CoverageModel;
use crate::simulator::{SimConfig, DEFAULT_HORIZON};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: CoverageModel,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub wh: WhSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub seed: u64,
    pub n_paths: u64,
    pub horizon: f64,
    /// Defaults to the available parallelism.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            seed: 42,
            n_paths: 10_000,
            horizon: DEFAULT_HORIZON,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WhSection {
    pub n_samples: u64,
    /// In mean inter-claim times of the parent line.
    pub rejection_cutoff: f64,
    /// Real arguments for the factor curves.
    pub w_grid: Vec<f64>,
}

impl Default for WhSection {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            rejection_cutoff: DEFAULT_REJECTION_CUTOFF,
            w_grid: (0..=40).map(|k| k as f64 * 0.25).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Initial capitals `(u, v)` for survival estimates.
    pub points: Vec<[f64; 2]>,
    /// Transform arguments; the sweep is the product grid `s1 x s2`.
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    /// Add direct-simulation columns to the transform sweep.
    pub overlay: bool,
}

impl SweepSection {
    pub fn transform_grid(&self) -> Vec<(f64, f64)> {
        self.s2
            .iter()
            .flat_map(|&b| self.s1.iter().map(move |&a| (a, b)))
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Number of simulated paths to log event by event (first sweep point).
    pub path_logs: u64,
}

/// Overrides the output directory from the environment.
pub const OUT_DIR_ENV: &str = "DEFICIT_COVERAGE_OUT";

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// The model used in the numerical section: two lines with premium 1,
    /// unit deterministic claims at rates 0.5 and 0.9, and `r1 = r2 = 1.1`.
    pub fn baseline() -> Self {
        Self::from_toml(include_str!("../../../../paper/baseline.toml"))
            .expect("shipped config is valid")
    }

    pub fn validate(&self) -> Result<()> {
        self.sim_config()
            .validate()
            .map_err(|e| Error::Config(format!("[sim] {e}")))?;
        if self.wh.n_samples < 2 {
            return Err(Error::Config("[wh] n_samples must be >= 2".into()));
        }
        if !(self.wh.rejection_cutoff.is_finite() && self.wh.rejection_cutoff > 0.0) {
            return Err(Error::Config("[wh] rejection_cutoff must be > 0".into()));
        }
        if self.wh.w_grid.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Config(
                "[wh] w_grid values must be finite and >= 0".into(),
            ));
        }
        if self
            .sweep
            .points
            .iter()
            .flatten()
            .any(|x| !(x.is_finite() && *x >= 0.0))
        {
            return Err(Error::Config(
                "[sweep] points must be finite and >= 0".into(),
            ));
        }
        if self
            .sweep
            .s1
            .iter()
            .chain(&self.sweep.s2)
            .any(|s| !(s.is_finite() && *s > 0.0))
        {
            return Err(Error::Config(
                "[sweep] s1 and s2 must be finite and > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn workers(&self) -> usize {
        self.sim.workers.unwrap_or_else(mc::default_workers).max(1)
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            horizon: self.sim.horizon,
            n_paths: self.sim.n_paths,
            seed: self.sim.seed,
            workers: self.workers(),
            record_transfers: false,
        }
    }

    pub fn wh_config(&self) -> WhConfig {
        WhConfig {
            n_samples: self.wh.n_samples,
            seed: self.sim.seed,
            workers: self.workers(),
            rejection_cutoff: self.wh.rejection_cutoff,
        }
    }

    /// SHA-256 of the canonical serialization, after command-line overrides.
    /// The worker count is excluded since it does not affect results.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.sim.workers = None;
        canon.output = OutputSection::default();
        let text = toml::to_string(&canon).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Output directory: explicit flag, then environment, then config, then `out`.
    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(p);
        }
        self.output
            .dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}
