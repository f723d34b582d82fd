//! Experiment configuration: a flat JSON object, with CLI flags layered on top.

use std::path::{Path, PathBuf};

use serde::Deserialize;

pub const SUITES: [&str; 8] = [
    "kernels-verify",
    "osc-bench",
    "tiles-decompose",
    "tree-lemma",
    "bilinear",
    "averaging-beta",
    "ergodic-probe",
    "conjecture-jh",
];

/// Every key is optional; suites fill in their own defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Option<String>,
    pub grid_m: Option<u32>,
    pub nu: Option<f64>,
    pub seed: Option<u64>,
    pub outdir: Option<PathBuf>,
    /// Random instances (signals, trees, set pairs) per sweep.
    pub instances: Option<usize>,
    /// `δ` values for osc-bench.
    pub deltas: Option<Vec<f64>>,
    /// Inclusive `[k_lo, k_hi]` for the Δ_k family.
    pub k_range: Option<(i32, i32)>,
    /// Spacing in bins of the modulation grid for sup-over-N operators.
    pub mod_step: Option<i64>,
    pub ladder_depth: Option<u32>,
    /// Nodes per octave in the truncated-integral quadrature.
    pub quad_nodes: Option<usize>,
    pub theta_range: Option<(f64, f64)>,
    pub theta_points: Option<usize>,
    pub x_grid: Option<Vec<f64>>,
    /// Trigonometric observable as `(frequency, re, im)` triples.
    pub modes: Option<Vec<(i64, f64, f64)>>,
    /// Dilation denominators for conjecture-jh.
    pub osc_n: Option<Vec<u32>>,
    /// Pinned constant for the tree, bilinear and osc ratio checks.
    pub bound: Option<f64>,
    /// Accepted fitted slope range for kernels-verify.
    pub slope_band: Option<(f64, f64)>,
    /// Quadrature steps `(y, θ)` for averaging-beta.
    pub steps: Option<(usize, usize)>,
}

/// Command-line overrides, applied after the file is read.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub suite: Option<String>,
    pub grid_m: Option<u32>,
    pub seed: Option<u64>,
    pub outdir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("no suite given (set \"suite\" or pass --suite)")]
    NoSuite,
    #[error("unknown suite {0:?}; expected one of {list}", list = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("{0}")]
    Invalid(String),
}

/// A validated configuration: suite known, `grid_m ∈ [6, 14]`.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub suite: String,
    pub seed: u64,
    pub outdir: PathBuf,
    pub cfg: ExperimentConfig,
}

impl Resolved {
    pub fn grid_m(&self, default: u32) -> u32 {
        self.cfg.grid_m.unwrap_or(default)
    }

    pub fn nu(&self) -> f64 {
        self.cfg.nu.unwrap_or(8.0)
    }

    pub fn instances(&self, default: usize) -> usize {
        self.cfg.instances.unwrap_or(default)
    }
}

pub fn load(path: &Path, over: Overrides, env_outdir: Option<PathBuf>) -> Result<Resolved, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })?;
    if over.suite.is_some() {
        cfg.suite = over.suite;
    }
    if over.grid_m.is_some() {
        cfg.grid_m = over.grid_m;
    }
    if over.seed.is_some() {
        cfg.seed = over.seed;
    }
    if over.outdir.is_some() {
        cfg.outdir = over.outdir;
    }
    let suite = cfg.suite.clone().ok_or(ConfigError::NoSuite)?;
    if !SUITES.contains(&suite.as_str()) {
        return Err(ConfigError::UnknownSuite(suite));
    }
    if let Some(m) = cfg.grid_m {
        if !(6..=14).contains(&m) {
            return Err(ConfigError::Invalid(format!("grid_m = {m} outside [6, 14]")));
        }
    }
    if cfg.instances == Some(0) {
        return Err(ConfigError::Invalid("instances must be positive".into()));
    }
    if let Some(nu) = cfg.nu {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(ConfigError::Invalid(format!("nu = {nu} must be positive")));
        }
    }
    let outdir = cfg.outdir.clone().or(env_outdir).unwrap_or_else(|| PathBuf::from("tilewave-out"));
    Ok(Resolved { suite, seed: cfg.seed.unwrap_or(0), outdir, cfg })
}
