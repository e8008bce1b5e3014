//! Run configuration files and observable labels.
//!
//! A config has a `model` block (the [`ChainModel`] JSON), an optional `run`
//! block (time grid, threshold, bins, observables), an optional `output`
//! block and, for sweeps, a list of `sweep` scans. Unknown keys anywhere are
//! rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{DecayKind, DecayOptions, DEFAULT_THRESHOLD, DEFAULT_WINDOW};
use crate::dynamics::{log_times, AutocorrOptions, DEFAULT_BIN_WIDTH};
use crate::error::{Error, Result};
use crate::models::{bulk_reference, dual_edge_operators, edge_operators, ChainModel, Family};
use crate::pauli::{parse_operator, OperatorSum, PauliString};
use crate::szm::Seed;

/// Log-spaced grid from `t_min` to `t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid { t_min: 0.1, t_max: 1e5, points: 400 }
    }
}

impl TimeGrid {
    pub fn times(&self) -> Result<Vec<f64>> {
        log_times(self.t_min, self.t_max, self.points).map_err(|e| config_error("run.times", e))
    }
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_window() -> usize {
    DEFAULT_WINDOW
}

fn default_bin_width() -> Option<f64> {
    Some(DEFAULT_BIN_WIDTH)
}

fn default_observables() -> Vec<String> {
    vec!["SigmaX".into(), "SigmaZ".into(), "bulk".into()]
}

fn default_seeds() -> Vec<Seed> {
    vec![Seed::SigmaZ, Seed::SigmaX]
}

fn default_order() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub times: TimeGrid,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_window")]
    pub window: usize,
    /// Histogram bin width; `null` sums eigen-pairs without binning.
    #[serde(default = "default_bin_width")]
    pub bin_width: Option<f64>,
    #[serde(default)]
    pub envelope: bool,
    #[serde(default = "default_observables")]
    pub observables: Vec<String>,
    /// `[t_a, t_b]` for an intermediate-time plateau estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau_window: Option<[f64; 2]>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<Seed>,
    #[serde(default = "default_order")]
    pub seed_order: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            times: TimeGrid::default(),
            threshold: DEFAULT_THRESHOLD,
            window: DEFAULT_WINDOW,
            bin_width: default_bin_width(),
            envelope: false,
            observables: default_observables(),
            plateau_window: None,
            seeds: default_seeds(),
            seed_order: default_order(),
        }
    }
}

impl RunConfig {
    pub fn decay_options(&self) -> DecayOptions {
        DecayOptions { threshold: self.threshold, window: self.window, envelope: self.envelope }
    }

    pub fn autocorr_options(&self) -> AutocorrOptions {
        AutocorrOptions { bin_width: self.bin_width }
    }

    pub fn validate(&self) -> Result<()> {
        self.times.times()?;
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(config_error("run.threshold", format!("{} is outside (0, 1)", self.threshold)));
        }
        if self.window == 0 {
            return Err(config_error("run.window", "must be positive"));
        }
        if let Some(w) = self.bin_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(config_error("run.bin_width", format!("{w} is not a positive width")));
            }
        }
        if let Some([a, b]) = self.plateau_window {
            if !(a > 0.0 && b >= a) {
                return Err(config_error("run.plateau_window", format!("[{a}, {b}] is not a window")));
            }
        }
        if self.observables.is_empty() {
            return Err(config_error("run.observables", "empty list"));
        }
        if self.seed_order > crate::szm::MAX_ORDER {
            return Err(config_error("run.seed_order", format!("{} exceeds {}", self.seed_order, crate::szm::MAX_ORDER)));
        }
        Ok(())
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Write per-point series CSVs in sweeps.
    #[serde(default = "default_true")]
    pub series: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir(), series: true }
    }
}

/// One scanned axis: a coupling name or `"L"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan {
    pub axis: String,
    pub grid: Vec<f64>,
    /// Output subdirectory; defaults to the axis name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl Scan {
    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.axis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ChainModel,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<Scan>,
}

fn config_error(key: &str, message: impl ToString) -> Error {
    Error::Config { key: key.into(), message: message.to_string() }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        let c: Config = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            // serde names the offending field in the message
            let key = msg.split('`').nth(1).unwrap_or("config").to_string();
            Error::Config { key, message: msg }
        })?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        Config::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.run.validate()?;
        for label in &self.run.observables {
            resolve_observable(label, &self.model)?;
        }
        for (i, s) in self.sweep.iter().enumerate() {
            if s.grid.is_empty() {
                return Err(config_error(&format!("sweep[{i}].grid"), "empty grid"));
            }
            if s.axis != "L" && !self.model.family.coupling_names().contains(&s.axis.as_str()) {
                return Err(config_error(&format!("sweep[{i}].axis"), format!("`{}` is not L or a coupling of {}", s.axis, self.model.family)));
            }
        }
        Ok(())
    }
}

/// A resolved observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub label: String,
    pub operator: OperatorSum,
    pub kind: DecayKind,
}

fn edge_set(model: &ChainModel) -> Result<[PauliString; 3]> {
    let l = model.sites;
    Ok(match model.family {
        Family::Ising => [PauliString::x(l, 1)?, PauliString::y(l, 1)?, PauliString::z(l, 1)?],
        Family::DualIsing => {
            let e = dual_edge_operators(l)?;
            [e.x, e.y, e.z]
        }
        Family::Zxz | Family::Floquet => {
            let e = edge_operators(l)?;
            [e.x, e.y, e.z]
        }
    })
}

/// Resolves `SigmaX`, `SigmaY`, `SigmaZ` (the family's edge operators),
/// `bulk` (`σᶻ` mid-chain), `bulkX`, `file:<path>` (term format) or a
/// Pauli product such as `X1 Z2`.
///
/// For ISING the edge operators are the single-site `σˣ₁, σʸ₁, σᶻ₁`.
pub fn resolve_observable(label: &str, model: &ChainModel) -> Result<Observable> {
    let l = model.sites;
    let bad = |m: String| config_error("run.observables", format!("`{label}`: {m}"));
    let single = |p: PauliString, kind| Observable { label: label.into(), operator: OperatorSum::from_string(&p), kind };
    match label {
        "SigmaX" | "SigmaY" | "SigmaZ" => {
            let [x, y, z] = edge_set(model).map_err(|e| bad(e.to_string()))?;
            Ok(match label {
                "SigmaX" => single(x, DecayKind::T2Star),
                "SigmaY" => single(y, DecayKind::T2Star),
                _ => single(z, DecayKind::T1),
            })
        }
        "bulk" => Ok(single(bulk_reference(l)?, DecayKind::T1)),
        "bulkX" => Ok(single(PauliString::x(l, l.div_ceil(2))?, DecayKind::T2Star)),
        _ => {
            let operator = if let Some(path) = label.strip_prefix("file:") {
                let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
                parse_operator(&text, Some(l)).map_err(|e| bad(e.to_string()))?
            } else {
                parse_operator(&format!("(1) {label}"), Some(l)).map_err(|e| bad(e.to_string()))?
            };
            if !operator.is_hermitian() {
                return Err(bad("not Hermitian".into()));
            }
            Ok(Observable { label: label.into(), operator, kind: DecayKind::T1 })
        }
    }
}
