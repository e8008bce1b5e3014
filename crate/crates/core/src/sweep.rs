//! Parallel parameter scans.
//!
//! Each grid point is an independent job (build, diagonalize, autocorrelate,
//! extract decay times). Jobs run on a dedicated rayon pool and results are
//! collected in grid order, so the summary does not depend on the worker
//! count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{detect_plateau, extract_decay_time, DecayEstimate};
use crate::config::{resolve_observable, Config, RunConfig, Scan};
use crate::dynamics::{autocorrelator_with, diagonalize_model, model_symmetries};
use crate::error::{Error, Result};
use crate::models::ChainModel;

/// Default memory cap in GiB; overridden by [`MEMORY_CAP_ENV`].
pub const DEFAULT_MEMORY_CAP_GIB: f64 = 8.0;
pub const MEMORY_CAP_ENV: &str = "EDGECOH_MEMORY_CAP_GIB";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub model: ChainModel,
    pub axis: String,
    pub grid: Vec<f64>,
    pub run: RunConfig,
    /// Directory for the summary and per-point series; nothing is written
    /// when `None`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub write_series: bool,
}

impl SweepPlan {
    /// One plan per scan of a config, writing into `<dir>/<scan name>`.
    pub fn from_config(config: &Config) -> Vec<SweepPlan> {
        config
            .sweep
            .iter()
            .map(|s: &Scan| SweepPlan {
                model: config.model.clone(),
                axis: s.axis.clone(),
                grid: s.grid.clone(),
                run: config.run.clone(),
                output: Some(config.output.dir.join(s.name())),
                write_series: config.output.series,
            })
            .collect()
    }

    /// Model at one grid value.
    pub fn model_at(&self, value: f64) -> Result<ChainModel> {
        if self.axis == "L" {
            if value.fract() != 0.0 || value < 1.0 {
                return Err(Error::Config { key: "grid".into(), message: format!("L = {value} is not a positive integer") });
            }
            let mut m = self.model.clone();
            m.sites = value as usize;
            Ok(m)
        } else {
            if !self.model.family.coupling_names().contains(&self.axis.as_str()) {
                return Err(Error::Config {
                    key: "axis".into(),
                    message: format!("`{}` is not L or a coupling of {}", self.axis, self.model.family),
                });
            }
            Ok(self.model.clone().with_coupling(&self.axis, value))
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config { key: "grid".into(), message: "empty grid".into() });
        }
        self.run.validate()?;
        for &v in &self.grid {
            let m = self.model_at(v)?;
            m.validate()?;
            for label in &self.run.observables {
                resolve_observable(label, &m)?;
            }
        }
        Ok(())
    }

    /// SHA-256 of the plan's canonical JSON.
    pub fn hash(&self) -> Result<String> {
        let json = serde_json::to_string(self)?;
        Ok(Sha256::digest(json.as_bytes()).iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        }))
    }
}

/// Memory cap from the environment, or the default.
pub fn memory_cap_bytes() -> Result<u64> {
    match std::env::var(MEMORY_CAP_ENV) {
        Ok(v) => {
            let gib: f64 = v.trim().parse().map_err(|_| Error::Config {
                key: MEMORY_CAP_ENV.into(),
                message: format!("`{v}` is not a number of GiB"),
            })?;
            if !(gib > 0.0) {
                return Err(Error::Config { key: MEMORY_CAP_ENV.into(), message: "must be positive".into() });
            }
            Ok((gib * (1u64 << 30) as f64) as u64)
        }
        Err(_) => Ok((DEFAULT_MEMORY_CAP_GIB * (1u64 << 30) as f64) as u64),
    }
}

/// Peak working set of one job. With sectors of dimension `d`, all
/// eigenvectors take `2^L·d` words and an observable has up to as many
/// eigen-pairs, stored first as frequency/weight pairs and then as
/// histogram bins (three words each, at most twice over). On top of that
/// come three dense matrices of one sector.
pub fn job_memory_bytes(model: &ChainModel) -> Result<u64> {
    let sectors = model_symmetries(model)?.len();
    let dim = 1u64 << (model.sites - sectors.min(model.sites));
    let pairs = (1u64 << model.sites) * dim;
    Ok(8 * (9 * pairs + 3 * dim * dim))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub label: String,
    pub decay: DecayEstimate,
    /// Zero-frequency weight over `C(0)`.
    pub plateau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_plateau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub value: f64,
    pub model: ChainModel,
    pub observables: Vec<ObservableRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
    pub workers: usize,
    pub created_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: String,
    pub observables: Vec<String>,
    pub records: Vec<PointRecord>,
    pub provenance: Provenance,
}

fn series_path(dir: &Path, index: usize, label: &str) -> PathBuf {
    let safe: String = label.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    dir.join("points").join(format!("{index:03}")).join(format!("{safe}.csv"))
}

fn run_point(plan: &SweepPlan, index: usize, value: f64) -> Result<Vec<ObservableRecord>> {
    let model = plan.model_at(value)?;
    model.validate()?;
    let spectrum = diagonalize_model(&model)?;
    let times = plan.run.times.times()?;
    let mut out = Vec::new();
    for label in &plan.run.observables {
        let obs = resolve_observable(label, &model)?;
        let series = autocorrelator_with(&spectrum, &obs.operator, &times, plan.run.autocorr_options())?
            .with_label(label.clone(), Some(model.clone()));
        let decay = extract_decay_time(&series, obs.kind, plan.run.decay_options())?;
        let window_plateau = match plan.run.plateau_window {
            Some([a, b]) => Some(detect_plateau(&series, a, b)? / series.norm),
            None => None,
        };
        let series_file = match (&plan.output, plan.write_series) {
            (Some(dir), true) => {
                let p = series_path(dir, index, label);
                series.write(&p, true)?;
                Some(p.strip_prefix(dir).unwrap_or(&p).to_path_buf())
            }
            _ => None,
        };
        out.push(ObservableRecord {
            label: label.clone(),
            decay,
            plateau: series.plateau / series.norm,
            window_plateau,
            series: series_file,
        });
    }
    Ok(out)
}

/// Runs every grid point on `workers` threads. Per-point failures are
/// recorded and never abort the sweep.
pub fn run_sweep(plan: &SweepPlan, workers: usize) -> Result<SweepResult> {
    if workers == 0 {
        return Err(Error::Config { key: "workers".into(), message: "must be positive".into() });
    }
    if plan.grid.is_empty() {
        return Err(Error::Config { key: "grid".into(), message: "empty grid".into() });
    }
    plan.run.validate()?;
    let cap = memory_cap_bytes()?;
    let mut need = 0u64;
    for &v in &plan.grid {
        if let Ok(m) = plan.model_at(v) {
            if m.validate().is_ok() {
                need = need.max(job_memory_bytes(&m)?);
            }
        }
    }
    let concurrent = workers.min(plan.grid.len()) as u64;
    if need.saturating_mul(concurrent) > cap {
        return Err(Error::MemoryBudget { need_bytes: need * concurrent, cap_bytes: cap });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config { key: "workers".into(), message: e.to_string() })?;
    let records: Vec<PointRecord> = pool.install(|| {
        plan.grid
            .par_iter()
            .enumerate()
            .map(|(index, &value)| {
                let model = plan.model_at(value).unwrap_or_else(|_| plan.model.clone());
                match run_point(plan, index, value) {
                    Ok(observables) => PointRecord { index, value, model, observables, error: None },
                    Err(e) => {
                        log::warn!("grid point {index} ({} = {value}) failed: {e}", plan.axis);
                        PointRecord { index, value, model, observables: Vec::new(), error: Some(e.to_string()) }
                    }
                }
            })
            .collect()
    });
    let created_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let result = SweepResult {
        axis: plan.axis.clone(),
        observables: plan.run.observables.clone(),
        records,
        provenance: Provenance { config_hash: plan.hash()?, version: crate::VERSION.into(), workers, created_unix },
    };
    if let Some(dir) = &plan.output {
        result.write(dir)?;
    }
    Ok(result)
}

impl SweepResult {
    /// One row per grid point: the axis value, then `T`, `censored`, DC
    /// plateau (and window plateau when measured) per observable, then the
    /// error message if any.
    pub fn summary_csv(&self) -> String {
        let with_window = self.records.iter().flat_map(|r| &r.observables).any(|o| o.window_plateau.is_some());
        let mut out = format!("index,{}", self.axis);
        for l in &self.observables {
            let _ = write!(out, ",T[{l}],censored[{l}],plateau[{l}]");
            if with_window {
                let _ = write!(out, ",window_plateau[{l}]");
            }
        }
        out.push_str(",error\n");
        for r in &self.records {
            let _ = write!(out, "{},{:?}", r.index, r.value);
            for l in &self.observables {
                match r.observables.iter().find(|o| &o.label == l) {
                    Some(o) => {
                        let _ = write!(out, ",{:?},{},{:?}", o.decay.t, o.decay.censored, o.plateau);
                        if with_window {
                            let _ = write!(out, ",{}", o.window_plateau.map(|v| format!("{v:?}")).unwrap_or_default());
                        }
                    }
                    None => out.push_str(if with_window { ",,,," } else { ",,," }),
                }
            }
            let err = r.error.as_deref().unwrap_or("").replace('"', "'");
            if err.is_empty() {
                out.push_str(",\n");
            } else {
                let _ = writeln!(out, ",\"{err}\"");
            }
        }
        out
    }

    /// Writes `summary.csv`, `records.json` and `provenance.json` to `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("summary.csv"), self.summary_csv())?;
        std::fs::write(dir.join("records.json"), serde_json::to_string_pretty(&self.records)? + "\n")?;
        std::fs::write(dir.join("provenance.json"), serde_json::to_string_pretty(&self.provenance)? + "\n")?;
        Ok(())
    }

    /// `(value, T)` of one observable over successful points.
    pub fn decay_times(&self, label: &str) -> Vec<(f64, DecayEstimate)> {
        self.records
            .iter()
            .filter_map(|r| r.observables.iter().find(|o| o.label == label).map(|o| (r.value, o.decay.clone())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TimeGrid;

    fn plan(grid: Vec<f64>) -> SweepPlan {
        SweepPlan {
            model: ChainModel::zxz(6, 1.0, 0.6, 0.1, 0.1),
            axis: "lambda1".into(),
            grid,
            run: RunConfig {
                times: TimeGrid { t_min: 0.1, t_max: 100.0, points: 30 },
                observables: vec!["SigmaZ".into(), "bulk".into()],
                ..RunConfig::default()
            },
            output: None,
            write_series: false,
        }
    }

    #[test]
    fn ordered_and_deterministic() {
        let p = plan(vec![0.5, 0.6, 0.8, 1.2]);
        let a = run_sweep(&p, 1).unwrap();
        let b = run_sweep(&p, 3).unwrap();
        assert_eq!(a.summary_csv(), b.summary_csv());
        assert_eq!(a.records.iter().map(|r| r.index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(a.summary_csv().lines().count(), 5);
    }

    #[test]
    fn bad_point_isolated() {
        let mut p = plan(vec![4.0, 6.0, 7.0]);
        p.axis = "L".into();
        let r = run_sweep(&p, 2).unwrap();
        assert!(r.records[0].error.is_none());
        assert!(r.records[1].error.is_none());
        assert!(r.records[2].error.is_some());
        assert!(r.summary_csv().lines().nth(3).unwrap().contains('"'));
    }

    #[test]
    fn hash_tracks_plan() {
        let a = plan(vec![0.5]);
        let mut b = a.clone();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.grid[0] = 0.51;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
        assert_eq!(a.hash().unwrap().len(), 64);
    }

    #[test]
    fn memory_estimate() {
        let m = ChainModel::zxz(14, 1.0, 0.6, 0.05, 0.05);
        assert_eq!(job_memory_bytes(&m).unwrap(), 39 * (1u64 << 27));
        assert!(run_sweep(&plan(vec![1.0]), 0).is_err());
    }

    #[test]
    fn writes_tree() {
        let dir = tempfile::tempdir().unwrap();
        let mut p = plan(vec![0.5, 0.7]);
        p.output = Some(dir.path().to_path_buf());
        p.write_series = true;
        let r = run_sweep(&p, 2).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("summary.csv")).unwrap(), r.summary_csv());
        assert!(dir.path().join("provenance.json").exists());
        assert!(dir.path().join("points/001/SigmaZ.csv").exists());
        assert_eq!(r.records[1].observables[0].series.as_deref(), Some(Path::new("points/001/SigmaZ.csv")));
    }
}
