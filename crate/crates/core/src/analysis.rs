//! Decay times, plateaus and exponential scaling fits.

use serde::{Deserialize, Serialize};

use crate::dynamics::AutocorrSeries;
use crate::error::{Error, Result};

/// Default 1/e crossing threshold.
pub const DEFAULT_THRESHOLD: f64 = 1.0 / std::f64::consts::E;
/// Default smoothing window, in grid points.
pub const DEFAULT_WINDOW: usize = 5;

const FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecayKind {
    T1,
    #[serde(rename = "T2star")]
    T2Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayOptions {
    pub threshold: f64,
    pub window: usize,
    /// Smooth the monotone [`envelope`] instead of `|C(t)|` itself.
    #[serde(default)]
    pub envelope: bool,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions { threshold: DEFAULT_THRESHOLD, window: DEFAULT_WINDOW, envelope: false }
    }
}

/// A decay time. When `censored`, `T` is the last grid time and only a
/// lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayEstimate {
    pub kind: DecayKind,
    #[serde(rename = "T")]
    pub t: f64,
    pub censored: bool,
    pub threshold: f64,
    pub window: usize,
    pub method: String,
}

/// Centered moving geometric mean of `|y|`, window shrunk at the ends.
pub fn smooth_geometric(y: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let logs: Vec<f64> = y.iter().map(|v| v.abs().max(FLOOR).ln()).collect();
    (0..y.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(y.len());
            (logs[lo..hi].iter().sum::<f64>() / (hi - lo) as f64).exp()
        })
        .collect()
}

/// Upper envelope `max_{t' ≥ t} |C(t')| / C(0)`: non-increasing, so
/// oscillations below an already-reached level are ignored.
pub fn envelope(values: &[f64], norm: f64) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    let mut run = 0.0f64;
    for (o, v) in out.iter_mut().zip(values).rev() {
        run = run.max(v.abs() / norm);
        *o = run;
    }
    out
}

/// First crossing of `threshold` by the smoothed, normalized `|C(t)|`,
/// interpolated linearly in `(ln t, ln C)`.
pub fn extract_decay_time(s: &AutocorrSeries, kind: DecayKind, options: DecayOptions) -> Result<DecayEstimate> {
    if s.times.is_empty() || s.times.len() != s.values.len() {
        return Err(Error::Analysis("empty or ragged series".into()));
    }
    if !(s.norm > 0.0) {
        return Err(Error::Analysis(format!("C(0) = {} is not positive", s.norm)));
    }
    if !(options.threshold > 0.0 && options.threshold < 1.0) || options.window == 0 {
        return Err(Error::Analysis("threshold must lie in (0, 1) and the window be positive".into()));
    }
    let y: Vec<f64> = if options.envelope {
        envelope(&s.values, s.norm)
    } else {
        s.values.iter().map(|v| v / s.norm).collect()
    };
    let sm = smooth_geometric(&y, options.window);
    let est = |t: f64, censored: bool| DecayEstimate {
        kind,
        t,
        censored,
        threshold: options.threshold,
        window: options.window,
        method: if options.envelope { "smoothed upper envelope of |C(t)|/C(0)" } else { "smoothed |C(t)|/C(0)" }
            .into(),
    };
    let Some(i) = sm.iter().position(|v| *v < options.threshold) else {
        return Ok(est(*s.times.last().unwrap(), true));
    };
    if i == 0 {
        return Ok(est(s.times[0], false));
    }
    let (t0, t1) = (s.times[i - 1], s.times[i]);
    let (y0, y1, yt) = (sm[i - 1].ln(), sm[i].ln(), options.threshold.ln());
    let f = (yt - y0) / (y1 - y0);
    let t = if t0 > 0.0 { (t0.ln() + f * (t1.ln() - t0.ln())).exp() } else { t0 + f * (t1 - t0) };
    Ok(est(t, false))
}

/// Geometric mean of `|C|` over grid points with `t_a ≤ t ≤ t_b`.
pub fn detect_plateau(s: &AutocorrSeries, t_a: f64, t_b: f64) -> Result<f64> {
    let logs: Vec<f64> = s
        .times
        .iter()
        .zip(&s.values)
        .filter(|(t, _)| **t >= t_a && **t <= t_b)
        .map(|(_, v)| v.abs().max(FLOOR).ln())
        .collect();
    if logs.is_empty() {
        return Err(Error::Analysis(format!("no grid points in [{t_a}, {t_b}]")));
    }
    Ok((logs.iter().sum::<f64>() / logs.len() as f64).exp())
}

/// One point of a scaling scan: control parameter and decay time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub x: f64,
    pub estimate: DecayEstimate,
}

/// `ln T = slope · x + intercept`, i.e. `T = prefactor · e^{c x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub c: f64,
    pub prefactor: f64,
    pub points: usize,
}

pub fn fit_prethermal_scaling(points: &[ScalingPoint]) -> Result<ScalingFit> {
    if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.estimate.censored) {
        return Err(Error::Analysis(format!(
            "point {i} (x = {}) is censored: T >= {} is only a lower bound",
            p.x, p.estimate.t
        )));
    }
    if points.len() < 3 {
        return Err(Error::Analysis(format!("need at least 3 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.estimate.t.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Analysis("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(ScalingFit { slope, intercept, r2, c: slope, prefactor: intercept.exp(), points: points.len() })
}
