use std::fs;
use std::io::Write;
use std::path::Path;

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::{matrix_terms, parity, Spectrum};
use crate::error::{Error, Result};
use crate::models::ChainModel;
use crate::pauli::OperatorSum;
use crate::scalar::Scalar;

/// Default frequency-bin width.
pub const DEFAULT_BIN_WIDTH: f64 = 1e-6;

/// Largest `width · t` used when picking a merged bin level for time `t`.
pub const PHASE_TOLERANCE: f64 = 0.02;

/// All `(|E_m − E_n|, |A_mn|² / 2^L)` pairs, unsorted.
pub fn spectral_pairs<T: Scalar>(spec: &Spectrum, a: &OperatorSum<T>) -> Result<Vec<(f64, f64)>> {
    crate::pauli::same_sites(spec.sites, a.n_sites())?;
    if !a.is_hermitian() {
        return Err(Error::NotHermitian(a.sub(&a.adjoint())?.norm_sqr().to_f64().sqrt()));
    }
    let norm = 1.0 / spec.dim() as f64;
    let terms = matrix_terms(a, spec.rotated);
    // group terms by the sectors they connect
    let mut groups: std::collections::BTreeMap<u32, Vec<_>> = Default::default();
    for t in terms {
        let flip = spec.sector_of(t.0.x as usize);
        groups.entry(flip).or_default().push(t);
    }
    let mut pairs = Vec::new();
    for (flip, terms) in &groups {
        let has_im = terms.iter().any(|t| t.2 != 0.0);
        for src in spec.sectors.iter() {
            let Some(di) = spec.sector_index(src.label ^ flip) else { continue };
            let dst = &spec.sectors[di];
            let (d_out, d_in) = (dst.dim(), src.dim());
            let pos = |b: usize| dst.states.binary_search(&b).expect("sector closed under the symmetry");
            // A restricted to src -> dst, applied to the eigenvectors of src
            let mut av_re = Mat::<f64>::zeros(d_out, d_in);
            let mut av_im = Mat::<f64>::zeros(d_out, if has_im { d_in } else { 0 });
            for (col, &b) in src.states.iter().enumerate() {
                for (k, cr, ci) in terms {
                    let row = pos(b ^ k.x as usize);
                    let s = parity(k.z & b as u64);
                    for j in 0..d_in {
                        let v = src.eigenvectors[(col, j)];
                        av_re[(row, j)] += s * cr * v;
                        if has_im {
                            av_im[(row, j)] += s * ci * v;
                        }
                    }
                }
            }
            let m_re = dst.eigenvectors.transpose() * &av_re;
            let m_im = if has_im { Some(dst.eigenvectors.transpose() * &av_im) } else { None };
            pairs.reserve(d_out * d_in);
            for n in 0..d_in {
                for m in 0..d_out {
                    let mut w = m_re[(m, n)] * m_re[(m, n)];
                    if let Some(mi) = &m_im {
                        w += mi[(m, n)] * mi[(m, n)];
                    }
                    if w > 0.0 {
                        pairs.push(((dst.eigenvalues[m] - src.eigenvalues[n]).abs(), w * norm));
                    }
                }
            }
        }
    }
    Ok(pairs)
}

/// One frequency bin: weight and weight-averaged frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub frequency: f64,
    pub weight: f64,
}

/// Spectral weights of `A` in uniform frequency bins over `ω ≥ 0`.
///
/// `ω` and `−ω` are folded together. Bin `k ≥ 1` holds
/// `(k − ½)δω ≤ |ω| < (k + ½)δω` and sits at its weighted mean frequency;
/// the DC bin `|ω| < δω/2` is evaluated at exactly `ω = 0` and gives the
/// `t → ∞` plateau. Coarser levels, each merging pairs of bins, let large
/// bin counts be evaluated cheaply at short times.
#[derive(Debug, Clone)]
pub struct SpectralWeightHistogram {
    bin_width: f64,
    dc: f64,
    // (k, bins): bins are (index >> k, weight, first moment), index ascending
    levels: Vec<(u32, Vec<(u64, f64, f64)>)>,
}

impl SpectralWeightHistogram {
    pub fn from_pairs(mut pairs: Vec<(f64, f64)>, bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::Domain(format!("bin width must be positive, got {bin_width}")));
        }
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut dc = 0.0;
        let mut base: Vec<(u64, f64, f64)> = Vec::new();
        for (w_freq, w) in pairs {
            let idx = (w_freq / bin_width).round() as u64;
            if idx == 0 {
                dc += w;
                continue;
            }
            match base.last_mut() {
                Some(last) if last.0 == idx => {
                    last.1 += w;
                    last.2 += w * w_freq;
                }
                _ => base.push((idx, w, w * w_freq)),
            }
        }
        // a merged level is kept only once it has at most half the bins of the
        // last kept one, which bounds the total at twice the base level
        let mut levels = vec![(0u32, base)];
        let mut current: Option<(u32, Vec<(u64, f64, f64)>)> = None;
        loop {
            let (shift, prev) = match &current {
                Some((k, v)) => (*k, v),
                None => (levels.last().unwrap().0, &levels.last().unwrap().1),
            };
            if prev.len() <= 1 || shift >= 62 {
                break;
            }
            let mut next: Vec<(u64, f64, f64)> = Vec::with_capacity(prev.len() / 2 + 1);
            for &(i, w, m) in prev {
                match next.last_mut() {
                    Some(last) if last.0 == i >> 1 => {
                        last.1 += w;
                        last.2 += m;
                    }
                    _ => next.push((i >> 1, w, m)),
                }
            }
            if 2 * next.len() <= levels.last().unwrap().1.len() {
                levels.push((shift + 1, next));
                current = None;
            } else {
                current = Some((shift + 1, next));
            }
        }
        Ok(SpectralWeightHistogram { bin_width, dc, levels })
    }

    pub fn build<T: Scalar>(spec: &Spectrum, a: &OperatorSum<T>, bin_width: f64) -> Result<Self> {
        Self::from_pairs(spectral_pairs(spec, a)?, bin_width)
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    /// Weight at zero frequency: the infinite-time plateau of `C(t)`.
    pub fn dc_weight(&self) -> f64 {
        self.dc
    }

    /// `Σ_k w_k`, equal to `C(0)`.
    pub fn total_weight(&self) -> f64 {
        self.dc + self.levels[0].1.iter().map(|b| b.1).sum::<f64>()
    }

    /// Non-DC bins at full resolution.
    pub fn bins(&self) -> Vec<Bin> {
        self.levels[0].1.iter().map(|&(_, w, m)| Bin { frequency: m / w, weight: w }).collect()
    }

    /// Lower and upper frequency edge of every non-DC bin.
    pub fn bin_edges(&self) -> Vec<(f64, f64)> {
        self.levels[0]
            .1
            .iter()
            .map(|&(i, _, _)| ((i as f64 - 0.5) * self.bin_width, (i as f64 + 0.5) * self.bin_width))
            .collect()
    }

    /// `C(t) = Σ_k w_k cos(ω_k t)`.
    pub fn evaluate(&self, t: f64) -> f64 {
        let t = t.abs();
        let bins = self
            .levels
            .iter()
            .rev()
            .find(|(k, _)| *k == 0 || self.bin_width * (1u64 << k) as f64 * t <= PHASE_TOLERANCE)
            .map(|(_, b)| b)
            .expect("level 0 always qualifies");
        self.dc + bins.iter().map(|&(_, w, m)| w * reduced_cos(m / w * t)).sum::<f64>()
    }
}

// glibc's cos takes a slow correctly-rounded path for many of these
// arguments, and musl's large-argument reduction is also slow; a plain 2π
// reduction costs ~1e-8 rad at phases of 1e8, far below the binning error.
fn reduced_cos(x: f64) -> f64 {
    const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;
    let k = (x * (1.0 / std::f64::consts::TAU)).round();
    libm::cos(x - k * std::f64::consts::TAU - k * TAU_LO)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutocorrOptions {
    /// `None` sums every eigen-pair individually.
    pub bin_width: Option<f64>,
}

impl Default for AutocorrOptions {
    fn default() -> Self {
        AutocorrOptions { bin_width: Some(DEFAULT_BIN_WIDTH) }
    }
}

/// `C(t)` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocorrSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub operator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ChainModel>,
    /// `C(0) = ⟨A, A⟩`.
    pub norm: f64,
    /// Zero-frequency weight, the `t → ∞` value.
    pub plateau: f64,
    pub bin_width: Option<f64>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    operator: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a ChainModel>,
    points: usize,
    t_min: Option<f64>,
    t_max: Option<f64>,
    norm: f64,
    plateau: f64,
    bin_width: Option<f64>,
    version: &'static str,
}

impl AutocorrSeries {
    pub fn with_label(mut self, operator: impl Into<String>, model: Option<ChainModel>) -> Self {
        self.operator = operator.into();
        self.model = model;
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,C\n");
        for (t, c) in self.times.iter().zip(&self.values) {
            out.push_str(&format!("{t:?},{c:?}\n"));
        }
        out
    }

    pub fn sidecar_json(&self) -> Result<String> {
        let s = Sidecar {
            operator: &self.operator,
            model: self.model.as_ref(),
            points: self.times.len(),
            t_min: self.times.first().copied(),
            t_max: self.times.last().copied(),
            norm: self.norm,
            plateau: self.plateau,
            bin_width: self.bin_width,
            version: crate::VERSION,
        };
        Ok(serde_json::to_string_pretty(&s)? + "\n")
    }

    /// Writes `path` (CSV) and `path` with a `.json` extension (sidecar).
    /// Existing files are kept unless `force` is set.
    pub fn write(&self, path: &Path, force: bool) -> Result<()> {
        let side = path.with_extension("json");
        for p in [path, side.as_path()] {
            if p.exists() && !force {
                return Err(Error::Io(std::io::Error::new(
                    std::io::ErrorKind::AlreadyExists,
                    format!("{} exists (use --force to overwrite)", p.display()),
                )));
            }
        }
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::File::create(path)?.write_all(self.to_csv().as_bytes())?;
        fs::write(side, self.sidecar_json()?)?;
        Ok(())
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::Domain(format!("time {t} is not finite")));
    }
    Ok(())
}

pub fn autocorrelator<T: Scalar>(spec: &Spectrum, a: &OperatorSum<T>, times: &[f64]) -> Result<AutocorrSeries> {
    autocorrelator_with(spec, a, times, AutocorrOptions::default())
}

pub fn autocorrelator_with<T: Scalar>(
    spec: &Spectrum,
    a: &OperatorSum<T>,
    times: &[f64],
    options: AutocorrOptions,
) -> Result<AutocorrSeries> {
    check_times(times)?;
    let pairs = spectral_pairs(spec, a)?;
    let (values, norm, plateau) = match options.bin_width {
        Some(w) => {
            let h = SpectralWeightHistogram::from_pairs(pairs, w)?;
            (times.iter().map(|&t| h.evaluate(t)).collect(), h.total_weight(), h.dc_weight())
        }
        None => {
            let norm = pairs.iter().map(|p| p.1).sum();
            let plateau = pairs.iter().filter(|p| p.0 == 0.0).map(|p| p.1).sum();
            let values = times.iter().map(|&t| pairs.iter().map(|&(w, c)| c * (w * t).cos()).sum()).collect();
            (values, norm, plateau)
        }
    };
    Ok(AutocorrSeries {
        times: times.to_vec(),
        values,
        operator: String::new(),
        model: None,
        norm,
        plateau,
        bin_width: options.bin_width,
    })
}

/// Unbinned evaluation, summing every eigen-pair.
pub fn autocorrelator_exact<T: Scalar>(spec: &Spectrum, a: &OperatorSum<T>, times: &[f64]) -> Result<AutocorrSeries> {
    autocorrelator_with(spec, a, times, AutocorrOptions { bin_width: None })
}

/// `n` log-spaced times from `t_min` to `t_max` inclusive.
pub fn log_times(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max >= t_min && t_max.is_finite()) || n == 0 {
        return Err(Error::Domain(format!("bad time grid {t_min}..{t_max} with {n} points")));
    }
    if n == 1 {
        return Ok(vec![t_min]);
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    Ok((0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect())
}

/// `10⁻¹ … 10⁵`, 400 points.
pub fn default_times() -> Vec<f64> {
    log_times(0.1, 1e5, 400).expect("valid default grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{diagonalize, diagonalize_model, to_dense};
    use crate::models::{edge_operators, symmetry_operators, ChainModel};
    use crate::pauli::PauliString;

    #[test]
    fn conserved_operator_is_flat() {
        let m = ChainModel::zxz(6, 1.0, 0.6, 0.3, 0.2);
        let spec = diagonalize_model(&m).unwrap();
        let (_, go) = symmetry_operators(6).unwrap();
        let s = autocorrelator(&spec, &OperatorSum::<f64>::from_string(&go), &[0.0, 1.0, 1e3]).unwrap();
        for v in s.values {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ising_edge_conserved_without_field() {
        let m = ChainModel::ising(6, 1.0, 0.0, 0.0);
        let spec = diagonalize_model(&m).unwrap();
        let z1 = OperatorSum::<f64>::from_string(&PauliString::z(6, 1).unwrap());
        let s = autocorrelator(&spec, &z1, &default_times()).unwrap();
        assert!(s.values.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn sum_rule_and_sector_agreement() {
        let m = ChainModel::zxz(8, 1.0, 0.6, 0.3, 0.2);
        let h = to_dense(&m.build::<f64>().unwrap()).unwrap();
        let full = diagonalize(&h).unwrap();
        let blocks = diagonalize_model(&m).unwrap();
        let e = edge_operators(8).unwrap();
        let times = [0.0, 0.3, 2.0, 17.0];
        for a in [e.x, e.y, e.z] {
            let a = OperatorSum::<f64>::from_string(&a);
            let s1 = autocorrelator_exact(&full, &a, &times).unwrap();
            let s2 = autocorrelator_exact(&blocks, &a, &times).unwrap();
            assert!((s1.norm - 1.0).abs() < 1e-9 && (s2.norm - 1.0).abs() < 1e-9);
            for (x, y) in s1.values.iter().zip(&s2.values) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn binned_matches_exact() {
        let m = ChainModel::zxz(8, 1.0, 0.6, 0.3, 0.2);
        let spec = diagonalize_model(&m).unwrap();
        let a = OperatorSum::<f64>::from_string(&edge_operators(8).unwrap().z);
        let times = log_times(0.1, 1e4, 60).unwrap();
        let exact = autocorrelator_exact(&spec, &a, &times).unwrap();
        let binned = autocorrelator(&spec, &a, &times).unwrap();
        for (x, y) in exact.values.iter().zip(&binned.values) {
            assert!((x - y).abs() < 1e-4);
        }
        assert!(binned.values.iter().all(|v| v.abs() <= binned.norm + 1e-9));
    }

    #[test]
    fn histogram_structure() {
        let pairs = vec![(0.0, 0.25), (1e-7, 0.25), (1.0, 0.25), (1.0 + 2e-7, 0.25)];
        let h = SpectralWeightHistogram::from_pairs(pairs, 1e-6).unwrap();
        assert_eq!(h.dc_weight(), 0.5);
        assert_eq!(h.bins().len(), 1);
        assert!((h.total_weight() - 1.0).abs() < 1e-15);
        let (lo, hi) = h.bin_edges()[0];
        assert!(lo <= 1.0 && 1.0 < hi);
        assert!((h.evaluate(0.0) - 1.0).abs() < 1e-15);
        assert!(h.evaluate(std::f64::consts::PI).abs() < 1e-6);
        assert!(SpectralWeightHistogram::from_pairs(vec![], 0.0).is_err());
    }

    #[test]
    fn time_grids() {
        let t = default_times();
        assert_eq!(t.len(), 400);
        assert!((t[0] - 0.1).abs() < 1e-15 && (t[399] - 1e5).abs() < 1e-9);
        assert!(log_times(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn csv_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let s = AutocorrSeries {
            times: vec![0.1, 1.0],
            values: vec![1.0, 0.5],
            operator: "SigmaZ".into(),
            model: None,
            norm: 1.0,
            plateau: 0.25,
            bin_width: Some(1e-6),
        };
        assert_eq!(s.to_csv(), "t,C\n0.1,1.0\n1.0,0.5\n");
        let p = dir.path().join("a.csv");
        s.write(&p, false).unwrap();
        assert!(s.write(&p, false).is_err());
        s.write(&p, true).unwrap();
        let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.with_extension("json")).unwrap()).unwrap();
        assert_eq!(side["operator"], "SigmaZ");
    }

    #[test]
    fn sparse_histogram_keeps_few_levels() {
        let pairs: Vec<(f64, f64)> = (1..=4096).map(|k| (k as f64 * 1e-3 + 1e-7, 1.0 / 4096.0)).collect();
        let h = SpectralWeightHistogram::from_pairs(pairs.clone(), 1e-9).unwrap();
        let stored: usize = h.levels.iter().map(|l| l.1.len()).sum();
        assert!(stored <= 2 * 4096, "{stored}");
        assert!(h.levels.windows(2).all(|w| 2 * w[1].1.len() <= w[0].1.len()));
        for t in [0.0, 0.5, 3.0, 40.0] {
            let exact: f64 = pairs.iter().map(|&(w, c)| c * (w * t).cos()).sum();
            assert!((h.evaluate(t) - exact).abs() < 1e-3, "t = {t}");
        }
    }
}
