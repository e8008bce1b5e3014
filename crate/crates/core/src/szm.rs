//! Almost strong zero modes by double expansion in `Γ` and `Γ₂`.
//!
//! The expansion runs in the coupled-Ising frame, where the unperturbed
//! part `H₀ = Σ λ_T T` is a sum of commuting `ZZ` bonds. For a Pauli string
//! `P` with x-mask `x`, `[H₀, P] = D_x P` with `D_x = 2 Σ_{T ∈ A(x)} λ_T T`,
//! `A(x)` being the bonds that anticommute with `X^x`. The bonds in `A(x)`
//! generate a commutative algebra isomorphic to functions of the bond signs
//! `t ∈ {±1}^K`, in which `D_x` is the function `d(t) = 2 Σ λ_T t_T`. Its
//! pseudoinverse is the Walsh expansion of `1/d(t)` (zero where `d = 0`), so
//! each order is solved in closed form:
//!
//! `Ψ^{(a,b)} = D⁺ (−[V₁, Ψ^{(a−1,b)}] − [V₂, Ψ^{(a,b−1)}])`
//!
//! with `V₁` the `Γ` terms and `V₂` the `Γ₂` terms. Kernel components of the
//! solution are zero. A right-hand side with weight on a configuration where
//! `d(t) = λ₁A + λ₂B` vanishes is a pole at `|λ₁|/|λ₂| = |B|/|A|`. Weight on
//! configurations with `A = B = 0` is in the kernel for every `λ`; it is left
//! unsolved and its size recorded per order.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::duality::{dualize, DualityContext};
use crate::error::{Error, Result};
use crate::models::{edge_operators, ChainModel, Family};
use crate::pauli::{OperatorSum, PauliKey};
use crate::scalar::{real, Scalar};

/// Highest order the expansion accepts.
pub const MAX_ORDER: usize = 4;

/// Largest number of anticommuting bonds handled in one sector.
const MAX_SECTOR_BONDS: usize = 24;

/// Floating-point zero threshold for `d(t)`, relative to `max |d|`.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;

/// Relative size below which a kernel component counts as zero in floating
/// mode.
pub const KERNEL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Seed {
    SigmaX,
    SigmaZ,
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Seed::SigmaX => "SigmaX",
            Seed::SigmaZ => "SigmaZ",
        })
    }
}

impl std::str::FromStr for Seed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SigmaX" | "x" | "X" => Ok(Seed::SigmaX),
            "SigmaZ" | "z" | "Z" => Ok(Seed::SigmaZ),
            _ => Err(Error::Config { key: "seed".into(), message: format!("unknown seed `{s}`") }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    Exact,
    Floating,
}

/// Positive ratio `p/q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ratio {
    pub p: u64,
    pub q: u64,
}

impl Ratio {
    pub fn new(p: u64, q: u64) -> Self {
        let g = p.gcd(&q).max(1);
        Ratio { p: p / g, q: q / g }
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl Serialize for Ratio {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let (p, q) = s.split_once('/').unwrap_or((&s, "1"));
        let p = p.trim().parse().map_err(serde::de::Error::custom)?;
        let q = q.trim().parse().map_err(serde::de::Error::custom)?;
        Ok(Ratio::new(p, q))
    }
}

/// A vanishing denominator met while solving one order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleRecord {
    /// `|λ₁|/|λ₂|` at which the denominator vanishes.
    pub ratio: Ratio,
    pub order: usize,
    pub seed: Seed,
    pub denominator: String,
    /// Powers of `Γ` and `Γ₂` of the order that failed.
    pub bi_order: (usize, usize),
}

fn describe_denominator(a: i64, b: i64) -> String {
    let (a, b) = if a < 0 { (-a, -b) } else { (a, b) };
    let term = |c: i64, name: &str| match c.abs() {
        1 => name.to_string(),
        n => format!("{n}{name}"),
    };
    match (a, b) {
        (0, _) => term(b, "λ2"),
        (_, 0) => term(a, "λ1"),
        _ => format!("{} {} {}", term(a, "λ1"), if b < 0 { "-" } else { "+" }, term(b, "λ2")),
    }
}

/// Corrections `Ψ⁽ⁿ⁾` of one seed, expressed in the model's own frame.
#[derive(Debug, Clone)]
pub struct SzmExpansion<T: Scalar = f64> {
    pub seed: Seed,
    pub frame: Family,
    pub arithmetic: Arithmetic,
    /// `orders[n]` collects every `Ψ^{(a,b)}` with `a + b = n`.
    pub orders: Vec<OperatorSum<T>>,
    pub bi_orders: BTreeMap<(usize, usize), OperatorSum<T>>,
    pub poles: Vec<PoleRecord>,
    /// `kernel_residual[n]`: trace norm of the right-hand side at order `n`
    /// that lies in the kernel and was left unsolved.
    pub kernel_residual: Vec<f64>,
}

impl<T: Scalar> SzmExpansion<T> {
    pub fn max_order(&self) -> usize {
        self.orders.len().saturating_sub(1)
    }

    /// `Σ_{k ≤ n} Ψ⁽ᵏ⁾`.
    pub fn truncated(&self, n: usize) -> Result<OperatorSum<T>> {
        let mut out = self.orders[0].clone();
        for o in self.orders.iter().take(n + 1).skip(1) {
            out.add_assign(o)?;
        }
        Ok(out)
    }
}

impl SzmExpansion<f64> {
    /// Truncation through order `n`, scaled to unit trace norm.
    pub fn normalized(&self, n: usize) -> Result<OperatorSum> {
        let psi = self.truncated(n)?;
        let norm = psi.norm_sqr().sqrt();
        Ok(psi.scaled_real(1.0 / norm))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExpandOptions {
    /// Record the first pole and stop instead of returning an error.
    pub collect_poles: bool,
    /// Fail on a `λ`-independent kernel component instead of dropping it.
    pub strict_kernel: bool,
}

struct Bond {
    mask: u64,
    // 0 for λ₁, 1 for λ₂; integer sign of the coupling
    chain: usize,
    sign: i64,
}

struct Frame<T: Scalar> {
    bonds: Vec<Bond>,
    lambda: [T; 2],
    v1: OperatorSum<T>,
    v2: OperatorSum<T>,
    ctx: Option<DualityContext>,
}

fn dual_frame<T: Scalar>(model: &ChainModel) -> Result<Frame<T>> {
    if !matches!(model.family, Family::Zxz | Family::DualIsing) {
        return Err(Error::Model(format!("zero-mode expansion needs ZXZ or DUAL_ISING, got {}", model.family)));
    }
    let l = model.sites;
    let ctx = if model.family == Family::Zxz { Some(DualityContext::new(l)?) } else { None };
    let mut parts: BTreeMap<&str, OperatorSum<T>> = BTreeMap::new();
    for t in model.terms()? {
        let mut op = OperatorSum::<T>::zero(l)?;
        op.add_string(&t.string, real(T::from_f64(t.weight)))?;
        if let Some(c) = &ctx {
            op = dualize(&op, c)?;
        }
        parts.entry(t.coupling).or_insert_with(|| OperatorSum::zero(l).unwrap()).add_assign(&op)?;
    }
    let mut bonds = Vec::new();
    for (chain, name) in ["lambda1", "lambda2"].iter().enumerate() {
        let Some(op) = parts.get(name) else { continue };
        for (k, c) in op.iter() {
            let s = c.re.to_f64();
            if k.x != 0 || !c.im.is_zero() || s.abs() != 1.0 {
                return Err(Error::Model("unperturbed part is not a sum of unit ZZ bonds in the dual frame".into()));
            }
            bonds.push(Bond { mask: k.z, chain, sign: s as i64 });
        }
    }
    let scale = |name: &str| -> Result<OperatorSum<T>> {
        let op = parts.get(name).cloned().map_or_else(|| OperatorSum::zero(l), Ok)?;
        Ok(op.scaled_real(T::from_f64(model.coupling(name))))
    };
    Ok(Frame {
        bonds,
        lambda: [T::from_f64(model.coupling("lambda1")), T::from_f64(model.coupling("lambda2"))],
        v1: scale("gamma")?,
        v2: scale("gamma2")?,
        ctx,
    })
}

enum SectorOutcome<T: Scalar> {
    /// Solution and the norm of the dropped kernel component.
    Solved(OperatorSum<T>, f64),
    Pole(i64, i64),
}

/// Walsh coefficients `ĝ(S) = 2^{-K} Σ_t g(t) (−1)^{|S ∧ t|}`.
fn walsh<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let a = v[j].clone();
                let b = v[j + h].clone();
                v[j] = a.clone() + b.clone();
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let inv = T::one() / T::from_i64(n as i64);
    v.into_iter().map(|x| x * inv.clone()).collect()
}

fn bond_product<T: Scalar>(l: usize, masks: &[u64], coeffs: &[T]) -> Result<OperatorSum<T>> {
    let mut op = OperatorSum::zero(l)?;
    for (s, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let z = masks.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).fold(0u64, |m, (_, b)| m ^ b);
        op.add_term(PauliKey::new(0, z), real(c.clone()));
    }
    Ok(op)
}

fn solve_sector<T: Scalar>(frame: &Frame<T>, x: u64, r: &OperatorSum<T>) -> Result<SectorOutcome<T>> {
    let l = r.n_sites();
    let active: Vec<&Bond> = frame.bonds.iter().filter(|b| (b.mask & x).count_ones() % 2 == 1).collect();
    let k = active.len();
    if k > MAX_SECTOR_BONDS {
        return Err(Error::Domain(format!("{k} anticommuting bonds in one sector exceed the limit {MAX_SECTOR_BONDS}")));
    }
    let masks: Vec<u64> = active.iter().map(|b| b.mask).collect();
    let n = 1usize << k;
    // bit i of t set means t_i = −1
    let counts: Vec<(i64, i64)> = (0..n)
        .map(|t| {
            let mut ab = [0i64; 2];
            for (i, b) in active.iter().enumerate() {
                ab[b.chain] += if t >> i & 1 == 1 { -b.sign } else { b.sign };
            }
            (ab[0], ab[1])
        })
        .collect();
    let two = T::from_i64(2);
    let d: Vec<T> = counts
        .iter()
        .map(|&(a, b)| two.clone() * (frame.lambda[0].clone() * T::from_i64(a) + frame.lambda[1].clone() * T::from_i64(b)))
        .collect();
    let dmax = d.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let vanishes = |v: &T| if T::EXACT { v.is_zero() } else { v.to_f64().abs() <= SINGULAR_THRESHOLD * dmax };
    let mut zero_classes: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (t, v) in d.iter().enumerate() {
        if vanishes(v) {
            let (a, b) = counts[t];
            let key = if a < 0 || (a == 0 && b < 0) { (-a, -b) } else { (a, b) };
            zero_classes.entry(key).or_default().push(t);
        }
    }
    let r_norm = r.norm_sqr().to_f64().sqrt();
    let mut dropped = 0.0;
    for (&(a, b), configs) in &zero_classes {
        let mut g = vec![T::zero(); n];
        for &t in configs {
            g[t] = T::one();
        }
        let kernel = bond_product(l, &masks, &walsh(g))?.multiply(r)?;
        let size = kernel.norm_sqr().to_f64().sqrt();
        let nonzero = if T::EXACT { !kernel.is_empty() } else { size > KERNEL_TOLERANCE * r_norm };
        if nonzero {
            if a == 0 && b == 0 {
                dropped = size;
            } else {
                return Ok(SectorOutcome::Pole(a, b));
            }
        }
    }
    let f: Vec<T> = d.iter().map(|v| if vanishes(v) { T::zero() } else { T::one() / v.clone() }).collect();
    Ok(SectorOutcome::Solved(bond_product(l, &masks, &walsh(f))?.multiply(r)?, dropped))
}

fn seed_operator<T: Scalar>(l: usize, seed: Seed) -> Result<OperatorSum<T>> {
    let e = edge_operators(l)?;
    Ok(OperatorSum::from_string(match seed {
        Seed::SigmaX => &e.x,
        Seed::SigmaZ => &e.z,
    }))
}

/// Generic expansion over any scalar field.
pub fn expand_szm_with<T: Scalar>(
    model: &ChainModel,
    seed: Seed,
    max_order: usize,
    options: ExpandOptions,
) -> Result<SzmExpansion<T>> {
    if max_order > MAX_ORDER {
        return Err(Error::OrderCap { requested: max_order, cap: MAX_ORDER });
    }
    model.validate()?;
    let frame = dual_frame::<T>(model)?;
    let l = model.sites;
    let to_dual = |op: OperatorSum<T>| -> Result<OperatorSum<T>> {
        match &frame.ctx {
            Some(c) => dualize(&op, c),
            None => Ok(op),
        }
    };
    let mut psi: BTreeMap<(usize, usize), OperatorSum<T>> = BTreeMap::new();
    psi.insert((0, 0), to_dual(seed_operator(l, seed)?)?);
    let mut poles = Vec::new();
    let mut kernel_residual = vec![0.0];
    let mut reached = 0;
    'orders: for n in 1..=max_order {
        let mut dropped = 0.0f64;
        for a in (0..=n).rev() {
            let b = n - a;
            let mut r = OperatorSum::<T>::zero(l)?;
            if a > 0 {
                r.add_assign(&frame.v1.commutator(&psi[&(a - 1, b)])?.neg())?;
            }
            if b > 0 {
                r.add_assign(&frame.v2.commutator(&psi[&(a, b - 1)])?.neg())?;
            }
            let mut sectors: BTreeMap<u64, OperatorSum<T>> = BTreeMap::new();
            for (k, c) in r.iter() {
                sectors.entry(k.x).or_insert_with(|| OperatorSum::zero(l).unwrap()).add_term(*k, c.clone());
            }
            let mut out = OperatorSum::<T>::zero(l)?;
            for (x, rx) in &sectors {
                match solve_sector(&frame, *x, rx)? {
                    SectorOutcome::Solved(p, k) => {
                        out.add_assign(&p)?;
                        dropped = dropped.hypot(k);
                    }
                    SectorOutcome::Pole(pa, pb) => {
                        let rec = PoleRecord {
                            ratio: Ratio::new(pb.unsigned_abs(), pa.unsigned_abs()),
                            order: n,
                            seed,
                            denominator: describe_denominator(pa, pb),
                            bi_order: (a, b),
                        };
                        if !options.collect_poles {
                            return Err(Error::Pole(rec));
                        }
                        poles.push(rec);
                        break 'orders;
                    }
                }
            }
            psi.insert((a, b), out);
        }
        if dropped > 0.0 {
            if options.strict_kernel {
                return Err(Error::KernelObstruction { order: n, norm: dropped });
            }
            log::warn!("order {n}: dropped a kernel component of norm {dropped:e}");
        }
        kernel_residual.push(dropped);
        reached = n;
    }
    let back = |op: &OperatorSum<T>| -> Result<OperatorSum<T>> {
        match &frame.ctx {
            Some(c) => dualize(op, c),
            None => Ok(op.clone()),
        }
    };
    let mut bi_orders = BTreeMap::new();
    let mut orders: Vec<OperatorSum<T>> = (0..=reached).map(|_| OperatorSum::zero(l)).collect::<Result<_>>()?;
    for ((a, b), op) in psi {
        if a + b > reached {
            continue;
        }
        let op = back(&op)?;
        orders[a + b].add_assign(&op)?;
        bi_orders.insert((a, b), op);
    }
    Ok(SzmExpansion {
        seed,
        frame: model.family,
        arithmetic: if T::EXACT { Arithmetic::Exact } else { Arithmetic::Floating },
        orders,
        bi_orders,
        poles,
        kernel_residual,
    })
}

/// Floating-point expansion; a pole is an error.
pub fn expand_szm(model: &ChainModel, seed: Seed, max_order: usize) -> Result<SzmExpansion> {
    expand_szm_with(model, seed, max_order, ExpandOptions::default())
}

/// Exact rational expansion; couplings are converted exactly from `f64`.
pub fn expand_szm_exact(model: &ChainModel, seed: Seed, max_order: usize) -> Result<SzmExpansion<BigRational>> {
    expand_szm_with(model, seed, max_order, ExpandOptions::default())
}

/// Chain length that keeps an expansion of `max_order` clear of the far edge.
pub fn pole_scan_sites(max_order: usize) -> usize {
    4 * max_order + 8
}

/// Scans `|λ₁|/|λ₂| = p/q` over coprime `p, q ≤ q_max` in exact arithmetic
/// (`λ₁ = p`, `λ₂ = q`, `Γ = Γ₂ = 1`) and reports the first pole met at each
/// ratio up to `max_order`, sorted by order then ratio.
pub fn detect_poles(seed: Seed, max_order: usize, q_max: u64) -> Result<Vec<PoleRecord>> {
    let l = pole_scan_sites(max_order);
    let mut out = Vec::new();
    for p in 1..=q_max {
        for q in 1..=q_max {
            if p.gcd(&q) != 1 {
                continue;
            }
            let m = ChainModel::zxz(l, p as f64, q as f64, 1.0, 1.0);
            let e = expand_szm_with::<BigRational>(&m, seed, max_order, ExpandOptions { collect_poles: true, ..Default::default() })?;
            out.extend(e.poles);
        }
    }
    out.sort_by(|a, b| (a.order, a.ratio.value()).partial_cmp(&(b.order, b.ratio.value())).unwrap());
    Ok(out)
}

/// `(1/2^L) Tr(Σ Ψ)` squared; `Ψ` is expected at unit trace norm.
pub fn plateau_overlap<T: Scalar>(sigma: &OperatorSum<T>, psi: &OperatorSum<T>) -> Result<f64> {
    let n = psi.norm_sqr().to_f64();
    if (n - 1.0).abs() > 1e-9 {
        log::warn!("plateau_overlap: Ψ has trace norm² {n}, expected 1");
    }
    let o = sigma.trace_inner_product(psi)?;
    let re = o.re.to_f64();
    Ok(re * re)
}

/// `‖[H, Ψ_{≤n}]‖²` in the normalized trace norm.
pub fn residual_norm_sqr(model: &ChainModel, psi: &OperatorSum) -> Result<f64> {
    let h = model.build::<f64>()?;
    Ok(h.commutator(psi)?.norm_sqr())
}

/// Fitted exponent of `‖[H, Ψ_{≤n}]‖²` against `s` when `(Γ, Γ₂) → s(Γ, Γ₂)`.
pub fn residual_exponent(model: &ChainModel, seed: Seed, n: usize, scales: &[f64]) -> Result<f64> {
    if scales.len() < 2 {
        return Err(Error::Analysis("need at least two scales".into()));
    }
    let mut pts = Vec::new();
    for &s in scales {
        let m = model
            .clone()
            .with_coupling("gamma", model.coupling("gamma") * s)
            .with_coupling("gamma2", model.coupling("gamma2") * s);
        let e = expand_szm(&m, seed, n)?;
        let r = residual_norm_sqr(&m, &e.truncated(n)?)?;
        pts.push((s.ln(), r.ln()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Minimal orders from the energy-matching oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOrders {
    pub sigma_z: Option<usize>,
    pub sigma_x: Option<usize>,
    pub joint: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub p: u64,
    pub q: u64,
    pub sigma_z_resonant: bool,
    pub sigma_x_resonant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_order: Option<OracleOrders>,
}

fn reduce(p: u64, q: u64) -> Result<(u64, u64)> {
    if p == 0 || q == 0 {
        return Err(Error::Domain(format!("ratio {p}/{q} needs positive integers")));
    }
    let g = p.gcd(&q);
    if g != 1 {
        log::warn!("{p}/{q} is not in lowest terms; using {}/{}", p / g, q / g);
    }
    Ok((p / g, q / g))
}

/// Parity rule at `|λ₁|/|λ₂| = p/q`: flipping edge spin 1 costs `p`, edge
/// spin 2 costs `q`, bulk flips contribute multiples of `2p` and `2q`.
pub fn predict_resonance(p: u64, q: u64) -> Result<ResonanceReport> {
    let (p, q) = reduce(p, q)?;
    let both_odd = p % 2 == 1 && q % 2 == 1;
    Ok(ResonanceReport {
        p,
        q,
        sigma_z_resonant: p % 2 == 0 || both_odd,
        sigma_x_resonant: q % 2 == 0 || both_odd,
        predicted_order: None,
    })
}

/// Smallest number of bulk units `±2p`, `±2q` summing to `cost`.
fn units_to_cancel(p: i64, q: i64, cost: i64, n_max: usize) -> Option<usize> {
    let mut reach = std::collections::BTreeSet::from([0i64]);
    for n in 1..=n_max {
        let mut next = std::collections::BTreeSet::new();
        for s in &reach {
            for u in [2 * p, -2 * p, 2 * q, -2 * q] {
                next.insert(s + u);
            }
        }
        if next.contains(&cost) {
            return Some(n);
        }
        reach = next;
    }
    None
}

/// Brute-force energy matching up to `n_max ≤ 12` bulk units.
pub fn resonance_order_oracle(p: u64, q: u64, n_max: usize) -> Result<OracleOrders> {
    if n_max > 12 {
        return Err(Error::Domain(format!("n_max {n_max} exceeds 12")));
    }
    let (p, q) = reduce(p, q)?;
    let (pi, qi) = (p as i64, q as i64);
    let single_z = units_to_cancel(pi, qi, pi, n_max);
    let single_x = units_to_cancel(pi, qi, qi, n_max);
    let joint = units_to_cancel(pi, qi, pi + qi, n_max);
    let min = |a: Option<usize>, b: Option<usize>| match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(OracleOrders { sigma_z: min(single_z, joint), sigma_x: min(single_x, joint), joint })
}

/// [`predict_resonance`] with the oracle orders attached.
pub fn resonance_report(p: u64, q: u64, n_max: usize) -> Result<ResonanceReport> {
    let mut r = predict_resonance(p, q)?;
    r.predicted_order = Some(resonance_order_oracle(r.p, r.q, n_max)?);
    Ok(r)
}

/// Whether an exact operator has no coefficient with nonzero imaginary or
/// negative-zero issues; used to check Hermiticity of exact orders.
pub fn is_exactly_hermitian(op: &OperatorSum<BigRational>) -> bool {
    op.iter().all(|(_, c)| c.im.is_zero() || c.im.abs().is_zero())
}
