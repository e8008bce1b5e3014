//! Hamiltonian builders and the distinguished edge and symmetry operators.
//!
//! Every builder first lists its terms as [`ModelTerm`]s (coupling name,
//! extra weight, Pauli string) and then sums them, so the same description
//! drives dense matrices, duality checks and the zero-mode expansion.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j0;
use crate::error::{Error, Result};
use crate::pauli::{OperatorSum, Pauli, PauliString};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Family {
    #[serde(rename = "ZXZ")]
    Zxz,
    #[serde(rename = "ISING")]
    Ising,
    #[serde(rename = "DUAL_ISING")]
    DualIsing,
    #[serde(rename = "FLOQUET")]
    Floquet,
}

impl Family {
    pub fn coupling_names(self) -> &'static [&'static str] {
        match self {
            Family::Zxz | Family::DualIsing => &["lambda1", "lambda2", "gamma", "gamma2"],
            Family::Ising => &["J", "gamma", "J2"],
            Family::Floquet => &["h1", "h2", "lambda1", "lambda2", "Vx"],
        }
    }

    fn min_sites(self, layout: ZxzLayout) -> usize {
        match (self, layout) {
            (Family::Zxz | Family::DualIsing, ZxzLayout::Printed) => 6,
            (Family::Floquet, _) => 5,
            _ => 4,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Zxz => "ZXZ",
            Family::Ising => "ISING",
            Family::DualIsing => "DUAL_ISING",
            Family::Floquet => "FLOQUET",
        })
    }
}

/// Index layout of the three-site and Ising-bond sums.
///
/// `Cluster` is the full dimerized cluster chain: `λ₁` on every
/// `Z_{2j-1} X_{2j} Z_{2j+1}` and `λ₂` on every `Z_{2j} X_{2j+1} Z_{2j+2}`
/// (`j = 1..M-1`), transverse fields on all sites. Under the duality it maps
/// to an Ising chain on the odd sites with bond `λ₁` and one on the even
/// sites with bond `λ₂`, which is the labelling the edge-mode formulas use.
///
/// `Printed` reproduces the displayed sums index for index: `λ₁` on
/// `Z_{2j} X_{2j+1} Z_{2j+2}` for `j ≤ M-2`, `λ₂` on
/// `Z_{2j+1} X_{2j+2} Z_{2j+3}` for `j ≤ M-3`, and in the dual form the odd
/// transverse field starts at site 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZxzLayout {
    #[default]
    Cluster,
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOptions {
    #[serde(default)]
    pub layout: ZxzLayout,
    /// Ising only: extend the transverse-field sum to site `L`.
    #[serde(default)]
    pub field_on_last_site: bool,
}

impl ModelOptions {
    fn is_default(&self) -> bool {
        *self == ModelOptions::default()
    }
}

/// Declarative Hamiltonian: family, chain length and named couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainModel {
    pub family: Family,
    #[serde(rename = "L")]
    pub sites: usize,
    pub couplings: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "ModelOptions::is_default")]
    pub options: ModelOptions,
}

/// One Hamiltonian term: `value(coupling) · weight · string`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTerm {
    pub coupling: &'static str,
    pub weight: f64,
    pub string: PauliString,
}

fn couplings(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

impl ChainModel {
    pub fn zxz(sites: usize, lambda1: f64, lambda2: f64, gamma: f64, gamma2: f64) -> Self {
        ChainModel {
            family: Family::Zxz,
            sites,
            couplings: couplings(&[("lambda1", lambda1), ("lambda2", lambda2), ("gamma", gamma), ("gamma2", gamma2)]),
            options: ModelOptions::default(),
        }
    }

    pub fn dual_ising(sites: usize, lambda1: f64, lambda2: f64, gamma: f64, gamma2: f64) -> Self {
        ChainModel { family: Family::DualIsing, ..Self::zxz(sites, lambda1, lambda2, gamma, gamma2) }
    }

    pub fn ising(sites: usize, j: f64, gamma: f64, j2: f64) -> Self {
        ChainModel {
            family: Family::Ising,
            sites,
            couplings: couplings(&[("J", j), ("gamma", gamma), ("J2", j2)]),
            options: ModelOptions::default(),
        }
    }

    pub fn floquet(sites: usize, h1: f64, h2: f64, lambda1: f64, lambda2: f64, vx: f64) -> Self {
        ChainModel {
            family: Family::Floquet,
            sites,
            couplings: couplings(&[("h1", h1), ("h2", h2), ("lambda1", lambda1), ("lambda2", lambda2), ("Vx", vx)]),
            options: ModelOptions::default(),
        }
    }

    pub fn with_layout(mut self, layout: ZxzLayout) -> Self {
        self.options.layout = layout;
        self
    }

    pub fn with_field_on_last_site(mut self, on: bool) -> Self {
        self.options.field_on_last_site = on;
        self
    }

    /// Returns a copy with one coupling replaced.
    pub fn with_coupling(mut self, name: &str, value: f64) -> Self {
        self.couplings.insert(name.to_string(), value);
        self
    }

    pub fn coupling(&self, name: &str) -> f64 {
        self.couplings.get(name).copied().unwrap_or(f64::NAN)
    }

    pub fn validate(&self) -> Result<()> {
        let names = self.family.coupling_names();
        for k in self.couplings.keys() {
            if !names.contains(&k.as_str()) {
                return Err(Error::Model(format!("unknown coupling `{k}` for family {}", self.family)));
            }
        }
        for n in names {
            match self.couplings.get(*n) {
                None => return Err(Error::Model(format!("missing coupling `{n}` for family {}", self.family))),
                Some(v) if !v.is_finite() => return Err(Error::Model(format!("coupling `{n}` is not finite"))),
                _ => {}
            }
        }
        let min = self.family.min_sites(self.options.layout);
        if self.sites < min {
            return Err(Error::Model(format!("{} needs L >= {min}, got {}", self.family, self.sites)));
        }
        if self.sites > crate::pauli::MAX_SITES {
            return Err(Error::SiteCount(self.sites));
        }
        if matches!(self.family, Family::Zxz | Family::DualIsing) && self.sites % 2 != 0 {
            return Err(Error::Model(format!("{} needs even L = 2M, got {}", self.family, self.sites)));
        }
        if self.options.field_on_last_site && self.family != Family::Ising {
            return Err(Error::Model("field_on_last_site applies to ISING only".into()));
        }
        Ok(())
    }

    /// Term list of the Hamiltonian.
    pub fn terms(&self) -> Result<Vec<ModelTerm>> {
        self.validate()?;
        let l = self.sites;
        let mut out = Vec::new();
        let mut push = |coupling: &'static str, weight: f64, f: &[(usize, Pauli)]| -> Result<()> {
            out.push(ModelTerm { coupling, weight, string: PauliString::from_factors(l, f)? });
            Ok(())
        };
        use Pauli::{X, Y, Z};
        let m = l / 2;
        match (self.family, self.options.layout) {
            (Family::Zxz, ZxzLayout::Cluster) => {
                for j in 1..m {
                    push("lambda1", 1.0, &[(2 * j - 1, Z), (2 * j, X), (2 * j + 1, Z)])?;
                    push("lambda2", 1.0, &[(2 * j, Z), (2 * j + 1, X), (2 * j + 2, Z)])?;
                }
                transverse_and_pairs(&mut push, l)?;
            }
            (Family::Zxz, ZxzLayout::Printed) => {
                for j in 1..=m - 2 {
                    push("lambda1", 1.0, &[(2 * j, Z), (2 * j + 1, X), (2 * j + 2, Z)])?;
                }
                for j in 1..=m - 3 {
                    push("lambda2", 1.0, &[(2 * j + 1, Z), (2 * j + 2, X), (2 * j + 3, Z)])?;
                }
                transverse_and_pairs(&mut push, l)?;
            }
            (Family::DualIsing, ZxzLayout::Cluster) => {
                for j in 1..m {
                    push("lambda1", 1.0, &[(2 * j - 1, Z), (2 * j + 1, Z)])?;
                    push("lambda2", 1.0, &[(2 * j, Z), (2 * j + 2, Z)])?;
                }
                transverse_and_pairs(&mut push, l)?;
            }
            (Family::DualIsing, ZxzLayout::Printed) => {
                for j in 1..=m - 2 {
                    push("lambda1", 1.0, &[(2 * j, Z), (2 * j + 2, Z)])?;
                }
                for j in 1..=m {
                    push("gamma", 1.0, &[(2 * j, X)])?;
                }
                for j in 1..=m - 3 {
                    push("lambda2", 1.0, &[(2 * j + 1, Z), (2 * j + 3, Z)])?;
                }
                for j in 1..m {
                    push("gamma", 1.0, &[(2 * j + 1, X)])?;
                }
                for i in 1..l {
                    push("gamma2", 1.0, &[(i, X), (i + 1, X)])?;
                }
            }
            (Family::Ising, _) => {
                for j in 1..l {
                    push("J", -1.0, &[(j, Z), (j + 1, Z)])?;
                }
                let last = if self.options.field_on_last_site { l } else { l - 1 };
                for j in 1..=last {
                    push("gamma", -1.0, &[(j, X)])?;
                }
                for j in 1..l - 1 {
                    push("J2", -1.0, &[(j, Z), (j + 2, Z)])?;
                }
            }
            (Family::Floquet, _) => {
                let fc = floquet_coefficients(self.coupling("lambda1"), self.coupling("lambda2"))?;
                let h = |i: usize| if i % 2 == 1 { "h1" } else { "h2" };
                for i in 1..=l {
                    push(h(i), fc.a, &[(i, X)])?;
                }
                for i in 2..l {
                    push(h(i), -fc.b, &[(i - 1, Z), (i, X), (i + 1, Z)])?;
                }
                push("Vx", fc.c_edge, &[(1, X), (2, X)])?;
                push("Vx", fc.c_edge, &[(l - 1, X), (l, X)])?;
                for i in 2..=l - 2 {
                    let lam = if i % 2 == 1 { fc.lambda1 } else { fc.lambda2 };
                    let c = fc.c(lam)?;
                    push("Vx", c, &[(i, X), (i + 1, X)])?;
                    push("Vx", 1.0 - c, &[(i - 1, Z), (i, Y), (i + 1, Y), (i + 2, Z)])?;
                }
            }
        }
        Ok(out)
    }

    /// Sums the term list over any scalar field.
    pub fn build<T: Scalar>(&self) -> Result<OperatorSum<T>> {
        let mut h = OperatorSum::<T>::zero(self.sites)?;
        for t in self.terms()? {
            let w = self.coupling(t.coupling) * t.weight;
            h.add_string(&t.string, crate::scalar::real(T::from_f64(w)))?;
        }
        Ok(h)
    }

    fn expect(&self, family: Family) -> Result<()> {
        if self.family != family {
            return Err(Error::Model(format!("expected family {family}, got {}", self.family)));
        }
        Ok(())
    }
}

fn transverse_and_pairs(
    push: &mut impl FnMut(&'static str, f64, &[(usize, Pauli)]) -> Result<()>,
    l: usize,
) -> Result<()> {
    for j in 1..=l {
        push("gamma", 1.0, &[(j, Pauli::X)])?;
    }
    for j in 1..l {
        push("gamma2", 1.0, &[(j, Pauli::X), (j + 1, Pauli::X)])?;
    }
    Ok(())
}

pub fn build_zxz(m: &ChainModel) -> Result<OperatorSum> {
    m.expect(Family::Zxz)?;
    m.build()
}

pub fn build_ising(m: &ChainModel) -> Result<OperatorSum> {
    m.expect(Family::Ising)?;
    m.build()
}

pub fn build_dual_ising(m: &ChainModel) -> Result<OperatorSum> {
    m.expect(Family::DualIsing)?;
    m.build()
}

pub fn build_floquet(m: &ChainModel) -> Result<OperatorSum> {
    m.expect(Family::Floquet)?;
    m.build()
}

/// Coefficients of the effective Floquet Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetCoefficients {
    pub lambda1: f64,
    pub lambda2: f64,
    pub a: f64,
    pub b: f64,
    pub c_edge: f64,
}

impl FloquetCoefficients {
    /// `c(λ) = [1 + J₀(4λ)] / 2`.
    pub fn c(&self, lambda: f64) -> Result<f64> {
        Ok(0.5 * (1.0 + bessel_j0(4.0 * lambda)?))
    }

    /// `d(λ) = 1 − c(λ)`.
    pub fn d(&self, lambda: f64) -> Result<f64> {
        Ok(1.0 - self.c(lambda)?)
    }
}

pub fn floquet_coefficients(lambda1: f64, lambda2: f64) -> Result<FloquetCoefficients> {
    let j_minus = bessel_j0(2.0 * (lambda1 - lambda2))?;
    let j_plus = bessel_j0(2.0 * (lambda1 + lambda2))?;
    let a = 0.5 * (j_minus + j_plus);
    Ok(FloquetCoefficients { lambda1, lambda2, a, b: j_minus - a, c_edge: bessel_j0(2.0 * lambda2)? })
}

/// The edge operators `Σˣ = σˣ₁σᶻ₂`, `Σʸ = σʸ₁σᶻ₂`, `Σᶻ = σᶻ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeOperators {
    pub x: PauliString,
    pub y: PauliString,
    pub z: PauliString,
}

fn check_even(l: usize) -> Result<()> {
    if l < 4 || l % 2 != 0 {
        return Err(Error::Model(format!("edge operators need even L >= 4, got {l}")));
    }
    Ok(())
}

pub fn edge_operators(l: usize) -> Result<EdgeOperators> {
    check_even(l)?;
    Ok(EdgeOperators {
        x: PauliString::from_factors(l, &[(1, Pauli::X), (2, Pauli::Z)])?,
        y: PauliString::from_factors(l, &[(1, Pauli::Y), (2, Pauli::Z)])?,
        z: PauliString::z(l, 1)?,
    })
}

/// `(G_e, G_o)`: products of `σˣ` over even and odd sites.
pub fn symmetry_operators(l: usize) -> Result<(PauliString, PauliString)> {
    check_even(l)?;
    let mut even = 0u64;
    let mut odd = 0u64;
    for s in 1..=l {
        if s % 2 == 0 {
            even |= 1 << (s - 1);
        } else {
            odd |= 1 << (s - 1);
        }
    }
    Ok((PauliString::from_masks(l, even, 0, 0)?, PauliString::from_masks(l, odd, 0, 0)?))
}

/// Images of the edge operators in the coupled-Ising frame:
/// `(σᶻ₂G_o, Σʸ image, σᶻ₁)`.
///
/// The `Σʸ` image is `i·(σᶻ₂G_o)·σᶻ₁`, the product the duality forces given
/// the other two. Written with `σᶻ₁` to the left of `G_o` the same operator
/// reads `−i σᶻ₁σᶻ₂G_o`, since `G_o` anticommutes with `σᶻ₁`.
pub fn dual_edge_operators(l: usize) -> Result<EdgeOperators> {
    let (_, g_o) = symmetry_operators(l)?;
    let z1 = PauliString::z(l, 1)?;
    let x = PauliString::z(l, 2)?.multiply(&g_o)?;
    let y = x.multiply(&z1)?;
    let y = y.with_phase(y.phase() + 1);
    Ok(EdgeOperators { x, y, z: z1 })
}

/// `σᶻ` on the middle site `⌈L/2⌉`.
pub fn bulk_reference(l: usize) -> Result<PauliString> {
    PauliString::z(l, l.div_ceil(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_zxz_term_count() {
        let m = ChainModel::zxz(8, 1.0, 0.6, 0.05, 0.05).with_layout(ZxzLayout::Printed);
        assert_eq!(m.terms().unwrap().len(), 2 + 1 + 8 + 7);
        assert_eq!(build_zxz(&m).unwrap().len(), 18);
    }

    #[test]
    fn cluster_zxz_term_count() {
        let m = ChainModel::zxz(8, 1.0, 0.6, 0.05, 0.05);
        assert_eq!(build_zxz(&m).unwrap().len(), 3 + 3 + 8 + 7);
    }

    #[test]
    fn zxz_rejects_odd_and_short() {
        assert!(ChainModel::zxz(7, 1.0, 0.6, 0.0, 0.0).validate().is_err());
        assert!(ChainModel::zxz(4, 1.0, 0.6, 0.0, 0.0).with_layout(ZxzLayout::Printed).validate().is_err());
        assert!(ChainModel::zxz(2, 1.0, 0.6, 0.0, 0.0).validate().is_err());
        assert!(ChainModel::floquet(4, 1.0, 1.0, 2.68, 1.2, 0.05).validate().is_err());
    }

    #[test]
    fn unknown_and_missing_couplings() {
        let m = ChainModel::ising(6, 1.0, 0.25, 0.25).with_coupling("lambda1", 1.0);
        assert!(matches!(m.validate(), Err(Error::Model(s)) if s.contains("lambda1")));
        let mut m = ChainModel::ising(6, 1.0, 0.25, 0.25);
        m.couplings.remove("J2");
        assert!(m.validate().is_err());
        let m = ChainModel::ising(6, f64::NAN, 0.25, 0.25);
        assert!(m.validate().is_err());
    }

    #[test]
    fn commuting_limit() {
        let h = build_zxz(&ChainModel::zxz(8, 1.0, 0.6, 0.0, 0.0)).unwrap();
        for (a, _) in h.iter() {
            for (b, _) in h.iter() {
                assert!(a.commutes_with(*b));
            }
        }
        let z1 = OperatorSum::from_string(&PauliString::z(8, 1).unwrap());
        assert!(h.commutator(&z1).unwrap().is_empty());
    }

    #[test]
    fn zxz_symmetric_and_hermitian() {
        let h = build_zxz(&ChainModel::zxz(10, 0.7, 1.3, 0.2, 0.1)).unwrap();
        let (ge, go) = symmetry_operators(10).unwrap();
        assert!(h.is_symmetric(&ge).unwrap() && h.is_symmetric(&go).unwrap());
        assert!(h.is_hermitian());
    }

    #[test]
    fn ising_field_stops_at_l_minus_1() {
        let m = ChainModel::ising(5, 0.0, 1.0, 0.0);
        let h = build_ising(&m).unwrap();
        assert_eq!(h.len(), 4);
        let z1 = OperatorSum::from_string(&PauliString::z(5, 1).unwrap());
        let x1 = OperatorSum::from_string(&PauliString::x(5, 1).unwrap());
        assert!(!h.commutator(&z1).unwrap().is_empty());
        assert!(h.commutator(&x1).unwrap().is_empty());
        let h = build_ising(&m.with_field_on_last_site(true)).unwrap();
        assert_eq!(h.len(), 5);
    }

    #[test]
    fn ising_edge_commutator_single_term() {
        let h = build_ising(&ChainModel::ising(8, 1.0, 0.01, 0.0)).unwrap();
        let z1 = OperatorSum::from_string(&PauliString::z(8, 1).unwrap());
        let c = h.commutator(&z1).unwrap();
        assert_eq!(c.len(), 1);
        let y1 = PauliString::y(8, 1).unwrap().key();
        assert!((c.coefficient(y1).im.abs() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn dual_decouples_without_gamma2() {
        let h = build_dual_ising(&ChainModel::dual_ising(8, 1.0, 0.6, 0.3, 0.0)).unwrap();
        let odd = 0x55u64;
        for (k, _) in h.iter() {
            let m = k.x | k.z;
            assert!(m & odd == 0 || m & !odd == 0);
        }
    }

    #[test]
    fn floquet_coefficient_identities() {
        let fc = floquet_coefficients(0.0, 0.0).unwrap();
        assert_eq!((fc.a, fc.b, fc.c_edge), (1.0, 0.0, 1.0));
        assert_eq!(fc.c(0.0).unwrap(), 1.0);
        assert_eq!(fc.d(0.0).unwrap(), 0.0);
        for (l1, l2) in [(0.3, 1.1), (2.68, 1.20), (-0.7, 0.2)] {
            let fc = floquet_coefficients(l1, l2).unwrap();
            let j = bessel_j0(2.0 * (l1 - l2)).unwrap();
            assert!((fc.a + fc.b - j).abs() <= 1e-15 * j.abs().max(1.0));
            assert!((fc.c(l1).unwrap() + fc.d(l1).unwrap() - 1.0).abs() <= 1e-15);
        }
        let fc = floquet_coefficients(0.9, 0.9).unwrap();
        assert!((fc.a + fc.b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn floquet_without_interactions_is_symmetric() {
        let m = ChainModel::floquet(8, 0.6, 1.0, 2.68, 1.2, 0.0);
        let h = build_floquet(&m).unwrap();
        assert_eq!(h.len(), 8 + 6);
        let (ge, go) = symmetry_operators(8).unwrap();
        assert!(h.is_symmetric(&ge).unwrap() && h.is_symmetric(&go).unwrap());
        let h = build_floquet(&m.with_coupling("Vx", 0.05)).unwrap();
        assert!(h.is_symmetric(&ge).unwrap() && h.is_symmetric(&go).unwrap());
        assert!(h.is_hermitian());
    }

    #[test]
    fn edge_algebra() {
        let e = edge_operators(6).unwrap();
        assert!(!e.x.commutes_with(&e.z).unwrap());
        let p = e.x.multiply(&e.y).unwrap().multiply(&e.z).unwrap();
        assert_eq!(p.key(), crate::pauli::PauliKey::IDENTITY);
        let (ge, go) = symmetry_operators(6).unwrap();
        assert!(ge.commutes_with(&go).unwrap());
        assert!(ge.multiply(&ge).unwrap().is_identity());
        assert!(go.multiply(&go).unwrap().is_identity());
        assert!(edge_operators(5).is_err());
    }

    #[test]
    fn bulk_sites() {
        assert_eq!(bulk_reference(14).unwrap().support(), vec![7]);
        assert_eq!(bulk_reference(8).unwrap().support(), vec![4]);
        assert_eq!(bulk_reference(9).unwrap().weight(), 1);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let text = r#"{"family": "ZXZ", "L": 14, "couplings": {"lambda1": 1.0, "lambda2": 0.6, "gamma": 0.05, "gamma2": 0.05}}"#;
        let m: ChainModel = serde_json::from_str(text).unwrap();
        m.validate().unwrap();
        assert_eq!(m, ChainModel::zxz(14, 1.0, 0.6, 0.05, 0.05));
        let bad = r#"{"family": "ZXZ", "L": 14, "couplings": {}, "extra": 1}"#;
        assert!(serde_json::from_str::<ChainModel>(bad).is_err());
    }
}
