//! Duality between the ZXZ chain and two coupled Ising chains.
//!
//! On generators: `σˣᵢ → σˣᵢ`, `σᶻ_{2j-1} → 𝓛ⱼ σᶻ_{2j-1}` with
//! `𝓛ⱼ = Π_{k<j} σˣ_{2k}`, and `σᶻ_{2j} → σᶻ_{2j} 𝓡ⱼ` with
//! `𝓡ⱼ = Π_{k>j} σˣ_{2k-1}`. The images obey the same commutation relations
//! as the generators, so the map extends to an automorphism of the Pauli
//! group, and it is its own inverse.
//!
//! The dense unitary `U = VW` reproduces the map exactly on operators even
//! under `G_e`. On `G_e`-odd operators it differs by `(-1)^M` per even-site
//! `σᶻ`; the rewrite uses the sign that sends `Σˣ` to `σᶻ₂G_o` for every `M`.

use faer::Mat;

use crate::error::{Error, Result};
use crate::models::symmetry_operators;
use crate::pauli::{OperatorSum, PauliKey, PauliString};
use crate::scalar::{i_pow, Scalar};

/// Largest chain for which [`dense_duality_unitary`] builds `U`.
pub const DENSE_DUALITY_MAX_SITES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualityContext {
    sites: usize,
}

impl DualityContext {
    pub fn new(sites: usize) -> Result<Self> {
        if sites < 4 || sites % 2 != 0 || sites > crate::pauli::MAX_SITES {
            return Err(Error::Model(format!("duality needs even 4 <= L <= 64, got {sites}")));
        }
        Ok(DualityContext { sites })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn cells(&self) -> usize {
        self.sites / 2
    }

    fn odd_mask(&self) -> u64 {
        (0..self.sites).step_by(2).fold(0, |m, b| m | 1 << b)
    }

    /// Canonical key of the image of `σᶻ` at 1-based `site` (no phase).
    fn z_image(&self, site: usize) -> PauliKey {
        let bit = 1u64 << (site - 1);
        let odd = self.odd_mask();
        let below = bit - 1;
        let x = if site % 2 == 1 { below & !odd } else { !(below | bit) & odd };
        PauliKey::new(x & crate::pauli::site_mask(self.sites), bit)
    }

    /// Image of a single canonical key as `(phase, key)`.
    pub fn map_key(&self, key: PauliKey) -> (u8, PauliKey) {
        // key = i^{|x&z|} X^x Z^z
        let mut phase = (key.y_count() & 3) as u8;
        let mut acc = PauliKey::new(key.x, 0);
        let mut z = key.z;
        while z != 0 {
            let b = z.trailing_zeros() as usize;
            z &= z - 1;
            let (k, next) = acc.product(self.z_image(b + 1));
            phase = (phase + k) & 3;
            acc = next;
        }
        (phase, acc)
    }

    pub fn map_string(&self, p: &PauliString) -> Result<PauliString> {
        crate::pauli::same_sites(self.sites, p.n_sites())?;
        let (k, key) = self.map_key(p.key());
        PauliString::from_masks(self.sites, key.x, key.z, (p.phase() + k) & 3)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DualizeOptions {
    /// Refuse operators that do not commute with both `G_e` and `G_o`.
    pub reject_asymmetric: bool,
}

pub fn dualize<T: Scalar>(op: &OperatorSum<T>, ctx: &DualityContext) -> Result<OperatorSum<T>> {
    dualize_with(op, ctx, DualizeOptions::default())
}

pub fn dualize_with<T: Scalar>(
    op: &OperatorSum<T>,
    ctx: &DualityContext,
    options: DualizeOptions,
) -> Result<OperatorSum<T>> {
    crate::pauli::same_sites(ctx.sites, op.n_sites())?;
    if options.reject_asymmetric {
        let (ge, go) = symmetry_operators(ctx.sites)?;
        if !op.is_symmetric(&ge)? || !op.is_symmetric(&go)? {
            return Err(Error::Domain("operator is not even under both G_e and G_o".into()));
        }
    }
    let mut out = OperatorSum::zero(ctx.sites)?.with_prune_threshold(op.prune_threshold());
    for (key, c) in op.iter() {
        let (k, image) = ctx.map_key(*key);
        out.add_term(image, c.clone() * i_pow::<T>(k));
    }
    Ok(out)
}

/// Dense `U = VW` in the computational basis, for `L ≤ 10`.
///
/// Every factor of `U` is a function of `σˣ` operators only, so `U` is
/// diagonal in the `σˣ` eigenbasis; the matrix is assembled from that
/// diagonal by a Walsh–Hadamard transform.
pub fn dense_duality_unitary(ctx: &DualityContext) -> Result<Mat<f64>> {
    let l = ctx.sites;
    if l > DENSE_DUALITY_MAX_SITES {
        return Err(Error::Size { what: "dense duality unitary", sites: l, limit: DENSE_DUALITY_MAX_SITES });
    }
    let m = ctx.cells();
    let dim = 1usize << l;
    let eps = |s: usize, site: usize| if s >> (site - 1) & 1 == 1 { -1.0 } else { 1.0 };
    let diag: Vec<f64> = (0..dim)
        .map(|s| {
            let mut d = 1.0;
            for j in (1..=m).step_by(2) {
                d *= -eps(s, 2 * j);
            }
            let mut left = 1.0;
            for j in 1..=m {
                // P_j = (1 - Π_{i<j} σˣ_{2i}) / 2
                if left < 0.0 {
                    d *= -eps(s, 2 * j - 1);
                }
                left *= eps(s, 2 * j);
            }
            d
        })
        .collect();
    // U = H D H with H the normalized L-fold Hadamard
    let mut u = Mat::<f64>::from_fn(dim, dim, |a, s| if (a & s).count_ones() % 2 == 0 { diag[s] } else { -diag[s] });
    for a in 0..dim {
        let mut row: Vec<f64> = (0..dim).map(|s| u[(a, s)]).collect();
        walsh_hadamard(&mut row);
        for (b, v) in row.into_iter().enumerate() {
            u[(a, b)] = v / dim as f64;
        }
    }
    Ok(u)
}

pub(crate) fn walsh_hadamard(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}
