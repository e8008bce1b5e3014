use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{check_sites, same_sites, site_mask, PauliKey, PauliString};
use crate::error::{Error, Result};
use crate::scalar::{i_pow, real, Scalar};

/// Coefficients with modulus below this are dropped from floating sums.
pub const DEFAULT_PRUNE: f64 = 1e-14;

/// Sparse complex-weighted sum of Pauli strings on a fixed number of sites.
///
/// Keys carry no phase; every phase lives in the coefficient. The map is
/// ordered, so iteration and serialization are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum<T: Scalar = f64> {
    n_sites: usize,
    terms: BTreeMap<PauliKey, Complex<T>>,
    prune: f64,
}

impl<T: Scalar> OperatorSum<T> {
    pub fn zero(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        Ok(OperatorSum { n_sites, terms: BTreeMap::new(), prune: DEFAULT_PRUNE })
    }

    pub fn identity(n_sites: usize) -> Result<Self> {
        let mut s = Self::zero(n_sites)?;
        s.add_term(PauliKey::IDENTITY, Complex::one());
        Ok(s)
    }

    /// The operator `i^phase · key` with unit weight.
    pub fn from_string(p: &PauliString) -> Self {
        let mut s = OperatorSum { n_sites: p.n_sites(), terms: BTreeMap::new(), prune: DEFAULT_PRUNE };
        s.add_term(p.key(), i_pow(p.phase()));
        s
    }

    pub fn from_terms(n_sites: usize, terms: impl IntoIterator<Item = (PauliKey, Complex<T>)>) -> Result<Self> {
        let mut s = Self::zero(n_sites)?;
        let m = site_mask(n_sites);
        for (k, c) in terms {
            if (k.x | k.z) & !m != 0 {
                return Err(Error::Domain(format!("term acts beyond site {n_sites}")));
            }
            s.add_term(k, c);
        }
        Ok(s)
    }

    /// Real multiple of a Pauli string.
    pub fn term(p: &PauliString, weight: T) -> Self {
        let mut s = Self::from_string(p);
        s.scale_in_place(&real(weight));
        s
    }

    pub fn with_prune_threshold(mut self, threshold: f64) -> Self {
        self.prune = threshold;
        self.prune_in_place();
        self
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliKey, &Complex<T>)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = PauliKey> + '_ {
        self.terms.keys().copied()
    }

    pub fn coefficient(&self, key: PauliKey) -> Complex<T> {
        self.terms.get(&key).cloned().unwrap_or_else(Complex::zero)
    }

    /// Accumulates `c · key`, dropping the entry if it becomes negligible.
    pub fn add_term(&mut self, key: PauliKey, c: Complex<T>) {
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                if !T::negligible(&c, self.prune) {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if T::negligible(&sum, self.prune) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_string(&mut self, p: &PauliString, weight: Complex<T>) -> Result<()> {
        same_sites(self.n_sites, p.n_sites())?;
        self.add_term(p.key(), weight * i_pow(p.phase()));
        Ok(())
    }

    fn prune_in_place(&mut self) {
        let t = self.prune;
        self.terms.retain(|_, c| !T::negligible(c, t));
    }

    pub fn scale_in_place(&mut self, c: &Complex<T>) {
        for v in self.terms.values_mut() {
            *v = v.clone() * c.clone();
        }
        self.prune_in_place();
    }

    pub fn scaled(&self, c: &Complex<T>) -> Self {
        let mut s = self.clone();
        s.scale_in_place(c);
        s
    }

    pub fn scaled_real(&self, x: T) -> Self {
        self.scaled(&real(x))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_sites(self.n_sites, other.n_sites)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        same_sites(self.n_sites, other.n_sites)?;
        for (k, c) in &other.terms {
            self.add_term(*k, c.clone());
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_sites(self.n_sites, other.n_sites)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scaled(&-Complex::<T>::one())
    }

    /// Operator product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        same_sites(self.n_sites, other.n_sites)?;
        let mut out = OperatorSum { n_sites: self.n_sites, terms: BTreeMap::new(), prune: self.prune };
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let (k, key) = ka.product(*kb);
                out.add_term(key, ca.clone() * cb.clone() * i_pow(k));
            }
        }
        Ok(out)
    }

    /// `[self, other] = self·other − other·self`.
    ///
    /// Commuting pairs cancel and are skipped; an anticommuting pair
    /// contributes `2·a·b·(P·Q)`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        same_sites(self.n_sites, other.n_sites)?;
        let two = real(T::from_i64(2));
        let mut out = OperatorSum { n_sites: self.n_sites, terms: BTreeMap::new(), prune: self.prune };
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if ka.commutes_with(*kb) {
                    continue;
                }
                let (k, key) = ka.product(*kb);
                out.add_term(key, two.clone() * ca.clone() * cb.clone() * i_pow(k));
            }
        }
        Ok(out)
    }

    /// `Tr(self† · other) / 2^L`, evaluated termwise.
    pub fn trace_inner_product(&self, other: &Self) -> Result<Complex<T>> {
        same_sites(self.n_sites, other.n_sites)?;
        let (small, large, swap) =
            if self.len() <= other.len() { (self, other, false) } else { (other, self, true) };
        let mut acc = Complex::zero();
        for (k, c) in &small.terms {
            if let Some(d) = large.terms.get(k) {
                acc = acc + if swap { d.conj() * c.clone() } else { c.conj() * d.clone() };
            }
        }
        Ok(acc)
    }

    /// Squared trace norm `Tr(A†A)/2^L`.
    pub fn norm_sqr(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    pub fn adjoint(&self) -> Self {
        OperatorSum {
            n_sites: self.n_sites,
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
            prune: self.prune,
        }
    }

    /// Hermitian iff every coefficient is real (keys are Hermitian).
    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| T::negligible(&Complex::new(T::zero(), c.im.clone()), self.prune))
    }

    /// Whether `[g, self] = 0` exactly.
    pub fn is_symmetric(&self, g: &PauliString) -> Result<bool> {
        same_sites(self.n_sites, g.n_sites())?;
        Ok(self.terms.keys().all(|k| k.commutes_with(g.key())))
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        Ok(self.commutator(other)?.is_empty())
    }

    /// Union of the supports of all terms, 1-based.
    pub fn support(&self) -> Vec<usize> {
        let m = self.terms.keys().fold(0u64, |m, k| m | k.x | k.z);
        PauliKey { x: m, z: 0 }.support()
    }

    /// Largest modulus of the difference of coefficients.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.terms.values().map(|c| c.norm_sqr().to_f64().sqrt()).fold(0.0, f64::max))
    }

    pub fn retain(&mut self, mut f: impl FnMut(PauliKey, &Complex<T>) -> bool) {
        self.terms.retain(|k, c| f(*k, c));
    }

    /// Converts coefficients to another scalar type through `f64`.
    pub fn convert<U: Scalar>(&self) -> OperatorSum<U> {
        let mut out = OperatorSum { n_sites: self.n_sites, terms: BTreeMap::new(), prune: self.prune };
        for (k, c) in &self.terms {
            out.add_term(*k, Complex::new(U::from_f64(c.re.to_f64()), U::from_f64(c.im.to_f64())));
        }
        out
    }

    /// Multiplies every term by a fixed string from the left.
    pub fn left_multiply(&self, p: &PauliString) -> Result<Self> {
        same_sites(self.n_sites, p.n_sites())?;
        let ph = i_pow::<T>(p.phase());
        let mut out = OperatorSum { n_sites: self.n_sites, terms: BTreeMap::new(), prune: self.prune };
        for (k, c) in &self.terms {
            let (e, key) = p.key().product(*k);
            out.add_term(key, c.clone() * ph.clone() * i_pow(e));
        }
        Ok(out)
    }
}
