//! Pauli strings on up to 64 sites and sparse sums of them.
//!
//! Convention: `Y = i·X·Z` on every site. A [`PauliKey`] `(x, z)` names the
//! Hermitian tensor product that carries `X` on `x \ z`, `Z` on `z \ x` and `Y`
//! on `x ∩ z`, so as a product of bit operators
//!
//! ```text
//! key(x, z) = i^{|x ∧ z|} · X^x · Z^z
//! ```
//!
//! Every key is Hermitian and squares to the identity, and keys are
//! orthonormal under `Tr(A†B)/2^L`. A [`PauliString`] is a key with a phase
//! `i^k`; it is Hermitian exactly when `k` is even. Sites are numbered from 1
//! and site `j` lives in bit `j - 1`.

mod sum;
mod text;

pub use sum::{OperatorSum, DEFAULT_PRUNE};
pub use text::{format_operator, parse_operator};

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_SITES: usize = 64;

/// Single-site Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Phase-free Pauli string: the key type of [`OperatorSum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliKey {
    pub x: u64,
    pub z: u64,
}

impl PauliKey {
    pub const IDENTITY: PauliKey = PauliKey { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        PauliKey { x, z }
    }

    /// Number of `Y` factors.
    #[inline]
    pub fn y_count(self) -> u32 {
        (self.x & self.z).count_ones()
    }

    #[inline]
    pub fn weight(self) -> u32 {
        (self.x | self.z).count_ones()
    }

    #[inline]
    pub fn commutes_with(self, other: PauliKey) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 0
    }

    /// Product of two keys as `(i-power, key)`: `self · other = i^k · key`.
    #[inline]
    pub fn product(self, other: PauliKey) -> (u8, PauliKey) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones() + 4 * 64
            - (x & z).count_ones();
        ((k % 4) as u8, PauliKey { x, z })
    }

    pub fn factor(self, site: usize) -> Pauli {
        let bit = 1u64 << (site - 1);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Occupied sites, 1-based and ascending.
    pub fn support(self) -> Vec<usize> {
        let mut m = self.x | self.z;
        let mut out = Vec::with_capacity(m.count_ones() as usize);
        while m != 0 {
            out.push(m.trailing_zeros() as usize + 1);
            m &= m - 1;
        }
        out
    }
}

/// A signed multi-site Pauli operator `i^phase · key`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_sites: usize,
    key: PauliKey,
    phase: u8,
}

pub(crate) fn check_sites(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SITES {
        Err(Error::SiteCount(n))
    } else {
        Ok(())
    }
}

pub(crate) fn site_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        Ok(PauliString { n_sites, key: PauliKey::IDENTITY, phase: 0 })
    }

    /// Builds a string from raw masks; bits above `n_sites` are rejected.
    pub fn from_masks(n_sites: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        check_sites(n_sites)?;
        let m = site_mask(n_sites);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::Domain(format!("mask has bits beyond site {n_sites}")));
        }
        Ok(PauliString { n_sites, key: PauliKey { x, z }, phase: phase & 3 })
    }

    /// Product of single-site factors, e.g. `[(1, Z), (2, X), (3, Z)]`.
    /// Repeated sites multiply in the order given.
    pub fn from_factors(n_sites: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut acc = PauliString::identity(n_sites)?;
        for &(site, p) in factors {
            acc = acc.multiply(&PauliString::single(n_sites, site, p)?)?;
        }
        Ok(acc)
    }

    pub fn single(n_sites: usize, site: usize, p: Pauli) -> Result<Self> {
        check_sites(n_sites)?;
        if site == 0 || site > n_sites {
            return Err(Error::Domain(format!("site {site} outside 1..={n_sites}")));
        }
        let (bx, bz) = p.bits();
        let bit = 1u64 << (site - 1);
        Ok(PauliString {
            n_sites,
            key: PauliKey { x: if bx { bit } else { 0 }, z: if bz { bit } else { 0 } },
            phase: 0,
        })
    }

    pub fn x(n_sites: usize, site: usize) -> Result<Self> {
        Self::single(n_sites, site, Pauli::X)
    }

    pub fn y(n_sites: usize, site: usize) -> Result<Self> {
        Self::single(n_sites, site, Pauli::Y)
    }

    pub fn z(n_sites: usize, site: usize) -> Result<Self> {
        Self::single(n_sites, site, Pauli::Z)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn key(&self) -> PauliKey {
        self.key
    }

    pub fn x_mask(&self) -> u64 {
        self.key.x
    }

    pub fn z_mask(&self) -> u64 {
        self.key.z
    }

    /// Phase as a power of `i`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.key == PauliKey::IDENTITY && self.phase == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn weight(&self) -> usize {
        self.key.weight() as usize
    }

    pub fn support(&self) -> Vec<usize> {
        self.key.support()
    }

    pub fn adjoint(&self) -> Self {
        PauliString { phase: (4 - self.phase) & 3, ..*self }
    }

    /// Group inverse; equal to the adjoint for Pauli operators.
    pub fn inverse(&self) -> Self {
        self.adjoint()
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        same_sites(self.n_sites, other.n_sites)?;
        Ok(self.key.commutes_with(other.key))
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        same_sites(self.n_sites, other.n_sites)?;
        let (k, key) = self.key.product(other.key);
        Ok(PauliString { n_sites: self.n_sites, key, phase: (self.phase + other.phase + k) & 3 })
    }
}

pub(crate) fn same_sites(left: usize, right: usize) -> Result<()> {
    if left != right {
        Err(Error::Dimension { left, right })
    } else {
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{sign}")?;
        if self.key == PauliKey::IDENTITY {
            return write!(f, "I");
        }
        let mut first = true;
        for s in self.key.support() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", self.key.factor(s).letter(), s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn involution() {
        let x1 = PauliString::x(1, 1).unwrap();
        assert!(x1.multiply(&x1).unwrap().is_identity());
        let zxz = PauliString::from_factors(3, &[(1, Pauli::Z), (2, Pauli::X), (3, Pauli::Z)]).unwrap();
        assert!(zxz.multiply(&zxz).unwrap().is_identity());
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let x1 = PauliString::x(1, 1).unwrap();
        let z1 = PauliString::z(1, 1).unwrap();
        let p = x1.multiply(&z1).unwrap();
        assert_eq!(p.key(), PauliString::y(1, 1).unwrap().key());
        assert_eq!(p.phase(), 3);
        let q = z1.multiply(&x1).unwrap();
        assert_eq!(q.phase(), 1);
    }

    #[test]
    fn y_squares_to_identity() {
        let y = PauliString::y(2, 2).unwrap();
        assert!(y.multiply(&y).unwrap().is_identity());
    }

    #[test]
    fn length_mismatch() {
        let a = PauliString::x(2, 1).unwrap();
        let b = PauliString::x(3, 1).unwrap();
        assert!(matches!(a.multiply(&b), Err(Error::Dimension { left: 2, right: 3 })));
    }

    #[test]
    fn weight_and_support() {
        let zxz = PauliString::from_factors(5, &[(1, Pauli::Z), (2, Pauli::X), (3, Pauli::Z)]).unwrap();
        assert_eq!(zxz.weight(), 3);
        assert_eq!(zxz.support(), vec![1, 2, 3]);
        assert_eq!(zxz.to_string(), "+Z1 X2 Z3");
    }

    #[test]
    fn rejects_bad_sites() {
        assert!(PauliString::identity(0).is_err());
        assert!(PauliString::identity(65).is_err());
        assert!(PauliString::x(4, 5).is_err());
        assert!(PauliString::from_masks(2, 0b100, 0, 0).is_err());
    }
}
