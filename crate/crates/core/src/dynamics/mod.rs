//! Dense exact diagonalization and infinite-temperature autocorrelators.
//!
//! `C(t) = Tr(A(t) A) / 2^L = Σ_{mn} |A_mn|² cos((E_m − E_n) t) / 2^L`.
//!
//! Hamiltonians commuting with products of `σˣ` (the `G_e`/`G_o` pair, or
//! the global Ising parity) are block-diagonalized first: a Hadamard on every
//! site turns those products into `σᶻ` strings, whose eigenvalues label the
//! sectors.

mod autocorr;

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::models::{ChainModel, Family};
use crate::pauli::{OperatorSum, PauliKey, PauliString};
use crate::scalar::{to_c64, Scalar};

pub use crate::models::bulk_reference;
pub use autocorr::{
    autocorrelator, autocorrelator_exact, autocorrelator_with, default_times, log_times, spectral_pairs,
    AutocorrOptions, AutocorrSeries, Bin, SpectralWeightHistogram, DEFAULT_BIN_WIDTH, PHASE_TOLERANCE,
};

/// Hard cap on the chain length for dense matrices.
pub const DENSE_MAX_SITES: usize = 14;

const HERMITIAN_TOLERANCE: f64 = 1e-10;

fn check_dense(sites: usize) -> Result<()> {
    if sites > DENSE_MAX_SITES {
        return Err(Error::Size { what: "dense matrix", sites, limit: DENSE_MAX_SITES });
    }
    Ok(())
}

/// `(key, coefficient)` pairs with the canonical `i^{|x&z|}` folded in, so a
/// term acts as `|b⟩ → c (−1)^{|z&b|} |b ⊕ x⟩`.
fn matrix_terms<T: Scalar>(op: &OperatorSum<T>, rotate: bool) -> Vec<(PauliKey, f64, f64)> {
    op.iter()
        .map(|(k, c)| {
            let c = to_c64(c);
            let y = k.y_count() & 3;
            let (re, im) = match y {
                0 => (c.re, c.im),
                1 => (-c.im, c.re),
                2 => (-c.re, -c.im),
                _ => (c.im, -c.re),
            };
            if rotate {
                // H X H = Z, H Z H = X, H Y H = −Y
                let s = if y % 2 == 1 { -1.0 } else { 1.0 };
                (PauliKey::new(k.z, k.x), s * re, s * im)
            } else {
                (*k, re, im)
            }
        })
        .collect()
}

fn parity(v: u64) -> f64 {
    if v.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Real and imaginary parts of the dense `2^L × 2^L` matrix.
pub fn to_dense_parts<T: Scalar>(op: &OperatorSum<T>) -> Result<(Mat<f64>, Mat<f64>)> {
    let l = op.n_sites();
    check_dense(l)?;
    let dim = 1usize << l;
    let mut re = Mat::<f64>::zeros(dim, dim);
    let mut im = Mat::<f64>::zeros(dim, dim);
    for (k, cr, ci) in matrix_terms(op, false) {
        for b in 0..dim {
            let s = parity(k.z & b as u64);
            let row = b ^ k.x as usize;
            re[(row, b)] += s * cr;
            im[(row, b)] += s * ci;
        }
    }
    Ok((re, im))
}

/// Dense real matrix; errors when the operator has an imaginary part.
pub fn to_dense<T: Scalar>(op: &OperatorSum<T>) -> Result<Mat<f64>> {
    let (re, im) = to_dense_parts(op)?;
    let dev = max_abs(&im);
    if dev > HERMITIAN_TOLERANCE * max_abs(&re).max(1.0) {
        return Err(Error::ComplexHamiltonian);
    }
    Ok(re)
}

pub(crate) fn max_abs(m: &Mat<f64>) -> f64 {
    let mut v = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            v = v.max(m[(i, j)].abs());
        }
    }
    v
}

/// One symmetry sector: basis states and its eigensystem.
#[derive(Debug, Clone)]
pub struct Sector {
    label: u32,
    states: Vec<usize>,
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
}

impl Sector {
    /// Bit `i` is set when the sector is odd under the `i`-th symmetry.
    pub fn label(&self) -> u32 {
        self.label
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Mat<f64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }
}

/// Eigensystem of a real symmetric Hamiltonian, possibly split into
/// symmetry sectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    sites: usize,
    rotated: bool,
    generators: Vec<u64>,
    sectors: Vec<Sector>,
}

impl Spectrum {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.sectors.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Eigenvector matrix in the computational basis; only for spectra built
    /// by [`diagonalize`].
    pub fn eigenvectors(&self) -> Option<&Mat<f64>> {
        match (self.rotated, self.sectors.as_slice()) {
            (false, [s]) => Some(&s.eigenvectors),
            _ => None,
        }
    }

    fn sector_of(&self, b: usize) -> u32 {
        self.generators
            .iter()
            .enumerate()
            .fold(0, |acc, (i, g)| acc | (((g & b as u64).count_ones() & 1) << i))
    }

    fn sector_index(&self, label: u32) -> Option<usize> {
        self.sectors.iter().position(|s| s.label == label)
    }
}

fn eigh(h: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Convergence)?;
    let s = evd.S().column_vector();
    let values: Vec<f64> = (0..n).map(|i| s[i]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Convergence);
    }
    Ok((values, evd.U().to_owned()))
}

/// Full diagonalization of a dense real symmetric `2^L × 2^L` matrix.
pub fn diagonalize(h: &Mat<f64>) -> Result<Spectrum> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::Dimension { left: n, right: h.ncols() });
    }
    if !n.is_power_of_two() {
        return Err(Error::Domain(format!("matrix dimension {n} is not a power of two")));
    }
    let mut dev = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            dev = dev.max((h[(i, j)] - h[(j, i)]).abs());
        }
    }
    if dev > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian(dev));
    }
    let (eigenvalues, eigenvectors) = eigh(h)?;
    Ok(Spectrum {
        sites: n.trailing_zeros() as usize,
        rotated: false,
        generators: Vec::new(),
        sectors: vec![Sector { label: 0, states: (0..n).collect(), eigenvalues, eigenvectors }],
    })
}

/// Diagonalizes `op` block by block using `symmetries`, which must be
/// independent, mutually commuting `σˣ`-only strings that commute with `op`.
/// An empty list gives a single block in the computational basis.
pub fn diagonalize_operator<T: Scalar>(op: &OperatorSum<T>, symmetries: &[PauliString]) -> Result<Spectrum> {
    let l = op.n_sites();
    check_dense(l)?;
    if !op.is_hermitian() {
        return Err(Error::NotHermitian(op.sub(&op.adjoint())?.norm_sqr().to_f64().sqrt()));
    }
    let rotated = !symmetries.is_empty();
    let mut generators = Vec::new();
    for g in symmetries {
        crate::pauli::same_sites(l, g.n_sites())?;
        if g.z_mask() != 0 || g.is_identity() {
            return Err(Error::Domain(format!("symmetry {g} is not a non-trivial product of X")));
        }
        if !op.is_symmetric(g)? {
            return Err(Error::Domain(format!("operator does not commute with {g}")));
        }
        generators.push(g.x_mask());
    }
    if generators.len() > 31 || gf2_rank(&generators) != generators.len() {
        return Err(Error::Domain("symmetry generators are not independent".into()));
    }
    let terms = matrix_terms(op, rotated);
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.1.abs()));
    if terms.iter().any(|t| t.2.abs() > HERMITIAN_TOLERANCE * scale.max(1.0)) {
        return Err(Error::ComplexHamiltonian);
    }
    let mut spec = Spectrum { sites: l, rotated, generators, sectors: Vec::new() };
    let dim = 1usize << l;
    let mut by_label: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for b in 0..dim {
        by_label.entry(spec.sector_of(b)).or_default().push(b);
    }
    let mut position = vec![0usize; dim];
    for states in by_label.values() {
        for (i, &b) in states.iter().enumerate() {
            position[b] = i;
        }
    }
    for (label, states) in by_label {
        let d = states.len();
        let mut block = Mat::<f64>::zeros(d, d);
        for (col, &b) in states.iter().enumerate() {
            for (k, cr, _) in &terms {
                let row = position[b ^ k.x as usize];
                block[(row, col)] += parity(k.z & b as u64) * cr;
            }
        }
        let (eigenvalues, eigenvectors) = eigh(&block)?;
        log::debug!("sector {label:#b}: dim {d}");
        spec.sectors.push(Sector { label, states, eigenvalues, eigenvectors });
    }
    Ok(spec)
}

fn gf2_rank(v: &[u64]) -> usize {
    let mut rows = v.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else { continue };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i] >> bit & 1 == 1 {
                rows[i] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

/// `σˣ`-product symmetries of a model, chosen from `G_o`, `G_e` and the
/// global parity.
pub fn model_symmetries(model: &ChainModel) -> Result<Vec<PauliString>> {
    let l = model.sites;
    let odd = (0..l).step_by(2).fold(0u64, |m, b| m | 1 << b);
    let all = crate::pauli::site_mask(l);
    let candidates = match model.family {
        Family::Ising => vec![all],
        _ => vec![odd, all & !odd],
    };
    let h = model.build::<f64>()?;
    let mut out = Vec::new();
    let mut masks = Vec::new();
    for m in candidates {
        let g = PauliString::from_masks(l, m, 0, 0)?;
        masks.push(m);
        if h.is_symmetric(&g)? && gf2_rank(&masks) == masks.len() {
            out.push(g);
        } else {
            masks.pop();
        }
    }
    Ok(out)
}

/// Builds and diagonalizes a model, using its symmetries when present.
pub fn diagonalize_model(model: &ChainModel) -> Result<Spectrum> {
    let h = model.build::<f64>()?;
    diagonalize_operator(&h, &model_symmetries(model)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    fn op(l: usize, factors: &[(usize, Pauli)]) -> OperatorSum {
        OperatorSum::from_string(&PauliString::from_factors(l, factors).unwrap())
    }

    #[test]
    fn single_site_matrices() {
        let x = to_dense(&op(1, &[(1, Pauli::X)])).unwrap();
        assert_eq!((x[(0, 0)], x[(0, 1)], x[(1, 0)], x[(1, 1)]), (0.0, 1.0, 1.0, 0.0));
        let zz = to_dense(&op(2, &[(1, Pauli::Z), (2, Pauli::Z)])).unwrap();
        let d: Vec<f64> = (0..4).map(|i| zz[(i, i)]).collect();
        assert_eq!(d, vec![1.0, -1.0, -1.0, 1.0]);
        let (re, im) = to_dense_parts(&op(1, &[(1, Pauli::Y)])).unwrap();
        assert_eq!(max_abs(&re), 0.0);
        // Y = [[0, -i], [i, 0]]
        assert_eq!((im[(0, 1)], im[(1, 0)]), (-1.0, 1.0));
        assert!(matches!(to_dense(&op(1, &[(1, Pauli::Y)])), Err(Error::ComplexHamiltonian)));
    }

    #[test]
    fn y_equals_i_x_z() {
        let (x, _) = to_dense_parts(&op(1, &[(1, Pauli::X)])).unwrap();
        let (z, _) = to_dense_parts(&op(1, &[(1, Pauli::Z)])).unwrap();
        let (_, yim) = to_dense_parts(&op(1, &[(1, Pauli::Y)])).unwrap();
        let xz = &x * &z;
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(yim[(i, j)], xz[(i, j)]);
            }
        }
    }

    #[test]
    fn size_cap() {
        let big = OperatorSum::<f64>::zero(15).unwrap();
        assert!(matches!(to_dense(&big), Err(Error::Size { .. })));
    }

    #[test]
    fn transverse_pair_spectrum() {
        let mut h = op(2, &[(1, Pauli::X)]);
        h.add_assign(&op(2, &[(2, Pauli::X)])).unwrap();
        let h = h.scaled_real(0.5);
        let e = diagonalize(&to_dense(&h).unwrap()).unwrap().eigenvalues();
        let want = [-1.0, 0.0, 0.0, 1.0];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_ising_levels() {
        let h = ChainModel::ising(4, 1.0, 0.0, 0.0).build::<f64>().unwrap();
        let e = diagonalize(&to_dense(&h).unwrap()).unwrap().eigenvalues();
        let count = |v: f64| e.iter().filter(|x| (*x - v).abs() < 1e-9).count();
        assert_eq!([count(-3.0), count(-1.0), count(1.0), count(3.0)], [2, 6, 6, 2]);
    }

    #[test]
    fn spectrum_invariants() {
        let h = to_dense(&ChainModel::zxz(6, 1.0, 0.6, 0.3, 0.2).build::<f64>().unwrap()).unwrap();
        let spec = diagonalize(&h).unwrap();
        let e = spec.eigenvalues();
        assert!(e.windows(2).all(|w| w[0] <= w[1]));
        assert!(e.iter().sum::<f64>().abs() < 1e-9);
        let v = spec.eigenvectors().unwrap();
        let n = v.nrows();
        let vtv = v.transpose() * v;
        let d = Mat::<f64>::from_fn(n, n, |i, j| if i == j { e[i] } else { 0.0 });
        let rec = v * &d * v.transpose();
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((vtv[(i, j)] - id).abs() < 1e-10);
                assert!((rec[(i, j)] - h[(i, j)]).abs() < 1e-8 * max_abs(&h));
            }
        }
    }

    #[test]
    fn sectors_reproduce_full_spectrum() {
        for m in [
            ChainModel::zxz(8, 1.0, 0.6, 0.2, 0.1),
            ChainModel::ising(7, 1.0, 0.25, 0.25),
            ChainModel::floquet(8, 0.6, 1.0, 2.68, 1.2, 0.05),
        ] {
            let full = diagonalize(&to_dense(&m.build::<f64>().unwrap()).unwrap()).unwrap().eigenvalues();
            let spec = diagonalize_model(&m).unwrap();
            assert!(spec.sectors().len() > 1);
            for (a, b) in full.iter().zip(spec.eigenvalues()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_symmetries() {
        let h = ChainModel::zxz(6, 1.0, 0.6, 0.2, 0.1).build::<f64>().unwrap();
        let z = PauliString::z(6, 1).unwrap();
        assert!(diagonalize_operator(&h, &[z]).is_err());
        let x1 = PauliString::x(6, 1).unwrap();
        assert!(diagonalize_operator(&h, &[x1]).is_err());
        let go = PauliString::from_masks(6, 0b010101, 0, 0).unwrap();
        assert!(diagonalize_operator(&h, &[go, go]).is_err());
    }

    #[test]
    fn non_symmetric_dense_rejected() {
        let mut m = Mat::<f64>::zeros(4, 4);
        m[(0, 1)] = 1.0;
        assert!(matches!(diagonalize(&m), Err(Error::NotHermitian(_))));
    }
}
