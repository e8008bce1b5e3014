//! Dense complex matrices built from Kronecker products, independent of
//! the library's bitmask representation.

#![allow(dead_code)]

use edgecoh::{parse_operator, ExactOperator, Operator, Pauli, PauliString, Scalar};
use num_rational::BigRational;
use num_complex::Complex64 as C;

#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<C>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense { n, a: vec![C::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Dense::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.a[i * self.n + j]
    }

    pub fn kron(&self, o: &Dense) -> Dense {
        let n = self.n * o.n;
        let mut m = Dense::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..o.n {
                    for l in 0..o.n {
                        m.a[(i * o.n + k) * n + j * o.n + l] = self.get(i, j) * o.get(k, l);
                    }
                }
            }
        }
        m
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let n = self.n;
        let mut m = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    m.a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        m
    }

    pub fn add(&self, o: &Dense) -> Dense {
        Dense { n: self.n, a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect() }
    }

    pub fn scale(&self, c: C) -> Dense {
        Dense { n: self.n, a: self.a.iter().map(|x| x * c).collect() }
    }

    pub fn adjoint(&self) -> Dense {
        let n = self.n;
        let mut m = Dense::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[j * n + i] = self.get(i, j).conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_diff(&self, o: &Dense) -> f64 {
        self.a.iter().zip(&o.a).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    pub fn norm_1(&self) -> f64 {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `exp(self)` by scaling and squaring with a Taylor core.
    pub fn expm(&self) -> Dense {
        let s = (self.norm_1().max(1e-300).log2().ceil() as i32 + 1).max(0);
        let a = self.scale(C::new(0.5f64.powi(s), 0.0));
        let mut term = Dense::identity(self.n);
        let mut sum = Dense::identity(self.n);
        for k in 1..30 {
            term = term.mul(&a).scale(C::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..s {
            sum = sum.mul(&sum);
        }
        sum
    }
}

pub fn single(p: Pauli) -> Dense {
    let (o, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0));
    let a = match p {
        Pauli::I => [i, o, o, i],
        Pauli::X => [o, i, i, o],
        Pauli::Y => [o, C::new(0.0, -1.0), C::new(0.0, 1.0), o],
        Pauli::Z => [i, o, o, -i],
    };
    Dense { n: 2, a: a.to_vec() }
}

/// Site 1 is the least significant bit of the basis index.
pub fn dense_string(p: &PauliString) -> Dense {
    let l = p.n_sites();
    let mut m = Dense::identity(1);
    for site in (1..=l).rev() {
        m = m.kron(&single(p.key().factor(site)));
    }
    let phase = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)][p.phase() as usize & 3];
    m.scale(phase)
}

pub fn dense_op(op: &Operator) -> Dense {
    let n = 1usize << op.n_sites();
    let mut m = Dense::zeros(n);
    for (k, c) in op.iter() {
        let s = PauliString::from_masks(op.n_sites(), k.x, k.z, 0).unwrap();
        m = m.add(&dense_string(&s).scale(*c));
    }
    m
}

pub fn from_faer(m: &faer::Mat<f64>) -> Dense {
    let n = m.nrows();
    let mut d = Dense::zeros(n);
    for i in 0..n {
        for j in 0..n {
            d.a[i * n + j] = C::new(m[(i, j)], 0.0);
        }
    }
    d
}

type Q = BigRational;

pub fn q(x: f64) -> Q {
    Q::from_f64(x)
}

pub fn exact_op(l: usize, terms: &[(Q, &str)]) -> ExactOperator {
    let mut out = ExactOperator::zero(l).unwrap();
    for (c, s) in terms {
        let t: ExactOperator = parse_operator(&format!("(1) {s}"), Some(l)).unwrap();
        out.add_assign(&t.scaled_real(c.clone())).unwrap();
    }
    out
}

/// First-order corrections written out by hand.
pub fn first_order(l: usize, l1: f64, l2: f64, g: f64, g2: f64) -> (ExactOperator, ExactOperator) {
    let (l1, l2, g, g2) = (q(l1), q(l2), q(g), q(g2));
    let d = l1.clone() * l1.clone() - l2.clone() * l2.clone();
    let e = Q::from_i64(4) * l1.clone() * l1.clone() - l2.clone() * l2.clone();
    let two = Q::from_i64(2);
    let psi_z = exact_op(
        l,
        &[
            (g.clone() / l1.clone(), "X1 X2 Z3"),
            (g2.clone() * l1.clone() / d.clone(), "X1 Z3"),
            (g2.clone() * l2.clone() / d.clone(), "Y1 Y2 X3 Z4"),
        ],
    );
    let k = g2.clone() * l1.clone() / e;
    let psi_x = exact_op(
        l,
        &[
            (g / l2.clone(), "X1 X2 X3 Z4"),
            (-g2.clone() * l2.clone() / d.clone(), "X2 X3 Z4"),
            (-g2 * l1.clone() / d, "Z1 Z2 Z3"),
            (k.clone(), "Y1 Z2 Y3"),
            (k.clone() * (two.clone() * l1.clone() / l2.clone() - l2.clone() / l1.clone()), "X1 X2 Z4"),
            (-k.clone(), "X1 Y2 Y3 X4 Z5"),
            (-k * two * l1 / l2, "Y1 Y4 Z5"),
        ],
    );
    (psi_z, psi_x)
}

