//! Edge-mode coherence in open spin chains at infinite temperature.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli`]: Pauli strings on up to 64 sites and sparse sums of them,
//!   generic over the coefficient field ([`Scalar`]).
//! * [`models`]: ZXZ, Ising, dual-Ising and effective Floquet Hamiltonians,
//!   edge and symmetry operators.
//! * [`duality`]: the ZXZ ↔ coupled-Ising rewrite and its dense unitary.
//! * [`dynamics`]: dense diagonalization and infinite-temperature
//!   autocorrelators.
//! * [`szm`]: order-by-order edge zero modes, poles and resonances.
//! * [`analysis`]: decay times, plateaus, scaling fits.
//! * [`sweep`]: parallel parameter scans.

pub mod analysis;
pub mod bessel;
pub mod config;
pub mod duality;
pub mod dynamics;
pub mod error;
pub mod models;
pub mod pauli;
pub mod scalar;
pub mod sweep;
pub mod szm;

pub use error::{Error, Result};
pub use pauli::{format_operator, parse_operator, OperatorSum, Pauli, PauliKey, PauliString};
pub use scalar::Scalar;

/// Operator sums with `f64` coefficients.
pub type Operator = OperatorSum<f64>;
/// Operator sums with `f32` coefficients.
pub type Operator32 = OperatorSum<f32>;
/// Operator sums with exact rational coefficients.
pub type ExactOperator = OperatorSum<num_rational::BigRational>;

/// Library version recorded in provenance files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
