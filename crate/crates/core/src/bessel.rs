//! Bessel function of the first kind, order zero.

use crate::error::{Error, Result};

/// Largest argument accepted by [`bessel_j0`].
pub const J0_MAX_ARG: f64 = 1e3;

const SERIES_LIMIT: f64 = 12.0;

/// `J₀(x)` for `|x| ≤ 1000`.
///
/// Power series below `|x| = 12`, Hankel asymptotic expansion above; the
/// absolute error stays below `1e-10` on the whole range.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > J0_MAX_ARG {
        return Err(Error::Domain(format!("bessel_j0 argument {x} outside [-{J0_MAX_ARG}, {J0_MAX_ARG}]")));
    }
    let x = x.abs();
    Ok(if x < SERIES_LIMIT { series(x) } else { asymptotic(x) })
}

fn series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= -q / (k * k);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > q.sqrt() {
            break;
        }
        k += 1.0;
    }
    sum
}

// J0(x) = sqrt(2/(πx)) [P cos(x − π/4) − Q sin(x − π/4)], summed until the
// terms stop shrinking.
fn asymptotic(x: f64) -> f64 {
    let mu = 0.0f64;
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let m = (2 * k - 1) as f64;
        term *= (mu - m * m) * inv8x / k as f64;
        if term.abs() >= prev {
            break;
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
