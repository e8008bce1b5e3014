//! Line-oriented term format: `(coefficient) F1 F2 ...`, one term per line.
//!
//! ```text
//! # sites: 4
//! (-0.05) X1 X2
//! (1.0) Z2 X3 Z4
//! (0.5i) Y1 Z2
//! ```
//!
//! Coefficients are real (`-0.05`), imaginary (`0.5i`) or complex
//! (`0.1-0.2i`). The identity term is written `(c) I`. Lines starting with `#`
//! are comments; a `# sites: N` comment fixes the chain length.

use num_complex::Complex;

use super::{check_sites, Pauli, PauliKey};
use crate::error::{Error, Result};
use crate::pauli::OperatorSum;
use crate::scalar::Scalar;

pub fn format_operator<T: Scalar>(op: &OperatorSum<T>) -> String {
    let mut out = format!("# sites: {}\n", op.n_sites());
    for (k, c) in op.iter() {
        out.push('(');
        out.push_str(&format_coefficient(c));
        out.push(')');
        if *k == PauliKey::IDENTITY {
            out.push_str(" I");
        }
        for s in k.support() {
            out.push(' ');
            out.push(k.factor(s).letter());
            out.push_str(&s.to_string());
        }
        out.push('\n');
    }
    out
}

fn format_coefficient<T: Scalar>(c: &Complex<T>) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => c.re.to_text(),
        (true, false) => format!("{}i", c.im.to_text()),
        (false, false) => {
            let im = c.im.to_text();
            if im.starts_with('-') {
                format!("{}{}i", c.re.to_text(), im)
            } else {
                format!("{}+{}i", c.re.to_text(), im)
            }
        }
    }
}

fn parse_coefficient<T: Scalar>(s: &str) -> Option<Complex<T>> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return T::parse_text(s).map(|re| Complex::new(re, T::zero()));
    };
    // split at the last sign that is not an exponent sign or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (T::parse_text(&body[..i])?, &body[i..]),
        None => (T::zero(), body),
    };
    let im = match im {
        "" | "+" => T::one(),
        "-" => -T::one(),
        other => T::parse_text(other.strip_prefix('+').unwrap_or(other))?,
    };
    Some(Complex::new(re, im))
}

/// Parses the term format. `n_sites` is required unless the text carries a
/// `# sites: N` header; when both are given they must agree.
pub fn parse_operator<T: Scalar>(text: &str, n_sites: Option<usize>) -> Result<OperatorSum<T>> {
    let mut header = None;
    for line in text.lines() {
        if let Some(rest) = line.trim().strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("sites:") {
                let n = v.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: 0,
                    message: format!("bad sites header `{}`", line.trim()),
                })?;
                header = Some(n);
            }
        }
    }
    let n = match (header, n_sites) {
        (Some(a), Some(b)) if a != b => return Err(Error::Dimension { left: a, right: b }),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => {
            return Err(Error::Parse { line: 0, message: "site count not given and no `# sites:` header".into() })
        }
    };
    check_sites(n)?;
    let mut op = OperatorSum::<T>::zero(n)?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { line: lineno + 1, message };
        let rest = line.strip_prefix('(').ok_or_else(|| err("expected `(` before coefficient".into()))?;
        let close = rest.find(')').ok_or_else(|| err("missing `)`".into()))?;
        let coef: Complex<T> =
            parse_coefficient(&rest[..close]).ok_or_else(|| err(format!("bad coefficient `{}`", &rest[..close])))?;
        // factors multiply left to right, so repeated sites are allowed
        let mut acc_phase = 0u8;
        let mut acc = PauliKey::IDENTITY;
        for tok in rest[close + 1..].split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            let mut chars = tok.chars();
            let p = chars
                .next()
                .and_then(Pauli::from_letter)
                .ok_or_else(|| err(format!("bad factor `{tok}`")))?;
            if p == Pauli::I && chars.as_str().is_empty() {
                continue;
            }
            let site: usize = chars.as_str().parse().map_err(|_| err(format!("bad site in `{tok}`")))?;
            if site == 0 || site > n {
                return Err(err(format!("site {site} outside 1..={n}")));
            }
            let single = crate::pauli::PauliString::single(n, site, p)?;
            let (k, key) = acc.product(single.key());
            acc = key;
            acc_phase = (acc_phase + k) & 3;
        }
        op.add_term(acc, coef * crate::scalar::i_pow(acc_phase));
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn parses_spec_lines() {
        let op: OperatorSum = parse_operator("(-0.05) X1 X2\n(1.0) Z2 X3 Z4\n", Some(4)).unwrap();
        assert_eq!(op.len(), 2);
        assert_eq!(op.coefficient(PauliKey::new(0b11, 0)), Complex::new(-0.05, 0.0));
        assert_eq!(op.coefficient(PauliKey::new(0b100, 0b1010)), Complex::new(1.0, 0.0));
    }

    #[test]
    fn formats_and_reparses() {
        let text = "# sites: 3\n(-0.05) X1 X2\n(0.5i) Y1 Z2\n(0.25-0.125i) I\n";
        let op: OperatorSum = parse_operator(text, None).unwrap();
        let again: OperatorSum = parse_operator(&format_operator(&op), None).unwrap();
        assert_eq!(op, again);
        assert!(format_operator(&op).contains("(-0.05) X1 X2"));
    }

    #[test]
    fn repeated_sites_multiply() {
        // X1 Z1 = -i Y1
        let op: OperatorSum = parse_operator("(1.0) X1 Z1", Some(1)).unwrap();
        assert_eq!(op.coefficient(PauliKey::new(1, 1)), Complex::new(0.0, -1.0));
    }

    #[test]
    fn exact_coefficients() {
        let op: OperatorSum<BigRational> = parse_operator("(1/3) Z1\n(-2/5i) Y2", Some(2)).unwrap();
        assert_eq!(op.len(), 2);
        let back: OperatorSum<BigRational> = parse_operator(&format_operator(&op), None).unwrap();
        assert_eq!(op, back);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_operator::<f64>("(1.0) X1\n(abc) Z1", Some(2)).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_operator::<f64>("(1.0) X3", Some(2)).is_err());
        assert!(parse_operator::<f64>("(1.0) X1", None).is_err());
        assert!(parse_operator::<f64>("# sites: 3\n(1.0) X1", Some(2)).is_err());
    }

    #[test]
    fn empty_text_is_zero_operator() {
        let op: OperatorSum = parse_operator("# sites: 4\n", None).unwrap();
        assert!(op.is_empty());
    }
}
