//! Generalized hypergeometric series 0F1, 1F1, 1F2 by term recurrence.

use num_complex::Complex64;

use super::gamma::near_nonpositive_integer;
use crate::error::{Error, Result};

const MAX_TERMS: u32 = 20000;

#[derive(Debug, Clone, Copy)]
pub struct SeriesResult {
    pub value: Complex64,
    pub terms_used: usize,
    pub tail_estimate: f64,
    pub converged: bool,
}

impl SeriesResult {
    /// Drops a numerically real value, rejecting any genuine imaginary residue.
    pub fn real_part(&self) -> Result<f64> {
        if self.value.im.abs() <= 1e-12 * (1.0 + self.value.re.abs()) {
            Ok(self.value.re)
        } else {
            Err(Error::Domain(format!(
                "series value {} carries a non-negligible imaginary part",
                self.value
            )))
        }
    }
}

/// Index at which a numerator parameter truncates the series to a polynomial.
fn terminating_index(num: &[Complex64]) -> Option<u32> {
    num.iter()
        .filter_map(|&a| {
            if near_nonpositive_integer(a, 1e-12) {
                Some((-a.re.round()) as u32)
            } else {
                None
            }
        })
        .min()
}

fn hyp_series(num: &[Complex64], den: &[Complex64], x: Complex64, tol: f64) -> Result<SeriesResult> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!("series tolerance must be positive, got {tol}")));
    }
    let tol = tol.max(1e-16);
    let stop = terminating_index(num);
    for &b in den {
        if near_nonpositive_integer(b, 1e-12) {
            let kb = (-b.re.round()) as u32;
            if stop.map_or(true, |ka| ka >= kb) {
                return Err(Error::Pole(format!(
                    "denominator parameter {b} reaches zero before the series terminates"
                )));
            }
        }
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut small = 0u32;
    for k in 0..MAX_TERMS {
        if stop == Some(k) {
            // Polynomial case: every later term carries the zero numerator factor.
            return Ok(SeriesResult { value: sum, terms_used: (k + 1) as usize, tail_estimate: 0.0, converged: true });
        }
        let kf = f64::from(k);
        let mut factor = x / (kf + 1.0);
        for &a in num {
            factor *= a + kf;
        }
        for &b in den {
            factor /= b + kf;
        }
        term *= factor;
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(Error::NonConvergence(format!("series term overflowed at k = {k}")));
        }
        sum += term;
        if term.norm() <= tol * sum.norm() {
            small += 1;
            if small == 3 {
                return Ok(SeriesResult {
                    value: sum,
                    terms_used: (k + 2) as usize,
                    tail_estimate: term.norm(),
                    converged: true,
                });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence(format!("series did not settle within {MAX_TERMS} terms")))
}

/// Kummer's confluent hypergeometric 1F1(a; b; x).
pub fn hyp1f1(a: Complex64, b: Complex64, x: Complex64, tol: f64) -> Result<SeriesResult> {
    hyp_series(&[a], &[b], x, tol)
}

/// Generalized hypergeometric 1F2(a; b1, b2; x).
pub fn hyp1f2(a: Complex64, b1: Complex64, b2: Complex64, x: Complex64, tol: f64) -> Result<SeriesResult> {
    hyp_series(&[a], &[b1, b2], x, tol)
}

/// Limit hypergeometric 0F1(-; b; x).
pub fn hyp0f1(b: Complex64, x: Complex64, tol: f64) -> Result<SeriesResult> {
    hyp_series(&[], &[b], x, tol)
}
