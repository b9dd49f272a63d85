//! Principal-branch log-Gamma on the complex plane and Pochhammer products.

use num_complex::Complex64;

use crate::error::{Error, Result};

// Stirling coefficients B_{2j} / (2j (2j-1)) for j = 1..7.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 1560.0,
];

/// True when z sits within `tol` of a nonpositive integer (a Gamma pole).
pub fn near_nonpositive_integer(z: Complex64, tol: f64) -> bool {
    z.im.abs() <= tol && z.re <= 0.5 && (z.re - z.re.round()).abs() <= tol && z.re.round() <= 0.0
}

/// Log-Gamma, principal branch. Shift-and-Stirling on the right half plane,
/// reflection for re(z) < 0.5.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("ln_gamma of non-finite argument {z}")));
    }
    if near_nonpositive_integer(z, 1e-12) {
        return Err(Error::Pole(format!("ln_gamma pole at {z}")));
    }
    if z.re < 0.5 {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z).
        let pi = std::f64::consts::PI;
        let s = (Complex64::new(pi, 0.0) * z).sin();
        return Ok(Complex64::new(pi, 0.0).ln() - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z)?);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 8.0 {
        shift += w.ln();
        w += 1.0;
    }
    let mut series = Complex64::new(0.0, 0.0);
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv2;
    }
    let half_log_two_pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    Ok((w - 0.5) * w.ln() - w + half_log_two_pi + series - shift)
}

/// Gamma for positive real argument.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_real needs x > 0, got {x}")));
    }
    Ok(ln_gamma(Complex64::new(x, 0.0))?.re.exp())
}

/// Rising factorial (a)_k = a (a+1) ... (a+k-1); (a)_0 = 1.
pub fn pochhammer(a: Complex64, k: u32) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for j in 0..k {
        p *= a + f64::from(j);
    }
    p
}

/// Rising factorial for real a.
pub fn pochhammer_real(a: f64, k: u32) -> f64 {
    let mut p = 1.0;
    for j in 0..k {
        p *= a + f64::from(j);
    }
    p
}
