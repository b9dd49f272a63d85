//! Physical parameters of the layer.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Magnetic field strength `b` and layer width `d`, both strictly positive.
///
/// The energy scale is fixed so the Landau ladder is b(2m+1) and the
/// transverse modes are (pi (n+1)/d)^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerParams {
    pub b: f64,
    pub d: f64,
}

impl LayerParams {
    pub fn new(b: f64, d: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::Domain(format!("field strength must be positive, got {b}")));
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Domain(format!("layer width must be positive, got {d}")));
        }
        Ok(Self { b, d })
    }

    /// Landau level b(2m+1) for l <= 0.
    pub fn landau(&self, m: u32) -> f64 {
        self.b * (2.0 * f64::from(m) + 1.0)
    }

    /// Transverse well mode (pi (n+1)/d)^2.
    pub fn well_mode(&self, n: u32) -> f64 {
        let w = std::f64::consts::PI * (f64::from(n) + 1.0) / self.d;
        w * w
    }

    /// Joint level E(m,n) = b(2m+1) + (pi (n+1)/d)^2.
    pub fn energy(&self, m: u32, n: u32) -> f64 {
        self.landau(m) + self.well_mode(n)
    }

    /// Well scale q = (pi/d)^2; well_mode(n) = q (n+1)^2.
    pub fn well_scale(&self) -> f64 {
        let w = std::f64::consts::PI / self.d;
        w * w
    }

    /// Landau ladder with its ground rung removed: 2 b m.
    pub fn landau_shifted(&self, m: u32) -> f64 {
        2.0 * self.b * f64::from(m)
    }

    /// Well ladder with its ground rung removed: q n (n + 2).
    pub fn well_shifted(&self, n: u32) -> f64 {
        self.well_scale() * f64::from(n) * (f64::from(n) + 2.0)
    }

    /// Second parameter of the fixed-n hypergeometric family:
    /// gamma = 1 + (b d^2 + pi^2 (n+1)^2) / (2 b d^2), so that E(m,n) = 2b (m + gamma - 1).
    pub fn gamma_fixed_n(&self, n: u32) -> f64 {
        let pi = std::f64::consts::PI;
        let np1 = f64::from(n) + 1.0;
        1.0 + (self.b * self.d * self.d + pi * pi * np1 * np1) / (2.0 * self.b * self.d * self.d)
    }

    /// Complex parameter of the fixed-m hypergeometric family:
    /// beta = 2 + i (d/pi) sqrt(b (2m+1)); E(m, n) = q |beta + n - 1|^2 at each rung.
    pub fn beta_fixed_m(&self, m: u32) -> Complex64 {
        let pi = std::f64::consts::PI;
        Complex64::new(2.0, self.d / pi * self.landau(m).sqrt())
    }
}
