//! Special functions shared by every coherent-state class.

pub mod bessel;
pub mod gamma;
pub mod series;

pub use bessel::{bessel_i, bessel_k, meijer_g2002};
pub use gamma::{gamma_real, ln_gamma, pochhammer, pochhammer_real};
pub use series::{hyp0f1, hyp1f1, hyp1f2, SeriesResult};
