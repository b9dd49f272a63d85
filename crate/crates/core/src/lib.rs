//! Coherent state families built on the spectrum of a charged particle confined
//! to an infinite layer of width `d` threaded by a uniform magnetic field `B`
//! (units with the cyclotron and well scales folded in: E(m,n) = B(2m+1) + (pi (n+1)/d)^2).
//!
//! The crate provides the supporting special functions and quadrature, the layer
//! spectrum itself, the coherent state constructions over it (single series,
//! products, nested), their resolution measures, ladder algebras, and photon
//! counting statistics.

pub mod algebra;
pub mod coherent;
pub mod error;
pub mod measures;
pub mod params;
pub mod quadrature;
pub mod report;
pub mod specfun;
pub mod spectrum;
pub mod stats;

pub use error::{Error, Result};
pub use params::LayerParams;
pub use report::VerificationReport;
