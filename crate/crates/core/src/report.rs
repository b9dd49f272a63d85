//! Uniform result record for numerical verification checks.

use crate::quadrature::QuadratureResult;

/// Outcome of one check: the analytic target, the independently computed value,
/// and both error measures. `quadrature` carries the integrator diagnostics when
/// the computed side came from one.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub target: f64,
    pub computed: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub quadrature: Option<QuadratureResult>,
}

impl VerificationReport {
    pub fn new(target: f64, computed: f64, quadrature: Option<QuadratureResult>) -> Self {
        let abs_err = (computed - target).abs();
        // For a zero target the relative column degenerates to the absolute one.
        let rel_err = if target.abs() > f64::MIN_POSITIVE { abs_err / target.abs() } else { abs_err };
        Self { target, computed, abs_err, rel_err, quadrature }
    }

    /// True when the deviation is within `tol`, measured relative to the target
    /// when the target is away from zero and absolutely otherwise.
    pub fn passes(&self, tol: f64) -> bool {
        self.abs_err <= tol * self.target.abs().max(1.0) || self.rel_err <= tol
    }
}
