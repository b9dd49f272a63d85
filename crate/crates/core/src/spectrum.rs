//! Eigenvalues and eigenfunctions of the layer Hamiltonian, with orthonormality
//! and degeneracy diagnostics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::LayerParams;
use crate::quadrature::{integrate_semi_infinite, QuadratureConfig};
use crate::report::VerificationReport;
use crate::specfun::ln_gamma;

/// Quantum numbers of one bound state: radial index `m`, angular momentum `l`,
/// transverse well index `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuantumNumbers {
    pub m: u32,
    pub l: i32,
    pub n: u32,
}

/// Energy on the `l <= 0` ladder: `B(2m+1) + (pi (n+1) / d)^2`.
pub fn energy_mn(m: u32, n: u32, params: &LayerParams) -> f64 {
    params.energy(m, n)
}

/// Full eigenvalue `B(2m + l + |l| + 1) + (pi (n+1) / d)^2`.
///
/// Positive `l` costs `2Bl`; non-positive `l` is degenerate with `l = 0`.
pub fn energy_full(q: QuantumNumbers, params: &LayerParams) -> f64 {
    let l_term = if q.l > 0 { 2.0 * f64::from(q.l) } else { 0.0 };
    params.b * (2.0 * f64::from(q.m) + l_term + 1.0) + params.well_mode(q.n)
}

/// `1F1(-m; alpha+1; x)` through the associated Laguerre three-term recurrence,
/// rescaled by `m! / (alpha+1)_m`. Stable for the moderate `m` used here and
/// cheaper than restarting the hypergeometric series at every radial point.
fn confluent_factor(m: u32, alpha: f64, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut prev = 1.0_f64;
    let mut cur = 1.0 + alpha - x;
    for k in 1..m {
        let kf = f64::from(k);
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let mut scale = 1.0;
    for k in 0..m {
        scale *= f64::from(k + 1) / (alpha + 1.0 + f64::from(k));
    }
    cur * scale
}

/// Radial factor including its normalization and the `1/sqrt(2 pi)` angular share,
/// so that `2 pi Int |radial|^2 r dr = 1`.
fn radial_part(m: u32, l_abs: u32, b: f64, r: f64) -> f64 {
    let la = f64::from(l_abs);
    let lm = f64::from(m);
    // ln N^2 = (|l|+1) ln(B/2) + ln (|l|+1)_m - ln pi - ln m! - ln Gamma(|l|+1)
    let lg = |x: f64| ln_gamma(Complex64::new(x, 0.0)).map(|v| v.re).unwrap_or(f64::NAN);
    let ln_n2 = (la + 1.0) * (b / 2.0).ln() + (lg(la + 1.0 + lm) - lg(la + 1.0))
        - std::f64::consts::PI.ln()
        - lg(lm + 1.0)
        - lg(la + 1.0);
    let x = b * r * r / 2.0;
    (0.5 * ln_n2).exp() * r.powi(l_abs as i32) * (-0.5 * x).exp() * confluent_factor(m, la, x)
}

/// Normalized eigenfunction at the cylindrical point `(r, theta, z)`.
pub fn eigenfunction(
    q: QuantumNumbers,
    params: &LayerParams,
    r: f64,
    theta: f64,
    z: f64,
) -> Result<Complex64> {
    if !(r >= 0.0) || !r.is_finite() || !theta.is_finite() {
        return Err(Error::Domain(format!(
            "eigenfunction wants r >= 0 and finite theta, got r = {r}, theta = {theta}"
        )));
    }
    if !(0.0..=params.d).contains(&z) {
        return Err(Error::Domain(format!(
            "eigenfunction wants 0 <= z <= d = {}, got z = {z}",
            params.d
        )));
    }
    let radial = radial_part(q.m, q.l.unsigned_abs(), params.b, r);
    let angular = Complex64::from_polar(1.0, f64::from(q.l) * theta);
    let well = (2.0 / params.d).sqrt()
        * ((f64::from(q.n) + 1.0) * std::f64::consts::PI * z / params.d).sin();
    Ok(angular * (radial * well))
}

/// Inner product of two eigenfunctions against the Kronecker target.
///
/// The angular and transverse integrals are exact (they vanish unless `l` and `n`
/// match), so only the radial overlap is done by quadrature.
pub fn orthonormality_check(
    qa: QuantumNumbers,
    qb: QuantumNumbers,
    params: &LayerParams,
    cfg: &QuadratureConfig,
) -> Result<VerificationReport> {
    let target = if qa == qb { 1.0 } else { 0.0 };
    if qa.l != qb.l || qa.n != qb.n {
        return Ok(VerificationReport::new(target, 0.0, None));
    }
    let l_abs = qa.l.unsigned_abs();
    let b = params.b;
    let (ma, mb) = (qa.m, qb.m);
    let qr = integrate_semi_infinite(
        |r| 2.0 * std::f64::consts::PI * radial_part(ma, l_abs, b, r) * radial_part(mb, l_abs, b, r) * r,
        cfg,
    )?;
    let computed = qr.value;
    Ok(VerificationReport::new(target, computed, Some(qr)))
}

/// Outcome of scanning an `(m, n)` energy grid for coincidences.
#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyReport {
    /// The commensurability ratio `(pi / d)^2 / B`.
    pub ratio: f64,
    /// `ratio` as a reduced fraction when one exists with denominator `<= q_max`.
    pub rational_within: Option<(u64, u64)>,
    /// All `(m, n)` index pairs whose energies coincide within tolerance,
    /// each pair ordered lexicographically.
    pub colliding_pairs: Vec<((u32, u32), (u32, u32))>,
}

/// Continued fraction convergents of `x`, stopping when the residual fractional
/// part drops below 1e-12 (treated as exactly rational) or the denominator
/// passes `q_max` (treated as irrational at this resolution).
fn rational_approx(x: f64, q_max: u64) -> Option<(u64, u64)> {
    if !(x > 0.0) || !x.is_finite() {
        return None;
    }
    let mut a = x.floor();
    let (mut p0, mut q0): (u128, u128) = (1, 0);
    let (mut p1, mut q1): (u128, u128) = (a as u128, 1);
    let mut frac = x - a;
    for _ in 0..64 {
        if frac < 1e-12 {
            if p1 > u128::from(u64::MAX) {
                return None;
            }
            return Some((p1 as u64, q1 as u64));
        }
        let rest = 1.0 / frac;
        a = rest.floor();
        let p2 = (a as u128).checked_mul(p1)?.checked_add(p0)?;
        let q2 = (a as u128).checked_mul(q1)?.checked_add(q0)?;
        if q2 > u128::from(q_max) {
            return None;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        frac = rest - a;
    }
    None
}

/// Scan the `l <= 0` spectrum for degenerate `(m, n)` pairs and report whether
/// the well-to-cyclotron ratio is commensurate.
///
/// Energies within `tol * (1 + |E|)` of a cluster anchor count as coincident.
pub fn degeneracy_probe(
    params: &LayerParams,
    m_max: u32,
    n_max: u32,
    tol: f64,
    q_max: u64,
) -> DegeneracyReport {
    let mut levels: Vec<((u32, u32), f64)> = Vec::new();
    for m in 0..=m_max {
        for n in 0..=n_max {
            levels.push(((m, n), params.energy(m, n)));
        }
    }
    levels.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("energies are finite"));

    let mut colliding_pairs = Vec::new();
    let mut i = 0;
    while i < levels.len() {
        let anchor = levels[i].1;
        let mut j = i + 1;
        while j < levels.len() && (levels[j].1 - anchor).abs() <= tol * (1.0 + anchor.abs()) {
            j += 1;
        }
        for a in i..j {
            for b in (a + 1)..j {
                let (x, y) = (levels[a].0, levels[b].0);
                colliding_pairs.push(if x <= y { (x, y) } else { (y, x) });
            }
        }
        i = j;
    }

    let ratio = params.well_scale() / params.b;
    DegeneracyReport {
        ratio,
        rational_within: rational_approx(ratio, q_max),
        colliding_pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hyp1f1;

    fn p(b: f64, d: f64) -> LayerParams {
        LayerParams::new(b, d).unwrap()
    }

    #[test]
    fn energy_examples() {
        let params = p(1.0, std::f64::consts::PI);
        assert_eq!(energy_mn(0, 0, &params), 2.0);
        assert_eq!(energy_mn(1, 0, &params), 4.0);
        let q = QuantumNumbers { m: 1, l: 2, n: 0 };
        assert_eq!(energy_full(q, &params), 8.0);
        for l in [-3, -1, 0] {
            let q = QuantumNumbers { m: 2, l, n: 1 };
            assert_eq!(energy_full(q, &params), energy_mn(2, 1, &params));
        }
        // strictly increasing in each index on the l <= 0 ladder
        for m in 0..5 {
            for n in 0..5 {
                assert!(energy_mn(m + 1, n, &params) > energy_mn(m, n, &params));
                assert!(energy_mn(m, n + 1, &params) > energy_mn(m, n, &params));
            }
        }
    }

    #[test]
    fn eigenfunction_basics() {
        let params = p(1.0, std::f64::consts::PI);
        let q = QuantumNumbers { m: 0, l: 0, n: 0 };
        // hard wall at z = 0
        let at_wall = eigenfunction(q, &params, 1.0, 0.3, 0.0).unwrap();
        assert_eq!(at_wall.norm(), 0.0);
        // s states do not depend on theta
        let v1 = eigenfunction(q, &params, 0.7, 0.0, 1.0).unwrap();
        let v2 = eigenfunction(q, &params, 0.7, 2.1, 1.0).unwrap();
        assert!((v1 - v2).norm() < 1e-15);
        // first radial excitation has its node at r = sqrt(2/B)
        let q10 = QuantumNumbers { m: 1, l: 0, n: 0 };
        let node = eigenfunction(q10, &params, 2.0_f64.sqrt(), 0.0, 1.0).unwrap();
        assert!(node.norm() < 1e-14);
        // out of domain
        assert!(eigenfunction(q, &params, -0.1, 0.0, 1.0).is_err());
        assert!(eigenfunction(q, &params, 1.0, 0.0, 4.0).is_err());
    }

    #[test]
    fn laguerre_recurrence_matches_series() {
        for m in 0..=5u32 {
            for alpha in [0.0, 1.0, 2.0] {
                for x in [0.3, 1.7, 4.0] {
                    let via_recurrence = confluent_factor(m, alpha, x);
                    let via_series = hyp1f1(
                        Complex64::new(-f64::from(m), 0.0),
                        Complex64::new(alpha + 1.0, 0.0),
                        Complex64::new(x, 0.0),
                        1e-14,
                    )
                    .unwrap()
                    .real_part()
                    .unwrap();
                    assert!(
                        (via_recurrence - via_series).abs() <= 1e-12 * (1.0 + via_series.abs()),
                        "m={m} alpha={alpha} x={x}: {via_recurrence} vs {via_series}"
                    );
                }
            }
        }
    }

    #[test]
    fn orthonormality_spots() {
        let params = p(1.0, std::f64::consts::PI);
        let cfg = QuadratureConfig::default();
        let q000 = QuantumNumbers { m: 0, l: 0, n: 0 };
        let q100 = QuantumNumbers { m: 1, l: 0, n: 0 };
        let q010 = QuantumNumbers { m: 0, l: 1, n: 0 };
        let q210 = QuantumNumbers { m: 2, l: 1, n: 0 };

        let same = orthonormality_check(q000, q000, &params, &cfg).unwrap();
        assert!(same.passes(1e-8), "norm deviates: {same:?}");

        let cross = orthonormality_check(q000, q100, &params, &cfg).unwrap();
        assert!(cross.computed.abs() <= 1e-8, "radial overlap: {cross:?}");

        let with_l = orthonormality_check(q010, q010, &params, &cfg).unwrap();
        assert!(with_l.passes(1e-8), "l = 1 norm deviates: {with_l:?}");

        let cross_l = orthonormality_check(q010, q210, &params, &cfg).unwrap();
        assert!(cross_l.computed.abs() <= 1e-8, "l = 1 overlap: {cross_l:?}");

        // mismatched angular or transverse labels short-circuit to exactly zero
        let lm = orthonormality_check(
            q000,
            QuantumNumbers { m: 0, l: -1, n: 0 },
            &params,
            &cfg,
        )
        .unwrap();
        assert_eq!(lm.computed, 0.0);
        assert!(lm.quadrature.is_none());
        let nm = orthonormality_check(
            q000,
            QuantumNumbers { m: 0, l: 0, n: 1 },
            &params,
            &cfg,
        )
        .unwrap();
        assert_eq!(nm.computed, 0.0);
    }

    #[test]
    fn degeneracy_commensurate_case() {
        // B = 2, d = pi: E(m, n) = 2(2m+1) + (n+1)^2, so (2,0) and (0,2) share E = 11
        let params = p(2.0, std::f64::consts::PI);
        let report = degeneracy_probe(&params, 3, 3, 1e-9, 1_000_000);
        assert_eq!(report.rational_within, Some((1, 2)));
        assert!(report.colliding_pairs.contains(&((0, 2), (2, 0))));
    }

    #[test]
    fn degeneracy_incommensurate_case() {
        let params = p(1.0, std::f64::consts::PI * 2f64.powf(0.25));
        let report = degeneracy_probe(&params, 3, 3, 1e-9, 1_000_000);
        assert_eq!(report.rational_within, None);
        assert!(report.colliding_pairs.is_empty());
    }

    #[test]
    fn degeneracy_trivial_grid() {
        let params = p(2.0, std::f64::consts::PI);
        let report = degeneracy_probe(&params, 0, 0, 1e-9, 1_000_000);
        assert!(report.colliding_pairs.is_empty());
        assert_eq!(report.ratio, 0.5);
    }
}
