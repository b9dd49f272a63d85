//! Weighting distributions, energy moments, and the Mandel parameter for
//! every coherent state class, with closed forms checked against series.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coherent::{build_state, one_ladder, CsClass, CsLabel, StateCoeffs, TruncatedState};
use crate::error::{Error, Result};
use crate::params::LayerParams;
use crate::specfun::series::{hyp1f1, hyp1f2};

/// Tail tolerance used when truncating states for brute-force moments.
const BRUTE_EPS: f64 = 1e-13;
/// Term cap for the component series.
const TERM_CAP: u32 = 100_000;

/// Moments of the class's number operator over the weighting distribution.
///
/// `mandel_q` always comes from the brute-force series (the ground truth);
/// `closed_form_q` carries the published closed form where one exists and
/// `oracle_deviation` the relative gap between the two.
#[derive(Clone, Copy, Debug)]
pub struct StatReport {
    pub mean_n: f64,
    pub mean_n2: f64,
    pub mandel_q: f64,
    pub closed_form_q: Option<f64>,
    pub closed_form_used: bool,
    pub oracle_deviation: f64,
}

/// Basis index of a weighting distribution entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisIndex {
    One(u32),
    Two(u32, u32),
}

/// Number-operator eigenvalue at a basis index.
///
/// Single-series classes use their own ladder energy. The grid classes use
/// the tensor of their factor number operators: Landau times well mode for
/// the product, the shifted pair for the shifted product, and Landau times
/// the full two-index energy for the nested families.
fn number_eigenvalue(class: CsClass, params: &LayerParams, m: u32, n: u32) -> f64 {
    match class {
        CsClass::FixedN { .. }
        | CsClass::FixedM { .. }
        | CsClass::FixedNShifted { .. }
        | CsClass::FixedMShifted { .. } => one_ladder(class, params, m),
        CsClass::Product => params.landau(m) * params.well_mode(n),
        CsClass::ProductShifted => params.landau_shifted(m) * params.well_shifted(n),
        CsClass::Nested | CsClass::NestedAltPhase => params.landau(m) * params.energy(m, n),
    }
}

fn brute_moments(state: &TruncatedState) -> (f64, f64) {
    let mut mean = 0.0;
    let mut mean2 = 0.0;
    match &state.coeffs {
        StateCoeffs::One(coeffs) => {
            for (k, c) in coeffs.iter().enumerate() {
                let p = c.norm_sqr();
                let nu = number_eigenvalue(state.class, &state.params, k as u32, 0);
                mean += p * nu;
                mean2 += p * nu * nu;
            }
        }
        StateCoeffs::Two { m_len, n_len, grid } => {
            for m in 0..*m_len {
                for n in 0..*n_len {
                    let p = grid[m * n_len + n].norm_sqr();
                    if p == 0.0 {
                        continue;
                    }
                    let nu = number_eigenvalue(state.class, &state.params, m as u32, n as u32);
                    mean += p * nu;
                    mean2 += p * nu * nu;
                }
            }
        }
    }
    (mean, mean2)
}

/// Mandel parameter from the first two moments; a distribution whose mean
/// vanishes (the observable is almost surely zero) gets the deterministic
/// convention Q = -1.
fn q_from_moments(mean: f64, mean2: f64) -> f64 {
    if mean == 0.0 {
        -1.0
    } else {
        (mean2 - mean * mean - mean) / mean
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Closed first and second moments of the fixed-n family.
fn fixed_n_closed(n: u32, j: f64, params: &LayerParams, tol: f64) -> Result<(f64, f64)> {
    let b = params.b;
    let x = re(j / (2.0 * b));
    let gamma = params.gamma_fixed_n(n);
    let omega = params.energy(0, n);
    let f1 = hyp1f1(re(1.0), re(gamma), x, tol)?.real_part()?;
    let f2 = hyp1f1(re(2.0), re(gamma + 1.0), x, tol)?.real_part()?;
    let f3 = hyp1f1(re(3.0), re(gamma + 2.0), x, tol)?.real_part()?;
    let mean = j / gamma * f2 / f1 + omega;
    let mean2 = (2.0 * j * (b + omega) / gamma * f2
        + 2.0 * j * j / (gamma * (gamma + 1.0)) * f3)
        / f1
        + omega * omega;
    Ok((mean, mean2))
}

/// Closed normalized moments of the squared and fourth-power well index,
/// shared by the fixed-m family and by the well factor of the product
/// family through the substitution beta = 2.
fn well_moment_components(beta: Complex64, y: f64, tol: f64) -> Result<(f64, f64)> {
    let bc = beta.conj();
    let one = re(1.0);
    let f1 = hyp1f2(re(1.0), beta, bc, re(y), tol)?.real_part()?;
    let f2 = hyp1f2(re(2.0), beta, bc, re(y), tol)?.real_part()?;
    let f3 = hyp1f2(re(3.0), beta + one, bc + one, re(y), tol)?.real_part()?;
    let f4 = hyp1f2(re(4.0), beta + 2.0 * one, bc + 2.0 * one, re(y), tol)?.real_part()?;
    let b2 = beta.norm_sqr();
    let bp2 = (beta + one).norm_sqr();
    let q1 = (f2 + 2.0 * y / b2 * f3) / f1;
    let q2 = ((2.0 * y + 1.0) * f2 - 2.0 * y * (b2 - y - 7.0) / b2 * f3
        - 6.0 * y * y * (2.0 * beta.re - 5.0) / (b2 * bp2) * f4)
        / f1;
    Ok((q1, q2))
}

/// Closed normalized first and second moments of the Landau index of the
/// product family.
fn landau_moment_components(j1: f64, params: &LayerParams, tol: f64) -> Result<(f64, f64)> {
    let x = j1 / (2.0 * params.b);
    let n1 = hyp1f1(re(1.0), re(1.5), re(x), tol)?.real_part()?;
    let f25 = hyp1f1(re(2.0), re(2.5), re(x), tol)?.real_part()?;
    let f37 = hyp1f1(re(3.0), re(3.5), re(x), tol)?.real_part()?;
    let q3 = 2.0 * x / 3.0 * f25 / n1;
    let q5 = (2.0 * x / 3.0 * f25 + 8.0 * x * x / 15.0 * f37) / n1;
    Ok((q3, q5))
}

/// Closed moments of the class's number operator, where published.
fn closed_moments(
    class: CsClass,
    label: CsLabel,
    params: &LayerParams,
    tol: f64,
) -> Result<Option<(f64, f64)>> {
    match (class, label) {
        (CsClass::FixedN { n }, CsLabel::One { j, .. }) => {
            Ok(Some(fixed_n_closed(n, j, params, tol)?))
        }
        (CsClass::FixedM { m }, CsLabel::One { j, .. }) => {
            let q = params.well_scale();
            let (q1, q2) = well_moment_components(params.beta_fixed_m(m), j / q, tol)?;
            let p = params.landau(m);
            Ok(Some((p + q * q1, p * p + 2.0 * p * q * q1 + q * q * q2)))
        }
        (CsClass::Product, CsLabel::Two { j1, j2, .. }) => {
            let (q3, q5) = landau_moment_components(j1, params, tol)?;
            let q = params.well_scale();
            let (q4, q6) = well_moment_components(re(2.0), j2 / q, tol)?;
            let b = params.b;
            let mean = b * (2.0 * q3 + 1.0) * q * q4;
            let mean2 = b * b * (4.0 * q5 + 4.0 * q3 + 1.0) * q * q * q6;
            Ok(Some((mean, mean2)))
        }
        (CsClass::FixedNShifted { .. }, CsLabel::One { j, .. }) => {
            // Poisson in the Landau index with eigenvalues 2 b k
            Ok(Some((j, j * j + 2.0 * params.b * j)))
        }
        _ => Ok(None),
    }
}

/// Mandel parameter of the class's number operator at the given label.
///
/// The brute-force value from the truncated state is the reported Q; when
/// the class has a published closed form, it is evaluated with series
/// tolerance two decades below `tol` and the relative gap is reported as the
/// oracle deviation.
pub fn mandel_q(
    class: CsClass,
    label: CsLabel,
    params: &LayerParams,
    tol: f64,
) -> Result<StatReport> {
    let state = build_state(class, label, params, BRUTE_EPS)?;
    let (mean, mean2) = brute_moments(&state);
    let q = q_from_moments(mean, mean2);
    let series_tol = (tol * 1e-2).clamp(1e-15, 1e-10);
    let closed = closed_moments(class, label, params, series_tol)?
        .map(|(cm, cm2)| q_from_moments(cm, cm2));
    let (used, deviation) = match closed {
        Some(qc) => (true, (q - qc).abs() / qc.abs().max(1.0)),
        None => (false, 0.0),
    };
    Ok(StatReport {
        mean_n: mean,
        mean_n2: mean2,
        mandel_q: q,
        closed_form_q: closed,
        closed_form_used: used,
        oracle_deviation: deviation,
    })
}

/// Probability of finding the basis state at `index` in the coherent state.
pub fn prob(class: CsClass, index: BasisIndex, label: CsLabel, params: &LayerParams) -> Result<f64> {
    let state = build_state(class, label, params, BRUTE_EPS)?;
    match (&state.coeffs, index) {
        (StateCoeffs::One(coeffs), BasisIndex::One(k)) => {
            Ok(coeffs.get(k as usize).map_or(0.0, |c| c.norm_sqr()))
        }
        (StateCoeffs::Two { m_len, n_len, grid }, BasisIndex::Two(m, n)) => {
            let (m, n) = (m as usize, n as usize);
            if m < *m_len && n < *n_len {
                Ok(grid[m * n_len + n].norm_sqr())
            } else {
                Ok(0.0)
            }
        }
        _ => Err(Error::ClassMismatch(
            "basis index arity does not match the class".into(),
        )),
    }
}

/// Weighting distribution over the retained basis window, capped at `k_max`
/// per index and sorted by index.
pub fn distribution_table(
    class: CsClass,
    label: CsLabel,
    params: &LayerParams,
    k_max: u32,
) -> Result<Vec<(BasisIndex, f64)>> {
    let state = build_state(class, label, params, BRUTE_EPS)?;
    let mut rows = Vec::new();
    match &state.coeffs {
        StateCoeffs::One(coeffs) => {
            for (k, c) in coeffs.iter().enumerate().take(k_max as usize + 1) {
                rows.push((BasisIndex::One(k as u32), c.norm_sqr()));
            }
        }
        StateCoeffs::Two { m_len, n_len, grid } => {
            for m in 0..*m_len.min(&(k_max as usize + 1)) {
                for n in 0..*n_len.min(&(k_max as usize + 1)) {
                    rows.push((
                        BasisIndex::Two(m as u32, n as u32),
                        grid[m * n_len + n].norm_sqr(),
                    ));
                }
            }
        }
    }
    Ok(rows)
}

/// Normalized series averages `sum stat_i(k) w_k / sum w_k` over the weights
/// `w_0 = 1`, `w_k = w_{k-1} * y / step(k)`.
fn series_averages(
    y: f64,
    step: impl Fn(u32) -> f64,
    stats: &[&dyn Fn(u32) -> f64],
) -> Result<Vec<f64>> {
    let mut w = 1.0_f64;
    let mut den = 1.0_f64;
    let mut num: Vec<f64> = stats.iter().map(|s| s(0)).collect();
    for k in 1..=TERM_CAP {
        w *= y / step(k);
        if !w.is_finite() {
            return Err(Error::NonConvergence("component series overflowed".into()));
        }
        den += w;
        let mut heavy = w;
        for (i, s) in stats.iter().enumerate() {
            let term = s(k) * w;
            num[i] += term;
            heavy = heavy.max(term.abs());
        }
        if heavy < 1e-16 * den {
            return Ok(num.into_iter().map(|v| v / den).collect());
        }
    }
    Err(Error::NonConvergence(format!(
        "component series still moving after {TERM_CAP} terms"
    )))
}

/// The published Mandel components of the fixed-m and product families, each
/// computed from its hypergeometric closed form and from its defining series
/// (the `_series` twins).
pub fn q_components(
    class: CsClass,
    label: CsLabel,
    params: &LayerParams,
) -> Result<BTreeMap<String, f64>> {
    const TOL: f64 = 1e-14;
    let q = params.well_scale();
    let mut map = BTreeMap::new();
    match (class, label) {
        (CsClass::FixedM { m }, CsLabel::One { j, .. }) => {
            let beta = params.beta_fixed_m(m);
            let y = j / q;
            let (q1, q2) = well_moment_components(beta, y, TOL)?;
            let step = |k: u32| (beta + re(f64::from(k) - 1.0)).norm_sqr();
            let sq = |k: u32| (f64::from(k) + 1.0).powi(2);
            let fourth = |k: u32| (f64::from(k) + 1.0).powi(4);
            let series = series_averages(y, step, &[&sq, &fourth])?;
            map.insert("q1".into(), q1);
            map.insert("q1_series".into(), series[0]);
            map.insert("q2".into(), q2);
            map.insert("q2_series".into(), series[1]);
        }
        (CsClass::Product, CsLabel::Two { j1, j2, .. }) => {
            let (q3, q5) = landau_moment_components(j1, params, TOL)?;
            let x = j1 / (2.0 * params.b);
            let landau_step = |k: u32| f64::from(k) + 0.5;
            let first = |k: u32| f64::from(k);
            let second = |k: u32| f64::from(k) * f64::from(k);
            let landau_series = series_averages(x, landau_step, &[&first, &second])?;
            let y = j2 / q;
            let (q4, q6) = well_moment_components(re(2.0), y, TOL)?;
            let well_step = |k: u32| (f64::from(k) + 1.0).powi(2);
            let sq = |k: u32| (f64::from(k) + 1.0).powi(2);
            let fourth = |k: u32| (f64::from(k) + 1.0).powi(4);
            let well_series = series_averages(y, well_step, &[&sq, &fourth])?;
            map.insert("q3".into(), q3);
            map.insert("q3_series".into(), landau_series[0]);
            map.insert("q4".into(), q4);
            map.insert("q4_series".into(), well_series[0]);
            map.insert("q5".into(), q5);
            map.insert("q5_series".into(), landau_series[1]);
            map.insert("q6".into(), q6);
            map.insert("q6_series".into(), well_series[1]);
        }
        _ => {
            return Err(Error::UnsupportedClass(
                "published Mandel components exist for the fixed-m and product families".into(),
            ))
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    fn p(b: f64, d: f64) -> LayerParams {
        LayerParams::new(b, d).unwrap()
    }

    fn one(j: f64) -> CsLabel {
        CsLabel::One { j, alpha: 0.0 }
    }

    fn two(j1: f64, j2: f64) -> CsLabel {
        CsLabel::Two { j1, j2, alpha1: 0.0, alpha2: 0.0 }
    }

    fn all_classes() -> [(CsClass, fn(f64) -> CsLabel); 8] {
        fn lone(j: f64) -> CsLabel {
            CsLabel::One { j, alpha: 0.0 }
        }
        fn ltwo(j: f64) -> CsLabel {
            CsLabel::Two { j1: j, j2: j, alpha1: 0.0, alpha2: 0.0 }
        }
        [
            (CsClass::FixedN { n: 1 }, lone),
            (CsClass::FixedM { m: 0 }, lone),
            (CsClass::FixedNShifted { n: 0 }, lone),
            (CsClass::FixedMShifted { m: 1 }, lone),
            (CsClass::Product, ltwo),
            (CsClass::ProductShifted, ltwo),
            (CsClass::Nested, ltwo),
            (CsClass::NestedAltPhase, ltwo),
        ]
    }

    #[test]
    fn deterministic_states_have_q_minus_one() {
        let params = p(1.0, PI);
        for (class, label) in all_classes() {
            let report = mandel_q(class, label(0.0), &params, 1e-8).unwrap();
            assert!(
                (report.mandel_q + 1.0).abs() <= 1e-12,
                "{class:?}: Q = {}",
                report.mandel_q
            );
        }
    }

    #[test]
    fn shifted_landau_q_equals_two_b_minus_one() {
        for b in [0.5, 1.0, 2.0] {
            let params = p(b, PI);
            for j in [0.5, 1.0, 5.0, 20.0] {
                let report =
                    mandel_q(CsClass::FixedNShifted { n: 0 }, one(j), &params, 1e-8).unwrap();
                assert!(
                    (report.mandel_q - (2.0 * b - 1.0)).abs() <= 1e-10,
                    "B={b} J={j}: Q = {}",
                    report.mandel_q
                );
                assert!(report.closed_form_used);
                assert!(report.oracle_deviation <= 1e-10);
            }
        }
    }

    #[test]
    fn closed_forms_match_the_series_oracles() {
        for b in [0.5, 2.0] {
            for d in [1.0, PI] {
                let params = p(b, d);
                for idx in [0u32, 1, 2] {
                    for j in [0.5, 5.0] {
                        for class in [CsClass::FixedN { n: idx }, CsClass::FixedM { m: idx }] {
                            let report = mandel_q(class, one(j), &params, 1e-8).unwrap();
                            assert!(report.closed_form_used);
                            assert!(
                                report.oracle_deviation <= 1e-8,
                                "{class:?} B={b} d={d} J={j}: dev {}",
                                report.oracle_deviation
                            );
                        }
                    }
                }
                for j in [0.5, 5.0] {
                    let report = mandel_q(CsClass::Product, two(j, j), &params, 1e-8).unwrap();
                    assert!(report.closed_form_used);
                    assert!(
                        report.oracle_deviation <= 1e-8,
                        "product B={b} d={d} J={j}: dev {}",
                        report.oracle_deviation
                    );
                }
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one_and_variances_are_nonnegative() {
        let params = p(1.0, PI);
        for (class, label) in all_classes() {
            for j in [0.0, 0.5, 1.0, 5.0, 20.0] {
                let table = distribution_table(class, label(j), &params, 10_000).unwrap();
                let total: f64 = table.iter().map(|(_, p)| p).sum();
                assert!((total - 1.0).abs() <= 1e-10, "{class:?} J={j}: sum {total}");
                assert!(table.iter().all(|&(_, p)| (0.0..=1.0 + 1e-12).contains(&p)));
                let report = mandel_q(class, label(j), &params, 1e-8).unwrap();
                assert!(
                    report.mean_n2 >= report.mean_n * report.mean_n - 1e-10,
                    "{class:?} J={j}"
                );
            }
        }
    }

    #[test]
    fn ground_probability_of_the_fixed_n_family() {
        let params = p(1.0, PI);
        let j = 3.0;
        let f1 = hyp1f1(
            re(1.0),
            re(params.gamma_fixed_n(1)),
            re(j / (2.0 * params.b)),
            1e-14,
        )
        .unwrap()
        .real_part()
        .unwrap();
        let p0 = prob(CsClass::FixedN { n: 1 }, BasisIndex::One(0), one(j), &params).unwrap();
        assert!((p0 - 1.0 / f1).abs() <= 1e-9, "P(0) = {p0} vs {}", 1.0 / f1);
        // J=0 concentrates all weight on the ground index
        let p0 = prob(CsClass::FixedN { n: 1 }, BasisIndex::One(0), one(0.0), &params).unwrap();
        assert_eq!(p0, 1.0);
        // arity mismatch is rejected
        assert!(matches!(
            prob(CsClass::FixedN { n: 1 }, BasisIndex::Two(0, 0), one(1.0), &params),
            Err(Error::ClassMismatch(_))
        ));
    }

    #[test]
    fn product_grid_distribution_factorizes() {
        let params = p(1.0, PI);
        let table = distribution_table(CsClass::Product, two(2.0, 1.0), &params, 10_000).unwrap();
        let mut row_sum = BTreeMap::new();
        let mut col_sum = BTreeMap::new();
        for &(idx, pr) in &table {
            let BasisIndex::Two(m, n) = idx else { panic!("one-degree index in grid table") };
            *row_sum.entry(m).or_insert(0.0) += pr;
            *col_sum.entry(n).or_insert(0.0) += pr;
        }
        for &(idx, pr) in &table {
            let BasisIndex::Two(m, n) = idx else { unreachable!() };
            let product = row_sum[&m] * col_sum[&n];
            assert!((pr - product).abs() <= 1e-10, "({m},{n}): {pr} vs {product}");
        }
    }

    #[test]
    fn shifted_landau_table_is_poisson() {
        let params = p(1.5, 2.0);
        let j = 4.0;
        let mu = j / (2.0 * params.b);
        let table =
            distribution_table(CsClass::FixedNShifted { n: 2 }, one(j), &params, 10_000).unwrap();
        let mut pmf = (-mu).exp();
        for (k, &(idx, pr)) in table.iter().enumerate() {
            assert_eq!(idx, BasisIndex::One(k as u32));
            if k > 0 {
                pmf *= mu / k as f64;
            }
            assert!((pr - pmf).abs() <= 1e-12, "k={k}: {pr} vs {pmf}");
        }
    }

    #[test]
    fn tail_of_the_distribution_decreases() {
        let params = p(1.0, PI);
        let table = distribution_table(CsClass::FixedM { m: 0 }, one(5.0), &params, 10_000).unwrap();
        let probs: Vec<f64> = table.iter().map(|&(_, p)| p).collect();
        let mode = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        for k in mode..probs.len() - 1 {
            assert!(probs[k + 1] < probs[k], "k={k}");
        }
    }

    #[test]
    fn component_closed_forms_match_their_series() {
        let params = p(1.0, PI);
        let comps = q_components(CsClass::FixedM { m: 0 }, one(2.0), &params).unwrap();
        assert!((comps["q1"] - comps["q1_series"]).abs() <= 1e-10 * comps["q1"].abs());
        assert!((comps["q2"] - comps["q2_series"]).abs() <= 1e-10 * comps["q2"].abs());
        let comps = q_components(CsClass::Product, two(3.0, 2.0), &params).unwrap();
        for base in ["q3", "q4", "q5", "q6"] {
            let series = format!("{base}_series");
            assert!(
                (comps[base] - comps[&series]).abs() <= 1e-10 * (1.0 + comps[base].abs()),
                "{base}: {} vs {}",
                comps[base],
                comps[&series]
            );
        }
        // at zero action the landau component vanishes and the well moment is one
        let comps = q_components(CsClass::Product, two(0.0, 0.0), &params).unwrap();
        assert_eq!(comps["q3"], 0.0);
        assert!((comps["q4"] - 1.0).abs() <= 1e-14);
        let comps = q_components(CsClass::FixedM { m: 0 }, one(0.0), &params).unwrap();
        assert!((comps["q1"] - 1.0).abs() <= 1e-14);
        // classes without published components are rejected
        assert!(matches!(
            q_components(CsClass::Nested, two(1.0, 1.0), &params),
            Err(Error::UnsupportedClass(_))
        ));
    }

    #[test]
    fn nested_statistics_are_brute_only_and_phase_blind() {
        let params = p(1.0, PI);
        let a = mandel_q(CsClass::Nested, two(1.0, 1.5), &params, 1e-8).unwrap();
        let b = mandel_q(CsClass::NestedAltPhase, two(1.0, 1.5), &params, 1e-8).unwrap();
        assert!(!a.closed_form_used);
        assert!(a.closed_form_q.is_none());
        assert!(a.mean_n > 0.0);
        assert!((a.mandel_q - b.mandel_q).abs() <= 1e-12);
    }
}
