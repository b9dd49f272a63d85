//! Acceptance gate: the ten release criteria, one test and one printed
//! verdict line each, at their stated tolerances.

use num_complex::Complex64;

use layercs::algebra::{
    classify_algebra, classify_joint_triple, classify_tensor_factorwise, commutator_check,
    AlgebraClass, CommRelation, EnergySeq, LadderSpec,
};
use layercs::coherent::{
    build_state, evolve, evolve_label, normalization, normalization_series, rho_fixed_m,
    rho_fixed_n, rho_landau, rho_landau_shifted, rho_well, rho_well_shifted, CsClass, CsLabel,
    StateCoeffs, TruncatedState,
};
use layercs::coherent::action_identity_check;
use layercs::measures::{bessel_mellin_check, moment_check, WeightForm};
use layercs::quadrature::QuadratureConfig;
use layercs::spectrum::{degeneracy_probe, orthonormality_check, QuantumNumbers};
use layercs::stats::mandel_q;
use layercs::{Error, LayerParams};

const PI: f64 = std::f64::consts::PI;

fn p(b: f64, d: f64) -> LayerParams {
    LayerParams::new(b, d).unwrap()
}

/// Accumulates worst-offender details and prints the criterion verdict.
struct Crit {
    ok: bool,
    worst: f64,
    detail: String,
}

impl Crit {
    fn new() -> Self {
        Crit { ok: true, worst: 0.0, detail: String::new() }
    }

    fn check(&mut self, err: f64, tol: f64, ctx: String) {
        if !err.is_finite() || err > self.worst {
            self.worst = err;
            self.detail = ctx;
        }
        if !(err <= tol) {
            self.ok = false;
        }
    }

    fn require(&mut self, ok: bool, ctx: String) {
        if !ok {
            self.ok = false;
            self.detail = ctx;
            self.worst = f64::NAN;
        }
    }

    fn finish(self, number: u32, name: &str) {
        println!(
            "criterion {number} ({name}): {}",
            if self.ok { "PASS" } else { "FAIL" }
        );
        assert!(self.ok, "criterion {number} worst case {} ({})", self.worst, self.detail);
    }
}

fn coeff_slice(state: &TruncatedState) -> &[Complex64] {
    match &state.coeffs {
        StateCoeffs::One(v) => v,
        StateCoeffs::Two { grid, .. } => grid,
    }
}

#[test]
fn criterion_01_eigenfunction_orthonormality() {
    let mut c = Crit::new();
    let params = p(1.0, PI);
    let cfg = QuadratureConfig::default();
    let mut states = Vec::new();
    for m in 0..=3u32 {
        for l in -2..=2i32 {
            for n in 0..=2u32 {
                states.push(QuantumNumbers { m, l, n });
            }
        }
    }
    for (i, &qa) in states.iter().enumerate() {
        for &qb in &states[i..] {
            let r = orthonormality_check(qa, qb, &params, &cfg).unwrap();
            c.check(r.abs_err, 1e-7, format!("{qa:?} vs {qb:?}"));
        }
    }
    c.finish(1, "eigenfunction orthonormality, indices <= (3,2,2)");
}

#[test]
fn criterion_02_weight_recurrence() {
    let mut c = Crit::new();
    for (b, d) in [(1.0, PI), (0.5, 1.0)] {
        let params = p(b, d);
        let gens: Vec<(&str, Box<dyn Fn(u32) -> f64>, Box<dyn Fn(u32) -> f64>)> = vec![
            (
                "fixed-n",
                Box::new(move |k| rho_fixed_n(k, 1, &params)),
                Box::new(move |k| params.energy(k, 1)),
            ),
            (
                "fixed-m",
                Box::new(move |k| rho_fixed_m(k, 1, &params)),
                Box::new(move |k| params.energy(1, k)),
            ),
            (
                "landau",
                Box::new(move |k| rho_landau(k, &params)),
                Box::new(move |k| params.landau(k)),
            ),
            (
                "well",
                Box::new(move |k| rho_well(k, &params)),
                Box::new(move |k| params.well_mode(k)),
            ),
            (
                "landau-shifted",
                Box::new(move |k| rho_landau_shifted(k, &params)),
                Box::new(move |k| params.landau_shifted(k)),
            ),
            (
                "well-shifted",
                Box::new(move |k| rho_well_shifted(k, &params)),
                Box::new(move |k| params.well_shifted(k)),
            ),
        ];
        for (name, rho, energy) in gens {
            c.require(rho(0) == 1.0, format!("{name}: rho(0) != 1 at B={b} d={d}"));
            for k in 1..=30u32 {
                let ratio = rho(k) / rho(k - 1);
                let e = energy(k);
                c.check(
                    (ratio - e).abs() / e,
                    1e-12,
                    format!("{name} k={k} B={b} d={d}: ratio {ratio} vs {e}"),
                );
            }
        }
    }
    c.finish(2, "weight products match their ladder recurrence, k <= 30");
}

#[test]
fn criterion_03_normalization_closed_forms() {
    let mut c = Crit::new();
    for b in [0.5, 1.0, 2.0] {
        for d in [1.0, PI] {
            let params = p(b, d);
            for idx in [0u32, 1, 2] {
                for j in [0.1, 1.0, 10.0] {
                    let label = CsLabel::One { j, alpha: 0.0 };
                    for class in [
                        CsClass::FixedN { n: idx },
                        CsClass::FixedM { m: idx },
                        CsClass::FixedNShifted { n: idx },
                        CsClass::FixedMShifted { m: idx },
                    ] {
                        let closed = normalization(class, label, &params).unwrap();
                        let series = normalization_series(class, label, &params, 1e-13).unwrap();
                        c.check(
                            (closed - series).abs() / series,
                            1e-10,
                            format!("{class:?} B={b} d={d} J={j}: {closed} vs {series}"),
                        );
                    }
                }
            }
        }
    }
    c.finish(3, "normalization closed forms vs direct series");
}

#[test]
fn criterion_04_measure_moments() {
    let mut c = Crit::new();
    let params = p(1.0, PI);
    let cfg = QuadratureConfig::default();
    let mut forms = vec![
        WeightForm::HalfGauss,
        WeightForm::K0OverJ,
        WeightForm::ExpShifted,
        WeightForm::MeijerG,
    ];
    for idx in 0..=2u32 {
        forms.push(WeightForm::GammaType { n: idx });
        forms.push(WeightForm::KlBessel { m: idx });
    }
    for form in forms {
        let tol = if matches!(form, WeightForm::KlBessel { .. }) { 1e-5 } else { 1e-6 };
        for k in 0..=6u32 {
            let r = moment_check(form, k, &params, &cfg).unwrap();
            c.check(r.rel_err, tol, format!("{form:?} k={k}"));
        }
    }
    c.finish(4, "measure moments reproduce the series weights, k <= 6");
}

#[test]
fn criterion_05_bessel_mellin_identity() {
    let mut c = Crit::new();
    let cfg = QuadratureConfig::default();
    let etas = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.7),
    ];
    for eta in etas {
        for s in [1.0, 2.0, 3.0] {
            if eta.re == 1.0 && s == 1.0 {
                // the integral diverges on this boundary; the check must refuse it
                c.require(
                    matches!(bessel_mellin_check(eta, s, &cfg), Err(Error::Domain(_))),
                    "divergent (eta, s) = (1, 1) was not rejected".into(),
                );
                continue;
            }
            let r = bessel_mellin_check(eta, s, &cfg).unwrap();
            c.check(r.rel_err, 1e-6, format!("eta={eta} s={s}"));
        }
    }
    c.finish(5, "Bessel kernel Mellin moments match the gamma product");
}

fn label_for(class: CsClass, j: f64, alpha: f64) -> CsLabel {
    if class.degrees() == 1 {
        CsLabel::One { j, alpha }
    } else {
        CsLabel::Two { j1: j, j2: 0.5 * j + 0.25, alpha1: alpha, alpha2: 0.4 * alpha }
    }
}

#[test]
fn criterion_06_temporal_stability() {
    let mut c = Crit::new();
    let params = p(1.0, PI);
    let classes = [
        CsClass::FixedN { n: 1 },
        CsClass::FixedM { m: 0 },
        CsClass::FixedNShifted { n: 0 },
        CsClass::FixedMShifted { m: 1 },
        CsClass::Product,
        CsClass::ProductShifted,
        CsClass::Nested,
        CsClass::NestedAltPhase,
    ];
    let grid = [(0.5, 0.0, 0.7), (2.0, 1.1, -0.4), (7.0, 0.3, 2.2)];
    for class in classes {
        for (j, alpha, t) in grid {
            let label = label_for(class, j, alpha);
            let state = build_state(class, label, &params, 1e-13).unwrap();
            let evolved = evolve(&state, t);
            let direct =
                build_state(class, evolve_label(class, label, t).unwrap(), &params, 1e-13)
                    .unwrap();
            let (a, b) = (coeff_slice(&evolved), coeff_slice(&direct));
            c.require(a.len() == b.len(), format!("{class:?} J={j}: window mismatch"));
            let gap = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0_f64, f64::max);
            c.check(gap, 1e-12, format!("{class:?} J={j} alpha={alpha} t={t}"));
        }
    }
    c.finish(6, "time evolution only advances the angle labels");
}

#[test]
fn criterion_07_commutator_suites() {
    let mut c = Crit::new();
    let params = p(1.0, PI);
    let wh_scale = 1.0 / (2.0 * params.b).sqrt();
    let su_scale = params.d / PI;
    let wh = |seq| LadderSpec::new(seq, params).with_rescale(wh_scale);
    let su = |seq| {
        LadderSpec::new(seq, params)
            .with_rescale(su_scale)
            .with_number_shift(1.5)
    };

    let triples = [
        ("landau triple", wh(EnergySeq::FixedN { n: 1 }), AlgebraClass::WeylHeisenberg),
        ("well triple", su(EnergySeq::FixedM { m: 0 }), AlgebraClass::Su11),
        ("shifted well triple", su(EnergySeq::WellShifted), AlgebraClass::Su11),
    ];
    for (name, spec, expected) in triples {
        for relation in CommRelation::ALL {
            let r = commutator_check(&spec, relation, 200);
            c.check(r.max_deviation, 1e-12, format!("{name} {relation}"));
        }
        let report = classify_algebra(&spec, 200, 1e-12);
        c.check(report.max_deviation, 1e-12, format!("{name} suite"));
        c.require(
            report.classified_algebra == expected,
            format!("{name} classified as {:?}", report.classified_algebra),
        );
    }

    let first = wh(EnergySeq::Landau);
    let second = su(EnergySeq::Well);
    c.require(
        classify_tensor_factorwise(&first, &second, 200, 1e-10) == AlgebraClass::TensorWhSu11,
        "product pair did not classify as the mixed tensor".into(),
    );
    c.require(
        classify_joint_triple(&first, &second, 60, 1e-10) == AlgebraClass::Unclassified,
        "joint triple unexpectedly closed into a recognized algebra".into(),
    );
    c.finish(7, "commutator suites close and classify, indices <= 200");
}

#[test]
fn criterion_08_action_identity() {
    let mut c = Crit::new();
    let params = p(1.0, PI);
    for j in [0.5, 3.0, 10.0] {
        for class in [CsClass::FixedNShifted { n: 0 }, CsClass::FixedMShifted { m: 0 }] {
            let r = action_identity_check(
                class,
                CsLabel::One { j, alpha: 0.0 },
                &params,
                1e-13,
            )
            .unwrap();
            c.check(r.rel_err, 1e-9, format!("{class:?} J={j}"));
        }
        let label = CsLabel::Two { j1: 2.0, j2: j, alpha1: 0.0, alpha2: 0.0 };
        let r = action_identity_check(CsClass::NestedAltPhase, label, &params, 1e-13).unwrap();
        c.check(r.rel_err, 1e-9, format!("NestedAltPhase J2={j}"));
    }
    c.finish(8, "shifted-ladder energy expectation equals the action label");
}

#[test]
fn criterion_09_mandel_oracle_equivalence() {
    let mut c = Crit::new();
    for b in [0.5, 1.0, 2.0] {
        for d in [1.0, PI] {
            let params = p(b, d);
            for idx in [0u32, 1, 2] {
                for j in [0.5, 5.0] {
                    for class in [CsClass::FixedN { n: idx }, CsClass::FixedM { m: idx }] {
                        let r = mandel_q(class, CsLabel::One { j, alpha: 0.0 }, &params, 1e-8)
                            .unwrap();
                        c.check(
                            r.oracle_deviation,
                            1e-8,
                            format!("{class:?} B={b} d={d} J={j}"),
                        );
                    }
                }
            }
            for j in [0.5, 5.0] {
                let label = CsLabel::Two { j1: j, j2: j, alpha1: 0.0, alpha2: 0.0 };
                let r = mandel_q(CsClass::Product, label, &params, 1e-8).unwrap();
                c.check(r.oracle_deviation, 1e-8, format!("Product B={b} d={d} J={j}"));
            }
        }
    }
    // Poisson-like shifted Landau family: Q = 2B - 1 independent of the action
    for b in [0.5, 1.0, 2.0] {
        let params = p(b, PI);
        for j in [0.5, 1.0, 5.0, 20.0] {
            let r = mandel_q(
                CsClass::FixedNShifted { n: 0 },
                CsLabel::One { j, alpha: 0.0 },
                &params,
                1e-8,
            )
            .unwrap();
            c.check(
                (r.mandel_q - (2.0 * b - 1.0)).abs(),
                1e-10,
                format!("FixedNShifted B={b} J={j}"),
            );
        }
    }
    // a vanishing action is deterministic for every class
    let params = p(1.0, PI);
    let classes = [
        CsClass::FixedN { n: 1 },
        CsClass::FixedM { m: 0 },
        CsClass::FixedNShifted { n: 0 },
        CsClass::FixedMShifted { m: 1 },
        CsClass::Product,
        CsClass::ProductShifted,
        CsClass::Nested,
        CsClass::NestedAltPhase,
    ];
    for class in classes {
        let label = if class.degrees() == 1 {
            CsLabel::One { j: 0.0, alpha: 0.0 }
        } else {
            CsLabel::Two { j1: 0.0, j2: 0.0, alpha1: 0.0, alpha2: 0.0 }
        };
        let r = mandel_q(class, label, &params, 1e-8).unwrap();
        c.check((r.mandel_q + 1.0).abs(), 1e-12, format!("{class:?} at J=0"));
    }
    c.finish(9, "Mandel closed forms match brute-force moments");
}

#[test]
fn criterion_10_degeneracy_probe() {
    let mut c = Crit::new();
    let commensurate = degeneracy_probe(&p(2.0, PI), 10, 10, 1e-9, 10_000);
    c.require(
        commensurate.colliding_pairs.contains(&((0, 2), (2, 0))),
        format!("missing the (0,2)/(2,0) collision: {:?}", commensurate.colliding_pairs),
    );
    c.require(
        commensurate.rational_within == Some((1, 2)),
        format!("ratio not recognized as 1/2: {:?}", commensurate.rational_within),
    );
    let incommensurate = degeneracy_probe(&p(1.0, PI * 2.0_f64.powf(0.25)), 10, 10, 1e-9, 10_000);
    c.require(
        incommensurate.colliding_pairs.is_empty(),
        format!("spurious collisions: {:?}", incommensurate.colliding_pairs),
    );
    c.require(
        incommensurate.rational_within.is_none(),
        format!("irrational ratio misread: {:?}", incommensurate.rational_within),
    );
    c.finish(10, "spectrum degeneracy tracks commensurability");
}
