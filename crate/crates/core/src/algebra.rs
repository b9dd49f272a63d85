//! Ladder operators generated by one energy sequence, their commutators, and
//! classification of the algebra they close.

use num_complex::Complex64;

use crate::coherent::{build_state, one_ladder, CsClass, CsLabel, StateCoeffs};
use crate::error::{Error, Result};
use crate::params::LayerParams;
use crate::report::VerificationReport;

/// The three operators generated by a ladder: lowering, raising, number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderOp {
    Lower,
    Raise,
    Number,
}

/// Energy sequences a ladder can be built over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergySeq {
    /// Full energies along the Landau direction at frozen well index.
    FixedN { n: u32 },
    /// Full energies along the well direction at frozen Landau index.
    FixedM { m: u32 },
    /// Landau levels b(2k+1).
    Landau,
    /// Well modes q(k+1)^2.
    Well,
    /// Landau ladder with the ground value removed, 2bk.
    LandauShifted,
    /// Well ladder with the ground value removed, q k(k+2).
    WellShifted,
}

impl EnergySeq {
    fn base_eigen(self, params: &LayerParams, k: u32) -> f64 {
        match self {
            EnergySeq::FixedN { n } => params.energy(k, n),
            EnergySeq::FixedM { m } => params.energy(m, k),
            EnergySeq::Landau => params.landau(k),
            EnergySeq::Well => params.well_mode(k),
            EnergySeq::LandauShifted => params.landau_shifted(k),
            EnergySeq::WellShifted => params.well_shifted(k),
        }
    }
}

/// A ladder: an energy sequence with an overall scale, the rescaling applied
/// to the lowering operator when classifying, and an optional index shift
/// defining the diagonal number operator of an su(1,1) candidate.
#[derive(Clone, Copy, Debug)]
pub struct LadderSpec {
    pub seq: EnergySeq,
    pub params: LayerParams,
    /// Multiplies every sequence value; classification is covariant under
    /// scaling the sequence by `c` while dividing `rescale` by `sqrt(c)`.
    pub seq_scale: f64,
    /// `r` in the rescaled lowering operator `r a`.
    pub rescale: f64,
    /// When present, the candidate number operator is `diag(k + shift)`;
    /// otherwise it is the rescaled energy diagonal `r^2 e_k`.
    pub number_shift: Option<f64>,
}

impl LadderSpec {
    pub fn new(seq: EnergySeq, params: LayerParams) -> Self {
        Self { seq, params, seq_scale: 1.0, rescale: 1.0, number_shift: None }
    }

    pub fn with_seq_scale(mut self, c: f64) -> Self {
        self.seq_scale = c;
        self
    }

    pub fn with_rescale(mut self, r: f64) -> Self {
        self.rescale = r;
        self
    }

    pub fn with_number_shift(mut self, s: f64) -> Self {
        self.number_shift = Some(s);
        self
    }

    /// The k-th ladder energy, sequence scale included.
    pub fn eigen(&self, k: u32) -> f64 {
        self.seq_scale * self.seq.base_eigen(&self.params, k)
    }

    /// Eigenvalue of the candidate rescaled number operator at index k.
    fn number_eigen(&self, k: u32) -> f64 {
        match self.number_shift {
            Some(s) => f64::from(k) + s,
            None => self.rescale * self.rescale * self.eigen(k),
        }
    }

    /// The two-sided bracket of lowering with raising takes its closed form
    /// from this basis index upward: from zero when the ground energy
    /// vanishes, else from one, because lowering annihilates the ground
    /// vector and leaves nothing for raising to return.
    fn bracket_start(&self) -> u32 {
        if self.eigen(0) == 0.0 {
            0
        } else {
            1
        }
    }
}

/// Algebras the classifier can recognize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraClass {
    WeylHeisenberg,
    Su11,
    /// Weyl-Heisenberg in the first tensor factor, su(1,1) in the second.
    TensorWhSu11,
    Unclassified,
}

/// The commutation relations checked against their closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommRelation {
    /// `[a, a+] eta_k = (e_{k+1} - e_k) eta_k`
    AaDag,
    /// `[n, a+] eta_k = (e_{k+1} - e_k) a+ eta_k`
    NaDag,
    /// `[n, a] eta_k = (e_{k-1} - e_k) a eta_k`
    Na,
}

impl CommRelation {
    pub const ALL: [CommRelation; 3] = [CommRelation::AaDag, CommRelation::NaDag, CommRelation::Na];
}

impl std::fmt::Display for CommRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CommRelation::AaDag => "aa_dag",
            CommRelation::NaDag => "n_adag",
            CommRelation::Na => "n_a",
        })
    }
}

/// Result of a commutator or classification sweep over a basis range.
#[derive(Clone, Debug)]
pub struct CommutatorReport {
    pub relation: String,
    pub max_deviation: f64,
    pub classified_algebra: AlgebraClass,
}

/// Apply a bare ladder operator to a coefficient vector.
///
/// Lowering sends index k down with weight `sqrt(e_k)` and annihilates the
/// ground entry, raising sends k up with weight `sqrt(e_{k+1})` (one entry
/// longer), and the number operator multiplies by `e_k`. The classification
/// rescaling is not applied here.
pub fn apply_ladder(spec: &LadderSpec, op: LadderOp, coeffs: &[Complex64]) -> Vec<Complex64> {
    match op {
        LadderOp::Lower => {
            if coeffs.len() <= 1 {
                return Vec::new();
            }
            (0..coeffs.len() - 1)
                .map(|k| spec.eigen(k as u32 + 1).sqrt() * coeffs[k + 1])
                .collect()
        }
        LadderOp::Raise => {
            let mut out = Vec::with_capacity(coeffs.len() + 1);
            out.push(Complex64::new(0.0, 0.0));
            for (k, c) in coeffs.iter().enumerate() {
                out.push(spec.eigen(k as u32 + 1).sqrt() * c);
            }
            out
        }
        LadderOp::Number => coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| spec.eigen(k as u32) * c)
            .collect(),
    }
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-norm distance between two vectors, treating missing entries as zero.
fn vec_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let len = a.len().max(b.len());
    let zero = Complex64::new(0.0, 0.0);
    (0..len)
        .map(|k| (a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).norm())
        .fold(0.0, f64::max)
}

fn vec_sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let len = a.len().max(b.len());
    let zero = Complex64::new(0.0, 0.0);
    (0..len)
        .map(|k| a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero))
        .collect()
}

fn basis_vec(k: u32) -> Vec<Complex64> {
    let mut eta = vec![Complex64::new(0.0, 0.0); k as usize + 1];
    eta[k as usize] = Complex64::new(1.0, 0.0);
    eta
}

/// Check one commutation relation against its closed form on every basis
/// vector of the range, reporting the worst relative deviation together with
/// the ladder's classification.
///
/// The bracket of lowering with raising is swept from the index where its
/// closed form applies (see `LadderSpec::bracket_start`); the two relations
/// involving the number operator are exact from the ground index on.
pub fn commutator_check(
    spec: &LadderSpec,
    relation: CommRelation,
    index_range: u32,
) -> CommutatorReport {
    let start = match relation {
        CommRelation::AaDag => spec.bracket_start(),
        CommRelation::NaDag | CommRelation::Na => 0,
    };
    let mut worst = 0.0_f64;
    for k in start..=index_range {
        let eta = basis_vec(k);
        let (numeric, closed) = match relation {
            CommRelation::AaDag => {
                let forward =
                    apply_ladder(spec, LadderOp::Lower, &apply_ladder(spec, LadderOp::Raise, &eta));
                let backward =
                    apply_ladder(spec, LadderOp::Raise, &apply_ladder(spec, LadderOp::Lower, &eta));
                let gap = spec.eigen(k + 1) - spec.eigen(k);
                let closed: Vec<Complex64> = eta.iter().map(|c| gap * c).collect();
                (vec_sub(&forward, &backward), closed)
            }
            CommRelation::NaDag => {
                let raised = apply_ladder(spec, LadderOp::Raise, &eta);
                let forward = apply_ladder(spec, LadderOp::Number, &raised);
                let backward =
                    apply_ladder(spec, LadderOp::Raise, &apply_ladder(spec, LadderOp::Number, &eta));
                let gap = spec.eigen(k + 1) - spec.eigen(k);
                let closed: Vec<Complex64> = raised.iter().map(|c| gap * c).collect();
                (vec_sub(&forward, &backward), closed)
            }
            CommRelation::Na => {
                let lowered = apply_ladder(spec, LadderOp::Lower, &eta);
                let forward = apply_ladder(spec, LadderOp::Number, &lowered);
                let backward =
                    apply_ladder(spec, LadderOp::Lower, &apply_ladder(spec, LadderOp::Number, &eta));
                let gap = if k == 0 { 0.0 } else { spec.eigen(k - 1) - spec.eigen(k) };
                let closed: Vec<Complex64> = lowered.iter().map(|c| gap * c).collect();
                (vec_sub(&forward, &backward), closed)
            }
        };
        let scale = 1.0 + inf_norm(&closed);
        worst = worst.max(vec_gap(&numeric, &closed) / scale);
    }
    CommutatorReport {
        relation: relation.to_string(),
        max_deviation: worst,
        classified_algebra: classify_algebra(spec, index_range, CLASSIFY_TOL).classified_algebra,
    }
}

const CLASSIFY_TOL: f64 = 1e-10;

/// Candidate relation suites the classifier tries.
#[derive(Clone, Copy)]
enum Candidate {
    /// `[a,a+] = 1`, `[n,a+] = a+`, `[n,a] = -a` on the rescaled generators.
    WeylHeisenberg,
    /// `[a,a+] = 2n`, `[n,a+] = a+`, `[n,a] = -a` on the rescaled generators.
    Su11,
}

/// Worst relative deviation of a candidate's three relations over the range,
/// using the rescaled lowering `r a` and the candidate number diagonal.
fn suite_deviation(spec: &LadderSpec, candidate: Candidate, index_range: u32) -> f64 {
    let r = spec.rescale;
    let lower = |v: &[Complex64]| -> Vec<Complex64> {
        apply_ladder(spec, LadderOp::Lower, v).into_iter().map(|z| r * z).collect()
    };
    let raise = |v: &[Complex64]| -> Vec<Complex64> {
        apply_ladder(spec, LadderOp::Raise, v).into_iter().map(|z| r * z).collect()
    };
    let number = |v: &[Complex64]| -> Vec<Complex64> {
        v.iter()
            .enumerate()
            .map(|(k, c)| spec.number_eigen(k as u32) * c)
            .collect()
    };
    let mut worst = 0.0_f64;
    for k in spec.bracket_start()..=index_range {
        let eta = basis_vec(k);
        let bracket = vec_sub(&lower(&raise(&eta)), &raise(&lower(&eta)));
        let want: Vec<Complex64> = match candidate {
            Candidate::WeylHeisenberg => eta.clone(),
            Candidate::Su11 => eta
                .iter()
                .enumerate()
                .map(|(i, c)| 2.0 * spec.number_eigen(i as u32) * c)
                .collect(),
        };
        let scale = 1.0 + inf_norm(&want);
        worst = worst.max(vec_gap(&bracket, &want) / scale);
    }
    for k in 0..=index_range {
        let eta = basis_vec(k);
        let raised = raise(&eta);
        let up = vec_sub(&number(&raised), &raise(&number(&eta)));
        let scale_up = 1.0 + inf_norm(&raised);
        worst = worst.max(vec_gap(&up, &raised) / scale_up);
        let lowered = lower(&eta);
        let down = vec_sub(&number(&lowered), &lower(&number(&eta)));
        let minus: Vec<Complex64> = lowered.iter().map(|z| -z).collect();
        let scale_down = 1.0 + inf_norm(&minus);
        worst = worst.max(vec_gap(&down, &minus) / scale_down);
    }
    worst
}

/// Identify the algebra closed by the rescaled generators by testing the
/// Weyl-Heisenberg relation suite, then the su(1,1) suite when an index
/// shift declares the candidate number operator; the first suite passing
/// within `tol` names the algebra, otherwise the ladder stays unclassified.
pub fn classify_algebra(spec: &LadderSpec, index_range: u32, tol: f64) -> CommutatorReport {
    let wh = suite_deviation(spec, Candidate::WeylHeisenberg, index_range);
    if wh <= tol {
        return CommutatorReport {
            relation: "weyl-heisenberg suite".into(),
            max_deviation: wh,
            classified_algebra: AlgebraClass::WeylHeisenberg,
        };
    }
    if spec.number_shift.is_some() {
        let su = suite_deviation(spec, Candidate::Su11, index_range);
        if su <= tol {
            return CommutatorReport {
                relation: "su11 suite".into(),
                max_deviation: su,
                classified_algebra: AlgebraClass::Su11,
            };
        }
        return CommutatorReport {
            relation: "no suite".into(),
            max_deviation: wh.min(su),
            classified_algebra: AlgebraClass::Unclassified,
        };
    }
    CommutatorReport {
        relation: "no suite".into(),
        max_deviation: wh,
        classified_algebra: AlgebraClass::Unclassified,
    }
}

/// Classify a tensor product factor by factor: Weyl-Heisenberg in the first
/// slot and su(1,1) in the second is the recognized combination.
pub fn classify_tensor_factorwise(
    first: &LadderSpec,
    second: &LadderSpec,
    index_range: u32,
    tol: f64,
) -> AlgebraClass {
    match (
        classify_algebra(first, index_range, tol).classified_algebra,
        classify_algebra(second, index_range, tol).classified_algebra,
    ) {
        (AlgebraClass::WeylHeisenberg, AlgebraClass::Su11) => AlgebraClass::TensorWhSu11,
        _ => AlgebraClass::Unclassified,
    }
}

/// Classify the joint triple built from the products of the factor lowering
/// operators and of the factor number operators, acting on the full grid.
///
/// The joint lowering shifts both indices at once, so the bracket with its
/// adjoint has eigenvalues `e_{m+1} f_{n+1} - e_m f_n`; the scan confirms
/// this closes into neither recognized algebra rather than assuming it.
pub fn classify_joint_triple(
    first: &LadderSpec,
    second: &LadderSpec,
    index_range: u32,
    tol: f64,
) -> AlgebraClass {
    let r2 = (first.rescale * second.rescale).powi(2);
    let joint = |i: u32, j: u32| first.eigen(i) * second.eigen(j);
    let nu = |i: u32, j: u32| first.number_eigen(i) * second.number_eigen(j);
    // [K-, K+] = 2 K0 is allowed an additive constant fixed at the corner
    let offset = r2 * (joint(1, 1) - joint(0, 0)) - 2.0 * nu(0, 0);
    let mut wh = true;
    let mut su = true;
    for m in 0..=index_range {
        for n in 0..=index_range {
            let d = r2 * (joint(m + 1, n + 1) - joint(m, n));
            if (d - 1.0).abs() > tol {
                wh = false;
            }
            let step = nu(m + 1, n + 1) - nu(m, n);
            if (step - 1.0).abs() > tol * (1.0 + step.abs())
                || (d - 2.0 * nu(m, n) - offset).abs() > tol * (1.0 + d.abs())
            {
                su = false;
            }
            if !wh && !su {
                return AlgebraClass::Unclassified;
            }
        }
    }
    if wh {
        AlgebraClass::WeylHeisenberg
    } else if su {
        AlgebraClass::Su11
    } else {
        AlgebraClass::Unclassified
    }
}

/// Check that a shifted-family state at angle zero is an eigenvector of its
/// lowering operator with eigenvalue `sqrt(J)` (the joint lowering with
/// eigenvalue `sqrt(J1 J2)` for the shifted product grid).
///
/// The residual includes the truncation boundary honestly: the lowered
/// vector has no entry at the last retained index, so the comparison there
/// sees the full weight of the final coefficient, of order the square root
/// of the tail tolerance. A nonzero angle genuinely breaks the eigenvector
/// property and shows up as an order-one deviation.
pub fn annihilation_eigenstate_check(
    class: CsClass,
    label: CsLabel,
    params: &LayerParams,
    eps_tail: f64,
) -> Result<VerificationReport> {
    let state = build_state(class, label, params, eps_tail)?;
    match (class, &state.coeffs) {
        (CsClass::FixedNShifted { .. } | CsClass::FixedMShifted { .. }, StateCoeffs::One(coeffs)) => {
            let CsLabel::One { j, .. } = label else {
                return Err(Error::ClassMismatch("single-series class takes a one-degree label".into()));
            };
            let sqrt_j = j.sqrt();
            let zero = Complex64::new(0.0, 0.0);
            let mut worst = 0.0_f64;
            for k in 0..coeffs.len() {
                let lowered = if k + 1 < coeffs.len() {
                    one_ladder(class, params, k as u32 + 1).sqrt() * coeffs[k + 1]
                } else {
                    zero
                };
                worst = worst.max((lowered - sqrt_j * coeffs[k]).norm());
            }
            Ok(VerificationReport::new(0.0, worst / inf_norm(coeffs), None))
        }
        (CsClass::ProductShifted, StateCoeffs::Two { m_len, n_len, grid }) => {
            let CsLabel::Two { j1, j2, .. } = label else {
                return Err(Error::ClassMismatch("grid class takes a two-degree label".into()));
            };
            let eigenvalue = (j1 * j2).sqrt();
            let at = |m: usize, n: usize| grid[m * n_len + n];
            let mut worst = 0.0_f64;
            for m in 0..*m_len {
                for n in 0..*n_len {
                    let lowered = if m + 1 < *m_len && n + 1 < *n_len {
                        let e = params.landau_shifted(m as u32 + 1) * params.well_shifted(n as u32 + 1);
                        e.sqrt() * at(m + 1, n + 1)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    worst = worst.max((lowered - eigenvalue * at(m, n)).norm());
                }
            }
            Ok(VerificationReport::new(0.0, worst / inf_norm(grid), None))
        }
        _ => Err(Error::UnsupportedClass(
            "annihilation eigenvector check covers the shifted single series and the shifted product grid".into(),
        )),
    }
}
