//! Command line front end: spectrum tables, coherent state coefficients,
//! overlaps, verification suites, and Mandel statistics sweeps, emitted as
//! CSV or JSON with stable 17-digit numeric formatting.

use std::path::PathBuf;
use std::process::exit;

use clap::{Args, Parser, Subcommand, ValueEnum};
use layercs::algebra::{
    classify_algebra, classify_joint_triple, classify_tensor_factorwise, commutator_check,
    AlgebraClass, CommRelation, EnergySeq, LadderSpec,
};
use layercs::coherent::{build_state, overlap, CsClass, CsLabel, StateCoeffs};
use layercs::measures::{moment_check, resolution_diagonal_check, weight_spec, WeightForm, WeightSpec};
use layercs::quadrature::QuadratureConfig;
use layercs::spectrum::{degeneracy_probe, orthonormality_check, QuantumNumbers};
use layercs::stats::mandel_q;
use layercs::{LayerParams, VerificationReport};

#[derive(Parser)]
#[command(name = "layercs", version, about = "Coherent states of a magnetic layer: tables, verification, statistics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Energy table over an (m, n) index window, with a degeneracy note on stderr
    Spectrum(SpectrumArgs),
    /// Truncated coefficient vector of a coherent state
    Coeffs(CoeffsArgs),
    /// Overlap of two states of the same class
    Overlap(OverlapArgs),
    /// Check the measure moments of a class against its series weights
    VerifyMoments(VerifyMomentsArgs),
    /// Check eigenfunction inner products against the Kronecker delta
    VerifyOrthonormality(VerifyOrthoArgs),
    /// Check ladder commutators and classify the operator algebra
    VerifyCommutators(VerifyCommArgs),
    /// Check the diagonal resolution-of-identity ratios
    VerifyResolution(VerifyResolutionArgs),
    /// Mandel statistics sweep over action values
    Stats(StatsArgs),
}

#[derive(Args)]
struct PhysArgs {
    /// Magnetic field strength
    #[arg(long = "B", default_value_t = 1.0)]
    b: f64,
    /// Layer width
    #[arg(long, default_value_t = std::f64::consts::PI)]
    d: f64,
}

#[derive(Args)]
struct EmitArgs {
    /// Table format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table to this path; verification subcommands print one line
    /// per check to the terminal either way
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassArgs {
    /// Coherent state class
    #[arg(long, value_enum)]
    class: ClassTag,
    /// Frozen Landau index of the fixed-m families
    #[arg(long, default_value_t = 0)]
    m: u32,
    /// Frozen well index of the fixed-n families
    #[arg(long, default_value_t = 0)]
    n: u32,
}

#[derive(Args)]
struct LabelArgs {
    /// Action label of a one-degree class
    #[arg(long = "J")]
    j: Option<f64>,
    /// Angle label of a one-degree class
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// First action label of a two-degree class
    #[arg(long = "J1")]
    j1: Option<f64>,
    /// Second action label of a two-degree class
    #[arg(long = "J2")]
    j2: Option<f64>,
    /// First angle label of a two-degree class
    #[arg(long, default_value_t = 0.0)]
    alpha1: f64,
    /// Second angle label of a two-degree class
    #[arg(long, default_value_t = 0.0)]
    alpha2: f64,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    phys: PhysArgs,
    /// Largest Landau index in the table
    #[arg(long, default_value_t = 4)]
    m_max: u32,
    /// Largest well index in the table
    #[arg(long, default_value_t = 4)]
    n_max: u32,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct CoeffsArgs {
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    class: ClassArgs,
    #[command(flatten)]
    label: LabelArgs,
    /// Relative squared weight allowed in the discarded tail
    #[arg(long, default_value_t = 1e-12)]
    trunc_eps: f64,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct OverlapArgs {
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    class: ClassArgs,
    #[command(flatten)]
    label: LabelArgs,
    /// Action label of the second state (one-degree)
    #[arg(long = "j-b")]
    j_b: Option<f64>,
    /// Angle label of the second state (one-degree)
    #[arg(long = "alpha-b", default_value_t = 0.0)]
    alpha_b: f64,
    /// First action label of the second state (two-degree)
    #[arg(long = "j1-b")]
    j1_b: Option<f64>,
    /// Second action label of the second state (two-degree)
    #[arg(long = "j2-b")]
    j2_b: Option<f64>,
    /// First angle label of the second state (two-degree)
    #[arg(long = "alpha1-b", default_value_t = 0.0)]
    alpha1_b: f64,
    /// Second angle label of the second state (two-degree)
    #[arg(long = "alpha2-b", default_value_t = 0.0)]
    alpha2_b: f64,
    /// Relative squared weight allowed in the discarded tail
    #[arg(long, default_value_t = 1e-12)]
    trunc_eps: f64,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct VerifyMomentsArgs {
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    class: ClassArgs,
    /// Largest moment power checked
    #[arg(long, default_value_t = 6)]
    k_max: u32,
    /// PASS/FAIL threshold
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct VerifyOrthoArgs {
    #[command(flatten)]
    phys: PhysArgs,
    /// Largest Landau index
    #[arg(long, default_value_t = 1)]
    m_max: u32,
    /// Largest |angular momentum| index
    #[arg(long, default_value_t = 1)]
    l_max: u32,
    /// Largest well index
    #[arg(long, default_value_t = 1)]
    n_max: u32,
    /// PASS/FAIL threshold
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct VerifyCommArgs {
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    class: ClassArgs,
    /// Largest basis index swept
    #[arg(long, default_value_t = 200)]
    k_max: u32,
    /// PASS/FAIL threshold
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct VerifyResolutionArgs {
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    class: ClassArgs,
    /// Largest basis index checked
    #[arg(long, default_value_t = 4)]
    k_max: u32,
    /// PASS/FAIL threshold
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    class: ClassArgs,
    /// Action value to sweep; repeat the flag (one-degree classes)
    #[arg(long = "J", action = clap::ArgAction::Append)]
    j: Vec<f64>,
    /// First-degree action values (two-degree classes)
    #[arg(long = "J1", action = clap::ArgAction::Append)]
    j1: Vec<f64>,
    /// Second-degree action values, paired with --J1 by position
    #[arg(long = "J2", action = clap::ArgAction::Append)]
    j2: Vec<f64>,
    /// Angle label of a one-degree class
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// First angle label of a two-degree class
    #[arg(long, default_value_t = 0.0)]
    alpha1: f64,
    /// Second angle label of a two-degree class
    #[arg(long, default_value_t = 0.0)]
    alpha2: f64,
    /// Tolerance handed to the closed-form cross-check
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassTag {
    FixedN,
    FixedM,
    FixedNShifted,
    FixedMShifted,
    Product,
    ProductShifted,
    Nested,
    NestedAltPhase,
}

impl ClassTag {
    fn name(self) -> &'static str {
        match self {
            ClassTag::FixedN => "fixed-n",
            ClassTag::FixedM => "fixed-m",
            ClassTag::FixedNShifted => "fixed-n-shifted",
            ClassTag::FixedMShifted => "fixed-m-shifted",
            ClassTag::Product => "product",
            ClassTag::ProductShifted => "product-shifted",
            ClassTag::Nested => "nested",
            ClassTag::NestedAltPhase => "nested-alt-phase",
        }
    }

    fn to_class(self, m: u32, n: u32) -> CsClass {
        match self {
            ClassTag::FixedN => CsClass::FixedN { n },
            ClassTag::FixedM => CsClass::FixedM { m },
            ClassTag::FixedNShifted => CsClass::FixedNShifted { n },
            ClassTag::FixedMShifted => CsClass::FixedMShifted { m },
            ClassTag::Product => CsClass::Product,
            ClassTag::ProductShifted => CsClass::ProductShifted,
            ClassTag::Nested => CsClass::Nested,
            ClassTag::NestedAltPhase => CsClass::NestedAltPhase,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(0) => exit(0),
        Ok(failed) => {
            eprintln!("{failed} check(s) outside tolerance");
            exit(1);
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            exit(2);
        }
    }
}

/// Returns the number of failed checks; table subcommands always return 0.
fn run(cmd: Cmd) -> Result<usize, String> {
    match cmd {
        Cmd::Spectrum(a) => cmd_spectrum(a),
        Cmd::Coeffs(a) => cmd_coeffs(a),
        Cmd::Overlap(a) => cmd_overlap(a),
        Cmd::VerifyMoments(a) => cmd_verify_moments(a),
        Cmd::VerifyOrthonormality(a) => cmd_verify_orthonormality(a),
        Cmd::VerifyCommutators(a) => cmd_verify_commutators(a),
        Cmd::VerifyResolution(a) => cmd_verify_resolution(a),
        Cmd::Stats(a) => cmd_stats(a),
    }
}

fn layer_params(phys: &PhysArgs) -> Result<LayerParams, String> {
    LayerParams::new(phys.b, phys.d).map_err(|e| e.to_string())
}

/// Assemble the label for the class arity, rejecting flags of the other arity.
fn build_label(class: CsClass, lab: &LabelArgs) -> Result<CsLabel, String> {
    if class.degrees() == 1 {
        if lab.j1.is_some() || lab.j2.is_some() {
            return Err("--J1/--J2 apply only to the two-degree classes; use --J".into());
        }
        let j = lab.j.ok_or("--J is required for a one-degree class")?;
        Ok(CsLabel::One { j, alpha: lab.alpha })
    } else {
        if lab.j.is_some() {
            return Err("--J applies only to the one-degree classes; use --J1 and --J2".into());
        }
        let j1 = lab.j1.ok_or("--J1 is required for a two-degree class")?;
        let j2 = lab.j2.ok_or("--J2 is required for a two-degree class")?;
        Ok(CsLabel::Two { j1, j2, alpha1: lab.alpha1, alpha2: lab.alpha2 })
    }
}

/// Quadrature request two decades below the reporting threshold.
fn quad_cfg(tol: f64) -> QuadratureConfig {
    QuadratureConfig::with_rel_tol((tol * 1e-2).clamp(1e-13, 1e-9))
}

// ---------------------------------------------------------------- emission

/// 17 significant digits, the round-trip precision of binary64. Negative
/// zero is folded into plain zero so equal values print identically.
fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[derive(Clone, Debug)]
enum Cell {
    UInt(u64),
    Float(f64),
    MaybeFloat(Option<f64>),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::UInt(v) => v.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::MaybeFloat(None) => String::new(),
            Cell::MaybeFloat(Some(x)) => fmt_float(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => csv_quote(s),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::UInt(v) => (*v).into(),
            Cell::Float(x) => json_num(*x),
            Cell::MaybeFloat(None) => serde_json::Value::Null,
            Cell::MaybeFloat(Some(x)) => json_num(*x),
            Cell::Bool(b) => (*b).into(),
            Cell::Text(s) => s.clone().into(),
        }
    }
}

/// JSON number carrying the full 17-digit decimal literal.
fn json_num(x: f64) -> serde_json::Value {
    serde_json::Value::Number(serde_json::Number::from_string_unchecked(fmt_float(x)))
}

struct Table {
    params: Vec<(&'static str, Cell)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn to_csv(&self) -> String {
        let mut out = self
            .columns
            .iter()
            .map(|c| csv_quote(c))
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let results = self
            .rows
            .iter()
            .map(|row| {
                serde_json::Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, cell)| ((*c).to_string(), cell.json()))
                        .collect(),
                )
            })
            .collect();
        render_json(&self.params, serde_json::Value::Array(results))
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn render_json(params: &[(&'static str, Cell)], results: serde_json::Value) -> String {
    let mut top = serde_json::Map::new();
    top.insert("schema_version".into(), serde_json::Value::String("1".into()));
    top.insert(
        "params".into(),
        serde_json::Value::Object(params.iter().map(|(k, c)| ((*k).to_string(), c.json())).collect()),
    );
    top.insert("results".into(), results);
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(top))
        .expect("assembled values serialize");
    text.push('\n');
    text
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- commands

fn cmd_spectrum(a: SpectrumArgs) -> Result<usize, String> {
    let params = layer_params(&a.phys)?;
    let mut rows = Vec::new();
    for m in 0..=a.m_max {
        for n in 0..=a.n_max {
            rows.push(vec![
                Cell::UInt(m.into()),
                Cell::UInt(n.into()),
                Cell::Float(params.energy(m, n)),
            ]);
        }
    }
    let probe = degeneracy_probe(&params, a.m_max, a.n_max, 1e-9, 10_000);
    if probe.colliding_pairs.is_empty() {
        eprintln!("degeneracy probe (tol 1e-9): no coincident (m, n) pairs");
    } else {
        let pairs = probe
            .colliding_pairs
            .iter()
            .map(|((a, b), (c, d))| format!("(({a},{b}),({c},{d}))"))
            .collect::<Vec<_>>()
            .join(" ");
        let ratio = match probe.rational_within {
            Some((p, q)) => format!("{p}/{q}"),
            None => "irrational at this resolution".into(),
        };
        eprintln!("degeneracy probe (tol 1e-9): coincident pairs {pairs}; well-to-cyclotron ratio {ratio}");
    }
    let table = Table {
        params: vec![
            ("B", Cell::Float(a.phys.b)),
            ("d", Cell::Float(a.phys.d)),
            ("m_max", Cell::UInt(a.m_max.into())),
            ("n_max", Cell::UInt(a.n_max.into())),
        ],
        columns: vec!["m", "n", "energy"],
        rows,
    };
    emit(&table.render(a.emit.format), a.emit.output.as_ref())?;
    Ok(0)
}

/// Parameters common to the state-building subcommands.
fn state_params(
    phys: &PhysArgs,
    class_args: &ClassArgs,
    label: CsLabel,
    trunc_eps: f64,
) -> Vec<(&'static str, Cell)> {
    let mut params = vec![
        ("B", Cell::Float(phys.b)),
        ("d", Cell::Float(phys.d)),
        ("class", Cell::Text(class_args.class.name().into())),
    ];
    match class_args.class.to_class(class_args.m, class_args.n) {
        CsClass::FixedN { n } | CsClass::FixedNShifted { n } => {
            params.push(("n", Cell::UInt(n.into())));
        }
        CsClass::FixedM { m } | CsClass::FixedMShifted { m } => {
            params.push(("m", Cell::UInt(m.into())));
        }
        _ => {}
    }
    match label {
        CsLabel::One { j, alpha } => {
            params.push(("J", Cell::Float(j)));
            params.push(("alpha", Cell::Float(alpha)));
        }
        CsLabel::Two { j1, j2, alpha1, alpha2 } => {
            params.push(("J1", Cell::Float(j1)));
            params.push(("J2", Cell::Float(j2)));
            params.push(("alpha1", Cell::Float(alpha1)));
            params.push(("alpha2", Cell::Float(alpha2)));
        }
    }
    params.push(("trunc_eps", Cell::Float(trunc_eps)));
    params
}

fn cmd_coeffs(a: CoeffsArgs) -> Result<usize, String> {
    let params = layer_params(&a.phys)?;
    let class = a.class.class.to_class(a.class.m, a.class.n);
    let label = build_label(class, &a.label)?;
    let state = build_state(class, label, &params, a.trunc_eps).map_err(|e| e.to_string())?;
    let run_params = state_params(&a.phys, &a.class, label, a.trunc_eps);

    let (columns, rows, indices, pairs): (Vec<&str>, Vec<Vec<Cell>>, Vec<Vec<u64>>, Vec<[f64; 2]>) =
        match &state.coeffs {
            StateCoeffs::One(coeffs) => {
                let mut rows = Vec::new();
                let mut indices = Vec::new();
                let mut pairs = Vec::new();
                for (k, c) in coeffs.iter().enumerate() {
                    rows.push(vec![
                        Cell::UInt(k as u64),
                        Cell::Float(c.re),
                        Cell::Float(c.im),
                    ]);
                    indices.push(vec![k as u64]);
                    pairs.push([c.re, c.im]);
                }
                (vec!["k", "re", "im"], rows, indices, pairs)
            }
            StateCoeffs::Two { m_len, n_len, grid } => {
                let mut rows = Vec::new();
                let mut indices = Vec::new();
                let mut pairs = Vec::new();
                for m in 0..*m_len {
                    for n in 0..*n_len {
                        let c = grid[m * n_len + n];
                        rows.push(vec![
                            Cell::UInt(m as u64),
                            Cell::UInt(n as u64),
                            Cell::Float(c.re),
                            Cell::Float(c.im),
                        ]);
                        indices.push(vec![m as u64, n as u64]);
                        pairs.push([c.re, c.im]);
                    }
                }
                (vec!["m", "n", "re", "im"], rows, indices, pairs)
            }
        };

    let text = match a.emit.format {
        Format::Csv => {
            eprintln!("tail_bound={}", fmt_float(state.tail_bound));
            Table { params: run_params, columns, rows }.to_csv()
        }
        Format::Json => {
            let mut results = serde_json::Map::new();
            results.insert(
                "coefficients".into(),
                serde_json::Value::Array(
                    pairs
                        .iter()
                        .map(|[re, im]| {
                            serde_json::Value::Array(vec![json_num(*re), json_num(*im)])
                        })
                        .collect(),
                ),
            );
            results.insert(
                "indices".into(),
                serde_json::Value::Array(
                    indices
                        .iter()
                        .map(|ix| {
                            serde_json::Value::Array(
                                ix.iter().map(|&v| serde_json::Value::from(v)).collect(),
                            )
                        })
                        .collect(),
                ),
            );
            results.insert("tail_bound".into(), json_num(state.tail_bound));
            render_json(&run_params, serde_json::Value::Object(results))
        }
    };
    emit(&text, a.emit.output.as_ref())?;
    Ok(0)
}

/// Assemble the second overlap label from the `-b` flag family.
fn build_second_label(class: CsClass, a: &OverlapArgs) -> Result<CsLabel, String> {
    if class.degrees() == 1 {
        if a.j1_b.is_some() || a.j2_b.is_some() {
            return Err("--j1-b/--j2-b apply only to the two-degree classes; use --j-b".into());
        }
        let j = a.j_b.ok_or("--j-b is required for a one-degree class")?;
        Ok(CsLabel::One { j, alpha: a.alpha_b })
    } else {
        if a.j_b.is_some() {
            return Err("--j-b applies only to the one-degree classes; use --j1-b and --j2-b".into());
        }
        let j1 = a.j1_b.ok_or("--j1-b is required for a two-degree class")?;
        let j2 = a.j2_b.ok_or("--j2-b is required for a two-degree class")?;
        Ok(CsLabel::Two { j1, j2, alpha1: a.alpha1_b, alpha2: a.alpha2_b })
    }
}

fn cmd_overlap(a: OverlapArgs) -> Result<usize, String> {
    let params = layer_params(&a.phys)?;
    let class = a.class.class.to_class(a.class.m, a.class.n);
    let label_a = build_label(class, &a.label)?;
    let label_b = build_second_label(class, &a)?;
    let state_a = build_state(class, label_a, &params, a.trunc_eps).map_err(|e| e.to_string())?;
    let state_b = build_state(class, label_b, &params, a.trunc_eps).map_err(|e| e.to_string())?;
    let value = overlap(&state_a, &state_b).map_err(|e| e.to_string())?;

    let mut run_params = state_params(&a.phys, &a.class, label_a, a.trunc_eps);
    match label_b {
        CsLabel::One { j, alpha } => {
            run_params.push(("J_b", Cell::Float(j)));
            run_params.push(("alpha_b", Cell::Float(alpha)));
        }
        CsLabel::Two { j1, j2, alpha1, alpha2 } => {
            run_params.push(("J1_b", Cell::Float(j1)));
            run_params.push(("J2_b", Cell::Float(j2)));
            run_params.push(("alpha1_b", Cell::Float(alpha1)));
            run_params.push(("alpha2_b", Cell::Float(alpha2)));
        }
    }
    let table = Table {
        params: run_params,
        columns: vec!["re", "im", "abs"],
        rows: vec![vec![
            Cell::Float(value.re),
            Cell::Float(value.im),
            Cell::Float(value.norm()),
        ]],
    };
    emit(&table.render(a.emit.format), a.emit.output.as_ref())?;
    Ok(0)
}

fn pass_str(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn check_row(name: String, r: &VerificationReport, pass: bool) -> Vec<Cell> {
    vec![
        Cell::Text(name),
        Cell::Float(r.target),
        Cell::Float(r.computed),
        Cell::Float(r.abs_err),
        Cell::Float(r.rel_err),
        Cell::Bool(pass),
    ]
}

fn print_check(name: &str, r: &VerificationReport, pass: bool, tol: f64) {
    println!(
        "{} {name}: target={} computed={} rel_err={} tol={}",
        pass_str(pass),
        fmt_float(r.target),
        fmt_float(r.computed),
        fmt_float(r.rel_err),
        fmt_float(tol),
    );
}

/// Emit a verification table when an output path was requested.
fn emit_checks(
    run_params: Vec<(&'static str, Cell)>,
    rows: Vec<Vec<Cell>>,
    emit_args: &EmitArgs,
) -> Result<(), String> {
    if emit_args.output.is_none() {
        return Ok(());
    }
    let table = Table {
        params: run_params,
        columns: vec!["check", "target", "computed", "abs_err", "rel_err", "pass"],
        rows,
    };
    emit(&table.render(emit_args.format), emit_args.output.as_ref())
}

fn form_name(form: WeightForm) -> &'static str {
    match form {
        WeightForm::GammaType { .. } => "gamma",
        WeightForm::KlBessel { .. } => "kl-bessel",
        WeightForm::HalfGauss => "half-gauss",
        WeightForm::K0OverJ => "k0",
        WeightForm::ExpShifted => "exp-shifted",
        WeightForm::MeijerG => "meijer-g",
    }
}

fn verify_params(phys: &PhysArgs, class: Option<&ClassArgs>, k_max: u32, tol: f64) -> Vec<(&'static str, Cell)> {
    let mut params = vec![("B", Cell::Float(phys.b)), ("d", Cell::Float(phys.d))];
    if let Some(c) = class {
        params.push(("class", Cell::Text(c.class.name().into())));
        match c.class.to_class(c.m, c.n) {
            CsClass::FixedN { n } | CsClass::FixedNShifted { n } => {
                params.push(("n", Cell::UInt(n.into())));
            }
            CsClass::FixedM { m } | CsClass::FixedMShifted { m } => {
                params.push(("m", Cell::UInt(m.into())));
            }
            _ => {}
        }
    }
    params.push(("k_max", Cell::UInt(k_max.into())));
    params.push(("tol", Cell::Float(tol)));
    params
}

fn cmd_verify_moments(a: VerifyMomentsArgs) -> Result<usize, String> {
    let params = layer_params(&a.phys)?;
    let class = a.class.class.to_class(a.class.m, a.class.n);
    let spec = weight_spec(class).map_err(|e| e.to_string())?;
    let cfg = quad_cfg(a.tol);
    let forms = match spec {
        WeightSpec::Single(f) => vec![f],
        WeightSpec::Pair(f1, f2) => vec![f1, f2],
    };
    let mut rows = Vec::new();
    let mut failed = 0;
    for form in forms {
        for k in 0..=a.k_max {
            let r = moment_check(form, k, &params, &cfg).map_err(|e| e.to_string())?;
            let pass = r.passes(a.tol);
            let name = format!("moment form={} k={k}", form_name(form));
            print_check(&name, &r, pass, a.tol);
            rows.push(check_row(name, &r, pass));
            failed += usize::from(!pass);
        }
    }
    emit_checks(verify_params(&a.phys, Some(&a.class), a.k_max, a.tol), rows, &a.emit)?;
    Ok(failed)
}

fn cmd_verify_orthonormality(a: VerifyOrthoArgs) -> Result<usize, String> {
    let params = layer_params(&a.phys)?;
    let cfg = quad_cfg(a.tol);
    let l_max = i32::try_from(a.l_max).map_err(|_| "--l-max is out of range".to_string())?;
    let mut states = Vec::new();
    for m in 0..=a.m_max {
        for l in -l_max..=l_max {
            for n in 0..=a.n_max {
                states.push(QuantumNumbers { m, l, n });
            }
        }
    }
    let mut rows = Vec::new();
    let mut failed = 0;
    for (i, &qa) in states.iter().enumerate() {
        for &qb in &states[i..] {
            let r = orthonormality_check(qa, qb, &params, &cfg).map_err(|e| e.to_string())?;
            let pass = r.passes(a.tol);
            let name = format!(
                "({},{},{})|({},{},{})",
                qa.m, qa.l, qa.n, qb.m, qb.l, qb.n
            );
            print_check(&name, &r, pass, a.tol);
            rows.push(check_row(name, &r, pass));
            failed += usize::from(!pass);
        }
    }
    let mut run_params = vec![("B", Cell::Float(a.phys.b)), ("d", Cell::Float(a.phys.d))];
    run_params.push(("l_max", Cell::UInt(a.l_max.into())));
    run_params.push(("m_max", Cell::UInt(a.m_max.into())));
    run_params.push(("n_max", Cell::UInt(a.n_max.into())));
    run_params.push(("tol", Cell::Float(a.tol)));
    emit_checks(run_params, rows, &a.emit)?;
    Ok(failed)
}

fn algebra_name(class: AlgebraClass) -> &'static str {
    match class {
        AlgebraClass::WeylHeisenberg => "weyl-heisenberg",
        AlgebraClass::Su11 => "su11",
        AlgebraClass::TensorWhSu11 => "tensor(wh,su11)",
        AlgebraClass::Unclassified => "unclassified",
    }
}

/// The canonical rescaled triple of a single series class.
enum CommPlan {
    Single(LadderSpec, AlgebraClass),
    Tensor(LadderSpec, LadderSpec, AlgebraClass),
    Joint(LadderSpec, LadderSpec, AlgebraClass),
}

fn commutator_plan(tag: ClassTag, m: u32, n: u32, params: LayerParams) -> CommPlan {
    let wh_scale = 1.0 / (2.0 * params.b).sqrt();
    let su_scale = params.d / std::f64::consts::PI;
    let wh = |seq: EnergySeq| LadderSpec::new(seq, params).with_rescale(wh_scale);
    let su = |seq: EnergySeq| {
        LadderSpec::new(seq, params)
            .with_rescale(su_scale)
            .with_number_shift(1.5)
    };
    match tag {
        ClassTag::FixedN => CommPlan::Single(wh(EnergySeq::FixedN { n }), AlgebraClass::WeylHeisenberg),
        ClassTag::FixedM => CommPlan::Single(su(EnergySeq::FixedM { m }), AlgebraClass::Su11),
        ClassTag::FixedNShifted => {
            CommPlan::Single(wh(EnergySeq::LandauShifted), AlgebraClass::WeylHeisenberg)
        }
        ClassTag::FixedMShifted => {
            CommPlan::Single(su(EnergySeq::WellShifted), AlgebraClass::Su11)
        }
        ClassTag::Product => CommPlan::Tensor(
            wh(EnergySeq::Landau),
            su(EnergySeq::Well),
            AlgebraClass::TensorWhSu11,
        ),
        ClassTag::ProductShifted => CommPlan::Tensor(
            wh(EnergySeq::LandauShifted),
            su(EnergySeq::WellShifted),
            AlgebraClass::TensorWhSu11,
        ),
        ClassTag::Nested | ClassTag::NestedAltPhase => CommPlan::Joint(
            wh(EnergySeq::Landau),
            su(EnergySeq::Well),
            AlgebraClass::Unclassified,
        ),
    }
}

fn cmd_verify_commutators(a: VerifyCommArgs) -> Result<usize, String> {
    let params = layer_params(&a.phys)?;
    let mut rows = Vec::new();
    let mut failed = 0;

    let relation_checks = |spec: &LadderSpec, prefix: &str, rows: &mut Vec<Vec<Cell>>| {
        let mut bad = 0;
        for relation in CommRelation::ALL {
            let report = commutator_check(spec, relation, a.k_max);
            let pass = report.max_deviation <= a.tol;
            let name = format!("{prefix}{relation}");
            println!(
                "{} {name}: max_deviation={} tol={}",
                pass_str(pass),
                fmt_float(report.max_deviation),
                fmt_float(a.tol),
            );
            rows.push(vec![
                Cell::Text(name),
                Cell::Float(report.max_deviation),
                Cell::Bool(pass),
            ]);
            bad += usize::from(!pass);
        }
        bad
    };

    let (observed, expected) = match commutator_plan(a.class.class, a.class.m, a.class.n, params) {
        CommPlan::Single(spec, expected) => {
            failed += relation_checks(&spec, "", &mut rows);
            (classify_algebra(&spec, a.k_max, a.tol).classified_algebra, expected)
        }
        CommPlan::Tensor(first, second, expected) => {
            failed += relation_checks(&first, "landau ", &mut rows);
            failed += relation_checks(&second, "well ", &mut rows);
            (
                classify_tensor_factorwise(&first, &second, a.k_max, a.tol),
                expected,
            )
        }
        CommPlan::Joint(first, second, expected) => {
            (classify_joint_triple(&first, &second, a.k_max, a.tol), expected)
        }
    };
    let pass = observed == expected;
    println!(
        "{} classification: expected={} observed={} tol={}",
        pass_str(pass),
        algebra_name(expected),
        algebra_name(observed),
        fmt_float(a.tol),
    );
    rows.push(vec![
        Cell::Text(format!("classification (expected {})", algebra_name(expected))),
        Cell::Text(algebra_name(observed).into()),
        Cell::Bool(pass),
    ]);
    failed += usize::from(!pass);

    if a.emit.output.is_some() {
        let table = Table {
            params: verify_params(&a.phys, Some(&a.class), a.k_max, a.tol),
            columns: vec!["check", "value", "pass"],
            rows,
        };
        emit(&table.render(a.emit.format), a.emit.output.as_ref())?;
    }
    Ok(failed)
}

fn cmd_verify_resolution(a: VerifyResolutionArgs) -> Result<usize, String> {
    let params = layer_params(&a.phys)?;
    let class = a.class.class.to_class(a.class.m, a.class.n);
    let cfg = quad_cfg(a.tol);
    let reports = resolution_diagonal_check(class, &params, &cfg, a.k_max).map_err(|e| e.to_string())?;
    let side = a.k_max as usize + 1;
    let mut rows = Vec::new();
    let mut failed = 0;
    for (i, r) in reports.iter().enumerate() {
        let name = if reports.len() == side {
            format!("resolution k={i}")
        } else {
            format!("resolution ({},{})", i / side, i % side)
        };
        let pass = r.passes(a.tol);
        print_check(&name, r, pass, a.tol);
        rows.push(check_row(name, r, pass));
        failed += usize::from(!pass);
    }
    emit_checks(verify_params(&a.phys, Some(&a.class), a.k_max, a.tol), rows, &a.emit)?;
    Ok(failed)
}

fn cmd_stats(a: StatsArgs) -> Result<usize, String> {
    let params = layer_params(&a.phys)?;
    let class = a.class.class.to_class(a.class.m, a.class.n);
    let labels: Vec<CsLabel> = if class.degrees() == 1 {
        if !a.j1.is_empty() || !a.j2.is_empty() {
            return Err("--J1/--J2 apply only to the two-degree classes; use --J".into());
        }
        if a.j.is_empty() {
            return Err("--J is required for a one-degree class".into());
        }
        let mut js = a.j.clone();
        js.sort_by(f64::total_cmp);
        js.into_iter().map(|j| CsLabel::One { j, alpha: a.alpha }).collect()
    } else {
        if !a.j.is_empty() {
            return Err("--J applies only to the one-degree classes; use --J1 and --J2".into());
        }
        if a.j1.is_empty() {
            return Err("--J1 is required for a two-degree class".into());
        }
        if a.j1.len() != a.j2.len() {
            return Err("--J1 and --J2 need the same number of values".into());
        }
        let mut pairs: Vec<(f64, f64)> = a.j1.iter().copied().zip(a.j2.iter().copied()).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        pairs
            .into_iter()
            .map(|(j1, j2)| CsLabel::Two { j1, j2, alpha1: a.alpha1, alpha2: a.alpha2 })
            .collect()
    };

    let mut columns = vec!["J"];
    if class.degrees() == 2 {
        columns = vec!["J1", "J2"];
    }
    columns.extend([
        "mean_n",
        "mean_n2",
        "mandel_q",
        "closed_form_q",
        "closed_form_used",
        "oracle_deviation",
    ]);

    let mut rows = Vec::new();
    for label in labels {
        let report = mandel_q(class, label, &params, a.tol).map_err(|e| e.to_string())?;
        let mut row = Vec::new();
        match label {
            CsLabel::One { j, .. } => row.push(Cell::Float(j)),
            CsLabel::Two { j1, j2, .. } => {
                row.push(Cell::Float(j1));
                row.push(Cell::Float(j2));
            }
        }
        row.extend([
            Cell::Float(report.mean_n),
            Cell::Float(report.mean_n2),
            Cell::Float(report.mandel_q),
            Cell::MaybeFloat(report.closed_form_q),
            Cell::Bool(report.closed_form_used),
            Cell::Float(report.oracle_deviation),
        ]);
        rows.push(row);
    }

    let mut run_params = vec![
        ("B", Cell::Float(a.phys.b)),
        ("d", Cell::Float(a.phys.d)),
        ("class", Cell::Text(a.class.class.name().into())),
    ];
    match class {
        CsClass::FixedN { n } | CsClass::FixedNShifted { n } => {
            run_params.push(("n", Cell::UInt(n.into())));
            run_params.push(("alpha", Cell::Float(a.alpha)));
        }
        CsClass::FixedM { m } | CsClass::FixedMShifted { m } => {
            run_params.push(("m", Cell::UInt(m.into())));
            run_params.push(("alpha", Cell::Float(a.alpha)));
        }
        _ => {
            run_params.push(("alpha1", Cell::Float(a.alpha1)));
            run_params.push(("alpha2", Cell::Float(a.alpha2)));
        }
    }
    run_params.push(("tol", Cell::Float(a.tol)));
    let table = Table { params: run_params, columns, rows };
    emit(&table.render(a.emit.format), a.emit.output.as_ref())?;
    Ok(0)
}
