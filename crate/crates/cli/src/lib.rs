//! Command-line surface for `eisenzero`: series evaluation, coefficient dumps,
//! zero reports and verification suites.

pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eisenzero::approx::ApproxError;
use eisenzero::domains::DomainError;
use eisenzero::series::{self, FourierCoefficient, Series, SeriesError};
use eisenzero::zerofinder::{
    compile_report, round_sig15, AxisGrid, ZeroError, ZeroReport, DEFAULT_TOLERANCE,
};
use eisenzero::{Complex64, ComplexPoint, EvalResult, TruncationPolicy, Weight};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;
pub const EXIT_CERTIFICATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("truncation is not certified (tail {tail:e} exceeds target)")]
    Uncertified { tail: f64 },
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INVALID_INPUT,
            CliError::Uncertified { .. } => EXIT_UNCERTIFIED,
            CliError::Certification(_) => EXIT_CERTIFICATION,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => EXIT_VERIFICATION,
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::FourierDivergence { .. } => CliError::Certification(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<DomainError> for CliError {
    fn from(e: DomainError) -> Self {
        match e {
            DomainError::Series(s) => s.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ApproxError> for CliError {
    fn from(e: ApproxError) -> Self {
        match e {
            ApproxError::Series(s) => s.into(),
            ApproxError::OutsideWindow { .. } => CliError::Input(e.to_string()),
            ApproxError::NotReal { .. } => CliError::Verification(e.to_string()),
        }
    }
}

impl From<ZeroError> for CliError {
    fn from(e: ZeroError) -> Self {
        match e {
            ZeroError::InvalidScan { .. } => CliError::Input(e.to_string()),
            ZeroError::Series(SeriesError::InvalidWeight(_) | SeriesError::InvalidPoint { .. }) => {
                CliError::Input(e.to_string())
            }
            other => CliError::Certification(other.to_string()),
        }
    }
}

/// Parses `a+bi`, `a-bi`, `bi`, `i`, `-i` or a bare real `a`.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let num = |t: &str| -> Result<f64, String> {
        t.parse::<f64>()
            .map_err(|_| format!("cannot parse '{t}' in '{text}'"))
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(num(&s)?, 0.0));
    };
    let imag = |t: &str| -> Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => num(t),
        }
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Ok(Complex64::new(num(&body[..i])?, imag(&body[i..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesArg {
    Einf,
    E0,
    Ehalf,
}

impl From<SeriesArg> for Series {
    fn from(s: SeriesArg) -> Series {
        match s {
            SeriesArg::Einf => Series::EInfinity,
            SeriesArg::E0 => Series::EZero,
            SeriesArg::Ehalf => Series::EHalf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expansion {
    Lattice,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Output format and destination shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Emit JSON (the default).
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long)]
    pub csv: bool,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl OutputArgs {
    pub fn format(&self) -> Format {
        if self.csv {
            Format::Csv
        } else {
            Format::Json
        }
    }
}

/// Truncation overrides. Flags take precedence over the environment.
#[derive(Debug, Clone, Args)]
pub struct TruncationArgs {
    /// Minimum (adaptive) or exact (--fixed) number of lattice rows.
    #[arg(long, env = "EISENZERO_U_MAX")]
    pub u_max: Option<i64>,
    /// Minimum (adaptive) or exact (--fixed) column half-width.
    #[arg(long)]
    pub v_max: Option<i64>,
    /// Minimum (adaptive) or exact (--fixed) number of Fourier terms.
    #[arg(long)]
    pub l_max: Option<i64>,
    /// Target tail relative to the largest term.
    #[arg(long, env = "EISENZERO_TOL")]
    pub tol: Option<f64>,
    /// Use the cutoffs as given instead of growing them.
    #[arg(long)]
    pub fixed: bool,
}

impl TruncationArgs {
    pub fn policy(&self) -> Result<TruncationPolicy, CliError> {
        let mut p = TruncationPolicy::default();
        if let Some(u) = self.u_max {
            p.lattice_u_max = u;
        }
        if let Some(v) = self.v_max {
            p.lattice_v_max = v;
        }
        if let Some(l) = self.l_max {
            p.fourier_l_max = l;
        }
        if let Some(t) = self.tol {
            p.target_tail = t;
        }
        p.adaptive = !self.fixed;
        if !p.is_valid() || p.target_tail >= 1.0 {
            return Err(CliError::Input(format!(
                "invalid truncation settings {p:?}"
            )));
        }
        Ok(p)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "eisenzero",
    version,
    about = "Half-integral weight Eisenstein series on Gamma_0(4)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one series at one point.
    Eval(EvalArgs),
    /// Dump Fourier coefficients of E_0.
    Coeffs(CoeffsArgs),
    /// Locate and certify zeroes, and map them into the fundamental domain.
    Zeros(ZerosArgs),
    /// Run verification suites over a list of weights.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub series: SeriesArg,
    #[arg(long, value_enum, default_value = "lattice")]
    pub expansion: Expansion,
    /// Point in the upper half-plane, e.g. `-0.5+1.0i`, `10i`, `i`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long)]
    pub k: i64,
    /// Exit with status 3 when the truncation is not certified.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub k: i64,
    /// Largest index `ℓ`.
    #[arg(long, default_value_t = 12)]
    pub max_l: i64,
    /// Also compute each coefficient by direct summation up to this odd `n`.
    #[arg(long)]
    pub direct: Option<i64>,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    #[arg(long)]
    pub k: i64,
    /// Also write `series,y,finf_x,finf_y,residual` rows to this CSV file.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Bisection width in y.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub bisect_tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub axis_min: f64,
    #[arg(long, default_value_t = 12.0)]
    pub axis_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub axis_step: f64,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Weights to check; repeat or separate with commas.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub k: Vec<i64>,
    #[arg(long, value_enum, default_value = "all")]
    pub suite: verify::Suite,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn weight(k: i64) -> Result<Weight, CliError> {
    Weight::new(k).map_err(|e| CliError::Input(e.to_string()))
}

/// Complex number as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(c: Complex64) -> Self {
        JsonComplex { re: c.re, im: c.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub series: Series,
    pub expansion: Expansion,
    pub k: Weight,
    pub z: JsonComplex,
    pub value: JsonComplex,
    pub tail_estimate: f64,
    pub terms_used: u64,
    pub certified: bool,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub l: i64,
    /// `e^{πik/4} b_ℓ`.
    pub rotated: f64,
    pub ln_abs: f64,
    pub sign: i8,
    pub squarefree_part: u64,
    pub truncation_tail: f64,
    pub direct_relative_difference: Option<f64>,
}

/// Rendered output plus the exit status it implies.
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            exit_code: EXIT_OK,
            diagnostic: None,
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Input(e.to_string()))
}

pub fn cmd_eval(a: &EvalArgs) -> Result<Outcome, CliError> {
    let k = weight(a.k)?;
    let policy = a.truncation.policy()?;
    let z = ComplexPoint::from_complex(parse_complex(&a.z).map_err(CliError::Input)?)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let series: Series = a.series.into();
    let r: EvalResult = match a.expansion {
        Expansion::Lattice => series::eval_lattice(series, z, k, &policy, Default::default())?,
        Expansion::Fourier => {
            if series != Series::EZero {
                return Err(CliError::Input(
                    "the Fourier expansion is implemented for e0 only".into(),
                ));
            }
            series::eval_e0_fourier(z, k, &policy)?
        }
    };
    let rec = EvalRecord {
        series,
        expansion: a.expansion,
        k,
        z: z.to_complex().into(),
        value: r.value.into(),
        tail_estimate: r.tail_estimate,
        terms_used: r.terms_used,
        certified: r.certified,
        scale: r.scale,
    };
    let text = match a.out.format() {
        Format::Json => to_json(&rec)?,
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                series: Series,
                expansion: Expansion,
                k: i64,
                z_re: f64,
                z_im: f64,
                value_re: f64,
                value_im: f64,
                tail_estimate: f64,
                terms_used: u64,
                certified: bool,
            }
            to_csv(&[Row {
                series,
                expansion: a.expansion,
                k: k.k(),
                z_re: z.x,
                z_im: z.y,
                value_re: r.value.re,
                value_im: r.value.im,
                tail_estimate: r.tail_estimate,
                terms_used: r.terms_used,
                certified: r.certified,
            }])?
        }
    };
    if a.strict && !r.certified {
        return Ok(Outcome {
            text,
            exit_code: EXIT_UNCERTIFIED,
            diagnostic: Some(
                CliError::Uncertified {
                    tail: r.tail_estimate,
                }
                .to_string(),
            ),
        });
    }
    Ok(Outcome::ok(text))
}

fn coefficient_record(
    b: &FourierCoefficient,
    direct: Option<&FourierCoefficient>,
) -> CoefficientRecord {
    CoefficientRecord {
        l: b.index,
        rotated: b.rotated(),
        ln_abs: b.ln_abs,
        sign: b.sign,
        squarefree_part: b.squarefree_part,
        truncation_tail: b.truncation_tail,
        direct_relative_difference: direct.map(|d| b.relative_difference(d)),
    }
}

pub fn cmd_coeffs(a: &CoeffsArgs) -> Result<Outcome, CliError> {
    let k = weight(a.k)?;
    let policy = a.truncation.policy()?;
    if a.max_l < 1 {
        return Err(CliError::Input("--max-l must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for l in 1..=a.max_l {
        let b = series::fourier_b(l, k, &policy)?;
        let d = match a.direct {
            Some(n) if n >= 1 => Some(series::fourier_b_direct(l, k, n)?),
            Some(n) => {
                return Err(CliError::Input(format!(
                    "--direct must be positive, got {n}"
                )))
            }
            None => None,
        };
        rows.push(coefficient_record(&b, d.as_ref()));
    }
    let text = match a.out.format() {
        Format::Json => to_json(&rows)?,
        Format::Csv => to_csv(&rows)?,
    };
    Ok(Outcome::ok(text))
}

/// One row of the plot-data CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub series: String,
    pub y: f64,
    pub finf_x: f64,
    pub finf_y: f64,
    pub residual: f64,
}

pub fn plot_rows(report: &ZeroReport) -> Vec<PlotRow> {
    report
        .mapped_points
        .iter()
        .map(|m| PlotRow {
            series: m.series_id.name().to_string(),
            y: round_sig15(m.y),
            finf_x: round_sig15(m.finf_x),
            finf_y: round_sig15(m.finf_y),
            residual: m.residual,
        })
        .collect()
}

pub fn zero_report(a: &ZerosArgs) -> Result<ZeroReport, CliError> {
    let k = weight(a.k)?;
    let policy = a.truncation.policy()?;
    if !a.bisect_tol.is_finite() || a.bisect_tol <= 0.0 {
        return Err(CliError::Input("--bisect-tol must be positive".into()));
    }
    let grid = AxisGrid {
        y_min: a.axis_min,
        y_max: a.axis_max,
        step: a.axis_step,
    };
    Ok(compile_report(k, &policy, &grid, a.bisect_tol)?)
}

pub fn cmd_zeros(a: &ZerosArgs) -> Result<Outcome, CliError> {
    let report = zero_report(a)?;
    if let Some(path) = &a.plot_data {
        std::fs::write(path, to_csv(&plot_rows(&report))?)?;
    }
    let text = match a.out.format() {
        Format::Json => to_json(&report)?,
        Format::Csv => to_csv(&plot_rows(&report))?,
    };
    let unsound = report
        .certificates
        .iter()
        .filter_map(|c| c.endpoint_margins)
        .any(|m| !(m[0] > 0.0 && m[1] > 0.0));
    if unsound {
        return Ok(Outcome {
            text,
            exit_code: EXIT_CERTIFICATION,
            diagnostic: Some("a certificate has a non-positive endpoint margin".into()),
        });
    }
    Ok(Outcome::ok(text))
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let policy = a.truncation.policy()?;
    let mut checks = Vec::new();
    for &k in &a.k {
        checks.extend(verify::run(a.suite, weight(k)?, &policy)?);
    }
    let text = match a.out.format() {
        Format::Json => to_json(&checks)?,
        Format::Csv => to_csv(&checks)?,
    };
    match checks.iter().find(|c| !c.passed) {
        Some(c) => Ok(Outcome {
            text,
            exit_code: EXIT_VERIFICATION,
            diagnostic: Some(format!(
                "check failed: k={} {} measured {:e} threshold {:e}",
                c.k, c.name, c.measured, c.threshold
            )),
        }),
        None => Ok(Outcome::ok(text)),
    }
}

fn output_of(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Eval(a) => &a.out,
        Command::Coeffs(a) => &a.out,
        Command::Zeros(a) => &a.out,
        Command::Verify(a) => &a.out,
    }
}

/// Runs a parsed command, writes its output and returns the exit status.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Zeros(a) => cmd_zeros(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(o) => {
            let written = match &output_of(&cli.command).output {
                Some(path) => std::fs::write(path, &o.text),
                None => std::io::stdout().write_all(o.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_VERIFICATION;
            }
            if let Some(d) = o.diagnostic {
                eprintln!("error: {d}");
            }
            o.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
