//! `cmr`: build the matrix objects of the degenerate Calogero-Moser
//! r-matrix family and machine-verify the identities they satisfy.

mod objects;
mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cmr::error::CmrError;
use cmr::lax::{evolve, trajectory_csv};
use cmr::potentials::{CaseKind, ModelCase};

#[derive(Parser)]
#[command(
    name = "cmr",
    version,
    about = "Calogero-Moser r-matrix constructions and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit a machine-readable JSON report.
    Verify(VerifyArgs),
    /// Construct a named matrix object and write it in the JSON matrix schema.
    Build(BuildArgs),
    /// Integrate the equations of motion and write a CSV trajectory.
    Evolve(EvolveArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Potential family: rational | hyperbolic | trigonometric.
    #[arg(long, default_value = "rational")]
    case: String,
    /// Coupling constant for the hyperbolic/trigonometric cases.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Matrix size (particle count).
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Seed for all pseudo-random sampling (output is byte-reproducible).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Scalar mode: float | exact (exact requires the rational case).
    #[arg(long, default_value = "float")]
    mode: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Suite: identities | theorem1 | prop2 | theorem3 | prop4 | prop5 |
    /// theorem6 | cg | cybe | appendixB | appendixC | all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Family parameter Omega (decimal or p/q).
    #[arg(long, default_value = "0.3", allow_hyphen_values = true)]
    omega: String,
    /// r-matrix family used where one must be chosen: AT | I | II.
    #[arg(long, default_value = "I")]
    family: String,
    /// Tolerance for algebraic checks (finite-difference checks use at
    /// least 1e-6).
    #[arg(long)]
    tol: Option<f64>,
    /// Random sample count per check.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Output format (json).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct BuildArgs {
    /// Object: L | r_dyn | A | phi | chi | g | r_tilde_prime | r_prime |
    /// b_gln | X | r_cg | b_cg_plus | b_cg_minus | Fhat.
    object: String,
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated coordinates (decimal, or p/q in exact mode).
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Comma-separated momenta.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Sample an admissible random phase point instead of --q/--p.
    #[arg(long, default_value_t = false)]
    random: bool,
    #[arg(long, default_value = "0.3", allow_hyphen_values = true)]
    omega: String,
    #[arg(long, default_value = "I")]
    family: String,
    /// Output format (json).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated initial coordinates.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Comma-separated initial momenta.
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    /// Time step.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Step count.
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Output format (csv).
    #[arg(long, default_value = "csv")]
    format: String,
}

pub(crate) fn parse_case(common: &CommonArgs) -> Result<ModelCase, CmrError> {
    let kind = CaseKind::parse(&common.case)?;
    ModelCase::new(kind, common.a)
}

pub(crate) fn parse_f64(s: &str) -> Result<f64, CmrError> {
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| CmrError::Argument(format!("bad number {s:?}")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| CmrError::Argument(format!("bad number {s:?}")))?;
        if d == 0.0 {
            return Err(CmrError::Argument(format!("zero denominator in {s:?}")));
        }
        return Ok(n / d);
    }
    s.trim()
        .parse()
        .map_err(|_| CmrError::Argument(format!("bad number {s:?}")))
}

pub(crate) fn parse_f64_list(s: &str) -> Result<Vec<f64>, CmrError> {
    s.split(',').map(|t| parse_f64(t.trim())).collect()
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CmrError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CmrError::Argument(format!("cannot write {path:?}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CmrError::Argument(format!("cannot write stdout: {e}")))
        }
    }
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("CMR_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
}

fn run_verify(args: &VerifyArgs) -> Result<bool, CmrError> {
    if args.format != "json" {
        return Err(CmrError::Argument(format!(
            "verify emits json, not {:?}",
            args.format
        )));
    }
    let report = suites::run(args)?;
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| CmrError::Diagnostic(format!("report serialization: {e}")))?;
    text.push('\n');
    write_output(&args.common.out, &text)?;
    Ok(report.pass)
}

fn run_build(args: &BuildArgs) -> Result<(), CmrError> {
    if args.format != "json" {
        return Err(CmrError::Argument(format!(
            "build emits json, not {:?}",
            args.format
        )));
    }
    let text = objects::build_object(args)?;
    write_output(&args.common.out, &text)
}

fn run_evolve(args: &EvolveArgs) -> Result<(), CmrError> {
    if args.format != "csv" {
        return Err(CmrError::Argument(format!(
            "evolve emits csv, not {:?}",
            args.format
        )));
    }
    if args.common.mode != "float" {
        return Err(CmrError::Argument(
            "evolve integrates in float mode only".into(),
        ));
    }
    let case = parse_case(&args.common)?;
    let q = parse_f64_list(&args.q)?;
    let p = parse_f64_list(&args.p)?;
    if q.len() != args.common.n || p.len() != args.common.n {
        return Err(CmrError::Argument(format!(
            "expected {} coordinates and momenta",
            args.common.n
        )));
    }
    let traj = evolve(&case, &q, &p, args.dt, args.steps)?;
    let csv = trajectory_csv(&case, &traj)?;
    write_output(&args.common.out, &csv)
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify(args) => match run_verify(args) {
            Ok(true) => Ok(true),
            Ok(false) => Ok(false),
            Err(e) => Err(e),
        },
        Command::Build(args) => run_build(args).map(|_| true),
        Command::Evolve(args) => match run_evolve(args) {
            Ok(()) => Ok(true),
            // Leaving the admissible domain is a failed run, not a usage error.
            Err(CmrError::Evolution { step, t }) => {
                eprintln!("error: trajectory left the admissible domain after step {step} (t = {t})");
                return ExitCode::from(1);
            }
            Err(e) => Err(e),
        },
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
