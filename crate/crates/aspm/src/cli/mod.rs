//! Command-line front end used by the `aspm` binary.
//!
//! Subcommands: `design-psf`, `analyze`, `simulate`, `verify`. Configs and
//! PSFs are JSON, curves are CSV with full-precision decimal fields.
//! Exit codes: 0 success, 1 invariant or simulation failure, 2 usage error.

use crate::analytics::{self, BerVariant};
use crate::coding::LinkConfig;
use crate::harness::{self, Axis, ReferenceMode, SweepSpec};
use crate::shaping::{self, PsfPair};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod verify;

pub use verify::{run_invariant_suite, CheckResult};

/// Errors split by exit-code class.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments or malformed inputs: exit code 2.
    #[error("usage error: {0}")]
    Usage(String),
    /// Runtime or invariant failure: exit code 1.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

fn fail(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

/// Spread-pulse modulation toolkit: PSF design, analytic BER curves,
/// Monte Carlo link simulation, and invariant verification.
#[derive(Debug, Parser)]
#[command(name = "aspm", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design a pulse-shaping filter pair and write it as JSON.
    DesignPsf(DesignPsfArgs),
    /// Evaluate closed-form BER curves to CSV.
    Analyze(AnalyzeArgs),
    /// Monte Carlo BER sweep against the analytic curves, to CSV.
    Simulate(SimulateArgs),
    /// Run the cross-module invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct DesignPsfArgs {
    /// Filter length in taps (even, >= 32).
    #[arg(long)]
    pub length: usize,
    /// Alternating-projection refinement rounds.
    #[arg(long, default_value_t = 300)]
    pub refine_iters: usize,
    /// Output JSON path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Coherent,
    Noncoherent,
    CoherentUnipolar,
    BinaryCoherent,
    BinaryNoncoherent,
}

impl ModeArg {
    fn variant(self) -> BerVariant {
        match self {
            ModeArg::Coherent => BerVariant::Coherent,
            ModeArg::Noncoherent => BerVariant::Noncoherent,
            ModeArg::CoherentUnipolar => BerVariant::CoherentUnipolar,
            ModeArg::BinaryCoherent => BerVariant::BinaryCoherent,
            ModeArg::BinaryNoncoherent => BerVariant::BinaryNoncoherent,
        }
    }

    fn is_binary(self) -> bool {
        matches!(self, ModeArg::BinaryCoherent | ModeArg::BinaryNoncoherent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    /// Eb/N0 in dB.
    Ebn0Db,
    /// SNR Gamma in dB (`analyze` additionally needs --n-p).
    SnrDb,
    /// Noncentrality parameter directly.
    Lambda,
}

impl AxisArg {
    fn axis(self) -> Axis {
        match self {
            AxisArg::Ebn0Db => Axis::Ebn0Db,
            AxisArg::SnrDb => Axis::SnrDb,
            AxisArg::Lambda => Axis::Lambda,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// BER expression to evaluate.
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Alphabet size (power of two). Binary modes fix M = 2.
    #[arg(long = "M")]
    pub m: Option<u32>,
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Grid as start:stop:step (inclusive endpoints, step > 0).
    #[arg(long, allow_hyphen_values = true)]
    pub range: String,
    /// Interpulse interval, needed when the axis is snr-db.
    #[arg(long = "n-p")]
    pub n_p: Option<u32>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Link configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// PSF archive JSON.
    #[arg(long)]
    pub psf: PathBuf,
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Grid as start:stop:step (inclusive endpoints, step > 0).
    #[arg(long, allow_hyphen_values = true)]
    pub range: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Stop each point after this many errors.
    #[arg(long, default_value_t = 100)]
    pub min_errors: u64,
    /// Hard per-point budget; accepts scientific notation like 1e7.
    #[arg(long, default_value = "1e8")]
    pub max_bits: String,
    /// Worker threads; defaults to ASPM_THREADS or all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Count errors against the raw transmitted bits instead of the
    /// decoded noiseless waveform.
    #[arg(long, default_value_t = false)]
    pub reference_transmitted: bool,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// PSF archive to check; a fresh L = 256 design when omitted.
    #[arg(long)]
    pub psf: Option<PathBuf>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Parse "start:stop:step" into an inclusive grid.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "range must be start:stop:step, got '{text}'"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("range component '{p}' is not a number")))
        })
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) {
        return Err(CliError::Usage(format!("range step must be > 0, got {step}")));
    }
    if stop < start {
        return Err(CliError::Usage(format!(
            "range stop {stop} is below start {start}"
        )));
    }
    let count = ((stop - start) / step + 1.0 + 1e-9).floor() as usize;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, contents)
            .map_err(|e| CliError::Failure(format!("writing {}: {e}", p.display()))),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn lambda_for(axis: AxisArg, value: f64, m: u32, n_p: Option<u32>) -> Result<f64, CliError> {
    let lambda = match axis {
        AxisArg::Lambda => value,
        AxisArg::Ebn0Db => 2.0 * analytics::db_to_linear(value) * (m as f64).log2(),
        AxisArg::SnrDb => {
            let n_p = n_p.ok_or_else(|| {
                CliError::Usage("--n-p is required when the axis is snr-db".into())
            })?;
            n_p as f64 * analytics::db_to_linear(value)
        }
    };
    if !(lambda >= 0.0) {
        return Err(CliError::Usage(format!("operating point out of range: {value}")));
    }
    Ok(lambda)
}

pub fn cmd_design_psf(args: &DesignPsfArgs) -> Result<(), CliError> {
    if args.length < 32 || args.length % 2 != 0 {
        return Err(CliError::Usage(format!(
            "--length must be even and >= 32, got {}",
            args.length
        )));
    }
    let psf = shaping::design_psf(args.length, args.refine_iters).map_err(fail)?;
    let diag = shaping::acf_diagnostics(&psf).map_err(fail)?;
    let ssb = shaping::hilbert_pair_error(&psf).map_err(fail)?;
    let env: Vec<f64> = psf
        .taps_g
        .iter()
        .zip(&psf.taps_h)
        .map(|(&g, &h)| (g * g + h * h).sqrt())
        .collect();
    let mean_env = env.iter().sum::<f64>() / env.len() as f64;
    let ripple = env
        .iter()
        .map(|e| (e / mean_env - 1.0).abs())
        .fold(0.0f64, f64::max);
    let text = serde_json::to_string_pretty(&psf)
        .map_err(|e| CliError::Failure(format!("serializing psf: {e}")))?;
    std::fs::write(&args.out, text)
        .map_err(|e| CliError::Failure(format!("writing {}: {e}", args.out.display())))?;
    println!("wrote {}", args.out.display());
    println!("  length        : {}", psf.length);
    println!("  iters         : {}", psf.design_metadata.iters);
    println!("  acf_error     : {:.6e}", psf.design_metadata.acf_error);
    println!("  ssb_fraction  : {ssb:.6e}");
    println!("  envelope_ripple (incl. edge taper): {ripple:.3}");
    println!("  designed-train PAPR: {:.2} dB", diag.designed_train_papr_db);
    println!("  shaped-train PAPR  : {:.2} dB", diag.shaped_train_papr_db);
    Ok(())
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<String, CliError> {
    let m = match (args.mode.is_binary(), args.m) {
        (true, None) => 2,
        (true, Some(2)) => 2,
        (true, Some(other)) => {
            return Err(CliError::Usage(format!(
                "binary modes imply M = 2, got --M {other}"
            )))
        }
        (false, Some(m)) => m,
        (false, None) => return Err(CliError::Usage("--M is required for M-ary modes".into())),
    };
    let grid = parse_range(&args.range)?;
    let mut csv = String::from("axis_value,lambda,ber_analytic\n");
    for &v in &grid {
        let lambda = lambda_for(args.axis, v, m, args.n_p)?;
        let ber = analytics::ber(args.mode.variant(), lambda, m)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(csv, "{v},{lambda},{ber}").expect("string write");
    }
    write_output(args.out.as_deref(), &csv)?;
    Ok(csv)
}

pub fn load_config(path: &Path) -> Result<LinkConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
    let config: LinkConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("parsing {}: {e}", path.display())))?;
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

pub fn load_psf(path: &Path) -> Result<PsfPair, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
    let psf: PsfPair = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("parsing {}: {e}", path.display())))?;
    psf.validate_shape().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(psf)
}

fn default_threads() -> usize {
    std::env::var("ASPM_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

/// Render a measured curve in the simulate CSV schema.
pub fn curve_to_csv(curve: &harness::BerCurve) -> String {
    let mut csv = String::from(
        "axis_value,lambda,ebn0_db,snr_db,bits,errors,ber_sim,ci_low,ci_high,ber_analytic,flagged\n",
    );
    for p in &curve.points {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            p.axis_value,
            p.point.lambda,
            p.point.ebn0_db,
            p.point.snr_db,
            p.bits,
            p.errors,
            p.ber,
            p.ci_low,
            p.ci_high,
            p.ber_analytic,
            p.flagged
        )
        .expect("string write");
    }
    csv
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let config = load_config(&args.config)?;
    let psf = load_psf(&args.psf)?;
    config
        .validate_with_psf(psf.length)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let max_bits = args
        .max_bits
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite() && *v >= 1.0)
        .map(|v| v as u64)
        .ok_or_else(|| CliError::Usage(format!("bad --max-bits '{}'", args.max_bits)))?;
    let spec = SweepSpec {
        config,
        axis: args.axis.axis(),
        grid: parse_range(&args.range)?,
        min_errors: args.min_errors,
        max_bits,
        seed: args.seed,
        threads: args.threads.unwrap_or_else(default_threads),
        reference: if args.reference_transmitted {
            ReferenceMode::TransmittedBits
        } else {
            ReferenceMode::IdealDecode
        },
    };
    let curve = harness::run_sweep(&spec, &psf).map_err(fail)?;
    let csv = curve_to_csv(&curve);
    write_output(args.out.as_deref(), &csv)?;
    Ok(csv)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let psf = match &args.psf {
        Some(path) => load_psf(path)?,
        None => shaping::design_psf(256, 300).map_err(fail)?,
    };
    let results = run_invariant_suite(&psf);
    let mut all_ok = true;
    for r in &results {
        println!(
            "{} {:<40} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        all_ok &= r.passed;
    }
    if let Some(path) = &args.json {
        let text = serde_json::to_string_pretty(&results)
            .map_err(|e| CliError::Failure(format!("serializing report: {e}")))?;
        std::fs::write(path, text)
            .map_err(|e| CliError::Failure(format!("writing {}: {e}", path.display())))?;
    }
    if all_ok {
        println!("all {} checks passed", results.len());
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "{} of {} checks failed",
            results.iter().filter(|r| !r.passed).count(),
            results.len()
        )))
    }
}

/// Dispatch a parsed command line.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::DesignPsf(args) => cmd_design_psf(&args),
        Command::Analyze(args) => cmd_analyze(&args).map(|_| ()),
        Command::Simulate(args) => cmd_simulate(&args).map(|_| ()),
        Command::Verify(args) => cmd_verify(&args),
    }
}

/// Entry point used by the binary.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
