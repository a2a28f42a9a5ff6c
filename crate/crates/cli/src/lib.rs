//! Command-line front end: figure presets, parameter sweeps, threshold
//! search, feasibility reports and the built-in self-test.
//!
//! Exit codes: 0 on success, 1 when the simulation rejects its inputs or
//! fails, 2 when the command line or a configuration file is malformed.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use micromacro::par::Parallelism;
use micromacro::protocol::{
    feasibility, find_threshold, nanobeam, parse_kv, trampoline, FeasibilityInput, Parameter,
    ProtocolConfig, RegimeThresholds,
};
use micromacro::selftest::run_selftest;
use micromacro::sweep::{
    format_number, preset, preset_base, run_sweep, SweepSpec, CSV_SIGNIFICANT_DIGITS,
};
use micromacro::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Relative width of the final threshold bracket when `--tol` is absent.
const DEFAULT_RELATIVE_TOL: f64 = 1e-6;

/// Keys that describe a sweep rather than a protocol point; a threshold
/// search accepts a sweep config and ignores them.
const SWEEP_KEYS: [&str; 3] = ["axis1", "axis2", "series"];

#[derive(Debug, Parser)]
#[command(
    name = "micromacro",
    version,
    about = "Micro-macro optomechanical entanglement simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the entanglement metric over a 1-D or 2-D grid and write CSV.
    Sweep(SweepArgs),
    /// Find the parameter value where the entanglement metric reaches zero.
    Threshold(ThresholdArgs),
    /// Derived coupling, noise and regime figures for a hardware platform.
    Feasibility(FeasibilityArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).multiple(true).args(["preset", "config"])))]
struct SweepArgs {
    /// Figure preset (fig2, fig3, fig4, fig5, figA1).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Flat `key = value` sweep description, applied on top of the preset.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// CSV destination; warnings go to `<FILE>.log`. Defaults to stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Override one key after the preset and config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Number of worker threads; 1 runs sequentially.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    parallel: Option<u32>,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Preset whose base configuration is used.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Flat `key = value` configuration applied on top of the preset.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one key after the preset and config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Parameter to search over.
    #[arg(long, value_name = "NAME")]
    param: String,
    #[arg(long, allow_negative_numbers = true)]
    lo: f64,
    #[arg(long, allow_negative_numbers = true)]
    hi: f64,
    /// Width of the final bracket; defaults to 1e-6 of the search interval.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["preset", "config"])))]
struct FeasibilityArgs {
    /// Built-in platform (nanobeam, trampoline).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Flat `key = value` file with omega_m, kappa, gamma or Q, g, T and optional tau.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Ratio that counts as "much greater than".
    #[arg(long, default_value_t = RegimeThresholds::default().much_greater)]
    much_greater: f64,
    /// Largest N_th * x considered detectable.
    #[arg(long, default_value_t = RegimeThresholds::default().max_decoherence_ratio)]
    max_decoherence_ratio: f64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

fn failure(context: impl Display, e: impl Display) -> CliError {
    CliError::Failure(format!("{context}: {e}"))
}

fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn split_assignment(s: &str) -> Result<(&str, &str), CliError> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got '{s}'")))
}

fn sweep_spec(args: &SweepArgs) -> Result<SweepSpec, CliError> {
    let config = args.config.as_deref().map(read_config).transpose()?;
    let mut spec = match (&args.preset, &config) {
        (Some(name), _) => preset(name)?,
        (None, Some(text)) => SweepSpec::from_kv(text)?,
        (None, None) => unreachable!("clap requires --preset or --config"),
    };
    if let (Some(_), Some(text)) = (&args.preset, &config) {
        spec.apply_kv(text)?;
    }
    for s in &args.set {
        let (k, v) = split_assignment(s)?;
        spec.set_key(k, v)?;
    }
    spec.validate()?;
    Ok(spec)
}

fn sweep(args: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let spec = sweep_spec(args)?;
    let parallelism = args.parallel.map_or(Parallelism::Default, |n| {
        Parallelism::from_workers(n as usize)
    });
    let output = run_sweep(&spec, parallelism)?;
    let mut log = String::new();
    for w in &output.warnings {
        log.push_str(w);
        log.push('\n');
    }
    match &args.out {
        Some(path) => {
            fs::write(path, &output.csv).map_err(|e| failure(path.display(), e))?;
            let mut log_path = path.clone().into_os_string();
            log_path.push(".log");
            let log_path = PathBuf::from(log_path);
            fs::write(&log_path, &log).map_err(|e| failure(log_path.display(), e))?;
            if !output.warnings.is_empty() {
                let _ = writeln!(
                    stderr,
                    "{} warning(s) written to {}",
                    output.warnings.len(),
                    log_path.display()
                );
            }
        }
        None => {
            stdout
                .write_all(output.csv.as_bytes())
                .map_err(|e| failure("stdout", e))?;
            let _ = stderr.write_all(log.as_bytes());
        }
    }
    Ok(())
}

fn threshold_config(args: &ThresholdArgs) -> Result<ProtocolConfig, CliError> {
    let mut config = match &args.preset {
        Some(name) => preset_base(name)?,
        None => ProtocolConfig::default(),
    };
    if let Some(path) = &args.config {
        for (k, v) in parse_kv(&read_config(path)?)? {
            if !SWEEP_KEYS.contains(&k.as_str()) {
                config.set_key(&k, &v)?;
            }
        }
    }
    for s in &args.set {
        let (k, v) = split_assignment(s)?;
        config.set_key(k, v)?;
    }
    Ok(config)
}

fn threshold(args: &ThresholdArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let param: Parameter = args.param.parse()?;
    let config = threshold_config(args)?;
    let tol = args
        .tol
        .unwrap_or(DEFAULT_RELATIVE_TOL * (args.hi - args.lo).abs());
    let value = find_threshold(&config, param, args.lo, args.hi, tol)?;
    writeln!(
        stdout,
        "{param} = {}",
        format_number(value, CSV_SIGNIFICANT_DIGITS)
    )
    .map_err(|e| failure("stdout", e))
}

fn feasibility_report(args: &FeasibilityArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let input = match (&args.preset, &args.config) {
        (Some(name), _) => match name.as_str() {
            "nanobeam" => nanobeam(),
            "trampoline" => trampoline(),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown feasibility preset '{other}' (expected nanobeam or trampoline)"
                )))
            }
        },
        (None, Some(path)) => FeasibilityInput::from_kv(&read_config(path)?)?,
        (None, None) => unreachable!("clap requires --preset or --config"),
    };
    let thresholds = RegimeThresholds {
        much_greater: args.much_greater,
        max_decoherence_ratio: args.max_decoherence_ratio,
    };
    let report = feasibility(&input, thresholds)?;
    stdout
        .write_all(report.render().as_bytes())
        .map_err(|e| failure("stdout", e))
}

fn selftest(stdout: &mut dyn Write) -> Result<(), CliError> {
    let checks = run_selftest();
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!c.passed);
        writeln!(stdout, "{status} {}: {}", c.name, c.detail).map_err(|e| failure("stdout", e))?;
    }
    if failed > 0 {
        return Err(CliError::Failure(format!(
            "{failed} of {} checks failed",
            checks.len()
        )));
    }
    Ok(())
}

/// Run the CLI against explicit output streams and return the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Sweep(args) => sweep(args, stdout, stderr),
        Command::Threshold(args) => threshold(args, stdout),
        Command::Feasibility(args) => feasibility_report(args, stdout),
        Command::Selftest => selftest(stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

/// Entry point used by the binary: process streams and exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(argv, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
