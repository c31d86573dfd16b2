//! The `ruijs` command line: configuration, suite runner and reports.

mod config;
mod report;
mod runner;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::identities::IdentityName;
use crate::specialfn::VariantKind;
use crate::C64;

pub use config::SuiteConfig;
pub use report::{CheckRecord, Report, Summary};
pub use runner::{run_identity, run_suite, Suite};

/// Name of the environment variable holding a default config file path.
pub const CONFIG_ENV: &str = "RUIJS_CONFIG";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ruijs", version, about = "Numerical verification of deformed elliptic Ruijsenaars identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run identity checks and report residuals.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Elliptic,
    Trig,
    Hyperbolic,
    Rational,
}

impl From<VariantArg> for VariantKind {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Elliptic => VariantKind::Elliptic,
            VariantArg::Trig => VariantKind::Trigonometric,
            VariantArg::Hyperbolic => VariantKind::Hyperbolic,
            VariantArg::Rational => VariantKind::Rational,
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct VerifyArgs {
    /// Group of checks to run.
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Run a single identity instead of a suite.
    #[arg(long, value_parser = parse_identity, conflicts_with = "suite")]
    pub identity: Option<IdentityName>,
    /// JSON config file; flags override its values.
    #[arg(long, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Elliptic nome `p`, as `re` or `re,im`. Takes precedence over `--tau`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub p: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub tau: Option<C64>,
    /// Period of the trigonometric and hyperbolic brackets.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub omega: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub delta: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub kappa: Option<C64>,

    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    /// Single order for `--identity`; defaults to `--kmax`.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Largest `K` in the Wronski and determinant checks.
    #[arg(long = "big-kmax")]
    pub big_kmax: Option<u32>,
    /// Largest degree `N` in the independence check.
    #[arg(long)]
    pub nmax: Option<u32>,

    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub pole_floor: Option<f64>,
    #[arg(long)]
    pub genericity_floor: Option<f64>,
    /// Skip the genericity check, e.g. for exceptional `κ/δ ∈ ℚ` cases.
    #[arg(long)]
    pub relax_genericity: bool,

    /// Write the JSON report here (`-` for stdout).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn parse_identity(s: &str) -> Result<IdentityName, String> {
    IdentityName::parse(s).ok_or_else(|| {
        let names: Vec<&str> = IdentityName::ALL.iter().map(|n| n.name()).collect();
        format!("unknown identity `{s}`; expected one of {}", names.join(", "))
    })
}

/// `re`, `re,im`, or `[re,im]`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = t.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("bad number `{x}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got `{s}`")),
    }
}

/// Parses `args` (program name first), runs, writes output, returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    match cli.command {
        Command::Verify(args) => verify(&args, stdout, stderr),
    }
}

fn verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cfg = match SuiteConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_ERROR;
        }
    };
    let result = match args.identity {
        Some(id) => run_identity(&cfg, id, args.k),
        None => run_suite(&cfg, args.suite),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_ERROR;
        }
    };
    let io = match &args.json {
        Some(path) if path.as_os_str() == "-" => stdout.write_all(report.to_json().as_bytes()),
        Some(path) => std::fs::write(path, report.to_json()).and_then(|_| stdout.write_all(report.to_text().as_bytes())),
        None => stdout.write_all(report.to_text().as_bytes()),
    };
    if let Err(e) = io {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_ERROR;
    }
    report.exit_code()
}
