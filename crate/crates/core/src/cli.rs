//! Command-line front end: `point`, `fig1`, `scan` and `validate`.
//!
//! Exit codes: 0 success, 2 a checked property failed, 3 a Fock truncation
//! was too small, 4 bad arguments or config, 1 anything else (I/O).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::channel::ChannelParams;
use crate::error::Error;
use crate::linalg::c;
use crate::output::{render, OutputFormat, Record};
use crate::probe::{coherent, displaced_squeezed, fock, squeezed_vacuum, Cutoff, ProbeState};
use crate::report::{evaluate_point, PointOptions, PurificationRoute};
use crate::scan::{fig1, run_scan, ScanConfig, ScanRow, StateFamily};
use crate::validate::{run_validation, ValidateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;
pub const EXIT_BAD_ARGS: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "qfi-bounds",
    version,
    about = "Quantum Fisher information and precision bounds for phase estimation under phase diffusion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one probe at one noise strength by every route.
    Point(PointArgs),
    /// Best Gaussian QFI against the analytic Gaussian bound over (N, β²).
    Fig1(GridArgs),
    /// Evaluate a state family over (N, β²).
    Scan(GridArgs),
    /// Run the invariant suite; exits 2 if any property fails.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML file with ScanConfig keys; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub nu: Option<u32>,
    /// Probe Fock cutoff: a positive integer or `auto`.
    #[arg(long)]
    pub cutoff: Option<Cutoff>,
    /// Environment Fock cutoff (mirror purification): integer or `auto`.
    #[arg(long = "env-cutoff")]
    pub env_cutoff: Option<Cutoff>,
    #[arg(long, value_enum)]
    pub purification: Option<PurificationRoute>,
    /// Fill the wall_time_ms column.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub state: Option<StateFamily>,
    /// Mean photon number.
    #[arg(long = "N")]
    pub n_mean: Option<f64>,
    /// Fock level for `--state fock`.
    #[arg(long = "n")]
    pub level: Option<usize>,
    /// Real displacement amplitude.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Squeezing parameter.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub state: Option<StateFamily>,
    /// Mean photon numbers, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    pub n_grid: Option<Vec<f64>>,
    /// Diffusion strengths β², comma separated.
    #[arg(long, value_delimiter = ',')]
    pub beta2: Option<Vec<f64>>,
    /// Points over the squeezing fraction in `fig1`.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random POVMs in the classical-Fisher check.
    #[arg(long, default_value_t = 50)]
    pub povm_samples: usize,
}

/// Error plus the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Truncation { .. } => EXIT_TRUNCATION,
            Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::Dimension(_)
            | Error::InvalidDensity(_)
            | Error::InvalidPovm(_)
            | Error::NotHermitian { .. } => EXIT_BAD_ARGS,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn bad_args(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_BAD_ARGS,
        message: message.into(),
    }
}

fn load_config(common: &CommonArgs) -> Result<ScanConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => ScanConfig::from_path(path)?,
        None => ScanConfig::default(),
    };
    if let Some(v) = common.output {
        cfg.output_format = v;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.nu {
        cfg.nu = v;
    }
    if let Some(v) = common.cutoff {
        cfg.cutoff = v;
    }
    if let Some(v) = common.env_cutoff {
        cfg.env_cutoff = v;
    }
    if let Some(v) = common.purification {
        cfg.purification = v;
    }
    if common.timing {
        cfg.record_timing = true;
    }
    Ok(cfg)
}

fn grid_config(args: &GridArgs) -> Result<ScanConfig, Failure> {
    let mut cfg = load_config(&args.common)?;
    if let Some(v) = args.state {
        cfg.state_family = v;
    }
    if let Some(v) = &args.n_grid {
        cfg.n_grid = v.clone();
    }
    if let Some(v) = &args.beta2 {
        cfg.beta2_grid = v.clone();
    }
    if let Some(v) = args.resolution {
        cfg.gaussian_scan_resolution = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn point_probe(args: &PointArgs, cfg: &ScanConfig) -> Result<(ProbeState, f64), Failure> {
    let family = args.state.unwrap_or(cfg.state_family);
    let n = args.n_mean;
    if let Some(x) = n.filter(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(bad_args(format!("--N must be finite and ≥ 0, got {x}")));
    }
    let psi = match family {
        StateFamily::Coherent => {
            let alpha = args
                .alpha
                .or(n.map(f64::sqrt))
                .ok_or_else(|| bad_args("coherent probes need --alpha or --N"))?;
            coherent(c(alpha, 0.0), cfg.cutoff)
        }
        StateFamily::SqueezedVacuum => {
            let r = args
                .r
                .or(n.map(|n| n.sqrt().asinh()))
                .ok_or_else(|| bad_args("squeezed_vacuum probes need --r or --N"))?;
            squeezed_vacuum(r, cfg.cutoff)?
        }
        StateFamily::DisplacedSqueezed => match (args.alpha, args.r, n) {
            (None, None, Some(n)) => cfg.probe(n)?,
            (Some(_), _, _) | (_, Some(_), _) => {
                // squeezing axis at θ = π maximizes Δn² for real α
                displaced_squeezed(
                    c(args.alpha.unwrap_or(0.0), 0.0),
                    args.r.unwrap_or(0.0),
                    std::f64::consts::PI,
                    cfg.cutoff,
                )?
            }
            _ => {
                return Err(bad_args(
                    "displaced_squeezed probes need --alpha/--r or --N",
                ))
            }
        },
        StateFamily::Fock => {
            let level = match (args.level, n) {
                (Some(k), _) => k,
                (None, Some(n)) if n.fract() == 0.0 => n as usize,
                _ => return Err(bad_args("fock probes need --n (or an integer --N)")),
            };
            let cutoff = match cfg.cutoff {
                Cutoff::Auto => level + 1,
                Cutoff::Fixed(k) => k,
            };
            fock(level, cutoff)?
        }
        StateFamily::CustomAmplitudes => cfg.probe(f64::NAN)?,
    };
    let n_target = n.unwrap_or_else(|| psi.statistics().mean_n);
    Ok((psi, n_target))
}

fn cmd_point(args: &PointArgs) -> Result<String, Failure> {
    let mut cfg = load_config(&args.common)?;
    if let Some(v) = args.phi {
        cfg.phi = v;
    }
    let beta2 = match args.beta2 {
        Some(b) => b,
        None => *cfg
            .beta2_grid
            .first()
            .ok_or_else(|| bad_args("no --beta2 and an empty beta2_grid"))?,
    };
    let (psi, n_target) = point_probe(args, &cfg)?;
    let params = ChannelParams::new(cfg.phi, beta2, cfg.nu)?;
    let opts = PointOptions {
        route: cfg.purification,
        env_cutoff: cfg.env_cutoff,
        rank_tol: None,
        with_oracle: true,
    };
    let start = std::time::Instant::now();
    let report = evaluate_point(&psi, &params, &opts)?;
    let ms = if cfg.record_timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        f64::NAN
    };
    let row = ScanRow::from_report(psi.label(), n_target, &report, ms);
    Ok(render(&[row], cfg.output_format)?)
}

fn flagged_summary<R>(rows: &[R], flags: impl Fn(&R) -> &[String]) -> Option<String> {
    let n = rows.iter().filter(|r| !flags(r).is_empty()).count();
    (n > 0).then(|| format!("{n} of {} rows carry flags", rows.len()))
}

fn emit<R: Record>(rows: &[R], cfg: &ScanConfig) -> Result<String, Failure> {
    Ok(render(rows, cfg.output_format)?)
}

/// Output text, where it goes (`None`: stdout) and the exit code.
fn dispatch(cli: &Cli, err: &mut dyn Write) -> Result<(String, Option<PathBuf>, i32), Failure> {
    match &cli.command {
        Command::Point(args) => Ok((cmd_point(args)?, args.common.out.clone(), EXIT_OK)),
        Command::Fig1(args) => {
            let cfg = grid_config(args)?;
            let rows = fig1(&cfg)?;
            if let Some(s) = flagged_summary(&rows, |r| &r.flags) {
                let _ = writeln!(err, "fig1: {s}");
            }
            let failed_check = rows.iter().any(|r| {
                r.flags
                    .iter()
                    .any(|f| f == "exceeds_cq_max" || f == "non_monotone")
            });
            let code = if failed_check {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            Ok((emit(&rows, &cfg)?, args.common.out.clone(), code))
        }
        Command::Scan(args) => {
            let cfg = grid_config(args)?;
            let rows = run_scan(&cfg)?;
            if let Some(s) = flagged_summary(&rows, |r| &r.flags) {
                let _ = writeln!(err, "scan: {s}");
            }
            Ok((emit(&rows, &cfg)?, args.common.out.clone(), EXIT_OK))
        }
        Command::Validate(args) => {
            let opts = ValidateOptions {
                seed: args.seed.unwrap_or(0),
                povm_samples: args.povm_samples,
                ..ValidateOptions::default()
            };
            let report = run_validation(&opts);
            let code = if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            };
            Ok((format!("{report}\n"), None, code))
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_BAD_ARGS,
            };
        }
    };
    match dispatch(&cli, err) {
        Ok((text, path, code)) => {
            let written = match path {
                Some(p) => {
                    std::fs::write(&p, text.as_bytes()).map_err(|e| format!("{}: {e}", p.display()))
                }
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => code,
                Err(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    EXIT_FAILURE
                }
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
