//! Argument parsing and the four commands.
//!
//! Exit codes: 0 success, 1 configuration, usage or file error, 2 failed
//! verification, 3 numerical failure.

use std::ffi::OsString;
use std::f64::consts::TAU;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use coldamp_core::budget::{budget_point, log_grid, MatchingProblem, Param, SweepAxis};
use coldamp_core::budget::solve_matching;
use coldamp_core::sensor::mechanical_impedance;

use crate::config::{dump_config, parse_config, Config, ConfigError};
use crate::parallel::par_sweep;
use crate::report::{budget_csv, budget_summary, config_digest, matching_report, sweep_csv};
use crate::verify::{run_verify, Fault, VerifyOptions};

/// Parameter file used when `--config` is absent.
pub const DEFAULT_CONFIG: &str = include_str!("../microscope.cfg");

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "coldamp", version, about = "Noise budget of a cold-damped capacitive accelerometer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Parameter file (defaults to the built-in microscope channel).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (default stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Noise budget over a frequency grid, as CSV.
    Budget {
        #[command(flatten)]
        common: Common,
        /// Lowest frequency, Hz.
        #[arg(long)]
        freq_min: Option<f64>,
        /// Highest frequency, Hz.
        #[arg(long)]
        freq_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Budget at the analysis frequency while one parameter varies.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter key as in the config file, e.g. r_amp.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        /// Space the grid linearly instead of logarithmically.
        #[arg(long)]
        linear: bool,
    },
    /// Optimal amplifier matching in the lossless limit.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Impose the detuning Δ instead of deriving it from the mechanics.
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
    },
    /// Print the parameters in canonical form, ready to load again.
    DumpConfig {
        #[command(flatten)]
        common: Common,
    },
    /// Randomized cross-checks against the network oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
    #[error("{0}")]
    Numerical(#[from] coldamp_core::Error),
    #[error("verification failed")]
    Verify,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Output { .. } => EXIT_CONFIG,
            CliError::Verify => EXIT_VERIFY,
            CliError::Numerical(e) if e.is_numerical() => EXIT_NUMERICAL,
            // out-of-range values reached through a sweep or an override
            CliError::Numerical(_) => EXIT_CONFIG,
        }
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if !matches!(e, CliError::Verify) {
                let _ = writeln!(stderr, "error: {e}");
            }
            e.exit_code()
        }
    }
}

fn load(path: Option<&Path>) -> Result<(Config, String), CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| ConfigError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        })?,
        None => DEFAULT_CONFIG.to_owned(),
    };
    let cfg = parse_config(&text)?;
    Ok((cfg, text))
}

/// Write the main output to `--out` or stdout; the summary goes wherever the output does not.
fn emit(
    out: Option<&Path>,
    body: &str,
    summary: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let fail = |path: &str, e: std::io::Error| CliError::Output { path: path.to_owned(), message: e.to_string() };
    match out {
        Some(p) => {
            std::fs::write(p, body).map_err(|e| fail(&p.display().to_string(), e))?;
            stdout.write_all(summary.as_bytes()).map_err(|e| fail("stdout", e))
        }
        None => {
            stdout.write_all(body.as_bytes()).map_err(|e| fail("stdout", e))?;
            stderr.write_all(summary.as_bytes()).map_err(|e| fail("stderr", e))
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Budget { common, freq_min, freq_max, points } => {
            let (cfg, text) = load(common.config.as_deref())?;
            let a = &cfg.analysis;
            let lo = freq_min.or(a.freq_min);
            let hi = freq_max.or(a.freq_max);
            let n = points.or(a.points);
            let grid = match (lo, hi) {
                (None, None) if n.unwrap_or(1) == 1 => vec![a.omega],
                (Some(lo), Some(hi)) => {
                    if lo > hi {
                        return Err(CliError::Usage(format!("--freq-min {lo} exceeds --freq-max {hi}")));
                    }
                    let n = n.unwrap_or(if lo == hi { 1 } else { 50 });
                    if n > 1 && lo == hi {
                        return Err(CliError::Usage("several points need --freq-min < --freq-max".into()));
                    }
                    log_grid(lo, hi, n).map_err(|e| CliError::Usage(e.to_string()))?
                        .into_iter()
                        .map(|f| TAU * f)
                        .collect()
                }
                _ => return Err(CliError::Usage("give both --freq-min and --freq-max".into())),
            };
            let reference = budget_point(&cfg.params, a.omega)?;
            let points = par_sweep(&cfg.params, SweepAxis::Frequency, &grid)?;
            let csv = budget_csv(&points, &config_digest(&text));
            let summary = budget_summary(&cfg.params, &reference, &points);
            emit(common.out.as_deref(), &csv, &summary, stdout, stderr)
        }
        Command::Sweep { common, param, from, to, points, linear } => {
            let (cfg, text) = load(common.config.as_deref())?;
            let key = Param::from_key(&param).ok_or_else(|| {
                let known: Vec<_> = Param::ALL.iter().map(|p| p.key()).collect();
                CliError::Usage(format!("unknown parameter `{param}`; expected one of {}", known.join(", ")))
            })?;
            let grid = if linear {
                linear_grid(from, to, points)?
            } else {
                log_grid(from, to, points).map_err(|e| CliError::Usage(e.to_string()))?
            };
            let axis = SweepAxis::Parameter { param: key, omega: cfg.analysis.omega };
            let rows = par_sweep(&cfg.params, axis, &grid)?;
            let csv = sweep_csv(key.key(), &grid, &rows, &config_digest(&text));
            let summary = format!("swept {} over {} points at omega = {:.6e} rad/s\n", key.key(), grid.len(), cfg.analysis.omega);
            emit(common.out.as_deref(), &csv, &summary, stdout, stderr)
        }
        Command::Optimize { common, delta } => {
            let (cfg, _) = load(common.config.as_deref())?;
            let w = cfg.analysis.omega;
            let problem = match delta {
                Some(d) if d.is_finite() => MatchingProblem::with_delta(&cfg.params, w, d)?,
                Some(d) => return Err(CliError::Usage(format!("--delta {d} is not finite"))),
                None => MatchingProblem::new(&cfg.params, w)?,
            };
            let m = solve_matching(&problem)?;
            let mut report = matching_report(&m, problem.delta, cfg.params.r_mech(w));
            let (ba, se) = (problem.back_action(m.ratio_opt), problem.sensing(m.ratio_opt));
            report.push_str(&format!("detection terms at optimum  {ba:.6e} / {se:.6e} (relative gap {:.3e})\n", (ba - se).abs() / se));
            if delta.is_none() {
                let d = mechanical_impedance(&cfg.params, w)?.delta();
                report.push_str(&format!("Delta from mechanics        {d:.6e}\n"));
            }
            emit(common.out.as_deref(), &report, "", stdout, stderr)
        }
        Command::DumpConfig { common } => {
            let (cfg, _) = load(common.config.as_deref())?;
            emit(common.out.as_deref(), &dump_config(&cfg), "", stdout, stderr)
        }
        Command::Verify { common, tol, draws, seed, inject_fault } => {
            if !(tol > 0.0) || draws == 0 {
                return Err(CliError::Usage("verify needs --tol > 0 and --draws >= 1".into()));
            }
            let (cfg, _) = load(common.config.as_deref())?;
            let opts = VerifyOptions {
                tol,
                draws,
                seed,
                fault: inject_fault.then_some(Fault::FlipMuL2),
                ..VerifyOptions::default()
            };
            let report = run_verify(&cfg.params, cfg.analysis.omega, &opts)?;
            emit(common.out.as_deref(), &report.render(), "", stdout, stderr)?;
            if report.passed() {
                Ok(())
            } else {
                let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
                let _ = writeln!(stderr, "failed checks: {}", failed.join(", "));
                Err(CliError::Verify)
            }
        }
    }
}

fn linear_grid(from: f64, to: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n == 0 || !(from.is_finite() && to.is_finite()) || to < from {
        return Err(CliError::Usage("linear grid needs finite --from <= --to and at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![from]);
    }
    Ok((0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect())
}
