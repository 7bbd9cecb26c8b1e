//! Command-line front end for `wmp-core`.
//!
//! Inputs come from a JSON bundle (`--bundle`) and from single-matrix
//! Matrix Market files (`--role NAME=PATH`, which override bundle roles).
//! Tolerances are taken from the library defaults, then the bundle's
//! `tolerances` object, then the `--rank-rtol` / `--verify-atol` flags.

pub mod bundle;
pub mod commands;
pub mod error;
pub mod mtx;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use wmp_core::ToleranceConfig;

use crate::bundle::Bundle;
use crate::commands::{Inputs, PerturbMode};
use crate::error::{CliError, Result, EXIT_MATH, EXIT_OK, EXIT_USAGE};
use crate::report::{Provenance, Report, Source};

#[derive(Debug, Parser)]
#[command(name = "wmp", version, about = "Weighted Moore-Penrose inverses with indefinite weights")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON bundle of named matrices
    #[arg(long, global = true, value_name = "PATH")]
    pub bundle: Option<PathBuf>,

    /// Matrix Market dense array file for one role, e.g. `A=a.mtx`
    #[arg(long = "role", global = true, value_name = "NAME=PATH", value_parser = parse_role)]
    pub roles: Vec<(String, PathBuf)>,

    /// Write the result matrices as a JSON bundle
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Print the report as JSON
    #[arg(long, global = true)]
    pub json: bool,

    /// Relative singular-value cutoff for numerical rank
    #[arg(long, global = true, value_name = "RTOL")]
    pub rank_rtol: Option<f64>,

    /// Absolute threshold for residual checks
    #[arg(long, global = true, value_name = "ATOL")]
    pub verify_atol: Option<f64>,

    /// Limit schedule endpoints, one point per decade, e.g. `1e-1:1e-8`
    #[arg(long, global = true, value_name = "A:B")]
    pub schedule: Option<String>,

    /// Seed for randomized verifications
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute A†_MN from roles A, M, N
    Wmp,
    /// Decide whether A†_MN exists (exit 2 if not)
    Exists,
    /// Positive-definite weights S, T with the same inverse
    Reduce {
        /// Also sample this many equivalent positive domain weights
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Trace (A*VA + tB*WB)† A*V as t -> 0 (roles A, B, V, W; optional X, Y)
    #[command(name = "limit-t0")]
    LimitT0,
    /// Trace (λA + B)† B as λ -> ∞ (PSD roles A, B)
    #[command(name = "limit-lambda")]
    LimitLambda,
    /// Test whether (R(A*), R(B*)) is a separated pair (exit 2 if not)
    Separated,
    /// Closed form of (A*VA + B*WB)† A*V for a separated pair (optional Wprime)
    #[command(name = "closed-form")]
    ClosedForm,
    /// Split B = B1 + B2 and evaluate the general t -> 0 limit
    Decompose,
    /// Check the four weighted Penrose equations for role X (exit 2 if any fails)
    Verify,
    /// Continuity diagnostics along a perturbation sequence
    Perturb {
        /// Generated sequence; omit to use the bundle's `terms`
        #[arg(long, value_enum)]
        mode: Option<PerturbMode>,
    },
    /// Orthogonal projection matched to an idempotent Q
    #[command(name = "matched-projection")]
    MatchedProjection,
    /// Hermitian embedding rho(A) and its inverse
    Rho,
}

fn parse_role(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected NAME=PATH, got `{s}`")),
    }
}

fn tolerances(cli: &Cli, bundle: &Bundle) -> Result<Provenance> {
    let mut p = Provenance {
        config: ToleranceConfig::default(),
        rank_rtol: Source::Default,
        inv_cond_max: Source::Default,
        verify_atol: Source::Default,
        verify_rtol: Source::Default,
    };
    let o = &bundle.tolerances;
    if let Some(v) = o.rank_rtol {
        (p.config.rank_rtol, p.rank_rtol) = (Some(v), Source::Bundle);
    }
    if let Some(v) = o.inv_cond_max {
        (p.config.inv_cond_max, p.inv_cond_max) = (v, Source::Bundle);
    }
    if let Some(v) = o.verify_atol {
        (p.config.verify_atol, p.verify_atol) = (v, Source::Bundle);
    }
    if let Some(v) = o.verify_rtol {
        (p.config.verify_rtol, p.verify_rtol) = (v, Source::Bundle);
    }
    if let Some(v) = cli.rank_rtol {
        (p.config.rank_rtol, p.rank_rtol) = (Some(v), Source::Flag);
    }
    if let Some(v) = cli.verify_atol {
        (p.config.verify_atol, p.verify_atol) = (v, Source::Flag);
    }
    p.config.validate()?;
    Ok(p)
}

fn load(cli: &Cli) -> Result<(Inputs, Provenance)> {
    let mut bundle = match &cli.bundle {
        Some(path) => Bundle::read(path)?,
        None => Bundle::default(),
    };
    for (name, path) in &cli.roles {
        if bundle::RESERVED.contains(&name.as_str()) {
            return Err(CliError::Input(format!("`{name}` is reserved and cannot name a role")));
        }
        bundle.matrices.insert(name.clone(), mtx::read_file(path)?);
    }
    let provenance = tolerances(cli, &bundle)?;
    let schedule = match &cli.schedule {
        Some(arg) => Some(bundle::parse_schedule(arg).map_err(CliError::Input)?),
        None => bundle.schedule,
    };
    let inputs = Inputs {
        matrices: bundle.matrices,
        tol: provenance.config,
        schedule,
        terms: bundle.terms,
        seed: cli.seed,
    };
    Ok((inputs, provenance))
}

pub fn dispatch(command: &Command, inputs: &Inputs) -> Result<Report> {
    match command {
        Command::Wmp => commands::wmp(inputs),
        Command::Exists => commands::exists(inputs),
        Command::Reduce { samples } => commands::reduce(inputs, *samples),
        Command::LimitT0 => commands::limit_t0(inputs),
        Command::LimitLambda => commands::limit_lambda(inputs),
        Command::Separated => commands::separated(inputs),
        Command::ClosedForm => commands::closed_form(inputs),
        Command::Decompose => commands::decompose(inputs),
        Command::Verify => commands::verify(inputs),
        Command::Perturb { mode } => commands::perturb(inputs, *mode),
        Command::MatchedProjection => commands::matched(inputs),
        Command::Rho => commands::rho(inputs),
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<Option<String>> {
    let (inputs, provenance) = load(cli)?;
    let report = dispatch(&cli.command, &inputs)?;
    let rendered = if cli.json {
        let mut s = serde_json::to_string_pretty(&report.to_json(&provenance)).expect("JSON values serialize");
        s.push('\n');
        s
    } else {
        report.to_text(&provenance)
    };
    let _ = stdout.write_all(rendered.as_bytes());
    if let Some(path) = &cli.out {
        std::fs::write(path, bundle::write_matrices(report.matrices())).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(report.failure)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(None) => EXIT_OK,
        Ok(Some(failure)) => {
            let _ = writeln!(stderr, "wmp: {failure}");
            EXIT_MATH
        }
        Err(e) => {
            let _ = writeln!(stderr, "wmp: error: {e}");
            e.exit_code()
        }
    }
}
