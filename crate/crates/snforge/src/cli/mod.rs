//! `snforge <group> <command> [options]`.
//!
//! Exit codes: 0 when every claim in the report holds, 1 when a claim fails
//! or a computation cannot finish, 2 for usage errors and unreadable inputs.

mod certify;
mod construct;
mod ensemble;
mod subblock;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use snforge_core::certificates::Tolerances;
use snforge_core::tensor::{DenseHermitian, Matrix, TensorSpace};

use crate::matfile::{self, MatfileError};
use crate::output::Output;
use crate::parallel::Runner;

pub use certify::CertifyCmd;
pub use construct::ConstructCmd;
pub use ensemble::EnsembleCmd;
pub use subblock::SubblockCmd;

#[derive(Parser, Debug)]
#[command(name = "snforge", version, about = "Schmidt-number certificates for PPT states")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build states and write them as matrix files.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Positivity, PPT and Schmidt-number certificates.
    #[command(subcommand)]
    Certify(CertifyCmd),
    /// Principal sub-block analysis and absolute-PPT falsification.
    #[command(subcommand)]
    Subblock(SubblockCmd),
    /// Monte Carlo campaigns over random states.
    #[command(subcommand)]
    Ensemble(EnsembleCmd),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Master seed for every random choice.
    #[arg(long, global = true, env = "SNFORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; never changes the output.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Relative PSD tolerance.
    #[arg(long, global = true, value_parser = positive)]
    pub psd_tol: Option<f64>,
    /// Relative singular-value cutoff for Schmidt ranks.
    #[arg(long, global = true, value_parser = positive)]
    pub sv_tol: Option<f64>,
    /// Relative threshold for a detector violation.
    #[arg(long, global = true, value_parser = positive)]
    pub detector_tol: Option<f64>,
    /// Relative eigenvalue cutoff for the eigenbasis bound.
    #[arg(long, global = true, value_parser = positive)]
    pub eig_tol: Option<f64>,
    /// Absolute threshold for the Ω hypotheses of the lower bound.
    #[arg(long, global = true, value_parser = positive)]
    pub hypothesis_tol: Option<f64>,
    /// Relative tolerance for PT-invariance checks.
    #[arg(long, global = true, value_parser = positive)]
    pub invariance_tol: Option<f64>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("tolerance must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

impl GlobalOpts {
    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(v) = self.psd_tol {
            t.psd_rel = v;
        }
        if let Some(v) = self.sv_tol {
            t.sv = v;
        }
        if let Some(v) = self.detector_tol {
            t.detector_rel = v;
        }
        if let Some(v) = self.eig_tol {
            t.eig = v;
        }
        if let Some(v) = self.hypothesis_tol {
            t.hypothesis = v;
        }
        t
    }

    pub fn invariance_tol(&self) -> f64 {
        self.invariance_tol.unwrap_or(1e-12)
    }
}

/// Shared state handed to every command.
pub struct Context {
    pub opts: GlobalOpts,
    pub tol: Tolerances,
    pub runner: Runner,
}

impl Context {
    pub fn seed(&self) -> u64 {
        self.opts.seed
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl From<snforge_core::Error> for CliError {
    fn from(e: snforge_core::Error) -> Self {
        use snforge_core::Error as E;
        match e {
            E::InvalidArgument(_) | E::NotHermitian { .. } => CliError::Usage(e.to_string()),
            E::NotPositive { .. } | E::NoConvergence(_) => CliError::Failed(e.to_string()),
        }
    }
}

impl From<MatfileError> for CliError {
    fn from(e: MatfileError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn read_input(path: &Path) -> CliResult<DenseHermitian> {
    matfile::read_hermitian(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub(crate) fn write_output(path: &Path, m: &Matrix, space: &TensorSpace) -> CliResult<()> {
    matfile::write_matrix(path, m, space).map_err(|e| CliError::Failed(e.to_string()))
}

/// `(d1, d2)` for a bipartite input: explicit flags win, otherwise the
/// file must have exactly two factors.
pub(crate) fn bipartite_dims(
    rho: &DenseHermitian,
    d1: Option<usize>,
    d2: Option<usize>,
) -> CliResult<(usize, usize)> {
    match (d1, d2, rho.space()) {
        (Some(a), Some(b), _) if a * b == rho.dim() => Ok((a, b)),
        (Some(a), Some(b), _) => Err(CliError::Usage(format!(
            "--d1 {a} --d2 {b} does not match dimension {}",
            rho.dim()
        ))),
        (None, None, Some(s)) if s.num_factors() == 2 => Ok((s.dims()[0], s.dims()[1])),
        _ => Err(CliError::Usage(
            "input is not a two-factor operator; pass --d1 and --d2".into(),
        )),
    }
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

fn diagnostic(msg: &str) -> Vec<u8> {
    let line = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("error");
    let line = line.trim().trim_start_matches("error: ");
    format!("snforge: error: {line}\n").into_bytes()
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code: 0,
                    stdout: rendered.into_bytes(),
                    stderr: Vec::new(),
                }
            } else {
                Outcome {
                    code: 2,
                    stdout: Vec::new(),
                    stderr: diagnostic(&rendered),
                }
            };
        }
    };
    execute(cli)
}

pub fn execute(cli: Cli) -> Outcome {
    let fail = |code: u8, msg: &str| Outcome {
        code,
        stdout: Vec::new(),
        stderr: diagnostic(msg),
    };
    let runner = match Runner::new(cli.global.threads.map(|t| t as usize)) {
        Ok(r) => r,
        Err(e) => return fail(1, &e.to_string()),
    };
    let ctx = Context {
        tol: cli.global.tolerances(),
        opts: cli.global,
        runner,
    };
    let result = match &cli.command {
        Command::Construct(c) => construct::run(c, &ctx),
        Command::Certify(c) => certify::run(c, &ctx),
        Command::Subblock(c) => subblock::run(c, &ctx),
        Command::Ensemble(c) => ensemble::run(c, &ctx),
    };
    let out = match result {
        Ok(out) => out,
        Err(CliError::Usage(m)) => return fail(2, &m),
        Err(CliError::Failed(m)) => return fail(1, &m),
    };
    let text = match ctx.opts.format {
        Format::Text => out.render_text(),
        Format::Json => out.render_json(),
    };
    let code = if out.passed() { 0 } else { 1 };
    match &ctx.opts.report {
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => Outcome {
                code,
                stdout: Vec::new(),
                stderr: Vec::new(),
            },
            Err(e) => fail(1, &format!("{}: {e}", path.display())),
        },
        None => Outcome {
            code,
            stdout: text.into_bytes(),
            stderr: Vec::new(),
        },
    }
}

pub(crate) fn output(group: &str, name: &str) -> Output {
    Output::new(&format!("{group} {name}"))
}
