//! `campanato`: conjugates, gauges, embedding verdicts and numerical
//! experiments for fractional Orlicz–Sobolev to Campanato embeddings.
//!
//! Exit codes: 0 success, 2 validation error, 3 indeterminate verdict,
//! 4 numerical divergence.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::commands::{Outcome, Table};
use crate::config::{Command, Experiment, Format, RunConfig, Settings};
use crate::error::{CliError, Result};

#[derive(Parser, Debug)]
#[command(name = "campanato", version, about = "Optimal Campanato gauges for fractional Orlicz-Sobolev embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON config file mirroring the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Young function as inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    young: Option<String>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    rmin: Option<f64>,
    #[arg(long, global = true)]
    rmax: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative slack of band checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Legendre conjugate of the Young function.
    Conjugate {
        /// Report the band t ≤ A⁻¹(t) Ã⁻¹(t) ≤ 2t on the grid.
        #[arg(long)]
        check_duality: bool,
    },
    /// Generalized inverse on the grid.
    Inverse,
    /// Matuszewska–Orlicz indices at zero and infinity.
    Indices,
    /// The optimal gauge selected by (s, k), tabulated on the grid.
    Gauge,
    /// BMO/VMO, Spanne and integrability verdicts.
    Check {
        /// Power-log exponents for the continuity-gap table, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        alphas: Option<Vec<f64>>,
    },
    /// Numerical experiments.
    Verify {
        #[arg(long, value_enum)]
        experiment: Option<Experiment>,
        /// Extremal family of the ratio experiment: uf, vf or wf.
        #[arg(long)]
        family: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Decreasing rearrangement of step data.
    Rearrange {
        /// `{"values": [...], "weights": [...]}` inline or as a file.
        #[arg(long)]
        input: Option<String>,
        /// Emit the maximal function f** instead of f*.
        #[arg(long)]
        double_star: bool,
    },
    /// Luxemburg norm of step data.
    Norm {
        #[arg(long)]
        input: Option<String>,
    },
}

fn flag_settings(common: Common, sub: &Sub) -> Settings {
    let mut s = Settings {
        young: common.young.map(Value::String),
        n: common.n,
        s: common.s,
        k: common.k,
        rmin: common.rmin,
        rmax: common.rmax,
        points: common.points,
        seed: common.seed,
        tol: common.tol,
        out: common.out,
        format: common.format,
        ..Default::default()
    };
    match sub {
        Sub::Conjugate { check_duality } => s.check_duality = check_duality.then_some(true),
        Sub::Check { alphas } => s.alphas = alphas.clone(),
        Sub::Verify { experiment, family, beta, alpha, level } => {
            s.experiment = *experiment;
            s.family = family.clone();
            s.beta = *beta;
            s.alpha = *alpha;
            s.level = *level;
        }
        Sub::Rearrange { input, double_star } => {
            s.input = input.clone().map(Value::String);
            s.double_star = double_star.then_some(true);
        }
        Sub::Norm { input } => s.input = input.clone().map(Value::String),
        Sub::Inverse | Sub::Indices | Sub::Gauge => {}
    }
    s
}

fn command_of(sub: &Sub) -> Command {
    match sub {
        Sub::Conjugate { .. } => Command::Conjugate,
        Sub::Inverse => Command::Inverse,
        Sub::Indices => Command::Indices,
        Sub::Gauge => Command::Gauge,
        Sub::Check { .. } => Command::Check,
        Sub::Verify { .. } => Command::Verify,
        Sub::Rearrange { .. } => Command::Rearrange,
        Sub::Norm { .. } => Command::Norm,
    }
}

fn csv(cfg: &RunConfig, table: &Table) -> Result<String> {
    let mut out = format!("# config: {}\n", serde_json::to_string(cfg).map_err(|e| CliError::Core(e.into()))?);
    out.push_str(&table.header.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn render(cfg: &RunConfig, outcome: &Outcome) -> Result<String> {
    match cfg.output.format {
        Format::Json => {
            let doc = json!({ "config": cfg, "result": outcome.result });
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Core(e.into()))?;
            text.push('\n');
            Ok(text)
        }
        Format::Csv => match &outcome.table {
            Some(t) => csv(cfg, t),
            None => Err(CliError::Usage("this command has no tabular output; use --format json".into())),
        },
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let command = command_of(&cli.command);
    let file = match &cli.common.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let settings = file.overridden_by(flag_settings(cli.common, &cli.command));
    let cfg = RunConfig::resolve(command, settings)?;
    let outcome = commands::run(&cfg)?;
    let text = render(&cfg, &outcome)?;
    match &cfg.output.path {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path.as_ref(), e))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })?,
    }
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
