//! Run configuration: a JSON file merged with command-line flags, resolved
//! into the block that every report embeds.

use std::path::Path;

use campanato::YoungFunction;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Ratio,
    Necessity,
    Lemma45,
}

/// Settings shared by the config file and the flags. Every field is optional
/// so that flags can override the file field by field.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Inline JSON object, JSON text, or a path to a JSON file.
    pub young: Option<Value>,
    pub n: Option<usize>,
    pub s: Option<f64>,
    pub k: Option<usize>,
    pub rmin: Option<f64>,
    pub rmax: Option<f64>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<String>,
    pub format: Option<Format>,
    pub level: Option<usize>,
    pub check_duality: Option<bool>,
    pub experiment: Option<Experiment>,
    pub family: Option<String>,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub input: Option<Value>,
    pub double_star: Option<bool>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overridden_by(self, flags: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: flags.$f.or(self.$f)),* } };
        }
        pick!(
            young,
            n,
            s,
            k,
            rmin,
            rmax,
            points,
            seed,
            tol,
            out,
            format,
            level,
            check_duality,
            experiment,
            family,
            beta,
            alpha,
            alphas,
            input,
            double_star
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Conjugate,
    Inverse,
    Indices,
    Gauge,
    Check,
    Verify,
    Rearrange,
    Norm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Params {
    pub n: usize,
    pub s: f64,
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Output {
    pub format: Format,
    pub path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: Experiment,
    /// Refinement level of the ball quadrature and the seminorm.
    pub level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Integer scales `j_min..=j_max` of the necessity sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scales: Option<(u32, u32)>,
}

/// Fully resolved configuration. Nothing a command uses lives outside it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub young_function: Option<YoungFunction>,
    pub params: Params,
    pub grids: Option<Grid>,
    /// Relative slack of band checks.
    pub tol: f64,
    pub seed: u64,
    pub output: Output,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentConfig>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub check_duality: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<Value>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub double_star: bool,
}

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_TOL: f64 = 1e-6;

fn default_grid(command: Command, experiment: Option<Experiment>) -> Option<(f64, f64, usize)> {
    match command {
        Command::Conjugate | Command::Inverse => Some((1e-6, 1e6, 50)),
        Command::Gauge => Some((1e-3, 1.0, 31)),
        Command::Verify => match experiment {
            Some(Experiment::Ratio) => Some((1e-2, 1.0, 12)),
            Some(Experiment::Lemma45) => Some((0.1, 10.0, 3)),
            _ => None,
        },
        _ => None,
    }
}

/// Reads `--young`: a JSON object, JSON text, or a file holding either.
pub fn parse_young(v: &Value) -> Result<YoungFunction> {
    let text = match v {
        Value::String(s) if s.trim_start().starts_with('{') => s.clone(),
        Value::String(path) => std::fs::read_to_string(path).map_err(|e| CliError::io(Path::new(path), e))?,
        other => other.to_string(),
    };
    Ok(YoungFunction::from_json(&text)?)
}

/// Reads `--input`: inline JSON or a path to a JSON file.
fn parse_input(v: Value) -> Result<Value> {
    match v {
        Value::String(s) if s.trim_start().starts_with(['{', '[']) => {
            serde_json::from_str(&s).map_err(|e| CliError::Usage(format!("--input: {e}")))
        }
        Value::String(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(Path::new(&path), e))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))
        }
        other => Ok(other),
    }
}

impl RunConfig {
    pub fn resolve(command: Command, s: Settings) -> Result<Self> {
        let experiment_kind = match command {
            Command::Verify => Some(s.experiment.unwrap_or(Experiment::Ratio)),
            _ => None,
        };
        let needs_young = !matches!(command, Command::Rearrange | Command::Verify);
        let young_function = match (&s.young, command, experiment_kind) {
            (Some(v), ..) => Some(parse_young(v)?),
            (None, Command::Verify, Some(Experiment::Ratio | Experiment::Lemma45)) => Some(YoungFunction::power(2.0)),
            (None, ..) if needs_young => return Err(CliError::Usage("--young is required for this command".into())),
            _ => None,
        };
        let grids = default_grid(command, experiment_kind).map(|(lo, hi, m)| Grid {
            r_min: s.rmin.unwrap_or(lo),
            r_max: s.rmax.unwrap_or(hi),
            points: s.points.unwrap_or(m),
        });
        if let Some(g) = &grids {
            if !(g.r_min > 0.0 && g.r_max > g.r_min && g.r_max.is_finite()) {
                return Err(CliError::Usage(format!("grid needs 0 < rmin < rmax < ∞, got [{}, {}]", g.r_min, g.r_max)));
            }
            if g.points < 2 {
                return Err(CliError::Usage(format!("grid needs at least 2 points, got {}", g.points)));
            }
        }
        let tol = s.tol.unwrap_or(DEFAULT_TOL);
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be finite and nonnegative, got {tol}")));
        }
        let experiment = experiment_kind.map(|kind| match kind {
            Experiment::Ratio => ExperimentConfig {
                kind,
                level: s.level.unwrap_or(2),
                family: Some(s.family.clone().unwrap_or_else(|| "uf".into())),
                beta: None,
                alpha: None,
                scales: None,
            },
            Experiment::Necessity => ExperimentConfig {
                kind,
                level: s.level.unwrap_or(1),
                family: None,
                beta: None,
                alpha: None,
                scales: Some((2, 64)),
            },
            Experiment::Lemma45 => {
                let beta = s.beta.unwrap_or(0.0);
                ExperimentConfig {
                    kind,
                    level: s.level.unwrap_or(1),
                    family: None,
                    beta: Some(beta),
                    alpha: Some(s.alpha.unwrap_or(if beta < 0.0 { 0.5 } else { 0.25 })),
                    scales: None,
                }
            }
        });
        let input = match command {
            Command::Rearrange | Command::Norm => Some(parse_input(
                s.input.ok_or_else(|| CliError::Usage("--input is required for this command".into()))?,
            )?),
            _ => None,
        };
        Ok(RunConfig {
            command,
            young_function,
            params: Params { n: s.n.unwrap_or(1), s: s.s.unwrap_or(0.5), k: s.k.unwrap_or(0) },
            grids,
            tol,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            output: Output { format: s.format.unwrap_or_default(), path: s.out },
            experiment,
            check_duality: command == Command::Conjugate && s.check_duality.unwrap_or(false),
            alphas: if command == Command::Check { s.alphas } else { None },
            input,
            double_star: command == Command::Rearrange && s.double_star.unwrap_or(false),
        })
    }

    pub fn young(&self) -> Result<&YoungFunction> {
        self.young_function.as_ref().ok_or_else(|| CliError::Usage("--young is required for this command".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = Settings { n: Some(3), s: Some(0.25), ..Default::default() };
        let flags = Settings { s: Some(0.75), ..Default::default() };
        let merged = file.overridden_by(flags);
        assert_eq!((merged.n, merged.s), (Some(3), Some(0.75)));
    }

    #[test]
    fn command_defaults_are_resolved() {
        let s = Settings { young: Some(serde_json::json!({"kind": "Power", "p": 2.0})), ..Default::default() };
        let cfg = RunConfig::resolve(Command::Gauge, s).unwrap();
        assert_eq!(cfg.grids, Some(Grid { r_min: 1e-3, r_max: 1.0, points: 31 }));
        let cfg = RunConfig::resolve(
            Command::Verify,
            Settings { experiment: Some(Experiment::Lemma45), beta: Some(-0.5), ..Default::default() },
        )
        .unwrap();
        assert_eq!(cfg.experiment.unwrap().alpha, Some(0.5));
    }

    #[test]
    fn missing_young_is_a_usage_error() {
        assert!(matches!(RunConfig::resolve(Command::Conjugate, Settings::default()), Err(CliError::Usage(_))));
    }

    #[test]
    fn young_accepts_inline_text() {
        let a = parse_young(&Value::String(r#"{"kind":"Power","p":3}"#.into())).unwrap();
        assert_eq!(a, YoungFunction::power(3.0));
    }
}
