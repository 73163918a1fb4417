//! Run configuration: command-line flags layered over an optional
//! `key = value` file layered over defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use hubsim_core::pairwalk::Precision;
use hubsim_core::weights::{WeightFunction, WeightKind};
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 42;
pub const ENV_WORKERS: &str = "HUBSIM_WORKERS";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: String, line: usize },
    #[error("{path}:{line}: unknown key `{key}`")]
    UnknownKey { path: String, line: usize, key: String },
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{0}")]
    Constraint(String),
    #[error("cannot read config file {path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Basic,
    Linear,
    Power,
    Table,
}

impl FromStr for Model {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Model as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
    Auto,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Mode as ValueEnum>::from_str(s, true)
    }
}

impl From<Mode> for Precision {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => Precision::Exact,
            Mode::Float => Precision::Float,
            Mode::Auto => Precision::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Supermartingale,
    Comparison,
    Coupling,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Suite as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExactOp {
    /// Closed-form admissible path count from (A, B) to (m, m).
    Count,
    /// Every admissible path from (A, B) to (m, m) with its probability.
    Enumerate,
    /// The maximal-probability path from (A, 1) to (m, m).
    MaxPath,
    /// q(A) and q(A) 2^A for A = 2..=A.
    Decay,
}

impl FromStr for ExactOp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <ExactOp as ValueEnum>::from_str(s, true)
    }
}

/// Flags shared by every subcommand. Each may also be set in the file given
/// by `--config`, using the long flag name as key.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat `key = value` file; `#` starts a comment.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Weight model.
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Offset of the linear model W(n) = n + beta, beta > -1.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Exponent of the power model W(n) = n^p, p >= 1.
    #[arg(long)]
    pub p: Option<f64>,
    /// Table weights W(0), W(1), ... as a comma list; continued linearly.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub table: Option<Vec<f64>>,
    /// Edges per new vertex.
    #[arg(long)]
    pub m0: Option<u64>,
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed; per-trial seeds derive from it and the trial index.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; HUBSIM_WORKERS takes precedence.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Leading coordinate A of the walk start.
    #[arg(long = "A")]
    pub a: Option<u64>,
    /// Trailing coordinate B of the walk start.
    #[arg(long = "B")]
    pub b: Option<u64>,
    /// Diagonal level m for `exact`.
    #[arg(long)]
    pub m: Option<u64>,
    /// Last diagonal level of the first-hit table.
    #[arg(long)]
    pub mmax: Option<u64>,
    /// Arithmetic for the first-hit table.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Checkpoint compared against the final step in hub reports.
    #[arg(long)]
    pub nhalf: Option<u64>,
    /// Steps per urn sample.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Vertices whose final degree is reported, as a comma list.
    #[arg(long, value_delimiter = ',')]
    pub watch: Option<Vec<usize>>,
    /// Smallest n used in scaling fits.
    #[arg(long)]
    pub nmin: Option<u64>,
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    #[arg(long, value_enum)]
    pub op: Option<ExactOp>,
    /// Also write every edge as `trial,source,target` to this file.
    #[arg(long)]
    pub emit_edges: Option<PathBuf>,
}

const KNOWN_KEYS: &[&str] = &[
    "model", "beta", "p", "table", "m0", "steps", "trials", "seed", "workers", "out", "format",
    "A", "B", "m", "mmax", "mode", "nhalf", "horizon", "watch", "nmin", "suite", "op",
    "emit_edges",
];

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: WeightKind,
    pub m0: u64,
    pub steps: u64,
    pub trials: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub a: u64,
    pub b: u64,
    pub m: Option<u64>,
    pub mmax: Option<u64>,
    pub mode: Mode,
    pub nhalf: Option<u64>,
    pub horizon: u64,
    pub watch: Vec<usize>,
    pub nmin: u64,
    pub suite: Suite,
    pub op: ExactOp,
    pub emit_edges: Option<PathBuf>,
}

impl RunConfig {
    pub fn weight_function(&self) -> Result<WeightFunction, ConfigError> {
        WeightFunction::new(self.kind.clone(), 1)
            .map_err(|e| ConfigError::Constraint(e.to_string()))
    }
}

/// Subcommand-specific fallbacks for settings with no global default.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub steps: u64,
    pub trials: u64,
    pub format: Format,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    let inner = value.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

/// Reads a flat config file into `key -> value`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config_text(&text, &path.display().to_string())
}

pub fn parse_config_text(text: &str, origin: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                path: origin.to_string(),
                line: i + 1,
            });
        };
        let key = key.trim().replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey {
                path: origin.to_string(),
                line: i + 1,
                key,
            });
        }
        let value = value.trim().trim_matches('"').to_string();
        map.insert(key, value);
    }
    Ok(map)
}

/// Applies file values to every flag the command line left unset.
pub fn merge_file(flags: &mut Flags, file: &BTreeMap<String, String>) -> Result<(), ConfigError> {
    macro_rules! fill {
        ($field:ident, $key:expr) => {
            if flags.$field.is_none() {
                if let Some(v) = file.get($key) {
                    flags.$field = Some(parse_value($key, v)?);
                }
            }
        };
    }
    fill!(model, "model");
    fill!(beta, "beta");
    fill!(p, "p");
    fill!(m0, "m0");
    fill!(steps, "steps");
    fill!(trials, "trials");
    fill!(seed, "seed");
    fill!(workers, "workers");
    fill!(out, "out");
    fill!(format, "format");
    fill!(a, "A");
    fill!(b, "B");
    fill!(m, "m");
    fill!(mmax, "mmax");
    fill!(mode, "mode");
    fill!(nhalf, "nhalf");
    fill!(horizon, "horizon");
    fill!(nmin, "nmin");
    fill!(suite, "suite");
    fill!(op, "op");
    fill!(emit_edges, "emit_edges");
    if flags.table.is_none() {
        if let Some(v) = file.get("table") {
            flags.table = Some(parse_list("table", v)?);
        }
    }
    if flags.watch.is_none() {
        if let Some(v) = file.get("watch") {
            flags.watch = Some(parse_list("watch", v)?);
        }
    }
    Ok(())
}

fn workers_from_env(env_workers: Option<&str>) -> Result<Option<usize>, ConfigError> {
    match env_workers {
        None => Ok(None),
        Some(v) if v.trim().is_empty() => Ok(None),
        Some(v) => parse_value::<usize>(ENV_WORKERS, v.trim()).map(Some),
    }
}

/// Resolves flags, then the config file, then defaults. `env_workers` is the
/// value of `HUBSIM_WORKERS`, if set.
pub fn resolve(
    mut flags: Flags,
    defaults: Defaults,
    env_workers: Option<&str>,
) -> Result<RunConfig, ConfigError> {
    if let Some(path) = flags.config.clone() {
        let file = read_config_file(&path)?;
        merge_file(&mut flags, &file)?;
    }

    let model = flags.model.unwrap_or(if flags.table.is_some() {
        Model::Table
    } else if flags.p.is_some() {
        Model::Power
    } else if flags.beta.is_some() {
        Model::Linear
    } else {
        Model::Basic
    });
    let kind = match model {
        Model::Basic => WeightKind::Basic,
        Model::Linear => {
            let beta = flags.beta.unwrap_or(0.0);
            if !(beta > -1.0) || !beta.is_finite() {
                return Err(ConfigError::Constraint(format!(
                    "linear model requires beta > -1, got {beta}"
                )));
            }
            WeightKind::Linear { beta }
        }
        Model::Power => {
            let p = flags.p.unwrap_or(2.0);
            if !(p >= 1.0) || !p.is_finite() {
                return Err(ConfigError::Constraint(format!(
                    "power model requires p >= 1, got {p}"
                )));
            }
            WeightKind::Power { p }
        }
        Model::Table => {
            let table = flags.table.clone().ok_or_else(|| {
                ConfigError::Constraint("table model requires table = w0, w1, ...".into())
            })?;
            WeightKind::Table { table }
        }
    };
    // Surface convexity and positivity problems at parse time.
    WeightFunction::new(kind.clone(), 1).map_err(|e| ConfigError::Constraint(e.to_string()))?;

    let m0 = flags.m0.unwrap_or(1);
    if m0 < 1 {
        return Err(ConfigError::Constraint("m0 must be at least 1".into()));
    }
    let trials = flags.trials.unwrap_or(defaults.trials);
    if trials < 1 {
        return Err(ConfigError::Constraint("trials must be at least 1".into()));
    }
    let workers = workers_from_env(env_workers)?.or(flags.workers);
    if workers == Some(0) {
        return Err(ConfigError::Constraint("workers must be at least 1".into()));
    }
    let a = flags.a.unwrap_or(2);
    let b = flags.b.unwrap_or(1);
    if a < 1 || b < 1 {
        return Err(ConfigError::Constraint(
            "walk coordinates A and B must be at least 1".into(),
        ));
    }

    Ok(RunConfig {
        kind,
        m0,
        steps: flags.steps.unwrap_or(defaults.steps),
        trials,
        seed: flags.seed.unwrap_or(DEFAULT_SEED),
        workers,
        out: flags.out,
        format: flags.format.unwrap_or(defaults.format),
        a,
        b,
        m: flags.m,
        mmax: flags.mmax,
        mode: flags.mode.unwrap_or(Mode::Auto),
        nhalf: flags.nhalf,
        horizon: flags.horizon.unwrap_or(10_000),
        watch: flags.watch.unwrap_or_default(),
        nmin: flags.nmin.unwrap_or(1000),
        suite: flags.suite.unwrap_or(Suite::Supermartingale),
        op: flags.op.unwrap_or(ExactOp::Count),
        emit_edges: flags.emit_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: Defaults = Defaults {
        steps: 100,
        trials: 4,
        format: Format::Csv,
    };

    #[test]
    fn defaults_apply() {
        let cfg = resolve(Flags::default(), D, None).unwrap();
        assert_eq!(cfg.kind, WeightKind::Basic);
        assert_eq!(cfg.seed, 42);
        assert_eq!((cfg.steps, cfg.trials, cfg.m0), (100, 4, 1));
        assert_eq!(cfg.workers, None);
    }

    #[test]
    fn constraints_are_named() {
        let flags = Flags {
            model: Some(Model::Linear),
            beta: Some(-2.0),
            ..Default::default()
        };
        let err = resolve(flags, D, None).unwrap_err().to_string();
        assert!(err.contains("beta > -1"), "{err}");
        let flags = Flags {
            model: Some(Model::Power),
            p: Some(0.5),
            ..Default::default()
        };
        assert!(resolve(flags, D, None).unwrap_err().to_string().contains("p >= 1"));
        let flags = Flags {
            m0: Some(0),
            ..Default::default()
        };
        assert!(resolve(flags, D, None).unwrap_err().to_string().contains("m0"));
        let flags = Flags {
            trials: Some(0),
            ..Default::default()
        };
        assert!(resolve(flags, D, None).unwrap_err().to_string().contains("trials"));
    }

    #[test]
    fn file_parsing() {
        let map = parse_config_text("# comment\nsteps = 1000  # trailing\n\nmodel = \"power\"\np=3\n", "f")
            .unwrap();
        assert_eq!(map["steps"], "1000");
        assert_eq!(map["model"], "power");
        assert_eq!(map["p"], "3");
        assert!(matches!(
            parse_config_text("colour = red", "f"),
            Err(ConfigError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            parse_config_text("\nsteps 10", "f"),
            Err(ConfigError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = parse_config_text("steps = 1000\ntrials = 7\ntable = [1, 2, 4]\n", "f").unwrap();
        let mut flags = Flags {
            steps: Some(10),
            ..Default::default()
        };
        merge_file(&mut flags, &file).unwrap();
        assert_eq!(flags.steps, Some(10));
        assert_eq!(flags.trials, Some(7));
        assert_eq!(flags.table, Some(vec![1.0, 2.0, 4.0]));
        let cfg = resolve(flags, D, None).unwrap();
        assert_eq!(cfg.kind, WeightKind::Table { table: vec![1.0, 2.0, 4.0] });
    }

    #[test]
    fn env_workers_override_flag() {
        let flags = Flags {
            workers: Some(3),
            ..Default::default()
        };
        assert_eq!(resolve(flags.clone(), D, Some("5")).unwrap().workers, Some(5));
        assert_eq!(resolve(flags.clone(), D, None).unwrap().workers, Some(3));
        assert!(resolve(flags, D, Some("zero")).is_err());
    }
}
