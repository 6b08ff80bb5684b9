//! Experiment configuration: command-line flags layered over an optional
//! `key = value` file.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use omega_model::pairing::ENUMERATION_DIM_LIMIT;
use omega_model::{Prime, SpaceShape, MAX_LEVEL};

use crate::error::CliError;

/// Largest accepted trial count.
pub const MAX_TRIALS: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Count,
    Exhaustive,
    Montecarlo,
    Tower,
    Isotropic,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Count => "count",
            Mode::Exhaustive => "exhaustive",
            Mode::Montecarlo => "montecarlo",
            Mode::Tower => "tower",
            Mode::Isotropic => "isotropic",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        <Mode as ValueEnum>::from_str(s, true)
            .map_err(|_| CliError::Usage(format!("mode: unknown mode '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Both,
}

impl Format {
    fn parse(s: &str) -> Result<Self, CliError> {
        <Format as ValueEnum>::from_str(s, true)
            .map_err(|_| CliError::Usage(format!("format: unknown format '{s}'")))
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// A validated experiment configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub p: u32,
    pub levels: Vec<usize>,
    pub trials: Option<u64>,
    pub seed: u64,
    pub shape: Vec<usize>,
    pub output: PathBuf,
    pub format: Format,
    pub record_runtime: bool,
}

impl ExperimentConfig {
    pub fn prime(&self) -> Prime {
        Prime::new(self.p).expect("validated")
    }

    /// Checks every mode-specific requirement and bound.
    pub fn validate(&self) -> Result<(), CliError> {
        let p = Prime::new(self.p).map_err(|e| CliError::Usage(format!("prime: {e}")))?;
        if self.levels.is_empty() {
            return Err(CliError::Usage("levels: at least one level is required".into()));
        }
        for &n in &self.levels {
            if !(1..=MAX_LEVEL).contains(&n) {
                return Err(CliError::Usage(format!(
                    "levels: {n} outside supported range 1..={MAX_LEVEL}"
                )));
            }
        }
        match self.mode {
            Mode::Montecarlo | Mode::Tower => match self.trials {
                None => {
                    return Err(CliError::Usage(format!(
                        "trials: required for mode {}",
                        self.mode.as_str()
                    )))
                }
                Some(0) => return Err(CliError::Usage("trials: must be at least 1".into())),
                Some(t) if t > MAX_TRIALS => {
                    return Err(CliError::Resource(format!(
                        "trials = {t} exceeds limit {MAX_TRIALS}"
                    )))
                }
                Some(_) => {}
            },
            _ => {}
        }
        if self.mode == Mode::Isotropic {
            for &n in &self.levels {
                let shape = SpaceShape::new(p, n, self.shape.clone())
                    .map_err(|e| match e.is_resource() {
                        true => CliError::Resource(e.to_string()),
                        false => CliError::Usage(format!("levels/shape: {e}")),
                    })?;
                if shape.dim() > ENUMERATION_DIM_LIMIT {
                    return Err(CliError::Resource(format!(
                        "pairing space dimension {} exceeds enumeration limit {ENUMERATION_DIM_LIMIT}",
                        shape.dim()
                    )));
                }
            }
        } else if !self.shape.is_empty() {
            return Err(CliError::Usage("shape: only meaningful in isotropic mode".into()));
        }
        if self.mode == Mode::Tower {
            for &n in &self.levels {
                let count = omega_model::submodule::count_maximal(p, n)?;
                if count > u64::MAX as u128 {
                    return Err(CliError::Resource(format!(
                        "maximal submodule count {count} at level {n} exceeds sampler range"
                    )));
                }
            }
        }
        if self.mode == Mode::Exhaustive {
            // the closed form must fit even where the cross-check is skipped
            for &n in &self.levels {
                omega_model::submodule::count_maximal(p, n)?;
            }
        }
        Ok(())
    }

    pub fn csv_path(&self) -> PathBuf {
        with_suffix(&self.output, "csv")
    }

    pub fn json_path(&self) -> PathBuf {
        with_suffix(&self.output, "json")
    }
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Command-line flags. Every field is optional so that a config file can
/// supply it; flags win over the file.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "omega-experiments", version, about = "Experiments on maximal submodules of Omega_n^2 and isotropic submodules of the block pairing space")]
pub struct Flags {
    /// Experiment mode.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Odd prime p (3..=97).
    #[arg(long)]
    pub prime: Option<u32>,
    /// Comma-separated truncation levels.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    /// Number of Monte-Carlo trials (montecarlo, tower).
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated torsion block levels (isotropic mode).
    #[arg(long, value_delimiter = ',')]
    pub shape: Option<Vec<usize>>,
    /// Output path prefix; `.csv` / `.json` are appended.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Plain `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads, 0 for automatic. Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Fill the runtime_ms CSV column (makes CSV output run-dependent).
    #[arg(long)]
    pub record_runtime: bool,
}

/// A fully resolved invocation.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub config: ExperimentConfig,
    pub threads: usize,
}

impl Flags {
    pub fn resolve(&self) -> Result<Invocation, CliError> {
        let mut file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                parse_config_file(&text)?
            }
            None => Flags::default(),
        };
        macro_rules! layer {
            ($($f:ident),*) => { $( if self.$f.is_some() { file.$f = self.$f.clone(); } )* };
        }
        layer!(mode, prime, levels, trials, seed, shape, output, format, threads);
        file.record_runtime |= self.record_runtime;

        let config = ExperimentConfig {
            mode: file.mode.ok_or_else(|| CliError::Usage("mode: required".into()))?,
            p: file.prime.ok_or_else(|| CliError::Usage("prime: required".into()))?,
            levels: file.levels.unwrap_or_default(),
            trials: file.trials,
            seed: file.seed.unwrap_or(0),
            shape: file.shape.unwrap_or_default(),
            output: file.output.unwrap_or_else(|| PathBuf::from("omega-report")),
            format: file.format.unwrap_or_default(),
            record_runtime: file.record_runtime,
        };
        config.validate()?;
        Ok(Invocation {
            config,
            threads: file.threads.unwrap_or(0),
        })
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>, CliError> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{key}: '{s}' is not a non-negative integer")))
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{key}: '{value}' is not a valid number")))
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<Flags, CliError> {
    let mut f = Flags::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key = value",
                lineno + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "mode" => f.mode = Some(Mode::parse(value)?),
            "prime" | "p" => f.prime = Some(parse_num(key, value)?),
            "levels" => f.levels = Some(parse_list(key, value)?),
            "trials" => f.trials = Some(parse_num(key, value)?),
            "seed" => f.seed = Some(parse_num(key, value)?),
            "shape" => f.shape = Some(parse_list(key, value)?),
            "output" => f.output = Some(PathBuf::from(value)),
            "format" => f.format = Some(Format::parse(value)?),
            "threads" => f.threads = Some(parse_num(key, value)?),
            "record_runtime" => {
                f.record_runtime = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(CliError::Usage(format!("record_runtime: '{value}' is not a boolean"))),
                }
            }
            other => {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(args: &[&str]) -> Flags {
        Flags::try_parse_from(std::iter::once("omega-experiments").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_resolve() {
        let inv = flags(&["--mode", "count", "--prime", "3", "--levels", "1,2,3"])
            .resolve()
            .unwrap();
        assert_eq!(inv.config.levels, vec![1, 2, 3]);
        assert_eq!(inv.config.format, Format::Csv);
        assert_eq!(inv.threads, 0);
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# comment\nmode = montecarlo\nprime = 5\nlevels = 2\ntrials = 100\nseed = 9\nformat = both\n",
        )
        .unwrap();
        let inv = flags(&["--config", path.to_str().unwrap(), "--seed", "11"])
            .resolve()
            .unwrap();
        assert_eq!(inv.config.mode, Mode::Montecarlo);
        assert_eq!(inv.config.p, 5);
        assert_eq!(inv.config.seed, 11);
        assert_eq!(inv.config.format, Format::Both);
    }

    #[test]
    fn usage_errors_name_the_field() {
        let cases: &[(&[&str], &str)] = &[
            (&["--prime", "3", "--levels", "1"], "mode"),
            (&["--mode", "count", "--levels", "1"], "prime"),
            (&["--mode", "count", "--prime", "4", "--levels", "1"], "prime"),
            (&["--mode", "count", "--prime", "3"], "levels"),
            (&["--mode", "count", "--prime", "3", "--levels", "13"], "levels"),
            (&["--mode", "montecarlo", "--prime", "3", "--levels", "2"], "trials"),
            (&["--mode", "montecarlo", "--prime", "3", "--levels", "2", "--trials", "0"], "trials"),
            (&["--mode", "isotropic", "--prime", "3", "--levels", "2"], "levels/shape"),
            (&["--mode", "count", "--prime", "3", "--levels", "2", "--shape", "1"], "shape"),
        ];
        for (args, field) in cases {
            match flags(args).resolve() {
                Err(CliError::Usage(msg)) => assert!(msg.starts_with(field), "{msg}"),
                other => panic!("{args:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn resource_errors() {
        let r = flags(&["--mode", "isotropic", "--prime", "3", "--levels", "3", "--shape", "3,1"]).resolve();
        assert!(matches!(r, Err(CliError::Resource(_))));
    }

    #[test]
    fn bad_config_lines() {
        assert!(parse_config_file("mode count").is_err());
        assert!(parse_config_file("colour = red").is_err());
        assert!(parse_config_file("levels = 1,x").is_err());
        assert!(parse_config_file("mode = sideways").is_err());
    }
}
