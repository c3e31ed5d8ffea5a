//! Sweep settings: command-line flags layered over an optional TOML file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use beamtrain::{Error, GainModel, Resolution, ScoreMode, SweepConfig};
use clap::{Args, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Score {
    AllPairs,
    PerPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gains {
    /// |alpha| = 1 with uniform phase.
    UnitModulus,
    /// i.i.d. CN(0, 1) (Rayleigh amplitude).
    ComplexGaussian,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    F32,
    #[default]
    F64,
}

impl From<Score> for ScoreMode {
    fn from(s: Score) -> Self {
        match s {
            Score::AllPairs => ScoreMode::AllPairs,
            Score::PerPath => ScoreMode::PerPath,
        }
    }
}

impl From<Gains> for GainModel {
    fn from(g: Gains) -> Self {
        match g {
            Gains::UnitModulus => GainModel::UnitModulus,
            Gains::ComplexGaussian => GainModel::ComplexGaussian,
        }
    }
}

/// Per-axis size: `16` means 16x16, `16x32` means az=16, el=32.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisPair(pub usize, pub usize);

impl FromStr for AxisPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| format!("invalid size `{s}`: expected N or NxM with positive integers"))
        };
        match s.split_once(['x', 'X']) {
            Some((a, e)) => Ok(AxisPair(parse(a)?, parse(e)?)),
            None => parse(s).map(|n| AxisPair(n, n)),
        }
    }
}

impl fmt::Display for AxisPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.0, self.1)
    }
}

fn parse_resolution(s: &str) -> Result<Resolution, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// TOML file with the same keys as these flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_stop: Option<f64>,
    #[arg(long)]
    pub snr_step: Option<f64>,
    /// ADC resolution: 1, 2 or inf. Repeatable.
    #[arg(long, value_parser = parse_resolution)]
    pub bits: Vec<Resolution>,
    /// Number of paths L. Repeatable.
    #[arg(long)]
    pub paths: Vec<usize>,
    /// Angular grid per axis, `G` or `GazxGel`. Repeatable.
    #[arg(long)]
    pub grid: Vec<AxisPair>,
    /// Antennas per axis, `N` or `NazxNel`.
    #[arg(long)]
    pub array: Option<AxisPair>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a JSON summary next to the CSV (same stem, `.json`).
    #[arg(long)]
    pub json: bool,
    #[arg(long, value_enum)]
    pub score: Option<Score>,
    #[arg(long, value_enum)]
    pub gains: Option<Gains>,
    #[arg(long, value_enum)]
    pub precision: Option<Precision>,
}

/// A TOML value that may be written as a number or a string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Token {
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Int(i) => write!(f, "{i}"),
            Token::Float(x) => write!(f, "{x}"),
            Token::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(t) => vec![t],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileSettings {
    snr_start: Option<f64>,
    snr_stop: Option<f64>,
    snr_step: Option<f64>,
    bits: Option<OneOrMany<Token>>,
    paths: Option<OneOrMany<usize>>,
    grid: Option<OneOrMany<Token>>,
    array: Option<Token>,
    trials: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    json: Option<bool>,
    score: Option<Score>,
    gains: Option<Gains>,
    precision: Option<Precision>,
}

fn load_file(path: &Path) -> beamtrain::Result<FileSettings> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))
}

fn tokens<T: FromStr>(v: Option<OneOrMany<Token>>, key: &str) -> beamtrain::Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    v.map(OneOrMany::into_vec)
        .unwrap_or_default()
        .into_iter()
        .map(|t| {
            t.to_string()
                .parse::<T>()
                .map_err(|e| Error::Config(format!("`{key}`: {e}")))
        })
        .collect()
}

/// First non-empty list wins.
fn pick<T>(cli: Vec<T>, file: Vec<T>, default: Vec<T>) -> Vec<T> {
    [cli, file].into_iter().find(|v| !v.is_empty()).unwrap_or(default)
}

fn snr_range(start: f64, stop: f64, step: f64) -> beamtrain::Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::Config("SNR range values must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::Config(format!("snr-step must be positive, got {step}")));
    }
    if stop < start {
        return Err(Error::Config(format!("snr-stop {stop} is below snr-start {start}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// A fully resolved `sweep` invocation.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub config: SweepConfig,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub precision: Precision,
}

impl SweepArgs {
    pub fn resolve(self) -> beamtrain::Result<SweepPlan> {
        let file = match &self.config {
            Some(p) => load_file(p)?,
            None => FileSettings::default(),
        };
        let defaults = SweepConfig::default();
        let (d_start, d_stop) = (defaults.snr_db[0], *defaults.snr_db.last().unwrap_or(&0.0));
        let snr_db = snr_range(
            self.snr_start.or(file.snr_start).unwrap_or(d_start),
            self.snr_stop.or(file.snr_stop).unwrap_or(d_stop),
            self.snr_step.or(file.snr_step).unwrap_or(5.0),
        )?;

        let resolutions = pick(self.bits, tokens(file.bits, "bits")?, defaults.resolutions);
        let paths = pick(
            self.paths,
            file.paths.map(OneOrMany::into_vec).unwrap_or_default(),
            defaults.paths,
        );
        let as_tuples = |v: Vec<AxisPair>| v.into_iter().map(|g| (g.0, g.1)).collect();
        let grids = pick(
            as_tuples(self.grid),
            as_tuples(tokens(file.grid, "grid")?),
            defaults.grids,
        );
        let file_array = file
            .array
            .map(|t| {
                t.to_string()
                    .parse::<AxisPair>()
                    .map_err(|e| Error::Config(format!("`array`: {e}")))
            })
            .transpose()?;
        let array = self.array.or(file_array).map(|a| (a.0, a.1)).unwrap_or(defaults.array);

        let config = SweepConfig {
            snr_db,
            resolutions,
            paths,
            grids,
            array,
            trials: self.trials.or(file.trials).unwrap_or(defaults.trials),
            base_seed: self.seed.or(file.seed).unwrap_or(defaults.base_seed),
            score: self.score.or(file.score).map(Into::into).unwrap_or(defaults.score),
            gains: self.gains.or(file.gains).map(Into::into).unwrap_or(defaults.gains),
            ..defaults
        };
        config.validate()?;

        let out = self.out.or(file.out);
        let json = self.json || file.json.unwrap_or(false);
        if json && out.is_none() {
            return Err(Error::Config(
                "--json needs --out to place the summary next to the CSV".into(),
            ));
        }
        Ok(SweepPlan {
            config,
            out,
            json,
            precision: self.precision.or(file.precision).unwrap_or_default(),
        })
    }
}
