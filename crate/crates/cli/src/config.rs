//! Experiment configuration: JSON file form, flag overrides, defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, ValueEnum};
use mobwalk::bpwm::Family;
use mobwalk::checks::Suite;
use mobwalk::env::expand_p;
use mobwalk::{CookieSpec, EnvSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable consulted when no seed is given anywhere else.
pub const SEED_VAR: &str = "MOBWALK_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    /// Run k-minimum walks and report X_t / t
    Simulate,
    /// Theory vs empirical transience / ballisticity table
    Phase,
    /// Speed estimators and the harmonic speed relation
    Speed,
    /// Survival of the z-process
    Transience,
    /// z-process or downcrossings against the branching process
    Coupling,
    /// Exact oracle suites on finite fixtures
    Check,
    /// Branching process with migration: pmf or classification
    Bpwm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    #[default]
    Z,
    Downcrossings,
}

#[derive(Debug, Parser)]
#[command(
    name = "mobwalk",
    about = "Excited random walks and k-particle mob walks"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: CommandKind,

    #[command(flatten)]
    pub flags: ExperimentConfig,
}

/// Every setting of one experiment. All fields are optional so that a
/// config file and command-line flags can be layered; flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// JSON experiment config; flags override its fields
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,

    /// Inline environment (file form only)
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub env: Option<EnvSpec>,

    /// JSON environment file for `simulate`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub env_file: Option<PathBuf>,

    /// Number of cookies per site
    #[arg(long = "M")]
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,

    /// Cookie strengths: one value (repeated M times) or M values
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,

    /// Step horizon per replica
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,

    /// Site horizon of the z-process
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,

    /// Replicas of the speed estimator inside `phase`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed_reps: Option<u64>,

    /// Largest tolerated fraction of censored replicas before exit code 2
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_censored: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// Long-format CSV of plottable series
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixtures: Option<u64>,

    /// Comma-separated suites or `all`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,

    #[arg(long, value_parser = parse_family)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,

    /// Migration parameter; a comma list for downcrossing candidates
    #[arg(long = "N", value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<i64>>,

    /// Initial population of the branching process
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<u64>,

    /// Offspring index of the pmf to print
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingKind>,

    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub classify: bool,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: mobwalk::Error| e.to_string())
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Fields set in `top` replace those of `self`.
    pub fn overlay(mut self, top: &ExperimentConfig) -> Self {
        overlay!(self, top; command, env, env_file, m, p, k, kmax, reps, steps, sites,
            speed_reps, max_censored, seed, workers, out, plot, format, fixtures, suite,
            family, n, y, j, coupling);
        self.classify |= top.classify;
        self
    }

    /// Flags layered over the file named by `--config`, if any.
    pub fn resolve(flags: ExperimentConfig) -> Result<Self, CliError> {
        match &flags.config {
            Some(path) => Ok(Self::load(path)?.overlay(&flags)),
            None => Ok(flags),
        }
    }

    /// Explicit seed, else `MOBWALK_SEED`, else 0.
    pub fn seed_or(&self, env_value: Option<&str>) -> Result<u64, CliError> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match env_value {
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{SEED_VAR}={v:?} is not a u64"))),
            None => Ok(0),
        }
    }

    pub fn cookie_spec(&self) -> Result<CookieSpec, CliError> {
        if let Some(EnvSpec::Sampled { m, p, .. }) = &self.env {
            if self.m.is_none() && self.p.is_none() {
                return Ok(CookieSpec::new(expand_p(*m, p)?)?);
            }
        }
        let p = self
            .p
            .as_ref()
            .ok_or_else(|| CliError::Config("--p is required".into()))?;
        let m = self.m.unwrap_or(p.len());
        Ok(CookieSpec::new(expand_p(m, p)?)?)
    }

    pub fn k_or(&self, default: usize) -> Result<usize, CliError> {
        let k = self.k.unwrap_or(default);
        if k == 0 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        Ok(k)
    }

    /// `--kmax`, falling back to `--k`.
    pub fn kmax_or(&self, default: usize) -> Result<usize, CliError> {
        let k = self.kmax.or(self.k).unwrap_or(default);
        if k == 0 {
            return Err(CliError::Config("kmax must be at least 1".into()));
        }
        Ok(k)
    }

    pub fn suites(&self) -> Result<Vec<Suite>, CliError> {
        Ok(Suite::parse_list(self.suite.as_deref().unwrap_or("all"))?)
    }

    pub fn single_n(&self, default: i64) -> Result<i64, CliError> {
        match self.n.as_deref() {
            None => Ok(default),
            Some([n]) => Ok(*n),
            Some(_) => Err(CliError::Config("--N takes a single value here".into())),
        }
    }

    pub fn max_censored(&self) -> f64 {
        self.max_censored.unwrap_or(0.05)
    }
}
