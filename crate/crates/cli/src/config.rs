//! Subcommand parameters. Every field can come from a flag or from the JSON
//! config file; flags win.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Via {
    Direct,
    Commutant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum LogBase {
    #[value(name = "e")]
    #[serde(rename = "e")]
    Natural,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
}

/// Fills unset fields of `self` from `file`.
pub trait Merge {
    fn merge(self, file: Self) -> Self;
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ChainEntropyArgs {
    /// Largest site index N (the chain has N + 1 sites)
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Krawtchouk parameter p in (0, 1)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Subsystem is sites 0..=ell
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    /// Levels 0..=K are occupied
    #[arg(long = "K")]
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Occupy levels 0..=⌊(N−1)/2⌋ instead of giving K
    #[arg(long)]
    #[serde(default)]
    pub half_filling: bool,
    /// Emit every cut ell = 0..N−1
    #[arg(long)]
    #[serde(default)]
    pub sweep_ell: bool,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub via: Option<Via>,
    /// Chain file {"J": [...], "B": [...]} used instead of --N/--p
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_json: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_base: Option<LogBase>,
}

impl Merge for ChainEntropyArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            n: self.n.or(file.n),
            p: self.p.or(file.p),
            ell: self.ell.or(file.ell),
            k: self.k.or(file.k),
            half_filling: self.half_filling || file.half_filling,
            sweep_ell: self.sweep_ell || file.sweep_ell,
            via: self.via.or(file.via),
            chain_json: self.chain_json.or(file.chain_json),
            log_base: self.log_base.or(file.log_base),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CommutantArgs {
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[arg(long = "K")]
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl Merge for CommutantArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            n: self.n.or(file.n),
            p: self.p.or(file.p),
            ell: self.ell.or(file.ell),
            k: self.k.or(file.k),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CubeEntropyArgs {
    /// Hypercube dimension
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Subsystem is the ball of Hamming radius ell around vertex 0
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    /// At even d, also occupy the zero eigenvalue of the adjacency matrix
    #[arg(long)]
    #[serde(default)]
    pub include_zero: bool,
    /// Occupied adjacency eigenvalues, comma separated (default: negative half)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub via: Option<Via>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_base: Option<LogBase>,
}

impl Merge for CubeEntropyArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            d: self.d.or(file.d),
            ell: self.ell.or(file.ell),
            include_zero: self.include_zero || file.include_zero,
            se: self.se.or(file.se),
            via: self.via.or(file.via),
            log_base: self.log_base.or(file.log_base),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SchemeVerifyArgs {
    /// JSON file {"matrices": [...]} with one 0/1 matrix per relation
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Use the distance matrices of the d-cube instead of a file
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamming: Option<usize>,
}

impl Merge for SchemeVerifyArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            input: self.input.or(file.input),
            hamming: self.hamming.or(file.hamming),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScalingFitArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Odd chain sizes N, comma separated
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
    /// Fit data generated from the scaling model instead of computed chains
    #[arg(long)]
    #[serde(default)]
    pub synthetic: bool,
    /// Log coefficient of the synthetic data
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic_c: Option<f64>,
    /// Constant of the synthetic data
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic_a: Option<f64>,
    /// Where to write the residual table (CSV)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<PathBuf>,
}

impl Merge for ScalingFitArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            p: self.p.or(file.p),
            grid: self.grid.or(file.grid),
            synthetic: self.synthetic || file.synthetic,
            synthetic_c: self.synthetic_c.or(file.synthetic_c),
            synthetic_a: self.synthetic_a.or(file.synthetic_a),
            residuals: self.residuals.or(file.residuals),
        }
    }
}

/// Reads the parameter object for `command` from a config file. A top-level
/// "command" key, when present, must name the same subcommand.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>, command: &str) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Some(map) = value.as_object_mut() else {
        return Err(CliError::Usage("config must be a JSON object".into()));
    };
    if let Some(named) = map.remove("command") {
        if named.as_str() != Some(command) {
            return Err(CliError::Usage(format!("config is for command {named}, not {command:?}")));
        }
    }
    serde_json::from_value(value).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}
