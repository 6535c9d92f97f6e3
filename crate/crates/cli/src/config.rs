//! TOML run configuration and its merge with command-line overrides.

use std::path::Path;

use ciaudit_core::dataset::{Aggregation, Normalization, RangeClass};

use crate::run::CliError;

/// On-disk configuration for `audit` and `plotdata`. Only the weights are
/// mandatory; everything else has a default and can be overridden per run
/// from the command line.
#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub weights: Vec<f64>,
    #[serde(default)]
    pub normalization: Option<String>,
    #[serde(default)]
    pub aggregation: Option<String>,
    #[serde(default)]
    pub range_class: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Importance-ratio targets S_i/S_1 for i = 2..k; when present the audit
    /// report carries an inverse-weights block.
    #[serde(default)]
    pub targets: Option<Vec<f64>>,
}

/// Configuration after file values and command-line overrides are merged.
#[derive(Debug, Clone)]
pub struct Effective {
    pub weights: Vec<f64>,
    pub normalization: Normalization,
    pub aggregation: Aggregation,
    /// Declared range for every column; `None` infers one per column.
    pub range_class: Option<RangeClass>,
    pub seed: u64,
    pub targets: Option<Vec<f64>>,
}

/// Command-line overrides shared by `audit` and `plotdata`.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub normalization: Option<String>,
    pub aggregation: Option<String>,
    pub seed: Option<u64>,
    pub targets: Option<String>,
}

pub fn parse_normalization(s: &str) -> Result<Normalization, CliError> {
    match s {
        "minmax" => Ok(Normalization::MinMax),
        "standardize" => Ok(Normalization::Standardize),
        "none" => Ok(Normalization::None),
        other => Err(CliError::Usage(format!(
            "unknown normalization {other:?}; expected minmax, standardize, or none"
        ))),
    }
}

pub fn parse_aggregation(s: &str) -> Result<Aggregation, CliError> {
    match s {
        "linear" => Ok(Aggregation::Linear),
        "geometric" => Ok(Aggregation::Geometric),
        other => Err(CliError::Usage(format!(
            "unknown aggregation {other:?}; expected linear or geometric"
        ))),
    }
}

pub fn parse_range_class(s: &str) -> Result<RangeClass, CliError> {
    match s {
        "unit" => Ok(RangeClass::Unit),
        "ten" => Ok(RangeClass::Ten),
        "hundred" => Ok(RangeClass::Hundred),
        other => Err(CliError::Usage(format!(
            "unknown range_class {other:?}; expected unit, ten, or hundred"
        ))),
    }
}

pub fn parse_targets(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|piece| {
            let trimmed = piece.trim();
            trimmed.parse::<f64>().map_err(|_| {
                CliError::Usage(format!("cannot parse target ratio {trimmed:?} as a number"))
            })
        })
        .collect()
}

pub fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

pub fn effective(file: &ConfigFile, over: &Overrides) -> Result<Effective, CliError> {
    let normalization = match over
        .normalization
        .as_deref()
        .or(file.normalization.as_deref())
    {
        Some(s) => parse_normalization(s)?,
        None => Normalization::MinMax,
    };
    let aggregation = match over.aggregation.as_deref().or(file.aggregation.as_deref()) {
        Some(s) => parse_aggregation(s)?,
        None => Aggregation::Linear,
    };
    let range_class = match file.range_class.as_deref() {
        Some(s) => Some(parse_range_class(s)?),
        None => None,
    };
    let targets = match over.targets.as_deref() {
        Some(s) => Some(parse_targets(s)?),
        None => file.targets.clone(),
    };
    Ok(Effective {
        weights: file.weights.clone(),
        normalization,
        aggregation,
        range_class,
        seed: over.seed.or(file.seed).unwrap_or(0),
        targets,
    })
}

/// Synthetic-panel description for `gen`.
#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub n: usize,
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub fn load_gen_spec(path: &Path) -> Result<GenSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

pub fn normalization_name(n: Normalization) -> &'static str {
    match n {
        Normalization::MinMax => "minmax",
        Normalization::Standardize => "standardize",
        Normalization::None => "none",
    }
}

pub fn aggregation_name(a: Aggregation) -> &'static str {
    match a {
        Aggregation::Linear => "linear",
        Aggregation::Geometric => "geometric",
    }
}

pub fn range_class_name(rc: &RangeClass) -> String {
    match rc {
        RangeClass::Unit => "unit".to_string(),
        RangeClass::Ten => "ten".to_string(),
        RangeClass::Hundred => "hundred".to_string(),
        RangeClass::Custom { lo, hi } => format!("custom[{lo}, {hi}]"),
    }
}
