//! Run configuration: a flat TOML file with dotted sections.
//!
//! ```toml
//! order = 2
//! f = "x0"
//! g = "2 + tanh(x0)"
//! initial = [0.1, 0.0]
//! horizon = 1.0
//! step = 1e-3
//!
//! alpha.count = 99
//! alpha.lo = 0.01
//!
//! oracle.delta = 0.05
//! oracle.seed = 42
//! output.directory = "runs/tanh"
//! ```
//!
//! Only `order`, `f`, `g`, `initial`, `horizon` and `step` are required;
//! every other key has a default. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ude::{alpha_grid, validate_spec, AlphaGridSpec, RawSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Parse(String),
    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid { line: Option<usize>, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckConfig {
    pub samples: usize,
    pub eps: f64,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            samples: 256,
            eps: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub delta: f64,
    pub n_paths: usize,
    pub segments: usize,
    pub seed: u64,
    /// Alpha values to test; both sides are run for each.
    pub alphas: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            delta: 0.05,
            n_paths: 200,
            segments: 32,
            seed: 0,
            alphas: vec![0.2, 0.8],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: None,
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub order: usize,
    pub f: String,
    pub g: String,
    pub initial: Vec<f64>,
    pub horizon: f64,
    pub step: f64,
    #[serde(default)]
    pub alpha: AlphaGridSpec,
    #[serde(default)]
    pub check: CheckConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// 1-based line on which `key` (possibly dotted) is assigned.
pub fn key_line(text: &str, key: &str) -> Option<usize> {
    let (section, leaf) = match key.rsplit_once('.') {
        Some((s, l)) => (Some(s), l),
        None => (None, key),
    };
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = Some(name.trim().to_string());
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else {
            continue;
        };
        let lhs = lhs.trim();
        let full = match &current {
            Some(s) => format!("{s}.{lhs}"),
            None => lhs.to_string(),
        };
        let wanted = match section {
            Some(s) => format!("{s}.{leaf}"),
            None => leaf.to_string(),
        };
        if full.replace(' ', "") == wanted {
            return Some(i + 1);
        }
    }
    None
}

fn set_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), ConfigError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().unwrap();
    let mut cursor = table;
    for part in parts {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry.as_table_mut().ok_or_else(|| ConfigError::Invalid {
            line: None,
            message: format!("override `{key}`: `{part}` is not a section"),
        })?;
    }
    cursor.insert(leaf.to_string(), value);
    Ok(())
}

/// Parses a `key=value` override. Expression keys (`f`, `g`) take the value
/// verbatim; anything else is read as a TOML value, falling back to a string.
fn parse_override(item: &str) -> Result<(String, toml::Value), ConfigError> {
    let (key, value) = item.split_once('=').ok_or_else(|| ConfigError::Invalid {
        line: None,
        message: format!("override `{item}` is not of the form key=value"),
    })?;
    let (key, value) = (key.trim(), value.trim());
    if key == "f" || key == "g" {
        return Ok((key.to_string(), toml::Value::String(value.to_string())));
    }
    let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

impl RunConfig {
    /// Parses and validates a config, applying `key=value` overrides first.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        for item in overrides {
            let (key, value) = parse_override(item)?;
            set_dotted(&mut table, &key, value)?;
        }
        let config: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        config.validate(text)?;
        Ok(config)
    }

    /// Loads a TOML config, or the config echoed in a previous `run.json`.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if path.extension().is_some_and(|e| e == "json") {
            let run: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
            let echoed = run.get("config").cloned().ok_or_else(|| {
                ConfigError::Parse(format!("{} has no `config` section", path.display()))
            })?;
            let config: RunConfig =
                serde_json::from_value(echoed).map_err(|e| ConfigError::Parse(e.to_string()))?;
            let text = toml::to_string(&config).map_err(|e| ConfigError::Parse(e.to_string()))?;
            return Self::parse(&text, overrides);
        }
        Self::parse(&text, overrides)
    }

    pub fn raw_spec(&self) -> RawSpec {
        RawSpec {
            order: self.order,
            f: self.f.clone(),
            g: self.g.clone(),
            initial: self.initial.clone(),
            horizon: self.horizon,
            step: self.step,
        }
    }

    fn validate(&self, text: &str) -> Result<(), ConfigError> {
        let report = validate_spec(&self.raw_spec());
        if let Some(issue) = report.issues.first() {
            let extra = report.issues.len() - 1;
            let mut message = format!("`{}`: {}", issue.field, issue.message);
            if extra > 0 {
                message.push_str(&format!(" (and {extra} more issue(s))\n{report}"));
            }
            return Err(ConfigError::Invalid {
                line: key_line(text, issue.field),
                message,
            });
        }
        let invalid = |key: &str, message: String| ConfigError::Invalid {
            line: key_line(text, key),
            message,
        };
        alpha_grid(&self.alpha).map_err(|e| invalid("alpha.count", e.to_string()))?;
        if self.check.samples == 0 {
            return Err(invalid("check.samples", "check.samples must be >= 1".into()));
        }
        if !(self.check.eps > 0.0) {
            return Err(invalid("check.eps", "check.eps must be > 0".into()));
        }
        let o = &self.oracle;
        if !(o.delta > 0.0 && o.delta < 0.5) {
            return Err(invalid("oracle.delta", format!("oracle.delta must lie in (0, 0.5), got {}", o.delta)));
        }
        if o.n_paths == 0 || o.segments == 0 {
            return Err(invalid(
                "oracle.n_paths",
                "oracle.n_paths and oracle.segments must be >= 1".into(),
            ));
        }
        if let Some(a) = o
            .alphas
            .iter()
            .find(|&&a| !(a - o.delta > 0.0 && a + o.delta < 1.0))
        {
            return Err(invalid(
                "oracle.alphas",
                format!("oracle alpha {a} +/- delta leaves (0, 1)"),
            ));
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output.formats", "output.formats must not be empty".into()));
        }
        Ok(())
    }
}
