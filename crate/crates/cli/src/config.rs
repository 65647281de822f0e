//! Experiment configuration: a JSON file merged with command-line flags.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration; exit code 2.
    #[error("configuration error: {0}")]
    Schema(String),
    /// A computation failed or a criterion did not pass; exit code 1.
    #[error("{0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            _ => 1,
        }
    }
}

impl From<luttinger_core::Error> for CliError {
    fn from(e: luttinger_core::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

pub fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Specfun,
    Kernel,
    Propagate,
    Resolvent,
    Spectrum,
    Scatter,
    Classical,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Specfun => "specfun",
            Command::Kernel => "kernel",
            Command::Propagate => "propagate",
            Command::Resolvent => "resolvent",
            Command::Spectrum => "spectrum",
            Command::Scatter => "scatter",
            Command::Classical => "classical",
            Command::Selftest => "selftest",
        }
    }
}

/// Shape of a `--config` file. Every field is optional; flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    #[serde(default)]
    pub params: Map<String, Value>,
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| schema(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| schema(format!("{}: {e}", path.display())))
    }
}

/// The merged configuration a command runs with.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub command: Command,
    pub params: Map<String, Value>,
    pub output_path: PathBuf,
    pub seed: u64,
    pub tol: Option<f64>,
    pub threads: usize,
}

/// `key=value` with the value read as JSON, or as a plain string if that fails.
pub fn parse_param(s: &str) -> Result<(String, Value), CliError> {
    let (k, v) = s.split_once('=').ok_or_else(|| schema(format!("parameter `{s}` is not of the form key=value")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(schema(format!("parameter `{s}` has an empty key")));
    }
    let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.to_string(), v))
}

impl Experiment {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(schema(format!("tol must lie in (0, 1), got {t}")));
            }
        }
        if self.threads == 0 {
            return Err(schema("threads must be at least 1"));
        }
        Ok(())
    }

    /// Typed parameters of the command; unknown keys are rejected.
    pub fn typed_params<P: DeserializeOwned>(&self) -> Result<P, CliError> {
        serde_json::from_value(Value::Object(self.params.clone()))
            .map_err(|e| schema(format!("{} parameters: {e}", self.command.name())))
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// Everything that determines the output, hashed for provenance.
#[derive(Debug, Serialize)]
pub struct Effective<'a, P: Serialize> {
    pub command: &'static str,
    pub params: &'a P,
    pub seed: u64,
    pub tol: f64,
}

impl<P: Serialize> Effective<'_, P> {
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form (keys sorted).
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.to_value()).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
