//! The record written beside each run's outputs. It holds the resolved
//! configuration and the parsed command, which is enough to repeat the run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::args::Command;
use crate::commands::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub outputs: Vec<String>,
    /// Resolved configuration in the `key = value` file format.
    pub config: String,
    pub command: Command,
}

impl Manifest {
    pub fn new(command: &Command, config: String, outputs: Vec<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            outputs,
            config,
            command: command.clone(),
        }
    }

    pub fn file_name(command: &Command) -> String {
        format!("{}.manifest.toml", command.name())
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Internal(format!("cannot encode manifest: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read manifest {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("manifest {}: {e}", path.display())))
    }
}
