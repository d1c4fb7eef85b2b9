//! TOML configuration file. Command-line flags override every key.

use std::path::Path;

use serde::Deserialize;

use crate::output::Format;
use crate::CliError;

/// Recognized keys; unknown keys are rejected.
///
/// ```toml
/// n = 3
/// L = 2.0
/// grid = 4096
/// k_max = 128
/// margin = 2
/// format = "csv"
/// round = 6
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<u32>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub grid: Option<usize>,
    pub k_max: Option<usize>,
    pub margin: Option<usize>,
    pub format: Option<Format>,
    pub round: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}
