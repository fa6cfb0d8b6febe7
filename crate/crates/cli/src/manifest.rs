use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Record of one invocation. Data files share the manifest's stem, e.g.
/// `sweep.csv` belongs to `sweep.manifest.json`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, exactly as given.
    pub argv: Vec<String>,
    /// Fully resolved parameters, defaults included.
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub threads: usize,
    pub version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<PathBuf>,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

pub fn manifest_path(out: &Path, command: &str) -> PathBuf {
    out.join(format!("{}.manifest.json", command.replace('-', "_")))
}

impl RunManifest {
    pub fn write(&self, out: &Path) -> Result<PathBuf, CliError> {
        let path = manifest_path(out, &self.command);
        fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: not a run manifest: {e}", path.display())))
    }
}
