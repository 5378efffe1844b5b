use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

/// Optional TOML file mirroring the command-line flags. Flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub d_list: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub n_max: Option<usize>,
    pub deg_max: Option<usize>,
    pub safety: Option<f64>,
    pub count: Option<usize>,
    pub restarts: Option<usize>,
    pub d_max: Option<usize>,
    pub gamma_lo: Option<f64>,
    pub gamma_hi: Option<f64>,
    pub step: Option<f64>,
    pub graph: Option<PathBuf>,
    pub fields: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}
