//! Optional `key = value` settings file. Command-line flags take precedence.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::io::Format;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub chains: Option<usize>,
    pub burn: Option<usize>,
    pub keep: Option<usize>,
    pub thin: Option<usize>,
    pub threads: Option<usize>,
    pub adapt_target: Option<f64>,
    pub fix_nu: Option<f64>,
    pub all_bids: Option<bool>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub categories: Option<usize>,
    pub auctions: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(e.message().to_string()))
    }
}
