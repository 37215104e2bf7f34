use std::path::{Path, PathBuf};

use clap::ValueEnum;
use cosetvir::arith::DEFAULT_MAX_PRECISION;
use cosetvir::certify::DEFAULT_MAX_K;
use cosetvir::{Error, Result};
use serde::Deserialize;

pub const CACHE_ENV: &str = "COSETVIR_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Json,
    Table,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub max_k: u32,
    pub max_precision_bits: u32,
    pub cache_path: Option<PathBuf>,
    pub output: Output,
}

impl Default for Config {
    fn default() -> Self {
        Config { max_k: DEFAULT_MAX_K, max_precision_bits: DEFAULT_MAX_PRECISION, cache_path: None, output: Output::Table }
    }
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn validate(self) -> Result<Config> {
        if self.max_k < 1 {
            return Err(Error::InvalidConfig("max_k must be at least 1".into()));
        }
        if self.max_precision_bits < 64 {
            return Err(Error::InvalidConfig(format!("max_precision_bits = {} is below 64", self.max_precision_bits)));
        }
        Ok(self)
    }
}
