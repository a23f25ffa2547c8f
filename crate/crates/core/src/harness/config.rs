use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Budgets and parallelism, read from a TOML file of plain `key = value`
/// lines. Missing keys keep their defaults; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Largest group order accepted for enumeration.
    pub max_order: usize,
    /// Largest number of candidate pairs one enumeration may visit.
    pub max_pairs: u64,
    /// Largest candidate count when listing automorphisms.
    pub max_automorphism_candidates: u64,
    /// Worker threads; 0 uses every core.
    pub parallelism: usize,
    /// Largest group order the statement suite enumerates exhaustively.
    pub suite_max_order: usize,
    /// Random samples for the bounds suite.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_order: 16,
            max_pairs: 50_000_000,
            max_automorphism_candidates: 1_000_000,
            parallelism: 0,
            suite_max_order: 12,
            samples: 10_000,
            seed: 0x5eed,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Config::from_toml(&text)
    }
}
