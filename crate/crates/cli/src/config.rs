//! `--config` JSON file: the same settings as the flags, flags win.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<String>,
    pub geometry: Option<String>,
    pub geometries: Option<Vec<String>>,
    pub noise: Option<f64>,
    pub shots: Option<ShotsField>,
    pub repetitions: Option<usize>,
    pub chain_repetitions: Option<usize>,
    pub blade_repetitions: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub k: Option<usize>,
    pub jobs: Option<usize>,
    pub device: Option<String>,
    pub from_geometry: Option<String>,
    pub steps: Option<u64>,
    pub parallel: Option<bool>,
    pub system_size: Option<u64>,
    pub qubits: Option<u32>,
    pub gates: Option<u64>,
    pub fidelity_floor: Option<f64>,
}

/// `4096` or `"analytic"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ShotsField {
    Count(u64),
    Word(String),
}

impl ShotsField {
    pub fn as_flag(&self) -> String {
        match self {
            ShotsField::Count(n) => n.to_string(),
            ShotsField::Word(s) => s.clone(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_shots() {
        let c: RunConfig = serde_json::from_str(r#"{"subcommand":"sweep","shots":"analytic","seed":3}"#).unwrap();
        assert_eq!(c.shots.unwrap().as_flag(), "analytic");
        let c: RunConfig = serde_json::from_str(r#"{"shots":128}"#).unwrap();
        assert_eq!(c.shots.unwrap().as_flag(), "128");
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"shotz":1}"#).is_err());
    }
}
