//! Toolkit configuration shared by the library and the CLI.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::CodeId;

pub const DEFAULT_SUFFIXES: &[&str] = &["_val", "_obj", "_item", "_tmp"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ToolkitConfig {
    /// Formal-channel group size.
    pub alpha: usize,
    /// Group threshold; a group reads 1 when at least tau anchors are on.
    pub tau: usize,
    pub code_id: CodeId,
    /// Bitmask over the formal rule set; bit i-1 enables rule Ri.
    pub enabled_rules: u8,
    pub suffix_table: Vec<String>,
    /// Watermark resampling attempts before degrading a channel.
    pub retry_budget: usize,
    pub registry_path: Option<String>,
    pub seed: u64,
}

impl Default for ToolkitConfig {
    fn default() -> Self {
        ToolkitConfig {
            alpha: 3,
            tau: 2,
            code_id: CodeId::Bch421,
            enabled_rules: 0b11_1111,
            suffix_table: DEFAULT_SUFFIXES.iter().map(|s| s.to_string()).collect(),
            retry_budget: 16,
            registry_path: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("tau ({tau}) must be between 1 and alpha ({alpha})")]
    BadThreshold { tau: usize, alpha: usize },
    #[error("code must be BCH421 or HAM74")]
    BadCode,
    #[error("suffix table must be nonempty, entries starting with '_'")]
    BadSuffixTable,
}

impl ToolkitConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.tau == 0 || self.tau > self.alpha {
            return Err(ConfigError::BadThreshold {
                tau: self.tau,
                alpha: self.alpha,
            });
        }
        if self.code_id == CodeId::OrgFixed {
            return Err(ConfigError::BadCode);
        }
        if self.suffix_table.is_empty()
            || self
                .suffix_table
                .iter()
                .any(|s| !s.starts_with('_') || s.len() < 2 || s.ends_with('_'))
        {
            return Err(ConfigError::BadSuffixTable);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ToolkitConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.alpha, 3);
        assert_eq!(cfg.tau, 2);
        assert_eq!(cfg.code_id, CodeId::Bch421);
    }

    #[test]
    fn bad_threshold_rejected() {
        let cfg = ToolkitConfig {
            tau: 4,
            ..Default::default()
        };
        assert_eq!(
            cfg.validate(),
            Err(ConfigError::BadThreshold { tau: 4, alpha: 3 })
        );
    }

    #[test]
    fn json_round_trip() {
        let cfg = ToolkitConfig::default();
        let s = serde_json::to_string(&cfg).unwrap();
        let back: ToolkitConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back.alpha, cfg.alpha);
        assert_eq!(back.suffix_table, cfg.suffix_table);
    }
}
