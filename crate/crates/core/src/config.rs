//! Run configuration shared by all subcommands.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Settings file; every key is optional and command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<String>,
    pub curve: Option<PathBuf>,
    pub spectrum: Option<PathBuf>,
    pub max_residue_field: Option<u64>,
    pub max_place_degree: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub format: Option<OutputFormat>,
    pub threads: Option<usize>,
    pub cf_cap: Option<f64>,
    pub li_tolerance: Option<f64>,
}

pub const DEFAULT_MAX_RESIDUE_FIELD: u64 = 1 << 16;
pub const DEFAULT_MAX_PLACE_DEGREE: usize = 16;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_LI_TOLERANCE: f64 = 1e-9;

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive")))
            }
        };
        pos(
            "max_residue_field",
            self.max_residue_field.is_none_or(|v| v > 0),
        )?;
        pos(
            "max_place_degree",
            self.max_place_degree.is_none_or(|v| v > 0),
        )?;
        pos("samples", self.samples.is_none_or(|v| v > 0))?;
        pos("threads", self.threads.is_none_or(|v| v > 0))?;
        pos("cf_cap", self.cf_cap.is_none_or(|v| v > 0.0))?;
        pos("li_tolerance", self.li_tolerance.is_none_or(|v| v > 0.0))?;
        Ok(())
    }

    pub fn max_residue_field(&self) -> u64 {
        self.max_residue_field.unwrap_or(DEFAULT_MAX_RESIDUE_FIELD)
    }
    pub fn max_place_degree(&self) -> usize {
        self.max_place_degree.unwrap_or(DEFAULT_MAX_PLACE_DEGREE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reject() {
        let c = RunConfig::from_json(r#"{"seed": 4, "format": "csv", "max_residue_field": 81}"#)
            .unwrap();
        assert_eq!(c.seed, Some(4));
        assert_eq!(c.format, Some(OutputFormat::Csv));
        assert_eq!(c.max_residue_field(), 81);
        assert_eq!(c.max_place_degree(), DEFAULT_MAX_PLACE_DEGREE);
        assert!(RunConfig::from_json(r#"{"sed": 4}"#).is_err());
        assert!(RunConfig::from_json(r#"{"max_place_degree": 0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"cf_cap": -1.0}"#).is_err());
    }
}
