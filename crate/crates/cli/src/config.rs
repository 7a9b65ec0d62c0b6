//! Flat JSON run configuration. Command-line flags override file values.

use std::path::{Path, PathBuf};

use qcorr_core::correlations::TAU_CLASS;
use qcorr_core::protocols::{encoding_preset, EncodingEntry};
use qcorr_core::{Error, OptimizerConfig, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Eve {
    Z,
    X,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EncodingSpec {
    Preset(String),
    Entries(Vec<EncodingEntry>),
}

impl EncodingSpec {
    pub fn resolve(&self) -> Result<Vec<EncodingEntry>> {
        match self {
            EncodingSpec::Preset(name) => encoding_preset(name),
            EncodingSpec::Entries(e) => Ok(e.clone()),
        }
    }
}

/// Every key is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub seed: Option<u64>,
    /// Polar grid points; the azimuthal grid gets twice as many.
    pub grid: Option<usize>,
    /// Refinement tolerance of the optimizer.
    pub tol: Option<f64>,
    /// Disturbance threshold of the classicality tests.
    pub class_tol: Option<f64>,
    pub measured_side: Option<usize>,
    pub cut: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub starts: Option<usize>,
    pub max_evals: Option<usize>,
    pub rounds: Option<usize>,
    pub eavesdrop: Option<Eve>,
    pub state: Option<String>,
    pub state_file: Option<PathBuf>,
    pub encoding: Option<EncodingSpec>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: FileConfig) -> FileConfig {
        FileConfig {
            format: over.format.or(self.format),
            seed: over.seed.or(self.seed),
            grid: over.grid.or(self.grid),
            tol: over.tol.or(self.tol),
            class_tol: over.class_tol.or(self.class_tol),
            measured_side: over.measured_side.or(self.measured_side),
            cut: over.cut.or(self.cut),
            samples: over.samples.or(self.samples),
            starts: over.starts.or(self.starts),
            max_evals: over.max_evals.or(self.max_evals),
            rounds: over.rounds.or(self.rounds),
            eavesdrop: over.eavesdrop.or(self.eavesdrop),
            state: over.state.or(self.state),
            state_file: over.state_file.or(self.state_file),
            encoding: over.encoding.or(self.encoding),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Table)
    }

    pub fn optimizer(&self) -> Result<OptimizerConfig> {
        let mut cfg = OptimizerConfig::default();
        if let Some(g) = self.grid {
            cfg.polar_points = g;
            cfg.azimuthal_points = 2 * g;
        }
        if let Some(t) = self.tol {
            cfg.refine_tol = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.samples {
            cfg.samples = s;
        }
        if let Some(s) = self.starts {
            cfg.starts = s;
        }
        if let Some(m) = self.max_evals {
            cfg.max_evals = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn class_tol(&self) -> Result<f64> {
        let t = self.class_tol.unwrap_or(TAU_CLASS);
        if t.is_nan() || t <= 0.0 {
            return Err(Error::Config(format!("class_tol must be positive, got {t}")));
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = serde_json::from_str(r#"{"seed": 3, "grid": 8, "format": "json"}"#).unwrap();
        let flags = FileConfig {
            seed: Some(9),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.grid, Some(8));
        assert_eq!(merged.format(), Format::Json);
        let cfg = merged.optimizer().unwrap();
        assert_eq!((cfg.polar_points, cfg.azimuthal_points, cfg.seed), (8, 16, 9));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"bogus": 1}"#).is_err());
        let c = FileConfig {
            grid: Some(2),
            ..Default::default()
        };
        assert!(c.optimizer().is_err());
        let c = FileConfig {
            class_tol: Some(0.0),
            ..Default::default()
        };
        assert!(c.class_tol().is_err());
        let c = FileConfig {
            tol: Some(-1.0),
            ..Default::default()
        };
        assert!(c.optimizer().is_err());
    }

    #[test]
    fn encoding_accepts_preset_or_entries() {
        let c: FileConfig = serde_json::from_str(r#"{"encoding": "bit-flip"}"#).unwrap();
        assert_eq!(c.encoding.unwrap().resolve().unwrap().len(), 2);
        let c: FileConfig = serde_json::from_str(
            r#"{"encoding": [{"label": "i", "probability": 1.0, "re": [[1,0],[0,1]], "im": [[0,0],[0,0]]}]}"#,
        )
        .unwrap();
        assert_eq!(c.encoding.unwrap().resolve().unwrap()[0].label, "i");
    }
}
