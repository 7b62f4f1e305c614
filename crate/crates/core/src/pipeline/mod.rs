//! File-in, file-out commands chaining the library stages.
//!
//! Every command reads its inputs from disk, writes deterministic outputs
//! into an output directory and records the effective configuration next
//! to them in `<command>_run.json`. The `rdclass` binary is a thin shell
//! over these functions.

mod commands;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::compression::DEFAULT_EPS_GRID_PCT;
use crate::error::{Error, Result};
use crate::features::BANK_VERSION;
use crate::files::read_text;
use crate::netsim::EnergyConfig;
use crate::timeseries::{GeneratorConfig, SampleEncoding, SignalClass};

pub use commands::{
    cmd_features, cmd_ingest, cmd_pipeline, cmd_rd, cmd_select, cmd_simulate, cmd_train_eval,
    AccuracyReport, CsvInput, IngestSummary, WindowStore,
};

/// Settings shared by all commands, read from TOML. Absent keys keep
/// their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub window_len: usize,
    pub eps_grid: Vec<f64>,
    pub bits_per_sample: u32,
    /// Must equal the compiled feature bank's version.
    pub bank_version: String,
    /// Number of features kept by greedy selection.
    pub k: usize,
    pub folds: usize,
    pub seed: u64,
    /// Size of the synthetic corpus when no CSV input is given.
    pub windows_per_class: usize,
    /// Synthetic nodes per class in the default simulation scenario.
    pub nodes_per_class: usize,
    pub generator: GeneratorConfig,
    /// TOML file with radio and processing costs; replaces `energy` when
    /// set.
    pub energy_config: Option<PathBuf>,
    pub energy: EnergyConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            window_len: 500,
            eps_grid: DEFAULT_EPS_GRID_PCT.to_vec(),
            bits_per_sample: 16,
            bank_version: BANK_VERSION.to_owned(),
            k: 20,
            folds: 10,
            seed: 0,
            windows_per_class: 100,
            nodes_per_class: 100,
            generator: GeneratorConfig::default(),
            energy_config: None,
            energy: EnergyConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Read a TOML config; a relative `energy_config` path resolves
    /// against the config file's directory.
    pub fn from_toml_file(path: &Path) -> Result<PipelineConfig> {
        let text = read_text(path)?;
        let mut cfg: PipelineConfig = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        if let Some(rel) = cfg.energy_config.take() {
            let base = path.parent().unwrap_or(Path::new(""));
            cfg.energy_config = Some(if rel.is_relative() {
                base.join(rel)
            } else {
                rel
            });
        }
        cfg.load_energy()?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn load_energy(&mut self) -> Result<()> {
        if let Some(path) = &self.energy_config {
            let text = read_text(path)?;
            self.energy = toml::from_str(&text).map_err(|e| Error::Parse {
                path: path.clone(),
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.bank_version != BANK_VERSION {
            return Err(Error::invalid(format!(
                "config asks for feature bank {}, this build provides {BANK_VERSION}",
                self.bank_version
            )));
        }
        if self.window_len < 2 {
            return Err(Error::invalid("window_len must be at least 2"));
        }
        if self.eps_grid.is_empty() || self.eps_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "eps_grid must be non-empty and strictly ascending",
            ));
        }
        if self.k == 0 || self.folds == 0 || self.windows_per_class == 0 {
            return Err(Error::invalid(
                "k, folds and windows_per_class must be positive",
            ));
        }
        if self.bits_per_sample != self.energy.bits_per_sample {
            return Err(Error::invalid(format!(
                "bits_per_sample is {} but the energy config uses {}",
                self.bits_per_sample, self.energy.bits_per_sample
            )));
        }
        self.generator.validate()?;
        self.energy.validate()?;
        self.encoding().map(|_| ())
    }

    pub fn encoding(&self) -> Result<SampleEncoding> {
        SampleEncoding::new(self.bits_per_sample)
    }
}

/// Which columns a classifier is trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FeatureSet {
    All,
    /// The columns chosen by greedy selection.
    Selected,
    /// Scores on the leading principal components.
    Pca(usize),
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSet::All => f.write_str("all"),
            FeatureSet::Selected => f.write_str("selected"),
            FeatureSet::Pca(l) => write!(f, "pca:{l}"),
        }
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(FeatureSet::All),
            "selected" => Ok(FeatureSet::Selected),
            _ => s
                .strip_prefix("pca:")
                .and_then(|l| l.parse().ok())
                .filter(|&l| l > 0)
                .map(FeatureSet::Pca)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "unknown feature set `{s}`, expected all, selected or pca:<L>"
                    ))
                }),
        }
    }
}

impl From<FeatureSet> for String {
    fn from(f: FeatureSet) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for FeatureSet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Classifier family chosen on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Svm,
    Ffnn,
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ClassifierKind::Svm => "svm",
            ClassifierKind::Ffnn => "ffnn",
        })
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svm" => Ok(ClassifierKind::Svm),
            "ffnn" => Ok(ClassifierKind::Ffnn),
            _ => Err(Error::invalid(format!("unknown classifier `{s}`"))),
        }
    }
}

pub(crate) fn class_stem(class: Option<SignalClass>) -> &'static str {
    class.map_or("classless", SignalClass::name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_set_parsing() {
        assert_eq!("all".parse::<FeatureSet>().unwrap(), FeatureSet::All);
        assert_eq!("pca:3".parse::<FeatureSet>().unwrap(), FeatureSet::Pca(3));
        assert!("pca:0".parse::<FeatureSet>().is_err());
        assert!("pca:x".parse::<FeatureSet>().is_err());
        assert_eq!(FeatureSet::Pca(7).to_string(), "pca:7");
    }

    #[test]
    fn config_from_toml() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("energy.toml"), "e_tx_per_bit = 1e-6\n").unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(
            &path,
            "k = 5\nfolds = 3\nenergy_config = \"energy.toml\"\n[generator]\nnoisy_std = 2.0\n",
        )
        .unwrap();
        let cfg = PipelineConfig::from_toml_file(&path).unwrap();
        assert_eq!(cfg.k, 5);
        assert_eq!(cfg.window_len, 500);
        assert_eq!(cfg.generator.noisy_std, 2.0);
        assert_eq!(cfg.energy.e_tx_per_bit, 1e-6);
        assert_eq!(cfg.energy.max_payload_bytes, 114);

        std::fs::write(&path, "bank_version = \"other\"\n").unwrap();
        assert!(PipelineConfig::from_toml_file(&path)
            .unwrap_err()
            .is_input_error());
        std::fs::write(&path, "unknown_key = 1\n").unwrap();
        assert!(PipelineConfig::from_toml_file(&path).is_err());
    }
}
