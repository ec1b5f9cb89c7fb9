//! Sweep configuration.
//!
//! The on-disk form is a flat TOML document ([`ConfigFile`]): every key is
//! optional and missing keys take the defaults below. Command-line flags
//! build a second `ConfigFile` that is layered on top with
//! [`ConfigFile::overlay`].
//!
//! ```toml
//! # dataset: either `csv` (+ optional `label_column`) or the synth_* keys
//! csv = "data/parkinson.csv"
//! label_column = "class"
//! q = 700
//! missing_rates = [0.2, 0.4, 0.6]
//! strategies = ["traditional", "pcai"]
//! imputers = ["soft_impute", "knn"]
//! seed = 7
//! output = "results/parkinson"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::SvmConfig;
use crate::impute::{ImputerKind, ImputerSpec};
use crate::pca::DEFAULT_VARIANCE_TARGET;
use crate::pipeline::{Strategy, DEFAULT_TIME_BUDGET_SECONDS};

use super::report::ReportFormat;
use super::synth::SyntheticSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Csv {
        path: PathBuf,
        label_column: Option<String>,
    },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: DatasetSource,
    /// Partition size; `None` means `ceil(5 * cols / 6)`.
    pub q: Option<usize>,
    pub missing_rates: Vec<f64>,
    pub strategies: Vec<Strategy>,
    pub imputers: Vec<ImputerKind>,
    /// Hyperparameters applied to every imputer kind (the `kind` field is ignored).
    pub imputer_params: ImputerSpec,
    pub svm: SvmConfig,
    pub variance_target: f64,
    pub folds: usize,
    pub seed: u64,
    pub time_budget_seconds: f64,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: DatasetSource::Synthetic(SyntheticSpec::default()),
            q: None,
            missing_rates: vec![0.2, 0.4, 0.6],
            strategies: vec![Strategy::Traditional, Strategy::Pcai],
            imputers: vec![ImputerKind::SoftImpute],
            imputer_params: ImputerSpec::default(),
            svm: SvmConfig::default(),
            variance_target: DEFAULT_VARIANCE_TARGET,
            folds: 5,
            seed: 0,
            time_budget_seconds: DEFAULT_TIME_BUDGET_SECONDS,
            workers: 1,
            output: None,
            format: ReportFormat::Both,
        }
    }
}

/// Default partition for a dataset with `cols` columns.
pub fn default_q(cols: usize) -> usize {
    (5 * cols).div_ceil(6)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.missing_rates.is_empty() {
            return bad("missing_rates is empty".into());
        }
        if let Some(r) = self.missing_rates.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return bad(format!("missing rate {r} outside (0, 1)"));
        }
        if self.strategies.is_empty() {
            return bad("strategies is empty".into());
        }
        if self.imputers.is_empty() {
            return bad("imputers is empty".into());
        }
        if !(self.variance_target > 0.0 && self.variance_target <= 1.0) {
            return bad(format!("variance_target {} outside (0, 1]", self.variance_target));
        }
        if self.folds < 2 {
            return bad("folds must be at least 2".into());
        }
        if !(self.time_budget_seconds > 0.0) {
            return bad("time_budget_seconds must be positive".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if let DatasetSource::Synthetic(spec) = &self.source {
            spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        self.imputer_params
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        ConfigFile::from_file(path)?.into_run_config()
    }
}

/// Flat key-value mirror of [`RunConfig`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub csv: Option<PathBuf>,
    pub label_column: Option<String>,
    pub synth_rows: Option<usize>,
    pub synth_cols: Option<usize>,
    pub synth_rank: Option<usize>,
    pub synth_noise: Option<f64>,
    pub synth_classes: Option<usize>,
    pub synth_seed: Option<u64>,
    pub q: Option<usize>,
    pub missing_rates: Option<Vec<f64>>,
    pub strategies: Option<Vec<String>>,
    pub imputers: Option<Vec<String>>,
    pub variance_target: Option<f64>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub time_budget_seconds: Option<f64>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub knn_k: Option<usize>,
    pub soft_lambda_frac: Option<f64>,
    pub soft_max_iter: Option<usize>,
    pub soft_tol: Option<f64>,
    pub svd_rank: Option<usize>,
    pub svd_max_iter: Option<usize>,
    pub svd_tol: Option<f64>,
    pub mice_cycles: Option<usize>,
    pub mice_ridge_alpha: Option<f64>,
    pub svm_epochs: Option<usize>,
    pub svm_reg_lambda: Option<f64>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Values set in `top` replace those in `self`.
    pub fn overlay(mut self, top: ConfigFile) -> Self {
        overlay_fields!(self, top;
            csv, label_column, synth_rows, synth_cols, synth_rank, synth_noise,
            synth_classes, synth_seed, q, missing_rates, strategies, imputers,
            variance_target, folds, seed, time_budget_seconds, workers, output,
            format, knn_k, soft_lambda_frac, soft_max_iter, soft_tol, svd_rank,
            svd_max_iter, svd_tol, mice_cycles, mice_ridge_alpha, svm_epochs,
            svm_reg_lambda,
        );
        self
    }

    pub fn into_run_config(self) -> Result<RunConfig> {
        let defaults = RunConfig::default();
        let synth_default = SyntheticSpec::default();
        let has_synth_keys = self.synth_rows.is_some()
            || self.synth_cols.is_some()
            || self.synth_rank.is_some()
            || self.synth_noise.is_some()
            || self.synth_classes.is_some()
            || self.synth_seed.is_some();
        let source = match self.csv {
            Some(_) if has_synth_keys => {
                return Err(Error::Config("csv and synth_* keys are mutually exclusive".into()))
            }
            Some(path) => DatasetSource::Csv {
                path,
                label_column: self.label_column,
            },
            None => DatasetSource::Synthetic(SyntheticSpec {
                rows: self.synth_rows.unwrap_or(synth_default.rows),
                cols: self.synth_cols.unwrap_or(synth_default.cols),
                rank: self.synth_rank.unwrap_or(synth_default.rank),
                noise: self.synth_noise.unwrap_or(synth_default.noise),
                classes: self.synth_classes.unwrap_or(synth_default.classes),
                seed: self.synth_seed.unwrap_or(synth_default.seed),
            }),
        };
        let strategies = match self.strategies {
            Some(names) => names.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?,
            None => defaults.strategies,
        };
        let imputers = match self.imputers {
            Some(names) => names.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?,
            None => defaults.imputers,
        };
        let format = match self.format {
            Some(f) => f.parse()?,
            None => defaults.format,
        };
        let p = defaults.imputer_params;
        let imputer_params = ImputerSpec {
            kind: p.kind,
            knn_k: self.knn_k.unwrap_or(p.knn_k),
            soft_lambda_frac: self.soft_lambda_frac.unwrap_or(p.soft_lambda_frac),
            soft_max_iter: self.soft_max_iter.unwrap_or(p.soft_max_iter),
            soft_tol: self.soft_tol.unwrap_or(p.soft_tol),
            svd_rank: self.svd_rank.unwrap_or(p.svd_rank),
            svd_max_iter: self.svd_max_iter.unwrap_or(p.svd_max_iter),
            svd_tol: self.svd_tol.unwrap_or(p.svd_tol),
            mice_cycles: self.mice_cycles.unwrap_or(p.mice_cycles),
            mice_ridge_alpha: self.mice_ridge_alpha.unwrap_or(p.mice_ridge_alpha),
        };
        let svm = SvmConfig {
            epochs: self.svm_epochs.unwrap_or(defaults.svm.epochs),
            reg_lambda: self.svm_reg_lambda.unwrap_or(defaults.svm.reg_lambda),
            seed: defaults.svm.seed,
        };
        let config = RunConfig {
            source,
            q: self.q,
            missing_rates: self.missing_rates.unwrap_or(defaults.missing_rates),
            strategies,
            imputers,
            imputer_params,
            svm,
            variance_target: self.variance_target.unwrap_or(defaults.variance_target),
            folds: self.folds.unwrap_or(defaults.folds),
            seed: self.seed.unwrap_or(defaults.seed),
            time_budget_seconds: self.time_budget_seconds.unwrap_or(defaults.time_budget_seconds),
            workers: self.workers.unwrap_or(defaults.workers),
            output: self.output,
            format,
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = ConfigFile::from_toml_str("").unwrap().into_run_config().unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn parses_flat_document() {
        let text = r#"
            csv = "data.csv"
            label_column = "y"
            q = 10
            missing_rates = [0.2]
            strategies = ["pic", "pic_reduce", "pca_on_full"]
            imputers = ["knn", "mice"]
            knn_k = 3
            format = "jsonl"
        "#;
        let cfg = ConfigFile::from_toml_str(text).unwrap().into_run_config().unwrap();
        assert_eq!(
            cfg.source,
            DatasetSource::Csv {
                path: "data.csv".into(),
                label_column: Some("y".into())
            }
        );
        assert_eq!(cfg.q, Some(10));
        assert_eq!(cfg.strategies.len(), 3);
        assert_eq!(cfg.imputers, vec![ImputerKind::Knn, ImputerKind::MiceRidge]);
        assert_eq!(cfg.imputer_params.knn_k, 3);
        assert_eq!(cfg.format, ReportFormat::Jsonl);
    }

    #[test]
    fn overlay_prefers_top() {
        let base = ConfigFile::from_toml_str("seed = 1\nfolds = 3").unwrap();
        let top = ConfigFile {
            seed: Some(9),
            ..ConfigFile::default()
        };
        let merged = base.overlay(top);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.folds, Some(3));
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "missing_rates = [1.0]",
            "missing_rates = []",
            "strategies = []",
            "imputers = [\"gain\"]",
            "folds = 1",
            "unknown_key = 3",
            "csv = \"a.csv\"\nsynth_rows = 10",
        ] {
            let parsed = ConfigFile::from_toml_str(text).and_then(ConfigFile::into_run_config);
            assert!(matches!(parsed, Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn default_q_ratio() {
        assert_eq!(default_q(300), 250);
        assert_eq!(default_q(7), 6);
    }
}
