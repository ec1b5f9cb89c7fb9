//! Sweep orchestration.
//!
//! One ground-truth mask per missing rate, shared by every strategy and
//! imputer at that rate. Cells run in product order (rate, strategy,
//! imputer) and a failing or slow cell becomes an NA record instead of
//! aborting the sweep.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::budget::Deadline;
use crate::data::{apply_mcar, minmax_normalize, MaskedDataset};
use crate::error::{Error, Result};
use crate::eval::{mse_masked, CvPlan};
use crate::impute::{ImputerKind, ImputerSpec};
use crate::pipeline::{cross_validate_within, run_imputation_within, PipelineSpec, Strategy};
use crate::rng::{derive_seed, str_tag};

use super::config::{default_q, DatasetSource, RunConfig};
use super::csv_io::load_csv;
use super::synth::generate_synthetic;

pub const TIMEOUT_REASON: &str = "time budget exceeded";

/// One sweep cell. Field names are the JSONL keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub strategy: Strategy,
    pub imputer: ImputerKind,
    pub missing_rate: f64,
    /// Imputation strategies only.
    pub mse: Option<f64>,
    /// Mean fold accuracy; classification strategies only.
    pub accuracy: Option<f64>,
    pub fold_accuracies: Vec<f64>,
    /// Largest classifier input width over folds.
    pub input_width: Option<usize>,
    pub stage_seconds: BTreeMap<String, f64>,
    /// Sum of `stage_seconds`.
    pub total_seconds: f64,
    pub seed: u64,
    pub na: bool,
    pub na_reason: Option<String>,
}

impl ExperimentRecord {
    fn empty(strategy: Strategy, imputer: ImputerKind, rate: f64, seed: u64) -> Self {
        Self {
            strategy,
            imputer,
            missing_rate: rate,
            mse: None,
            accuracy: None,
            fold_accuracies: Vec::new(),
            input_width: None,
            stage_seconds: BTreeMap::new(),
            total_seconds: 0.0,
            seed,
            na: false,
            na_reason: None,
        }
    }

    /// The displayed metric: MSE or accuracy.
    pub fn metric(&self) -> Option<f64> {
        self.mse.or(self.accuracy)
    }
}

/// Seed of the mask shared by all cells at `rate`.
pub fn mask_seed(master: u64, rate: f64) -> u64 {
    derive_seed(master, &[rate.to_bits()])
}

/// Seed of one cell.
pub fn cell_seed(master: u64, rate: f64, strategy: Strategy, imputer: ImputerKind) -> u64 {
    derive_seed(
        master,
        &[rate.to_bits(), str_tag(strategy.name()), str_tag(imputer.name())],
    )
}

/// Loads or generates the ground truth named by `config`, normalized to
/// [0, 1] per column, with the configured partition applied.
pub fn load_ground_truth(config: &RunConfig) -> Result<MaskedDataset> {
    let ds = match &config.source {
        DatasetSource::Synthetic(spec) => generate_synthetic(spec)?,
        DatasetSource::Csv { path, label_column } => {
            let loaded = load_csv(path, label_column.as_deref())?;
            if loaded.dataset.mask().any_missing() {
                return Err(Error::Config(format!(
                    "{}: ground truth for a sweep must have no missing cells",
                    path.display()
                )));
            }
            let labels = loaded.dataset.labels().map(<[usize]>::to_vec);
            let scaled = minmax_normalize(loaded.dataset.data(), loaded.dataset.mask());
            MaskedDataset::complete(scaled, labels)?
        }
    };
    let q = config.q.unwrap_or_else(|| default_q(ds.cols()));
    if q >= ds.cols() {
        return Err(Error::Config(format!("q = {q} must be below the column count {}", ds.cols())));
    }
    ds.with_partition(q)
}

pub fn run_experiments(config: &RunConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let truth = load_ground_truth(config)?;
    run_experiments_on(&truth, config)
}

/// Runs the sweep on a complete ground truth whose partition is already set.
pub fn run_experiments_on(truth: &MaskedDataset, config: &RunConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    if truth.mask().any_missing() {
        return Err(Error::Config("ground truth has missing entries".into()));
    }
    if truth.q() >= truth.cols() {
        return Err(Error::Config(format!(
            "q = {} leaves no columns to mask",
            truth.q()
        )));
    }
    if truth.labels().is_none() && config.strategies.iter().any(|s| s.is_classification()) {
        return Err(Error::Config("classification strategies need a label column".into()));
    }

    let mut masked = Vec::with_capacity(config.missing_rates.len());
    for &rate in &config.missing_rates {
        let ds = apply_mcar(truth, rate, mask_seed(config.seed, rate))
            .map_err(|e| Error::Config(format!("masking at rate {rate}: {e}")))?;
        masked.push(ds);
    }

    let mut cells = Vec::new();
    for (r, &rate) in config.missing_rates.iter().enumerate() {
        for &strategy in &config.strategies {
            for &imputer in &config.imputers {
                cells.push((r, rate, strategy, imputer));
            }
        }
    }

    let run = |&(r, rate, strategy, imputer): &(usize, f64, Strategy, ImputerKind)| {
        let record = run_cell(truth, &masked[r], config, rate, strategy, imputer);
        log::info!(
            "{strategy} / {imputer} @ {rate}: {}",
            match &record.na_reason {
                Some(reason) => format!("NA ({reason})"),
                None => format!("metric {:?}, {:.3} s", record.metric(), record.total_seconds),
            }
        );
        record
    };

    if config.workers <= 1 {
        return Ok(cells.iter().map(run).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| {
        use rayon::prelude::*;
        cells.par_iter().map(run).collect()
    }))
}

fn run_cell(
    truth: &MaskedDataset,
    masked: &MaskedDataset,
    config: &RunConfig,
    rate: f64,
    strategy: Strategy,
    imputer: ImputerKind,
) -> ExperimentRecord {
    let seed = cell_seed(config.seed, rate, strategy, imputer);
    let mut record = ExperimentRecord::empty(strategy, imputer, rate, seed);
    let spec = PipelineSpec {
        strategy,
        imputer: ImputerSpec {
            kind: imputer,
            ..config.imputer_params
        },
        variance_target: config.variance_target,
        seed,
        time_budget_seconds: config.time_budget_seconds,
        svm: config.svm,
    };
    let start = Instant::now();
    let deadline = Deadline::after_secs(config.time_budget_seconds);
    let outcome = fill_cell(&mut record, truth, masked, &spec, config, &deadline);
    // watchdog: a cell that finished late is still over budget
    let elapsed = start.elapsed().as_secs_f64();
    let outcome = match outcome {
        Ok(()) if elapsed > config.time_budget_seconds => Err(Error::TimeBudgetExceeded),
        other => other,
    };
    if let Err(e) = outcome {
        record.na = true;
        record.na_reason = Some(match e {
            Error::TimeBudgetExceeded => TIMEOUT_REASON.to_owned(),
            other => other.to_string(),
        });
        record.mse = None;
        record.accuracy = None;
        record.fold_accuracies.clear();
        record.input_width = None;
    }
    record
}

fn fill_cell(
    record: &mut ExperimentRecord,
    truth: &MaskedDataset,
    masked: &MaskedDataset,
    spec: &PipelineSpec,
    config: &RunConfig,
    deadline: &Deadline,
) -> Result<()> {
    spec.validate()?;
    if spec.strategy.is_classification() {
        let plan = CvPlan::stratified(config.folds, spec.seed);
        let out = cross_validate_within(masked, spec, &plan, deadline)?;
        record.total_seconds = out.timings.total();
        record.stage_seconds = out.timings.into_map();
        record.accuracy = Some(out.score.mean);
        record.fold_accuracies = out.score.folds;
        record.input_width = out.input_widths.iter().copied().max();
    } else {
        let out = run_imputation_within(masked, spec, deadline)?;
        let range = masked.partition().missing(masked.cols());
        let truth_m = truth.data().columns(range.start, range.len()).into_owned();
        let (_, m_mask) = masked.missing_block();
        record.mse = Some(mse_masked(&out.m_prime, &truth_m, &m_mask)?);
        record.total_seconds = out.timings.total();
        record.stage_seconds = out.timings.into_map();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::synth::SyntheticSpec;

    fn small_config() -> RunConfig {
        RunConfig {
            source: DatasetSource::Synthetic(SyntheticSpec {
                rows: 60,
                cols: 12,
                rank: 2,
                noise: 0.01,
                classes: 2,
                seed: 3,
            }),
            missing_rates: vec![0.2],
            strategies: vec![Strategy::Traditional, Strategy::Pcai],
            imputers: vec![ImputerKind::Mean, ImputerKind::Knn],
            folds: 3,
            seed: 11,
            ..RunConfig::default()
        }
    }

    #[test]
    fn product_count_and_order() {
        let records = run_experiments(&small_config()).unwrap();
        assert_eq!(records.len(), 4);
        let order: Vec<_> = records.iter().map(|r| (r.strategy, r.imputer)).collect();
        assert_eq!(
            order,
            vec![
                (Strategy::Traditional, ImputerKind::Mean),
                (Strategy::Traditional, ImputerKind::Knn),
                (Strategy::Pcai, ImputerKind::Mean),
                (Strategy::Pcai, ImputerKind::Knn),
            ]
        );
        assert!(records.iter().all(|r| !r.na && r.mse.is_some()));
    }

    #[test]
    fn mean_cells_agree_across_strategies() {
        let records = run_experiments(&small_config()).unwrap();
        assert_eq!(records[0].mse, records[2].mse);
    }

    #[test]
    fn cell_rerun_in_isolation_matches() {
        let cfg = small_config();
        let all = run_experiments(&cfg).unwrap();
        let single = RunConfig {
            strategies: vec![Strategy::Pcai],
            imputers: vec![ImputerKind::Knn],
            ..cfg
        };
        let one = run_experiments(&single).unwrap();
        assert_eq!(one[0].seed, all[3].seed);
        assert_eq!(one[0].mse, all[3].mse);
    }

    #[test]
    fn tiny_budget_gives_na_and_sweep_continues() {
        let cfg = RunConfig {
            time_budget_seconds: 1e-9,
            ..small_config()
        };
        let records = run_experiments(&cfg).unwrap();
        assert_eq!(records.len(), 4);
        for r in &records {
            assert!(r.na);
            assert_eq!(r.na_reason.as_deref(), Some(TIMEOUT_REASON));
            assert!(r.mse.is_none());
        }
    }

    #[test]
    fn classification_cells() {
        let cfg = RunConfig {
            strategies: vec![Strategy::Pic, Strategy::PicReduce],
            imputers: vec![ImputerKind::Mean],
            ..small_config()
        };
        let records = run_experiments(&cfg).unwrap();
        for r in &records {
            assert!(!r.na, "{:?}", r.na_reason);
            assert_eq!(r.fold_accuracies.len(), 3);
            assert!(r.accuracy.unwrap() > 0.5);
        }
        assert!(records[1].input_width <= records[0].input_width);
    }

    #[test]
    fn parallel_matches_serial_except_timing() {
        let serial = run_experiments(&small_config()).unwrap();
        let parallel = run_experiments(&RunConfig {
            workers: 3,
            ..small_config()
        })
        .unwrap();
        for (a, b) in serial.iter().zip(&parallel) {
            assert_eq!((a.strategy, a.imputer, a.mse, a.seed), (b.strategy, b.imputer, b.mse, b.seed));
        }
    }

    #[test]
    fn labels_required_for_classification() {
        let truth = generate_synthetic(&SyntheticSpec {
            rows: 30,
            cols: 6,
            rank: 2,
            ..SyntheticSpec::default()
        })
        .unwrap()
        .with_labels(None)
        .unwrap()
        .with_partition(5)
        .unwrap();
        let cfg = RunConfig {
            strategies: vec![Strategy::Pic],
            ..small_config()
        };
        assert!(matches!(run_experiments_on(&truth, &cfg), Err(Error::Config(_))));
    }
}
