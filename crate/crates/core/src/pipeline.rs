//! Imputation and imputation-classification strategies.
//!
//! - [`Strategy::Traditional`]: run the imputer on the full matrix `ℱ ∪ ℳ`.
//! - [`Strategy::Pcai`]: reduce `ℱ` with PCA to scores `ℛ`, then impute
//!   `ℳ` from `ℛ ∥ ℳ`.
//! - [`Strategy::Pic`] / [`Strategy::PicReduce`]: PCAI on separate train and
//!   test splits followed by a classifier; `PicReduce` additionally reduces
//!   the imputed block `ℳ′` with a second PCA fitted on the training split.
//! - [`Strategy::PcaOnFull`]: impute the full matrix, then reduce all columns
//!   with a single PCA before classification.
//!
//! Test-side imputation uses the test batch itself (`ℛ_test ∥ ℳ_test`), and
//! test projections are centered with the training means.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::Deadline;
use crate::data::{Mask, MaskedDataset, Matrix};
use crate::error::{contract, Error, Result};
use crate::eval::{
    accuracy, fold_assignment, train_linear_svm, ClassifierModel, CvPlan, CvScore, StageTimings,
    SvmConfig,
};
use crate::impute::{impute_within, ImputationResult, ImputerSpec};
use crate::pca::{fit_pca, project, Components, PcaModel, DEFAULT_VARIANCE_TARGET};
use crate::rng::derive_seed;

/// Stage labels used in [`StageTimings`].
pub mod stage {
    pub const PCA_FIT: &str = "pca_fit";
    pub const PROJECTION: &str = "projection";
    pub const IMPUTATION: &str = "imputation";
    pub const TRAIN: &str = "train";
    pub const EVALUATE: &str = "evaluate";
}

pub const DEFAULT_TIME_BUDGET_SECONDS: f64 = 6500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Traditional,
    Pcai,
    Pic,
    PicReduce,
    PcaOnFull,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Traditional,
        Strategy::Pcai,
        Strategy::Pic,
        Strategy::PicReduce,
        Strategy::PcaOnFull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Traditional => "traditional",
            Strategy::Pcai => "pcai",
            Strategy::Pic => "pic",
            Strategy::PicReduce => "pic_reduce",
            Strategy::PcaOnFull => "pca_on_full",
        }
    }

    /// Strategies scored by classification accuracy rather than MSE.
    pub fn is_classification(self) -> bool {
        matches!(self, Strategy::Pic | Strategy::PicReduce | Strategy::PcaOnFull)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        match norm.as_str() {
            "traditional" => Ok(Strategy::Traditional),
            "pcai" => Ok(Strategy::Pcai),
            "pic" => Ok(Strategy::Pic),
            "pic_reduce" => Ok(Strategy::PicReduce),
            "pca_on_full" => Ok(Strategy::PcaOnFull),
            _ => Err(Error::Config(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub strategy: Strategy,
    pub imputer: ImputerSpec,
    pub variance_target: f64,
    pub seed: u64,
    pub time_budget_seconds: f64,
    pub svm: SvmConfig,
}

impl PipelineSpec {
    pub fn new(strategy: Strategy, imputer: ImputerSpec) -> Self {
        Self {
            strategy,
            imputer,
            variance_target: DEFAULT_VARIANCE_TARGET,
            seed: 0,
            time_budget_seconds: DEFAULT_TIME_BUDGET_SECONDS,
            svm: SvmConfig::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.variance_target > 0.0 && self.variance_target <= 1.0) {
            return contract(format!(
                "variance target {} outside (0, 1]",
                self.variance_target
            ));
        }
        if !(self.time_budget_seconds > 0.0) {
            return contract("time budget must be positive");
        }
        self.imputer.validate()
    }

    fn components(&self) -> Components {
        Components::VarianceTarget(self.variance_target)
    }

    fn svm_config(&self) -> SvmConfig {
        SvmConfig {
            seed: derive_seed(self.seed, &[0x0053_564d]),
            ..self.svm
        }
    }
}

/// Result of an imputation-only strategy.
#[derive(Debug, Clone)]
pub struct ImputationOutcome {
    /// The imputed `ℳ` block (columns `q..cols`).
    pub m_prime: Matrix,
    /// Present for PCAI.
    pub pca: Option<PcaModel>,
    pub iterations_run: usize,
    pub converged: bool,
    pub timings: StageTimings,
}

#[derive(Debug, Clone)]
pub struct PcaiOutput {
    pub m_prime: Matrix,
    pub model: PcaModel,
}

pub fn traditional_impute(ds: &MaskedDataset, imputer: &ImputerSpec) -> Result<ImputationResult> {
    impute_within(imputer, ds.data(), ds.mask(), &Deadline::none())
}

/// Imputes `ℳ` from `ℛ ∥ ℳ`, where `ℛ` are the PCA scores of `ℱ`.
pub fn pcai_impute(
    ds: &MaskedDataset,
    imputer: &ImputerSpec,
    components: Components,
) -> Result<PcaiOutput> {
    let out = pcai_within(ds, imputer, components, &Deadline::none())?;
    Ok(PcaiOutput {
        m_prime: out.m_prime,
        model: out.pca.expect("PCAI always fits a PCA model"),
    })
}

fn require_split_partition(ds: &MaskedDataset) -> Result<()> {
    if ds.q() == 0 {
        return contract("PCA-based strategies need a fully observed block (q >= 1)");
    }
    if ds.q() == ds.cols() {
        return contract("PCA-based strategies need at least one column beyond q");
    }
    Ok(())
}

/// Runs the imputer on `[scores | m_block]` and returns the completed `ℳ` part.
fn impute_beside(
    scores: &Matrix,
    m_block: &Matrix,
    m_mask: &Mask,
    imputer: &ImputerSpec,
    deadline: &Deadline,
) -> Result<ImputationResult> {
    let k = scores.ncols();
    let joined = concat_columns(scores, m_block);
    let mask = Mask::new(scores.nrows(), k).hstack(m_mask);
    let mut result = impute_within(imputer, &joined, &mask, deadline)?;
    result.completed = result.completed.columns(k, m_block.ncols()).into_owned();
    Ok(result)
}

fn concat_columns(left: &Matrix, right: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(left.nrows(), left.ncols() + right.ncols());
    out.columns_mut(0, left.ncols()).copy_from(left);
    out.columns_mut(left.ncols(), right.ncols()).copy_from(right);
    out
}

pub(crate) fn traditional_within(
    ds: &MaskedDataset,
    imputer: &ImputerSpec,
    deadline: &Deadline,
) -> Result<ImputationOutcome> {
    let mut timings = StageTimings::new();
    let result = timings.time(stage::IMPUTATION, || {
        impute_within(imputer, ds.data(), ds.mask(), deadline)
    })?;
    let range = ds.partition().missing(ds.cols());
    Ok(ImputationOutcome {
        m_prime: result.completed.columns(range.start, range.len()).into_owned(),
        pca: None,
        iterations_run: result.iterations_run,
        converged: result.converged,
        timings,
    })
}

pub(crate) fn pcai_within(
    ds: &MaskedDataset,
    imputer: &ImputerSpec,
    components: Components,
    deadline: &Deadline,
) -> Result<ImputationOutcome> {
    require_split_partition(ds)?;
    let mut timings = StageTimings::new();
    let (scores, model) = timings.time(stage::PCA_FIT, || fit_pca(&ds.observed_block(), components))?;
    deadline.check()?;
    let (m_block, m_mask) = ds.missing_block();
    let result = timings.time(stage::IMPUTATION, || {
        impute_beside(&scores, &m_block, &m_mask, imputer, deadline)
    })?;
    Ok(ImputationOutcome {
        m_prime: result.completed,
        pca: Some(model),
        iterations_run: result.iterations_run,
        converged: result.converged,
        timings,
    })
}

/// Runs an imputation strategy (`Traditional` or `Pcai`) under `spec.time_budget_seconds`.
pub fn run_imputation(ds: &MaskedDataset, spec: &PipelineSpec) -> Result<ImputationOutcome> {
    spec.validate()?;
    run_imputation_within(ds, spec, &Deadline::after_secs(spec.time_budget_seconds))
}

pub(crate) fn run_imputation_within(
    ds: &MaskedDataset,
    spec: &PipelineSpec,
    deadline: &Deadline,
) -> Result<ImputationOutcome> {
    match spec.strategy {
        Strategy::Traditional => traditional_within(ds, &spec.imputer, deadline),
        Strategy::Pcai => pcai_within(ds, &spec.imputer, spec.components(), deadline),
        other => contract(format!("{other} is a classification strategy")),
    }
}

/// Trained PIC pipeline.
#[derive(Debug, Clone)]
pub struct PicModel {
    pub pca_f: PcaModel,
    pub pca_m: Option<PcaModel>,
    pub classifier: ClassifierModel,
    q: usize,
    cols: usize,
}

impl PicModel {
    pub fn reduce_miss(&self) -> bool {
        self.pca_m.is_some()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Width of the classifier input.
    pub fn input_width(&self) -> usize {
        self.classifier.n_features()
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationOutcome {
    pub accuracy: f64,
    /// Number of features the classifier was trained on.
    pub input_width: usize,
    pub predictions: Vec<usize>,
    pub timings: StageTimings,
}

#[derive(Debug, Clone)]
pub struct PicOutcome {
    pub model: PicModel,
    pub accuracy: f64,
    pub predictions: Vec<usize>,
    pub timings: StageTimings,
}

fn require_classification_pair(train: &MaskedDataset, test: &MaskedDataset) -> Result<()> {
    if train.cols() != test.cols() || train.q() != test.q() {
        return contract("train and test must share column count and q");
    }
    if train.labels().is_none() || test.labels().is_none() {
        return contract("classification strategies need labels on train and test");
    }
    Ok(())
}

/// PIC: PCA on `ℱ_train`, project `ℱ_test`, impute `ℳ` on each split beside
/// its scores, optionally reduce `ℳ′`, then train and score the classifier.
pub fn pic_run(train: &MaskedDataset, test: &MaskedDataset, spec: &PipelineSpec) -> Result<PicOutcome> {
    spec.validate()?;
    pic_within(train, test, spec, &Deadline::after_secs(spec.time_budget_seconds))
}

pub(crate) fn pic_within(
    train: &MaskedDataset,
    test: &MaskedDataset,
    spec: &PipelineSpec,
    deadline: &Deadline,
) -> Result<PicOutcome> {
    let reduce_miss = match spec.strategy {
        Strategy::Pic => false,
        Strategy::PicReduce => true,
        other => return contract(format!("pic_run needs pic or pic_reduce, got {other}")),
    };
    require_classification_pair(train, test)?;
    require_split_partition(train)?;

    let mut timings = StageTimings::new();
    let (r_train, pca_f) = timings.time(stage::PCA_FIT, || {
        fit_pca(&train.observed_block(), spec.components())
    })?;
    let r_test = timings.time(stage::PROJECTION, || project(&pca_f, &test.observed_block()))?;
    deadline.check()?;

    let (m_train, mask_train) = train.missing_block();
    let (m_test, mask_test) = test.missing_block();
    let m_train = timings
        .time(stage::IMPUTATION, || {
            impute_beside(&r_train, &m_train, &mask_train, &spec.imputer, deadline)
        })?
        .completed;
    let m_test = timings
        .time(stage::IMPUTATION, || {
            impute_beside(&r_test, &m_test, &mask_test, &spec.imputer, deadline)
        })?
        .completed;

    let (rm_train, rm_test, pca_m) = if reduce_miss {
        let (rm_train, pca_m) = timings.time(stage::PCA_FIT, || fit_pca(&m_train, spec.components()))?;
        let rm_test = timings.time(stage::PROJECTION, || project(&pca_m, &m_test))?;
        (rm_train, rm_test, Some(pca_m))
    } else {
        (m_train, m_test, None)
    };
    deadline.check()?;

    let x_train = concat_columns(&r_train, &rm_train);
    let x_test = concat_columns(&r_test, &rm_test);
    let (y_train, y_test) = (train.labels().unwrap(), test.labels().unwrap());
    let classifier = timings.time(stage::TRAIN, || {
        train_linear_svm(&x_train, y_train, &spec.svm_config())
    })?;
    let predictions = timings.time(stage::EVALUATE, || classifier.predict(&x_test));

    Ok(PicOutcome {
        accuracy: accuracy(&predictions, y_test),
        predictions,
        model: PicModel {
            pca_f,
            pca_m,
            classifier,
            q: train.q(),
            cols: train.cols(),
        },
        timings,
    })
}

/// Predicts the label of a complete sample `x` (length `cols`).
pub fn pic_predict(model: &PicModel, x: &[f64]) -> Result<usize> {
    if x.len() != model.cols {
        return contract(format!(
            "sample has {} values, model expects {}",
            x.len(),
            model.cols
        ));
    }
    let (x_f, x_m) = x.split_at(model.q);
    let r = project(&model.pca_f, &Matrix::from_row_slice(1, x_f.len(), x_f))?;
    let r_m = match &model.pca_m {
        Some(pca_m) => project(pca_m, &Matrix::from_row_slice(1, x_m.len(), x_m))?,
        None => {
            if x_m.iter().any(|v| !v.is_finite()) {
                return contract("sample contains missing or non-finite entries");
            }
            Matrix::from_row_slice(1, x_m.len(), x_m)
        }
    };
    let features: Vec<f64> = r.iter().chain(r_m.iter()).copied().collect();
    Ok(model.classifier.predict_one(&features))
}

/// Baseline: impute each split on the full matrix, fit one PCA on the imputed
/// training matrix, project both splits, then classify.
pub fn pca_on_full(
    train: &MaskedDataset,
    test: &MaskedDataset,
    spec: &PipelineSpec,
) -> Result<ClassificationOutcome> {
    spec.validate()?;
    pca_on_full_within(train, test, spec, &Deadline::after_secs(spec.time_budget_seconds))
}

pub(crate) fn pca_on_full_within(
    train: &MaskedDataset,
    test: &MaskedDataset,
    spec: &PipelineSpec,
    deadline: &Deadline,
) -> Result<ClassificationOutcome> {
    require_classification_pair(train, test)?;
    let mut timings = StageTimings::new();
    let full_train = timings.time(stage::IMPUTATION, || {
        impute_within(&spec.imputer, train.data(), train.mask(), deadline)
    })?;
    let full_test = timings.time(stage::IMPUTATION, || {
        impute_within(&spec.imputer, test.data(), test.mask(), deadline)
    })?;
    let (x_train, pca) = timings.time(stage::PCA_FIT, || {
        fit_pca(&full_train.completed, spec.components())
    })?;
    let x_test = timings.time(stage::PROJECTION, || project(&pca, &full_test.completed))?;
    deadline.check()?;
    let (y_train, y_test) = (train.labels().unwrap(), test.labels().unwrap());
    let classifier = timings.time(stage::TRAIN, || {
        train_linear_svm(&x_train, y_train, &spec.svm_config())
    })?;
    let predictions = timings.time(stage::EVALUATE, || classifier.predict(&x_test));
    Ok(ClassificationOutcome {
        accuracy: accuracy(&predictions, y_test),
        input_width: x_train.ncols(),
        predictions,
        timings,
    })
}

/// Runs any classification strategy on one train/test pair.
pub fn run_classification(
    train: &MaskedDataset,
    test: &MaskedDataset,
    spec: &PipelineSpec,
) -> Result<ClassificationOutcome> {
    spec.validate()?;
    run_classification_within(train, test, spec, &Deadline::after_secs(spec.time_budget_seconds))
}

pub(crate) fn run_classification_within(
    train: &MaskedDataset,
    test: &MaskedDataset,
    spec: &PipelineSpec,
    deadline: &Deadline,
) -> Result<ClassificationOutcome> {
    match spec.strategy {
        Strategy::Pic | Strategy::PicReduce => {
            let out = pic_within(train, test, spec, deadline)?;
            Ok(ClassificationOutcome {
                accuracy: out.accuracy,
                input_width: out.model.input_width(),
                predictions: out.predictions,
                timings: out.timings,
            })
        }
        Strategy::PcaOnFull => pca_on_full_within(train, test, spec, deadline),
        other => contract(format!("{other} is an imputation strategy")),
    }
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub score: CvScore,
    /// Classifier input width per fold.
    pub input_widths: Vec<usize>,
    pub timings: StageTimings,
}

/// k-fold cross-validation of a classification strategy. Fold `f` runs with
/// a seed derived from `spec.seed` and `f`.
pub fn cross_validate(ds: &MaskedDataset, spec: &PipelineSpec, plan: &CvPlan) -> Result<CvOutcome> {
    spec.validate()?;
    cross_validate_within(ds, spec, plan, &Deadline::after_secs(spec.time_budget_seconds))
}

pub(crate) fn cross_validate_within(
    ds: &MaskedDataset,
    spec: &PipelineSpec,
    plan: &CvPlan,
    deadline: &Deadline,
) -> Result<CvOutcome> {
    let Some(labels) = ds.labels() else {
        return contract("cross-validation needs labels");
    };
    let fold_of = fold_assignment(labels, plan)?;
    let mut folds = Vec::with_capacity(plan.folds);
    let mut widths = Vec::with_capacity(plan.folds);
    let mut timings = StageTimings::new();
    for f in 0..plan.folds {
        let (train_rows, test_rows) = crate::eval::cv_fold_rows(&fold_of, f);
        let train = ds.select_rows(&train_rows)?;
        let test = ds.select_rows(&test_rows)?;
        let fold_spec = spec.with_seed(derive_seed(spec.seed, &[f as u64]));
        let out = run_classification_within(&train, &test, &fold_spec, deadline)?;
        folds.push(out.accuracy);
        widths.push(out.input_width);
        timings.merge(&out.timings);
    }
    Ok(CvOutcome {
        score: CvScore::from_folds(folds),
        input_widths: widths,
        timings,
    })
}
