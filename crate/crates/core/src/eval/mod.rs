//! Measurement layer: masked MSE, a linear SVM, stratified k-fold
//! cross-validation, and wall-clock stage timing.

mod cv;
mod mse;
mod svm;
mod timing;

pub(crate) use cv::fold_rows as cv_fold_rows;
pub use cv::{fold_assignment, kfold_cv, kfold_cv_with, CvPlan, CvScore};
pub use mse::mse_masked;
pub use svm::{train_linear_svm, ClassifierModel, SvmConfig};
pub use timing::{time_stage, StageTimings};

/// Fraction of positions where `predicted` equals `truth`.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(predicted.len(), truth.len(), "prediction length mismatch");
    if truth.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

/// Index of the largest value, ties to the lower index.
pub(crate) fn argmax_slice(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}
