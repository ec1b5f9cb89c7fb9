use rand::seq::SliceRandom;

use crate::data::Matrix;
use crate::error::{contract, Result};
use crate::rng::rng_from_seed;

use super::svm::{train_linear_svm, SvmConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvPlan {
    pub folds: usize,
    pub stratified: bool,
    pub seed: u64,
}

impl CvPlan {
    pub fn stratified(folds: usize, seed: u64) -> Self {
        Self {
            folds,
            stratified: true,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvScore {
    /// Unweighted mean of the per-fold accuracies.
    pub mean: f64,
    pub folds: Vec<f64>,
}

impl CvScore {
    pub fn from_folds(folds: Vec<f64>) -> Self {
        let mean = folds.iter().sum::<f64>() / folds.len() as f64;
        Self { mean, folds }
    }
}

/// Fold index of every row.
///
/// Stratified plans shuffle each class separately and deal its members
/// round-robin, continuing the deal where the previous class stopped, so
/// per-class counts per fold differ by at most one.
pub fn fold_assignment(labels: &[usize], plan: &CvPlan) -> Result<Vec<usize>> {
    let n = labels.len();
    if plan.folds < 2 {
        return contract("cross-validation needs at least 2 folds");
    }
    if plan.folds > n {
        return contract(format!("{} folds for {n} rows", plan.folds));
    }
    let mut rng = rng_from_seed(plan.seed);
    let mut fold_of = vec![0usize; n];
    if plan.stratified {
        let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut dealt = 0usize;
        for class in 0..n_classes {
            let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
            if members.is_empty() {
                continue;
            }
            if members.len() < plan.folds {
                return contract(format!(
                    "class {class} has {} rows, fewer than {} folds",
                    members.len(),
                    plan.folds
                ));
            }
            members.shuffle(&mut rng);
            for row in members {
                fold_of[row] = dealt % plan.folds;
                dealt += 1;
            }
        }
    } else {
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        for (slot, row) in rows.into_iter().enumerate() {
            fold_of[row] = slot % plan.folds;
        }
    }
    Ok(fold_of)
}

/// Rows (train, held-out) for fold `f`.
pub(crate) fn fold_rows(fold_of: &[usize], f: usize) -> (Vec<usize>, Vec<usize>) {
    (0..fold_of.len()).partition(|&i| fold_of[i] != f)
}

/// k-fold CV with a caller-supplied `fit_predict(train_x, train_y, test_x)`.
pub fn kfold_cv_with<F>(x: &Matrix, y: &[usize], plan: &CvPlan, mut fit_predict: F) -> Result<CvScore>
where
    F: FnMut(&Matrix, &[usize], &Matrix) -> Result<Vec<usize>>,
{
    if x.nrows() != y.len() {
        return contract(format!("{} rows but {} labels", x.nrows(), y.len()));
    }
    let fold_of = fold_assignment(y, plan)?;
    let mut scores = Vec::with_capacity(plan.folds);
    for f in 0..plan.folds {
        let (train, test) = fold_rows(&fold_of, f);
        let train_y: Vec<usize> = train.iter().map(|&i| y[i]).collect();
        let test_y: Vec<usize> = test.iter().map(|&i| y[i]).collect();
        let predicted = fit_predict(&x.select_rows(&train), &train_y, &x.select_rows(&test))?;
        scores.push(super::accuracy(&predicted, &test_y));
    }
    Ok(CvScore::from_folds(scores))
}

/// k-fold CV of the linear SVM. Fold `f` trains with a seed derived from
/// `svm.seed` and `f`.
pub fn kfold_cv(x: &Matrix, y: &[usize], plan: &CvPlan, svm: &SvmConfig) -> Result<CvScore> {
    let mut fold = 0u64;
    kfold_cv_with(x, y, plan, |tx, ty, vx| {
        let cfg = svm.for_fold(fold);
        fold += 1;
        Ok(train_linear_svm(tx, ty, &cfg)?.predict(vx))
    })
}
