//! Pluggable imputers.
//!
//! Every imputer consumes a matrix plus its [`Mask`] and returns an
//! [`ImputationResult`] whose observed entries are bit-for-bit copies of the
//! input. Iterative imputers start from a column-mean fill.

mod knn;
mod mean;
mod mice;
mod soft;
mod svd;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::Deadline;
use crate::data::{Mask, Matrix};
use crate::error::{contract, Error, Result};

pub use knn::impute_knn;
pub use mean::impute_mean;
pub use mice::impute_mice_ridge;
pub use soft::impute_soft;
pub use svd::impute_itersvd;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImputerKind {
    Mean,
    Knn,
    SoftImpute,
    IterativeSvd,
    MiceRidge,
}

impl ImputerKind {
    pub const ALL: [ImputerKind; 5] = [
        ImputerKind::Mean,
        ImputerKind::Knn,
        ImputerKind::SoftImpute,
        ImputerKind::IterativeSvd,
        ImputerKind::MiceRidge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ImputerKind::Mean => "mean",
            ImputerKind::Knn => "knn",
            ImputerKind::SoftImpute => "soft_impute",
            ImputerKind::IterativeSvd => "iterative_svd",
            ImputerKind::MiceRidge => "mice_ridge",
        }
    }
}

impl fmt::Display for ImputerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ImputerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        match norm.as_str() {
            "mean" => Ok(ImputerKind::Mean),
            "knn" | "knni" => Ok(ImputerKind::Knn),
            "soft_impute" | "softimpute" | "soft" => Ok(ImputerKind::SoftImpute),
            "iterative_svd" | "iterativesvd" | "itersvd" => Ok(ImputerKind::IterativeSvd),
            "mice_ridge" | "mice" => Ok(ImputerKind::MiceRidge),
            _ => Err(Error::Config(format!("unknown imputer {s:?}"))),
        }
    }
}

/// Imputer choice plus the hyperparameters of every kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImputerSpec {
    pub kind: ImputerKind,
    pub knn_k: usize,
    /// softImpute threshold as a fraction of the largest singular value of the mean fill.
    pub soft_lambda_frac: f64,
    pub soft_max_iter: usize,
    pub soft_tol: f64,
    pub svd_rank: usize,
    pub svd_max_iter: usize,
    pub svd_tol: f64,
    pub mice_cycles: usize,
    pub mice_ridge_alpha: f64,
}

impl Default for ImputerSpec {
    fn default() -> Self {
        Self {
            kind: ImputerKind::Mean,
            knn_k: 5,
            soft_lambda_frac: 0.1,
            soft_max_iter: 100,
            soft_tol: 1e-5,
            svd_rank: 10,
            svd_max_iter: 100,
            svd_tol: 1e-5,
            mice_cycles: 10,
            mice_ridge_alpha: 1e-3,
        }
    }
}

impl ImputerSpec {
    pub fn new(kind: ImputerKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn mean() -> Self {
        Self::new(ImputerKind::Mean)
    }

    pub fn knn(k: usize) -> Self {
        Self {
            knn_k: k,
            ..Self::new(ImputerKind::Knn)
        }
    }

    pub fn soft_impute() -> Self {
        Self::new(ImputerKind::SoftImpute)
    }

    pub fn iterative_svd(rank: usize) -> Self {
        Self {
            svd_rank: rank,
            ..Self::new(ImputerKind::IterativeSvd)
        }
    }

    pub fn mice_ridge() -> Self {
        Self::new(ImputerKind::MiceRidge)
    }

    pub fn validate(&self) -> Result<()> {
        let positive_int = [
            ("knn_k", self.knn_k),
            ("soft_max_iter", self.soft_max_iter),
            ("svd_rank", self.svd_rank),
            ("svd_max_iter", self.svd_max_iter),
        ];
        for (name, v) in positive_int {
            if v == 0 {
                return contract(format!("{name} must be positive"));
            }
        }
        if !(self.soft_lambda_frac > 0.0 && self.soft_lambda_frac < 1.0) {
            return contract("soft_lambda_frac must lie in (0, 1)");
        }
        for (name, v) in [
            ("soft_tol", self.soft_tol),
            ("svd_tol", self.svd_tol),
            ("mice_ridge_alpha", self.mice_ridge_alpha),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return contract(format!("{name} must be a positive real"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ImputationResult {
    pub completed: Matrix,
    pub iterations_run: usize,
    pub converged: bool,
    /// Penalized objective after each softImpute iteration; empty for other kinds.
    pub objective_trace: Vec<f64>,
    /// Entries kNN filled with the column mean for lack of an eligible neighbor.
    pub mean_fallbacks: usize,
}

impl ImputationResult {
    fn unchanged(x: &Matrix) -> Self {
        Self {
            completed: x.clone(),
            iterations_run: 0,
            converged: true,
            objective_trace: Vec::new(),
            mean_fallbacks: 0,
        }
    }
}

pub fn impute(spec: &ImputerSpec, x: &Matrix, mask: &Mask) -> Result<ImputationResult> {
    impute_within(spec, x, mask, &Deadline::none())
}

/// [`impute`] under a cooperative time budget.
pub fn impute_within(
    spec: &ImputerSpec,
    x: &Matrix,
    mask: &Mask,
    deadline: &Deadline,
) -> Result<ImputationResult> {
    spec.validate()?;
    check_inputs(x, mask)?;
    if !mask.any_missing() {
        return Ok(ImputationResult::unchanged(x));
    }
    match spec.kind {
        ImputerKind::Mean => mean::run(x, mask),
        ImputerKind::Knn => knn::run(x, mask, spec.knn_k, deadline),
        ImputerKind::SoftImpute => soft::run(
            x,
            mask,
            spec.soft_lambda_frac,
            spec.soft_max_iter,
            spec.soft_tol,
            deadline,
        ),
        ImputerKind::IterativeSvd => {
            svd::run(x, mask, spec.svd_rank, spec.svd_max_iter, spec.svd_tol, deadline)
        }
        ImputerKind::MiceRidge => {
            mice::run(x, mask, spec.mice_cycles, spec.mice_ridge_alpha, deadline)
        }
    }
}

fn check_inputs(x: &Matrix, mask: &Mask) -> Result<()> {
    if mask.shape() != x.shape() {
        return contract(format!(
            "mask shape {:?} does not match matrix shape {:?}",
            mask.shape(),
            x.shape()
        ));
    }
    for j in 0..x.ncols() {
        if mask.column_missing(j) == x.nrows() {
            return Err(Error::FullyMissingColumn(j));
        }
        for i in 0..x.nrows() {
            if !mask.is_missing(i, j) && !x[(i, j)].is_finite() {
                return contract(format!("observed entry ({i}, {j}) is not finite"));
            }
        }
    }
    Ok(())
}

/// Observed-entry mean of every column.
pub(crate) fn column_means(x: &Matrix, mask: &Mask) -> Vec<f64> {
    (0..x.ncols())
        .map(|j| {
            let (sum, count) = (0..x.nrows())
                .filter(|&i| !mask.is_missing(i, j))
                .fold((0.0, 0usize), |(s, c), i| (s + x[(i, j)], c + 1));
            if count == 0 {
                0.0
            } else {
                sum / count as f64
            }
        })
        .collect()
}

/// Copy of `x` with every missing entry replaced by its column mean.
pub(crate) fn mean_fill(x: &Matrix, mask: &Mask) -> Matrix {
    let means = column_means(x, mask);
    let mut out = x.clone();
    for (i, j) in mask.missing_positions() {
        out[(i, j)] = means[j];
    }
    out
}

/// Copies `source` into `target` at missing positions only.
pub(crate) fn write_missing(target: &mut Matrix, source: &Matrix, mask: &Mask) {
    for (i, j) in mask.missing_positions() {
        target[(i, j)] = source[(i, j)];
    }
}

/// Relative Frobenius change over the missing entries.
pub(crate) fn relative_change(old: &Matrix, new: &Matrix, mask: &Mask) -> f64 {
    let (mut diff, mut base) = (0.0, 0.0);
    for (i, j) in mask.missing_positions() {
        diff += (new[(i, j)] - old[(i, j)]).powi(2);
        base += old[(i, j)].powi(2);
    }
    if base > 0.0 {
        (diff / base).sqrt()
    } else {
        diff.sqrt()
    }
}
