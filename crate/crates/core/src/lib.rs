//! PCA-accelerated imputation for datasets whose columns split into a fully
//! observed block and a block with missing values.
//!
//! The fully observed block is reduced with PCA before the imputer sees it,
//! so the imputer works on `scores ∥ missing-block` instead of the full
//! matrix ([`pipeline::pcai_impute`]). The same idea extends to
//! imputation → (optional reduction) → classification pipelines
//! ([`pipeline::pic_run`]).
//!
//! Modules:
//! - [`data`]: matrices with a missingness mask, column partitioning, MCAR masking, row splits
//! - [`pca`]: economy-SVD PCA with variance-target component selection
//! - [`impute`]: mean, kNN, softImpute, IterativeSVD, and chained ridge imputers
//! - [`pipeline`]: traditional, PCAI, PIC, PIC-reduce, and PCA-on-full strategies
//! - [`eval`]: masked MSE, linear SVM, stratified k-fold CV, stage timing
//! - [`harness`]: CSV I/O, synthetic data, experiment sweeps, reports

// `!(x > 0.0)` guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod data;
pub mod error;
pub mod eval;
pub mod harness;
pub mod impute;
mod linalg;
pub mod pca;
pub mod pipeline;
pub mod rng;

pub use budget::Deadline;
pub use data::{apply_mcar, rearrange_columns, split_rows, ColumnPartition, Mask, MaskedDataset, Matrix};
pub use error::{Error, Result};
pub use impute::{impute, ImputationResult, ImputerKind, ImputerSpec};
pub use pca::{fit_pca, project, Components, PcaModel};
pub use pipeline::{PipelineSpec, Strategy};
