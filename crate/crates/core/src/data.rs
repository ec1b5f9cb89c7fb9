//! Dense datasets with an explicit missingness mask.
//!
//! A [`MaskedDataset`] couples a dense [`Matrix`] with a [`Mask`] and a
//! [`ColumnPartition`]: the leading `q` columns form the fully observed block,
//! the trailing columns form the block that may contain missing entries. The
//! mask is authoritative; missing cells of the matrix additionally hold `NaN`
//! as a mirror so that serialized forms stay self-describing.

use std::ops::Range;

use rand::seq::index;
use rand::seq::SliceRandom;

use crate::error::{contract, Result};
use crate::rng::rng_from_seed;

pub type Matrix = nalgebra::DMatrix<f64>;

/// Sentinel stored in missing cells.
pub const MISSING: f64 = f64::NAN;

/// Boolean missingness pattern, `true` = missing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    /// Mask with a bit set wherever `data` holds a non-finite value.
    pub fn from_non_finite(data: &Matrix) -> Self {
        let mut mask = Self::new(data.nrows(), data.ncols());
        for i in 0..data.nrows() {
            for j in 0..data.ncols() {
                if !data[(i, j)].is_finite() {
                    mask.set(i, j, true);
                }
            }
        }
        mask
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = Self::new(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                mask.bits[i * cols + j] = f(i, j);
            }
        }
        mask
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_missing(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, missing: bool) {
        self.bits[i * self.cols + j] = missing;
    }

    pub fn count_missing(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn any_missing(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }

    pub fn column_missing(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.is_missing(i, j)).count()
    }

    pub fn row_has_missing(&self, i: usize) -> bool {
        self.bits[i * self.cols..(i + 1) * self.cols].iter().any(|&b| b)
    }

    /// Positions `(row, col)` of all missing entries in row-major order.
    pub fn missing_positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(idx, _)| (idx / self.cols, idx % self.cols))
    }

    pub fn select_columns(&self, cols: Range<usize>) -> Self {
        let width = cols.len();
        Self::from_fn(self.rows, width, |i, j| self.is_missing(i, cols.start + j))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self.is_missing(rows[i], j))
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Mask) -> Self {
        assert_eq!(self.rows, other.rows, "mask row counts differ");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.is_missing(i, j)
            } else {
                other.is_missing(i, j - self.cols)
            }
        })
    }

    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.rows, perm.len(), |i, j| self.is_missing(i, perm[j]))
    }
}

/// Split point between the fully observed block `[0, q)` and the block with
/// missing values `[q, cols)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnPartition {
    pub q: usize,
}

impl ColumnPartition {
    pub fn new(q: usize) -> Self {
        Self { q }
    }

    pub fn observed(&self) -> Range<usize> {
        0..self.q
    }

    pub fn missing(&self, cols: usize) -> Range<usize> {
        self.q..cols
    }
}

/// Matrix, mask, column partition, and optional class labels.
#[derive(Debug, Clone)]
pub struct MaskedDataset {
    data: Matrix,
    mask: Mask,
    partition: ColumnPartition,
    labels: Option<Vec<usize>>,
}

impl MaskedDataset {
    /// Validates the invariants and mirrors the mask into the matrix as `NaN`.
    pub fn new(
        mut data: Matrix,
        mask: Mask,
        partition: ColumnPartition,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        if mask.shape() != data.shape() {
            return contract(format!(
                "mask shape {:?} does not match data shape {:?}",
                mask.shape(),
                data.shape()
            ));
        }
        if partition.q > data.ncols() {
            return contract(format!(
                "partition q = {} exceeds column count {}",
                partition.q,
                data.ncols()
            ));
        }
        for i in 0..data.nrows() {
            for j in 0..data.ncols() {
                if mask.is_missing(i, j) {
                    if j < partition.q {
                        return contract(format!(
                            "entry ({i}, {j}) is missing inside the fully observed block (q = {})",
                            partition.q
                        ));
                    }
                    data[(i, j)] = MISSING;
                } else if !data[(i, j)].is_finite() {
                    return contract(format!("observed entry ({i}, {j}) is not finite"));
                }
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != data.nrows() {
                return contract(format!(
                    "{} labels for {} rows",
                    labels.len(),
                    data.nrows()
                ));
            }
        }
        Ok(Self {
            data,
            mask,
            partition,
            labels,
        })
    }

    /// Fully observed dataset; every column counts as observed (`q = cols`).
    pub fn complete(data: Matrix, labels: Option<Vec<usize>>) -> Result<Self> {
        let mask = Mask::new(data.nrows(), data.ncols());
        let q = data.ncols();
        Self::new(data, mask, ColumnPartition::new(q), labels)
    }

    pub fn data(&self) -> &Matrix {
        &self.data
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn partition(&self) -> ColumnPartition {
        self.partition
    }

    pub fn q(&self) -> usize {
        self.partition.q
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    /// Number of classes implied by the labels (`max + 1`, at least 2).
    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(2, |m| (m + 1).max(2)))
    }

    /// Same data with a different partition point.
    pub fn with_partition(&self, q: usize) -> Result<Self> {
        Self::new(
            self.data.clone(),
            self.mask.clone(),
            ColumnPartition::new(q),
            self.labels.clone(),
        )
    }

    pub fn with_labels(self, labels: Option<Vec<usize>>) -> Result<Self> {
        Self::new(self.data, self.mask, self.partition, labels)
    }

    /// The fully observed block `ℱ` (columns `< q`).
    pub fn observed_block(&self) -> Matrix {
        self.data.columns(0, self.partition.q).into_owned()
    }

    /// The block `ℳ` (columns `>= q`) with its mask.
    pub fn missing_block(&self) -> (Matrix, Mask) {
        let range = self.partition.missing(self.cols());
        (
            self.data.columns(range.start, range.len()).into_owned(),
            self.mask.select_columns(range),
        )
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let data = self.data.select_rows(rows);
        let mask = self.mask.select_rows(rows);
        let labels = self
            .labels
            .as_ref()
            .map(|l| rows.iter().map(|&r| l[r]).collect());
        Self::new(data, mask, self.partition, labels)
    }
}

/// Permutes columns so every column without missing bits comes first, in
/// stable order. Returns the dataset (with `q` = number of such columns) and
/// the permutation, where `perm[new] = old`.
pub fn rearrange_columns(data: &Matrix, mask: &Mask) -> Result<(MaskedDataset, Vec<usize>)> {
    if mask.shape() != data.shape() {
        return contract(format!(
            "mask shape {:?} does not match data shape {:?}",
            mask.shape(),
            data.shape()
        ));
    }
    let (complete, partial): (Vec<usize>, Vec<usize>) =
        (0..data.ncols()).partition(|&j| mask.column_missing(j) == 0);
    let q = complete.len();
    let perm: Vec<usize> = complete.into_iter().chain(partial).collect();
    let permuted = data.select_columns(&perm);
    let ds = MaskedDataset::new(
        permuted,
        mask.permute_columns(&perm),
        ColumnPartition::new(q),
        None,
    )?;
    Ok((ds, perm))
}

/// Undoes a permutation returned by [`rearrange_columns`].
pub fn restore_column_order(data: &Matrix, perm: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(data.nrows(), data.ncols());
    for (new, &old) in perm.iter().enumerate() {
        out.set_column(old, &data.column(new));
    }
    out
}

/// Count of entries selected for masking at `rate` out of `total` cells.
pub fn mcar_count(rate: f64, total: usize) -> usize {
    // absorb binary representation error of decimal rates such as 0.6
    let raw = (rate * total as f64 + 1e-9).floor();
    (raw as usize).min(total)
}

/// Masks exactly `⌊rate · |ℳ|⌋` entries of the `ℳ` block, drawn uniformly
/// without replacement.
pub fn apply_mcar(truth: &MaskedDataset, rate: f64, seed: u64) -> Result<MaskedDataset> {
    if !(0.0..=1.0).contains(&rate) {
        return contract(format!("missing rate {rate} outside [0, 1]"));
    }
    if truth.mask().any_missing() {
        return contract("apply_mcar expects ground truth without missing entries");
    }
    let q = truth.q();
    let width = truth.cols() - q;
    if width == 0 && rate > 0.0 {
        return contract("no columns beyond q to mask");
    }
    let total = truth.rows() * width;
    let amount = mcar_count(rate, total);

    let mut rng = rng_from_seed(seed);
    let mut mask = Mask::new(truth.rows(), truth.cols());
    for idx in index::sample(&mut rng, total, amount) {
        mask.set(idx / width, q + idx % width, true);
    }
    MaskedDataset::new(
        truth.data().clone(),
        mask,
        truth.partition(),
        truth.labels().map(<[usize]>::to_vec),
    )
}

/// Disjoint train/test row split. Row indices are returned in ascending order.
pub fn split_row_indices(
    n_rows: usize,
    labels: Option<&[usize]>,
    test_fraction: f64,
    seed: u64,
    stratify: bool,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return contract(format!("test fraction {test_fraction} outside (0, 1)"));
    }
    if n_rows < 2 {
        return contract("need at least two rows to split");
    }
    let mut rng = rng_from_seed(seed);
    let mut test = Vec::new();
    let take = |n: usize| ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);

    if stratify {
        let Some(labels) = labels else {
            return contract("stratified split requested without labels");
        };
        let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
        for class in 0..n_classes {
            let mut members: Vec<usize> = (0..n_rows).filter(|&i| labels[i] == class).collect();
            if members.is_empty() {
                continue;
            }
            if members.len() < 2 {
                return contract(format!("class {class} has fewer than 2 rows"));
            }
            members.shuffle(&mut rng);
            let n_test = take(members.len());
            test.extend_from_slice(&members[..n_test]);
        }
    } else {
        let mut rows: Vec<usize> = (0..n_rows).collect();
        rows.shuffle(&mut rng);
        test.extend_from_slice(&rows[..take(n_rows)]);
    }
    test.sort_unstable();
    let mut in_test = vec![false; n_rows];
    for &i in &test {
        in_test[i] = true;
    }
    let train = (0..n_rows).filter(|&i| !in_test[i]).collect();
    Ok((train, test))
}

pub fn split_rows(
    ds: &MaskedDataset,
    test_fraction: f64,
    seed: u64,
    stratify: bool,
) -> Result<(MaskedDataset, MaskedDataset)> {
    let (train, test) = split_row_indices(ds.rows(), ds.labels(), test_fraction, seed, stratify)?;
    Ok((ds.select_rows(&train)?, ds.select_rows(&test)?))
}

/// Per-column min-max scaling to `[0, 1]`; constant columns map to 0.
/// Missing cells are ignored and stay missing.
pub fn minmax_normalize(data: &Matrix, mask: &Mask) -> Matrix {
    let mut out = data.clone();
    for j in 0..data.ncols() {
        let (lo, hi) = (0..data.nrows())
            .filter(|&i| !mask.is_missing(i, j))
            .map(|i| data[(i, j)])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        let span = hi - lo;
        for i in 0..data.nrows() {
            if mask.is_missing(i, j) {
                continue;
            }
            out[(i, j)] = if span > 0.0 {
                (data[(i, j)] - lo) / span
            } else {
                0.0
            };
        }
    }
    out
}
