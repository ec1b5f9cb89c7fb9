//! Seeded low-rank synthetic datasets with linear-teacher labels.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{minmax_normalize, Mask, MaskedDataset, Matrix};
use crate::error::{contract, Result};
use crate::rng::{derive_seed, rng_from_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub rows: usize,
    pub cols: usize,
    /// True rank of the signal `A Bᵀ`.
    pub rank: usize,
    /// Standard deviation of the additive Gaussian noise.
    pub noise: f64,
    pub classes: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            rows: 1000,
            cols: 300,
            rank: 8,
            noise: 0.01,
            classes: 3,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 || self.rank >= self.rows.min(self.cols) {
            return contract(format!(
                "rank {} must lie in [1, min(rows, cols) - 1]",
                self.rank
            ));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return contract("noise must be a finite nonnegative real");
        }
        if self.classes < 2 {
            return contract("need at least two classes");
        }
        Ok(())
    }
}

fn normals(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Ground truth without missing entries: `A Bᵀ + noise·E`, min-max scaled
/// per column, labeled by `argmax` of a random linear map of the rows of `A`.
/// The returned dataset has `q = cols`; set the partition with
/// [`MaskedDataset::with_partition`].
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<MaskedDataset> {
    spec.validate()?;
    let (n, p, r) = (spec.rows, spec.cols, spec.rank);
    let mut rng = rng_from_seed(derive_seed(spec.seed, &[0]));
    let a = normals(&mut rng, n, r);
    let b = normals(&mut rng, p, r);
    let mut data = &a * b.transpose();
    if spec.noise > 0.0 {
        let mut noise_rng = rng_from_seed(derive_seed(spec.seed, &[1]));
        data += normals(&mut noise_rng, n, p) * spec.noise;
    }
    let data = minmax_normalize(&data, &Mask::new(n, p));

    let mut teacher_rng = rng_from_seed(derive_seed(spec.seed, &[2]));
    let teacher = normals(&mut teacher_rng, r, spec.classes);
    let logits = &a * teacher;
    let labels = logits
        .row_iter()
        .map(|row| crate::eval::argmax_slice(row.iter().copied()))
        .collect();
    MaskedDataset::complete(data, Some(labels))
}
