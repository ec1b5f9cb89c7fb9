//! One-vs-rest linear SVM trained with Pegasos-style subgradient descent.
//!
//! Each class gets a hinge-loss machine with L2 penalty `reg_lambda`. The
//! bias is an extra weight on a constant feature and is penalized with the
//! rest. Step `t` (counting samples across epochs, starting at 1) uses the
//! learning rate `1 / (reg_lambda * t)`, followed by projection onto the
//! ball of radius `1 / sqrt(reg_lambda)`. Rows are visited in a fresh seeded
//! shuffle every epoch. The returned weights average the iterates of the
//! final epoch.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::error::{contract, Result};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub epochs: usize,
    pub reg_lambda: f64,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            epochs: 40,
            reg_lambda: 1e-3,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub(crate) fn for_fold(&self, fold: u64) -> Self {
        Self {
            seed: derive_seed(self.seed, &[fold]),
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    /// features × classes
    weights: Matrix,
    bias: Vec<f64>,
}

impl ClassifierModel {
    pub fn from_parts(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if weights.ncols() != bias.len() || bias.len() < 2 {
            return contract("classifier needs one weight column and one bias per class, C >= 2");
        }
        Ok(Self { weights, bias })
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn classes(&self) -> usize {
        self.bias.len()
    }

    pub fn n_features(&self) -> usize {
        self.weights.nrows()
    }

    /// Per-class scores `x · w_c + b_c`.
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        (0..self.classes())
            .map(|c| {
                self.weights
                    .column(c)
                    .iter()
                    .zip(x)
                    .fold(self.bias[c], |acc, (w, v)| acc + w * v)
            })
            .collect()
    }

    pub fn predict_one(&self, x: &[f64]) -> usize {
        argmax(&self.scores(x))
    }

    pub fn predict(&self, x: &Matrix) -> Vec<usize> {
        let mut row = vec![0.0; x.ncols()];
        (0..x.nrows())
            .map(|i| {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = x[(i, j)];
                }
                self.predict_one(&row)
            })
            .collect()
    }
}

/// Index of the largest score, ties to the lower index.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = c;
        }
    }
    best
}

pub fn train_linear_svm(x: &Matrix, y: &[usize], cfg: &SvmConfig) -> Result<ClassifierModel> {
    let (n, d) = x.shape();
    if n != y.len() {
        return contract(format!("{n} rows but {} labels", y.len()));
    }
    if !(cfg.reg_lambda > 0.0) || cfg.epochs == 0 {
        return contract("SVM needs reg_lambda > 0 and at least one epoch");
    }
    if x.iter().any(|v| !v.is_finite()) {
        return contract("SVM input contains missing or non-finite entries");
    }
    let classes = y.iter().copied().max().map_or(0, |m| m + 1);
    let present = (0..classes).filter(|c| y.contains(c)).count();
    if present < 2 {
        return contract("SVM training needs at least two classes");
    }

    // row-major copy with a trailing constant feature for the bias
    let width = d + 1;
    let mut rows = vec![1.0; n * width];
    for i in 0..n {
        for j in 0..d {
            rows[i * width + j] = x[(i, j)];
        }
    }

    let lambda = cfg.reg_lambda;
    let radius = 1.0 / lambda.sqrt();
    let mut w = vec![vec![0.0; width]; classes];
    let mut avg = vec![vec![0.0; width]; classes];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng_from_seed(cfg.seed);
    let mut t = 0u64;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let last = epoch + 1 == cfg.epochs;
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let xi = &rows[i * width..(i + 1) * width];
            for (c, wc) in w.iter_mut().enumerate() {
                let target = if y[i] == c { 1.0 } else { -1.0 };
                let margin = target * dot(wc, xi);
                let decay = 1.0 - eta * lambda;
                wc.iter_mut().for_each(|v| *v *= decay);
                if margin < 1.0 {
                    for (v, &f) in wc.iter_mut().zip(xi) {
                        *v += eta * target * f;
                    }
                }
                let norm = dot(wc, wc).sqrt();
                if norm > radius {
                    let s = radius / norm;
                    wc.iter_mut().for_each(|v| *v *= s);
                }
                if last {
                    for (a, &v) in avg[c].iter_mut().zip(wc.iter()) {
                        *a += v;
                    }
                }
            }
        }
    }

    let mut weights = Matrix::zeros(d, classes);
    let mut bias = vec![0.0; classes];
    for (c, a) in avg.iter().enumerate() {
        for j in 0..d {
            weights[(j, c)] = a[j] / n as f64;
        }
        bias[c] = a[d] / n as f64;
    }
    ClassifierModel::from_parts(weights, bias)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn train_acc(x: &Matrix, y: &[usize]) -> f64 {
        let model = train_linear_svm(x, y, &SvmConfig::default()).unwrap();
        super::super::accuracy(&model.predict(x), y)
    }

    #[test]
    fn two_points() {
        let x = Matrix::from_row_slice(2, 1, &[-1.0, 1.0]);
        assert_eq!(train_acc(&x, &[0, 1]), 1.0);
    }

    #[test]
    fn one_hot_rows() {
        let x = Matrix::identity(3, 3);
        assert_eq!(train_acc(&x, &[0, 1, 2]), 1.0);
    }

    #[test]
    fn single_class_is_an_error() {
        let x = Matrix::zeros(3, 2);
        assert!(train_linear_svm(&x, &[1, 1, 1], &SvmConfig::default()).is_err());
    }

    #[test]
    fn deterministic() {
        let x = Matrix::from_fn(12, 2, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let y: Vec<usize> = (0..12).map(|i| i % 3).collect();
        let cfg = SvmConfig { seed: 9, ..SvmConfig::default() };
        assert_eq!(train_linear_svm(&x, &y, &cfg).unwrap(), train_linear_svm(&x, &y, &cfg).unwrap());
    }

    #[test]
    fn argmax_ties_to_lower_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[2.0, 2.0]), 0);
    }

    proptest! {
        #[test]
        fn argmax_shift_invariant(scores in proptest::collection::vec(-50i32..50, 2..6), shift in -100i32..100) {
            let s: Vec<f64> = scores.iter().map(|&v| f64::from(v)).collect();
            let shifted: Vec<f64> = s.iter().map(|v| v + f64::from(shift)).collect();
            prop_assert_eq!(argmax(&s), argmax(&shifted));
        }
    }
}
