//! Principal component analysis through an economy SVD of the centered data.
//!
//! The m×m covariance matrix is never formed, so the cost scales with
//! `min(n, m)` and fitting stays cheap when there are fewer samples than
//! features. Columns are centered but not scaled.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::error::{contract, Error, Result};

pub const DEFAULT_VARIANCE_TARGET: f64 = 0.95;

/// How many components to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Components {
    /// Smallest count whose cumulative explained-variance ratio reaches the target.
    VarianceTarget(f64),
    /// Explicit count, capped at `min(n - 1, m)`.
    Fixed(usize),
}

impl Default for Components {
    fn default() -> Self {
        Components::VarianceTarget(DEFAULT_VARIANCE_TARGET)
    }
}

#[derive(Debug, Clone)]
pub struct PcaModel {
    mean: DVector<f64>,
    /// m×k, one principal direction per column.
    components: Matrix,
    explained_ratio: Vec<f64>,
}

impl PcaModel {
    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn components(&self) -> &Matrix {
        &self.components
    }

    pub fn explained_ratio(&self) -> &[f64] {
        &self.explained_ratio
    }

    pub fn k(&self) -> usize {
        self.components.ncols()
    }

    /// Number of input features `m`.
    pub fn n_features(&self) -> usize {
        self.components.nrows()
    }

    /// Maps scores back into the input space: `R Vᵀ + mean`.
    pub fn reconstruct(&self, scores: &Matrix) -> Matrix {
        let mut out = scores * self.components.transpose();
        for mut row in out.row_iter_mut() {
            row += self.mean.transpose();
        }
        out
    }
}

fn ensure_finite(x: &Matrix, what: &str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        contract(format!("{what} contains missing or non-finite entries"))
    }
}

fn centered(x: &Matrix, mean: &DVector<f64>) -> Matrix {
    let mut c = x.clone();
    for mut row in c.row_iter_mut() {
        row -= mean.transpose();
    }
    c
}

/// Flips each column so its largest-magnitude entry is nonnegative.
fn canonicalize_signs(v: &mut Matrix) {
    for mut col in v.column_iter_mut() {
        let pivot = col
            .iter()
            .copied()
            .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
}

/// Fits PCA and returns the training scores `(X - mean) V` with the model.
pub fn fit_pca(x: &Matrix, components: Components) -> Result<(Matrix, PcaModel)> {
    let (n, m) = x.shape();
    if n < 2 {
        return contract("PCA needs at least two rows");
    }
    if m == 0 {
        return contract("PCA needs at least one column");
    }
    ensure_finite(x, "PCA input")?;
    if let Components::VarianceTarget(t) = components {
        if !(t > 0.0 && t <= 1.0) {
            return contract(format!("variance target {t} outside (0, 1]"));
        }
    }
    if let Components::Fixed(0) = components {
        return contract("explicit component count must be positive");
    }

    let mean = x.row_mean().transpose();
    let xc = centered(x, &mean);
    let max_k = (n - 1).min(m);

    let svd = xc.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD did not return right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });
    let variances: Vec<f64> = order
        .iter()
        .map(|&i| svd.singular_values[i].powi(2))
        .collect();
    let total: f64 = variances.iter().sum();

    if total <= 0.0 {
        let k = match components {
            Components::VarianceTarget(_) => 1,
            Components::Fixed(k) => k.min(max_k),
        };
        let model = PcaModel {
            mean,
            components: Matrix::identity(m, k),
            explained_ratio: {
                let mut r = vec![0.0; k];
                r[0] = 1.0;
                r
            },
        };
        return Ok((Matrix::zeros(n, k), model));
    }

    let ratios: Vec<f64> = variances.iter().map(|v| v / total).collect();
    let k = match components {
        Components::Fixed(k) => k.min(max_k),
        Components::VarianceTarget(target) => {
            let mut cumulative = 0.0;
            let mut k = max_k;
            for (idx, r) in ratios.iter().take(max_k).enumerate() {
                cumulative += r;
                if cumulative >= target {
                    k = idx + 1;
                    break;
                }
            }
            k
        }
    };

    let mut v = Matrix::zeros(m, k);
    for (c, &src) in order.iter().take(k).enumerate() {
        v.set_column(c, &v_t.row(src).transpose());
    }
    canonicalize_signs(&mut v);

    let scores = &xc * &v;
    let model = PcaModel {
        mean,
        components: v,
        explained_ratio: ratios[..k].to_vec(),
    };
    Ok((scores, model))
}

/// Centers `y` with the training mean and projects it onto the components.
pub fn project(model: &PcaModel, y: &Matrix) -> Result<Matrix> {
    if y.ncols() != model.n_features() {
        return contract(format!(
            "projection input has {} columns, model expects {}",
            y.ncols(),
            model.n_features()
        ));
    }
    ensure_finite(y, "projection input")?;
    Ok(centered(y, &model.mean) * &model.components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_abs(m: &Matrix) -> f64 {
        m.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    #[test]
    fn two_points_on_an_axis() {
        let x = Matrix::from_row_slice(2, 2, &[0.0, 0.0, 2.0, 0.0]);
        let (r, model) = fit_pca(&x, Components::default()).unwrap();
        assert_eq!(model.k(), 1);
        assert_eq!(model.explained_ratio(), &[1.0]);
        assert!((model.components()[(0, 0)] - 1.0).abs() < 1e-12);
        assert!(model.components()[(1, 0)].abs() < 1e-12);
        assert!((r[(0, 0)] + 1.0).abs() < 1e-12);
        assert!((r[(1, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn variance_target_picks_minimal_count() {
        // orthogonal design with per-axis variances proportional to (0.6, 0.3, 0.08, 0.02)
        let scales = [0.6f64.sqrt(), 0.3f64.sqrt(), 0.08f64.sqrt(), 0.02f64.sqrt()];
        let mut x = Matrix::zeros(8, 4);
        for j in 0..4 {
            x[(2 * j, j)] = scales[j];
            x[(2 * j + 1, j)] = -scales[j];
        }
        let (_, model) = fit_pca(&x, Components::VarianceTarget(0.95)).unwrap();
        assert_eq!(model.k(), 3);
        let expected = [0.6, 0.3, 0.08];
        for (got, want) in model.explained_ratio().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn projecting_the_mean_gives_zero() {
        let x = Matrix::from_fn(5, 3, |i, j| ((i * 3 + j) as f64).sin());
        let (_, model) = fit_pca(&x, Components::Fixed(2)).unwrap();
        let y = model.mean().transpose().into_owned();
        let p = project(&model, &Matrix::from_row_slice(1, 3, y.as_slice())).unwrap();
        assert!(max_abs(&p) < 1e-14);
    }

    #[test]
    fn projecting_training_data_matches_scores() {
        let x = Matrix::from_fn(7, 4, |i, j| ((i * 5 + j * 3) as f64).cos() + j as f64);
        let (r, model) = fit_pca(&x, Components::VarianceTarget(0.99)).unwrap();
        let p = project(&model, &x).unwrap();
        assert!(max_abs(&(p - r)) < 1e-10);
    }

    #[test]
    fn errors_on_bad_input() {
        let one_row = Matrix::from_row_slice(1, 2, &[1.0, 2.0]);
        assert!(fit_pca(&one_row, Components::default()).is_err());
        let mut x = Matrix::from_fn(3, 2, |i, j| (i + j) as f64);
        x[(1, 1)] = f64::NAN;
        assert!(fit_pca(&x, Components::default()).is_err());
        let ok = Matrix::from_fn(3, 2, |i, j| (i * j) as f64);
        let (_, model) = fit_pca(&ok, Components::default()).unwrap();
        assert!(project(&model, &Matrix::zeros(1, 3)).is_err());
        assert!(fit_pca(&ok, Components::VarianceTarget(0.0)).is_err());
    }

    #[test]
    fn zero_variance_input() {
        let x = Matrix::from_element(4, 3, 2.5);
        let (r, model) = fit_pca(&x, Components::default()).unwrap();
        assert_eq!(model.k(), 1);
        assert_eq!(model.explained_ratio(), &[1.0]);
        assert_eq!(model.components().column(0).as_slice(), &[1.0, 0.0, 0.0]);
        assert!(max_abs(&r) == 0.0);
    }

    #[test]
    fn explicit_k_is_capped() {
        let x = Matrix::from_fn(3, 5, |i, j| ((i + 1) * (j + 2)) as f64 + (i * j) as f64 * 0.3);
        let (r, model) = fit_pca(&x, Components::Fixed(10)).unwrap();
        assert_eq!(model.k(), 2);
        assert_eq!(r.shape(), (3, 2));
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix> {
        (2usize..9, 1usize..6).prop_flat_map(|(n, m)| {
            proptest::collection::vec(-5.0f64..5.0, n * m)
                .prop_map(move |v| Matrix::from_row_slice(n, m, &v))
        })
    }

    proptest! {
        #[test]
        fn fitted_models_satisfy_invariants(x in arb_matrix(), target in 0.3f64..=1.0) {
            let (n, m) = x.shape();
            let (_, model) = fit_pca(&x, Components::VarianceTarget(target)).unwrap();
            let k = model.k();
            prop_assert!(k >= 1 && k <= (n - 1).min(m));
            let gram = model.components().transpose() * model.components();
            prop_assert!(max_abs(&(gram - Matrix::identity(k, k))) <= 1e-8);
            let r = model.explained_ratio();
            prop_assert!(r.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(r.iter().sum::<f64>() <= 1.0 + 1e-10);
            for col in model.components().column_iter() {
                let pivot = col.iter().copied().fold(0.0f64, |b, v| if v.abs() > b.abs() { v } else { b });
                prop_assert!(pivot >= 0.0);
            }
        }

        #[test]
        fn reconstruction_error_is_monotone(x in arb_matrix()) {
            let (n, m) = x.shape();
            let max_k = (n - 1).min(m);
            let mut prev = f64::INFINITY;
            for k in 1..=max_k {
                let (r, model) = fit_pca(&x, Components::Fixed(k)).unwrap();
                let err = (model.reconstruct(&r) - &x).norm();
                prop_assert!(err <= prev + 1e-9);
                prev = err;
            }
        }
    }
}
