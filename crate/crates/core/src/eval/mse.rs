use crate::data::{Mask, Matrix};
use crate::error::{contract, Result};

/// Mean squared error over the masked positions only.
pub fn mse_masked(imputed: &Matrix, truth: &Matrix, mask: &Mask) -> Result<f64> {
    if imputed.shape() != truth.shape() || mask.shape() != truth.shape() {
        return contract(format!(
            "shape mismatch: imputed {:?}, truth {:?}, mask {:?}",
            imputed.shape(),
            truth.shape(),
            mask.shape()
        ));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, j) in mask.missing_positions() {
        sum += (imputed[(i, j)] - truth[(i, j)]).powi(2);
        count += 1;
    }
    if count == 0 {
        return contract("MSE over an empty mask is undefined");
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_imputation_scores_zero() {
        let t = Matrix::from_fn(3, 3, |i, j| (i + j) as f64);
        let mask = Mask::from_fn(3, 3, |i, j| i == j);
        assert_eq!(mse_masked(&t, &t, &mask).unwrap(), 0.0);
    }

    #[test]
    fn hand_arithmetic() {
        let truth = Matrix::from_row_slice(1, 3, &[1.0, 2.0, 9.0]);
        let imputed = Matrix::from_row_slice(1, 3, &[1.5, 2.0, -40.0]);
        let mask = Mask::from_fn(1, 3, |_, j| j < 2);
        assert_eq!(mse_masked(&imputed, &truth, &mask).unwrap(), 0.125);
    }

    #[test]
    fn empty_mask_is_an_error() {
        let t = Matrix::zeros(2, 2);
        assert!(mse_masked(&t, &t, &Mask::new(2, 2)).is_err());
        assert!(mse_masked(&t, &Matrix::zeros(2, 3), &Mask::new(2, 2)).is_err());
    }

    proptest! {
        #[test]
        fn nonnegative_and_permutation_invariant(
            a in proptest::collection::vec(-3.0f64..3.0, 12),
            b in proptest::collection::vec(-3.0f64..3.0, 12),
        ) {
            let imputed = Matrix::from_row_slice(3, 4, &a);
            let truth = Matrix::from_row_slice(3, 4, &b);
            let mask = Mask::from_fn(3, 4, |i, j| (i + j) % 2 == 0);
            let base = mse_masked(&imputed, &truth, &mask).unwrap();
            prop_assert!(base >= 0.0);
            let perm = [2usize, 0, 3, 1];
            let permuted = mse_masked(
                &imputed.select_columns(&perm),
                &truth.select_columns(&perm),
                &mask.permute_columns(&perm),
            ).unwrap();
            prop_assert!((base - permuted).abs() <= 1e-12 * base.max(1.0));
        }
    }
}
