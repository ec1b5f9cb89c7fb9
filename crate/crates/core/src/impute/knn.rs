//! Nearest-neighbor imputation with a missing-aware Euclidean distance.
//!
//! The distance between rows `a` and `b` uses only coordinates observed in
//! both and is rescaled by `sqrt(m / shared)`. Rows sharing no observed
//! coordinate are never neighbors. Ties go to the lower row index, and the
//! selected neighbor values are summed in ascending row order.

use crate::budget::Deadline;
use crate::data::{Mask, Matrix};
use crate::error::{contract, Result};

use super::{check_inputs, column_means, ImputationResult};

pub fn impute_knn(x: &Matrix, mask: &Mask, k: usize) -> Result<ImputationResult> {
    check_inputs(x, mask)?;
    if k == 0 {
        return contract("kNN needs k >= 1");
    }
    run(x, mask, k, &Deadline::none())
}

/// Squared rescaled distance, or `None` when no coordinate is shared.
fn masked_sq_distance(x: &Matrix, mask: &Mask, a: usize, b: usize) -> Option<f64> {
    let m = x.ncols();
    let mut sum = 0.0;
    let mut shared = 0usize;
    for j in 0..m {
        if !mask.is_missing(a, j) && !mask.is_missing(b, j) {
            let d = x[(a, j)] - x[(b, j)];
            sum += d * d;
            shared += 1;
        }
    }
    (shared > 0).then(|| sum * (m as f64 / shared as f64))
}

pub(super) fn run(x: &Matrix, mask: &Mask, k: usize, deadline: &Deadline) -> Result<ImputationResult> {
    let (n, m) = x.shape();
    let means = column_means(x, mask);
    let mut completed = x.clone();
    let mut fallbacks = 0;
    let mut candidates: Vec<(f64, usize)> = Vec::with_capacity(n);

    for i in 0..n {
        if !mask.row_has_missing(i) {
            continue;
        }
        deadline.check()?;
        let distances: Vec<Option<f64>> = (0..n)
            .map(|r| if r == i { None } else { masked_sq_distance(x, mask, i, r) })
            .collect();

        for j in (0..m).filter(|&j| mask.is_missing(i, j)) {
            candidates.clear();
            candidates.extend(
                distances
                    .iter()
                    .enumerate()
                    .filter(|&(r, _)| !mask.is_missing(r, j))
                    .filter_map(|(r, d)| d.map(|d| (d, r))),
            );
            if candidates.is_empty() {
                completed[(i, j)] = means[j];
                fallbacks += 1;
                continue;
            }
            let take = k.min(candidates.len());
            if take < candidates.len() {
                candidates.select_nth_unstable_by(take - 1, |a, b| {
                    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
                });
            }
            let mut chosen: Vec<usize> = candidates[..take].iter().map(|&(_, r)| r).collect();
            chosen.sort_unstable();
            let sum: f64 = chosen.iter().map(|&r| x[(r, j)]).sum();
            completed[(i, j)] = sum / take as f64;
        }
    }

    Ok(ImputationResult {
        completed,
        iterations_run: 1,
        converged: true,
        objective_trace: Vec::new(),
        mean_fallbacks: fallbacks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_row_wins() {
        let x = Matrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, f64::NAN, 10.0, 20.0]);
        let out = impute_knn(&x, &Mask::from_non_finite(&x), 1).unwrap();
        assert_eq!(out.completed[(1, 1)], 2.0);
    }

    #[test]
    fn unanimous_neighbors() {
        let x = Matrix::from_row_slice(4, 2, &[0.0, 5.0, 1.0, 5.0, 7.0, 5.0, 3.0, f64::NAN]);
        let mask = Mask::from_non_finite(&x);
        for k in 1..=3 {
            assert_eq!(impute_knn(&x, &mask, k).unwrap().completed[(3, 1)], 5.0);
        }
    }

    #[test]
    fn full_neighborhood_is_the_mean() {
        let x = Matrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 10.0, 0.5, f64::NAN]);
        let out = impute_knn(&x, &Mask::from_non_finite(&x), 2).unwrap();
        assert_eq!(out.completed[(2, 1)], 5.0);
    }

    #[test]
    fn no_shared_coordinates_falls_back_to_mean() {
        let x = Matrix::from_row_slice(3, 2, &[f64::NAN, 4.0, 1.0, f64::NAN, 3.0, f64::NAN]);
        let out = impute_knn(&x, &Mask::from_non_finite(&x), 1).unwrap();
        // row 0 shares no coordinate with rows 1 and 2
        assert_eq!(out.completed[(0, 0)], 2.0);
        assert!(out.mean_fallbacks >= 1);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let x = Matrix::from_row_slice(3, 2, &[1.0, 100.0, 0.0, f64::NAN, -1.0, 200.0]);
        let out = impute_knn(&x, &Mask::from_non_finite(&x), 1).unwrap();
        assert_eq!(out.completed[(1, 1)], 100.0);
    }
}
