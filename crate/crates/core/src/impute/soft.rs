//! softImpute: nuclear-norm regularized matrix completion.
//!
//! Minimizes `½‖P_Ω(X − Z)‖²_F + λ‖Z‖_*` by iterating
//! `Z ← S_λ(P_Ω(X) + P_Ω⊥(Z))`, where `S_λ` soft-thresholds singular values.
//! Each step is a majorize-minimize update, so the objective never increases.
//! `λ` is `lambda_frac` times the largest singular value of the mean fill.

use crate::budget::Deadline;
use crate::data::{Mask, Matrix};
use crate::error::{contract, Result};
use crate::linalg::thin_svd;

use super::{check_inputs, mean_fill, relative_change, write_missing, ImputationResult};

pub fn impute_soft(
    x: &Matrix,
    mask: &Mask,
    lambda_frac: f64,
    max_iter: usize,
    tol: f64,
) -> Result<ImputationResult> {
    check_inputs(x, mask)?;
    if !(lambda_frac > 0.0 && lambda_frac < 1.0) {
        return contract("lambda_frac must lie in (0, 1)");
    }
    if !mask.any_missing() {
        return Ok(ImputationResult::unchanged(x));
    }
    run(x, mask, lambda_frac, max_iter, tol, &Deadline::none())
}

fn objective(x: &Matrix, mask: &Mask, z: &Matrix, lambda: f64, nuclear: f64) -> f64 {
    let mut fit = 0.0;
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            if !mask.is_missing(i, j) {
                fit += (x[(i, j)] - z[(i, j)]).powi(2);
            }
        }
    }
    0.5 * fit + lambda * nuclear
}

pub(super) fn run(
    x: &Matrix,
    mask: &Mask,
    lambda_frac: f64,
    max_iter: usize,
    tol: f64,
    deadline: &Deadline,
) -> Result<ImputationResult> {
    let mut filled = mean_fill(x, mask);
    let mut svd = thin_svd(&filled)?;
    let lambda = lambda_frac * svd.s.get(0).copied().unwrap_or(0.0);

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        deadline.check()?;
        if iterations > 0 {
            svd = thin_svd(&filled)?;
        }
        let shrunk: Vec<f64> = svd
            .s
            .iter()
            .map(|&s| s - lambda)
            .take_while(|&s| s > 0.0)
            .collect();
        let z = svd.recompose(&shrunk);
        trace.push(objective(x, mask, &z, lambda, shrunk.iter().sum()));

        let mut next = filled.clone();
        write_missing(&mut next, &z, mask);
        let change = relative_change(&filled, &next, mask);
        filled = next;
        iterations += 1;
        if change <= tol {
            converged = true;
            break;
        }
    }

    Ok(ImputationResult {
        completed: filled,
        iterations_run: iterations,
        converged,
        objective_trace: trace,
        mean_fallbacks: 0,
    })
}
