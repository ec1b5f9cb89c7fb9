//! IterativeSVD: alternate a rank-r truncated SVD of the current completion
//! with rewriting the missing entries from the low-rank reconstruction.

use crate::budget::Deadline;
use crate::data::{Mask, Matrix};
use crate::error::{contract, Result};
use crate::linalg::thin_svd;

use super::{check_inputs, mean_fill, relative_change, write_missing, ImputationResult};

pub fn impute_itersvd(
    x: &Matrix,
    mask: &Mask,
    rank: usize,
    max_iter: usize,
    tol: f64,
) -> Result<ImputationResult> {
    check_inputs(x, mask)?;
    check_rank(x, rank)?;
    if !mask.any_missing() {
        return Ok(ImputationResult::unchanged(x));
    }
    run(x, mask, rank, max_iter, tol, &Deadline::none())
}

fn check_rank(x: &Matrix, rank: usize) -> Result<()> {
    let limit = x.nrows().min(x.ncols()).saturating_sub(1);
    if rank == 0 || rank > limit {
        return contract(format!(
            "rank {rank} must lie in [1, {limit}] for a {}x{} matrix",
            x.nrows(),
            x.ncols()
        ));
    }
    Ok(())
}

pub(super) fn run(
    x: &Matrix,
    mask: &Mask,
    rank: usize,
    max_iter: usize,
    tol: f64,
    deadline: &Deadline,
) -> Result<ImputationResult> {
    check_rank(x, rank)?;
    let mut filled = mean_fill(x, mask);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        deadline.check()?;
        let svd = thin_svd(&filled)?;
        let low = svd.recompose(&svd.s.as_slice()[..rank]);
        let mut next = filled.clone();
        write_missing(&mut next, &low, mask);
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
        objective_trace: Vec::new(),
        mean_fallbacks: 0,
    })
}
