use crate::data::{Mask, Matrix};
use crate::error::Result;

use super::{check_inputs, mean_fill, ImputationResult};

/// Fills every missing entry with its column's observed mean.
pub fn impute_mean(x: &Matrix, mask: &Mask) -> Result<ImputationResult> {
    check_inputs(x, mask)?;
    run(x, mask)
}

pub(super) fn run(x: &Matrix, mask: &Mask) -> Result<ImputationResult> {
    Ok(ImputationResult {
        completed: mean_fill(x, mask),
        iterations_run: 0,
        converged: true,
        objective_trace: Vec::new(),
        mean_fallbacks: 0,
    })
}
