//! Cooperative wall-clock budgets.
//!
//! Iterative kernels call [`Deadline::check`] between iterations and unwind
//! with [`Error::TimeBudgetExceeded`] once the budget is spent.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct Deadline {
    at: Option<Instant>,
}

impl Deadline {
    /// A deadline that never expires.
    pub fn none() -> Self {
        Self { at: None }
    }

    pub fn after_secs(seconds: f64) -> Self {
        let now = Instant::now();
        let at = Duration::try_from_secs_f64(seconds.max(0.0))
            .ok()
            .and_then(|d| now.checked_add(d));
        Self { at }
    }

    pub fn expired(&self) -> bool {
        self.at.is_some_and(|at| Instant::now() >= at)
    }

    pub fn check(&self) -> Result<()> {
        if self.expired() {
            Err(Error::TimeBudgetExceeded)
        } else {
            Ok(())
        }
    }
}
