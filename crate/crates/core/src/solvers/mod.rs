//! Global conjugate gradients and the ORAS block iteration.

mod cg;
mod local;
mod oras;

pub use cg::{cg_iterate, cg_solve};
pub use local::{build_local_system, local_solve, LocalSystem};
pub use oras::{oras_iterate, oras_solve, oras_step};

use crate::error::{Error, Result};
use crate::field::ScalarField;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop once `|r| / |r0|` drops to this value.
    pub tol_rel: f64,
    pub max_outer_iters: usize,
    /// Robin weight at inner block boundaries.
    pub alpha: f64,
    /// Local solves stop at `eta * |r_global|^2` squared residual.
    pub eta: f64,
    /// Local CG cap; `None` means `4 * block_size^2`.
    pub local_max_iters: Option<usize>,
    /// Global CG steps per smoothing iteration when CG is the smoother.
    pub smoother_cg_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_rel: 1e-3,
            max_outer_iters: 20_000,
            alpha: 0.5,
            eta: 1e-5,
            local_max_iters: None,
            smoother_cg_iters: 10,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, tol_rel: f64) -> Self {
        self.tol_rel = tol_rel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_rel > 0.0 && self.tol_rel < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "relative tolerance must lie in (0, 1), got {}",
                self.tol_rel
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Robin weight must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "local stopping fraction must be positive, got {}",
                self.eta
            )));
        }
        if self.smoother_cg_iters == 0 {
            return Err(Error::InvalidArgument(
                "smoother_cg_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn local_cap(&self, block_size: usize) -> usize {
        self.local_max_iters
            .unwrap_or(4 * block_size * block_size)
            .max(1)
    }
}

/// Outcome of one solver run.
#[derive(Debug, Clone, Default)]
pub struct SolveReport {
    /// Outer iterations (CG steps, ORAS sweeps, or V-cycles).
    pub iterations: usize,
    /// True residual norm at exit relative to the starting residual.
    pub final_rel_residual: f64,
    /// Final residual relative to that of `u = C f`.
    pub baseline_rel_residual: f64,
    pub wall_time: f64,
    /// Relative residual before the first and after every outer iteration.
    pub history: Vec<f64>,
    pub converged: bool,
    /// Smoother (or solver) iterations spent on the finest grid.
    pub finest_smoother_iterations: usize,
}

/// Residual trace of an inner iteration.
#[derive(Debug, Clone)]
pub struct IterationLog {
    pub iterations: usize,
    pub converged: bool,
    /// Residual norms divided by the reference norm.
    pub history: Vec<f64>,
    /// The last residual `rhs - A u`.
    pub residual: ScalarField,
    pub residual_norm: f64,
}

/// Stopping rule: `|r| <= tol * reference` or `max_iters` iterations.
#[derive(Debug, Clone, Copy)]
pub struct Stop {
    pub reference: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Stop {
    /// Exactly `n` iterations, regardless of the residual.
    pub fn iterations(n: usize) -> Self {
        Self {
            reference: 1.0,
            tol: 0.0,
            max_iters: n,
        }
    }

    pub(crate) fn rel(&self, norm: f64) -> f64 {
        if self.reference > 0.0 {
            norm / self.reference
        } else {
            0.0
        }
    }

    pub(crate) fn met(&self, norm: f64) -> bool {
        norm == 0.0 || norm <= self.tol * self.reference
    }
}
