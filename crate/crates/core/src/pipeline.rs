//! The six solver pipelines behind one entry point.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::multigrid::{build_hierarchy, fmg_solve, CycleMode, MultigridConfig, SmootherKind};
use crate::partition::{build_partition, build_weights};
use crate::problem::InpaintingProblem;
use crate::solvers::{cg_solve, oras_solve, SolveReport, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Cg,
    Oras,
    MlCg,
    MlOras,
    MgCg,
    MgOras,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        SolverKind::Cg,
        SolverKind::Oras,
        SolverKind::MlCg,
        SolverKind::MlOras,
        SolverKind::MgCg,
        SolverKind::MgOras,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Cg => "cg",
            SolverKind::Oras => "oras",
            SolverKind::MlCg => "ml-cg",
            SolverKind::MlOras => "ml-oras",
            SolverKind::MgCg => "mg-cg",
            SolverKind::MgOras => "mg-oras",
        }
    }

    pub fn smoother(self) -> SmootherKind {
        match self {
            SolverKind::Cg | SolverKind::MlCg | SolverKind::MgCg => SmootherKind::Cg,
            SolverKind::Oras | SolverKind::MlOras | SolverKind::MgOras => SmootherKind::Oras,
        }
    }

    /// `None` for the single-level solvers.
    pub fn mode(self) -> Option<CycleMode> {
        match self {
            SolverKind::Cg | SolverKind::Oras => None,
            SolverKind::MlCg | SolverKind::MlOras => Some(CycleMode::Multilevel),
            SolverKind::MgCg | SolverKind::MgOras => Some(CycleMode::FullMultigrid),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SolverKind::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown solver {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Solver and hierarchy settings. The multigrid block layout is also used
/// by single-level ORAS; `smoother` and `mode` are set from the solver kind.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineConfig {
    pub solver: SolverConfig,
    pub multigrid: MultigridConfig,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub channels: Vec<ScalarField>,
    pub reports: Vec<SolveReport>,
    /// Whole solve including partition and hierarchy construction.
    pub wall_time: f64,
}

impl Solution {
    pub fn converged(&self) -> bool {
        self.reports.iter().all(|r| r.converged)
    }

    /// Largest per-channel relative residual.
    pub fn rel_residual(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.final_rel_residual)
            .fold(0.0, f64::max)
    }

    /// Summed over channels.
    pub fn iterations(&self) -> usize {
        self.reports.iter().map(|r| r.iterations).sum()
    }

    pub fn finest_smoother_iterations(&self) -> usize {
        self.reports
            .iter()
            .map(|r| r.finest_smoother_iterations)
            .sum()
    }
}

/// Solves every channel of `problem` with `kind`, starting from the
/// mean-filled initial guess.
pub fn solve(
    problem: &InpaintingProblem,
    kind: SolverKind,
    cfg: &PipelineConfig,
) -> Result<Solution> {
    cfg.solver.validate()?;
    let start = Instant::now();
    let channels = problem.channels();
    let mut out = Vec::with_capacity(channels);
    let mut reports = Vec::with_capacity(channels);

    match kind.mode() {
        None => {
            let (w, h) = problem.dims();
            let layout = match kind {
                SolverKind::Oras => {
                    let partition =
                        build_partition(w, h, cfg.multigrid.block_size, cfg.multigrid.overlap)?;
                    let weights = build_weights(&partition);
                    Some((partition, weights))
                }
                _ => None,
            };
            for c in 0..channels {
                let init = problem.initial_guess(c)?;
                let (u, report) = match &layout {
                    Some((partition, weights)) => {
                        oras_solve(problem, c, &init, partition, weights, &cfg.solver)?
                    }
                    None => cg_solve(problem, c, &init, &cfg.solver)?,
                };
                out.push(u);
                reports.push(report);
            }
        }
        Some(mode) => {
            let mg = MultigridConfig {
                smoother: kind.smoother(),
                mode,
                ..cfg.multigrid.clone()
            };
            let hierarchy = build_hierarchy(problem, &mg)?;
            for c in 0..channels {
                let (u, report) = fmg_solve(&hierarchy, c, &mg, &cfg.solver)?;
                out.push(u);
                reports.push(report);
            }
        }
    }

    Ok(Solution {
        channels: out,
        reports,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
