use std::time::Instant;

use rayon::prelude::*;

use super::cg::{check_solvable, finish_report};
use super::local::{build_local_system, local_solve};
use super::{IterationLog, SolveReport, SolverConfig, Stop};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::operator::Operator;
use crate::partition::{accumulate_weighted, restrict_to_block, BlockPartition, BlockWeights};
use crate::problem::{impose_mask_values, InpaintingProblem};

/// One ORAS sweep given the current residual `r` with norm `r_norm`:
/// solve every block's Robin system against `R_i r` and add the weighted
/// corrections to `u`.
pub fn oras_step(
    op: Operator<'_>,
    u: &mut ScalarField,
    r: &ScalarField,
    r_norm: f64,
    partition: &BlockPartition,
    weights: &BlockWeights,
    cfg: &SolverConfig,
) {
    let target = cfg.eta * r_norm * r_norm;
    let cap = cfg.local_cap(partition.block_size());
    let locals: Vec<ScalarField> = partition
        .blocks()
        .par_iter()
        .map(|rect| {
            let system = build_local_system(rect, op.mask(), op.spacing(), cfg.alpha);
            let local_rhs = restrict_to_block(r, rect).expect("blocks lie inside the partition");
            local_solve(&system, &local_rhs, target, cap).0
        })
        .collect();
    accumulate_weighted(u, partition, weights, &locals).expect("locals match the partition");
}

/// Runs ORAS sweeps on `A u = rhs` until `stop` is met.
pub fn oras_iterate(
    op: Operator<'_>,
    rhs: &ScalarField,
    u: &mut ScalarField,
    partition: &BlockPartition,
    weights: &BlockWeights,
    cfg: &SolverConfig,
    stop: Stop,
) -> IterationLog {
    let (w, h) = op.dims();
    impose_mask_values(op.mask(), rhs.as_slice(), u.as_mut_slice());
    let mut r = ScalarField::zeros(w, h);
    op.residual_into(rhs.as_slice(), u.as_slice(), r.as_mut_slice());
    let mut r_norm = r.norm();
    let mut history = vec![stop.rel(r_norm)];
    let mut iterations = 0;
    let mut converged = stop.met(r_norm);
    while !converged && iterations < stop.max_iters {
        oras_step(op, u, &r, r_norm, partition, weights, cfg);
        op.residual_into(rhs.as_slice(), u.as_slice(), r.as_mut_slice());
        r_norm = r.norm();
        iterations += 1;
        history.push(stop.rel(r_norm));
        converged = stop.met(r_norm);
    }
    IterationLog {
        iterations,
        converged,
        history,
        residual: r,
        residual_norm: r_norm,
    }
}

/// Solves one channel with ORAS used as a stand-alone iteration.
pub fn oras_solve(
    problem: &InpaintingProblem,
    channel: usize,
    init: &ScalarField,
    partition: &BlockPartition,
    weights: &BlockWeights,
    cfg: &SolverConfig,
) -> Result<(ScalarField, SolveReport)> {
    cfg.validate()?;
    check_solvable(problem, init)?;
    if (partition.width(), partition.height()) != problem.dims() {
        return Err(Error::DimensionMismatch {
            expected: problem.dims(),
            actual: (partition.width(), partition.height()),
        });
    }
    let op = problem.operator();
    let rhs = problem.rhs(channel)?;

    let start = Instant::now();
    let mut u = init.clone();
    impose_mask_values(op.mask(), rhs.as_slice(), u.as_mut_slice());
    let reference = op.residual(&rhs, &u)?.norm();
    let log = oras_iterate(
        op,
        &rhs,
        &mut u,
        partition,
        weights,
        cfg,
        Stop {
            reference,
            tol: cfg.tol_rel,
            max_iters: cfg.max_outer_iters,
        },
    );
    let wall_time = start.elapsed().as_secs_f64();
    Ok((u, finish_report(&op, &rhs, reference, &log, wall_time)))
}
