use std::time::Instant;

use super::{IterationLog, SolveReport, SolverConfig, Stop};
use crate::error::{ensure_dims, Error, Result};
use crate::field::ScalarField;
use crate::operator::Operator;
use crate::par;
use crate::problem::{impose_mask_values, InpaintingProblem};

/// Plain conjugate gradients on `A u = rhs`.
///
/// Mask pixels are first set to `rhs`; from then on residual and search
/// directions vanish there, which makes the iteration act on the symmetric
/// positive definite reduced system of the unknown pixels.
pub fn cg_iterate(
    op: Operator<'_>,
    rhs: &ScalarField,
    u: &mut ScalarField,
    stop: Stop,
) -> IterationLog {
    let (w, h) = op.dims();
    let n = w * h;
    impose_mask_values(op.mask(), rhs.as_slice(), u.as_mut_slice());

    let mut r = vec![0.0; n];
    op.residual_into(rhs.as_slice(), u.as_slice(), &mut r);
    let mut rr = par::norm_sq(&r);
    let mut history = vec![stop.rel(rr.sqrt())];
    let mut p = r.clone();
    let mut q = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = stop.met(rr.sqrt());

    while !converged && iterations < stop.max_iters {
        op.apply_into(&p, &mut q);
        let pq = par::dot(&p, &q);
        if !(pq > 0.0) {
            break;
        }
        let step = rr / pq;
        par::axpy(step, &p, u.as_mut_slice());
        par::axpy(-step, &q, &mut r);
        let rr_next = par::norm_sq(&r);
        iterations += 1;
        history.push(stop.rel(rr_next.sqrt()));
        converged = stop.met(rr_next.sqrt());
        par::xpby(&r, rr_next / rr, &mut p);
        rr = rr_next;
    }

    // The recursive residual drifts from the true one; report the latter.
    op.residual_into(rhs.as_slice(), u.as_slice(), &mut r);
    let residual_norm = par::norm(&r);
    IterationLog {
        iterations,
        converged,
        history,
        residual: ScalarField::from_vec(w, h, r).expect("dims match"),
        residual_norm,
    }
}

pub(crate) fn check_solvable(problem: &InpaintingProblem, init: &ScalarField) -> Result<()> {
    ensure_dims(problem.dims(), init.dims())?;
    if problem.mask().count() == 0 {
        return Err(Error::NoDirichletData);
    }
    Ok(())
}

/// Solves one channel with global CG from `init`.
pub fn cg_solve(
    problem: &InpaintingProblem,
    channel: usize,
    init: &ScalarField,
    cfg: &SolverConfig,
) -> Result<(ScalarField, SolveReport)> {
    cfg.validate()?;
    check_solvable(problem, init)?;
    let op = problem.operator();
    let rhs = problem.rhs(channel)?;

    let start = Instant::now();
    let mut u = init.clone();
    impose_mask_values(op.mask(), rhs.as_slice(), u.as_mut_slice());
    let reference = op.residual(&rhs, &u)?.norm();
    let log = cg_iterate(
        op,
        &rhs,
        &mut u,
        Stop {
            reference,
            tol: cfg.tol_rel,
            max_iters: cfg.max_outer_iters,
        },
    );
    let wall_time = start.elapsed().as_secs_f64();

    let report = finish_report(&op, &rhs, reference, &log, wall_time);
    Ok((u, report))
}

pub(crate) fn finish_report(
    op: &Operator<'_>,
    rhs: &ScalarField,
    reference: f64,
    log: &IterationLog,
    wall_time: f64,
) -> SolveReport {
    let baseline = op.residual(rhs, rhs).expect("dims match").norm();
    let rel = |norm: f64, base: f64| if base > 0.0 { norm / base } else { 0.0 };
    SolveReport {
        iterations: log.iterations,
        final_rel_residual: rel(log.residual_norm, reference),
        baseline_rel_residual: rel(log.residual_norm, baseline),
        wall_time,
        history: log.history.clone(),
        converged: log.converged,
        finest_smoother_iterations: log.iterations,
    }
}
