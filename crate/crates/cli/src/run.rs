use std::path::Path;

use anyhow::{Context, Result};
use hdinpaint::imageio::{read_mask, read_pnm, ImageFile, ReportRow};
use hdinpaint::oracle::{assemble, dense_solve};
use hdinpaint::{
    compute_metrics_multi, solve, InpaintingProblem, MaskGrid, PipelineConfig, ScalarField,
    Solution, SolverConfig, SolverKind,
};

/// Largest problem solved by the dense oracle when a reference is needed.
pub const ORACLE_MAX_PIXELS: usize = 4096;
pub const REFERENCE_TOL: f64 = 1e-10;

pub fn load_problem(image: &Path, mask: &Path) -> Result<InpaintingProblem> {
    let image = read_pnm(image)?;
    let mask = read_mask(mask)?;
    if image.dims() != mask.dims() {
        anyhow::bail!(
            "image is {}x{} but mask is {}x{}",
            image.width(),
            image.height(),
            mask.width(),
            mask.height()
        );
    }
    Ok(InpaintingProblem::new(mask, image.to_fields(), 1.0)?)
}

pub fn problem_from_fields(mask: MaskGrid, fields: Vec<ScalarField>) -> Result<InpaintingProblem> {
    Ok(InpaintingProblem::new(mask, fields, 1.0)?)
}

/// Converged solution used to score approximations: the dense oracle on
/// small images, otherwise mg-oras at a tight tolerance.
pub fn reference(problem: &InpaintingProblem, cfg: &PipelineConfig) -> Result<Vec<ScalarField>> {
    let (w, h) = problem.dims();
    if w * h <= ORACLE_MAX_PIXELS {
        return (0..problem.channels())
            .map(|c| Ok(dense_solve(&assemble(problem, c)?)?))
            .collect();
    }
    let strict = PipelineConfig {
        solver: SolverConfig {
            tol_rel: REFERENCE_TOL,
            ..cfg.solver.clone()
        },
        multigrid: cfg.multigrid.clone(),
    };
    let solution = solve(problem, SolverKind::MgOras, &strict).context("reference solve")?;
    Ok(solution.channels)
}

pub struct Measured {
    pub solution: Solution,
    pub mse: f64,
    pub psnr: f64,
}

pub fn measure(
    problem: &InpaintingProblem,
    kind: SolverKind,
    cfg: &PipelineConfig,
    reference: &[ScalarField],
) -> Result<Measured> {
    let solution = solve(problem, kind, cfg).with_context(|| format!("{kind} solve"))?;
    let metrics = compute_metrics_multi(&solution.channels, reference)?;
    Ok(Measured {
        solution,
        mse: metrics.mse,
        psnr: metrics.psnr,
    })
}

pub fn row(
    label: &str,
    problem: &InpaintingProblem,
    seed: u64,
    cfg: &PipelineConfig,
    m: &Measured,
) -> ReportRow {
    let (width, height) = problem.dims();
    ReportRow {
        solver: label.to_string(),
        width,
        height,
        density: problem.mask().density(),
        seed,
        alpha: cfg.solver.alpha,
        tol: cfg.solver.tol_rel,
        iterations: m.solution.iterations(),
        rel_residual: m.solution.rel_residual(),
        mse_vs_reference: m.mse,
        psnr: m.psnr,
        wall_time_s: m.solution.wall_time,
    }
}

pub fn image_from(fields: &[ScalarField]) -> Result<ImageFile> {
    Ok(ImageFile::from_fields(fields)?)
}

/// Smooth shading with a few sharp edges, defined on the unit square so
/// every resolution samples the same scene.
pub fn synthetic_image(width: usize, height: usize) -> Vec<ScalarField> {
    let scene = |x: usize, y: usize, phase: f64| {
        let u = (x as f64 + 0.5) / width as f64;
        let v = (y as f64 + 0.5) / height as f64;
        let mut value = 128.0
            + 60.0
                * (std::f64::consts::TAU * (1.5 * u + phase)).sin()
                * (std::f64::consts::TAU * v).cos()
            + 30.0 * (u - v);
        if (u - 0.35).powi(2) + (v - 0.6).powi(2) < 0.04 {
            value += 50.0;
        }
        if u > 0.7 && v < 0.3 {
            value -= 70.0;
        }
        value.clamp(0.0, 255.0)
    };
    (0..3)
        .map(|c| ScalarField::from_fn(width, height, |x, y| scene(x, y, 0.2 * c as f64)))
        .collect()
}

/// Top-left `width x height` window of each field.
pub fn crop(fields: &[ScalarField], width: usize, height: usize) -> Vec<ScalarField> {
    fields
        .iter()
        .map(|f| ScalarField::from_fn(width, height, |x, y| f.get(x, y)))
        .collect()
}

/// Least-squares slope of `log(t)` against `log(n)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, t)| (n.ln(), t.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
