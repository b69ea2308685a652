use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use hdinpaint::imageio::{read_pnm, ReportRow};
use hdinpaint::maskgen::random_mask;
use hdinpaint::multigrid::Downsampling;
use hdinpaint::{PipelineConfig, ScalarField, SolverKind};

use crate::options::SolverArgs;
use crate::run::{
    crop, loglog_slope, measure, problem_from_fields, reference, row, synthetic_image,
};

pub const DENSITIES: [f64; 7] = [0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.10];
pub const ALPHAS: [f64; 6] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Density,
    Resolution,
    AlphaSweep,
    Downsampling,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Input images; a synthetic scene is used when none are given.
    #[arg(long = "image")]
    pub images: Vec<PathBuf>,
    /// Synthetic image width for the fixed-size suites.
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    /// Synthetic image height for the fixed-size suites.
    #[arg(long, default_value_t = 256)]
    pub height: usize,
    /// Square edge lengths for the resolution suite.
    #[arg(long, value_delimiter = ',', default_values_t = [128, 256, 512, 1024])]
    pub sizes: Vec<usize>,
    /// Mask density for every suite except density.
    #[arg(long, default_value_t = 0.05)]
    pub density: f64,
    /// Masks per configuration, seeded consecutively from --seed.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restrict to these solvers (default: the suite's own set).
    #[arg(long = "solver", value_parser = crate::parse_solver)]
    pub solvers: Vec<SolverKind>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

/// A scene to sample masks on.
struct Scene {
    fields: Vec<ScalarField>,
}

fn scenes(args: &BenchArgs, width: usize, height: usize) -> Result<Vec<Scene>> {
    if args.images.is_empty() {
        return Ok(vec![Scene {
            fields: synthetic_image(width, height),
        }]);
    }
    args.images
        .iter()
        .map(|p| {
            Ok(Scene {
                fields: read_pnm(p)?.to_fields(),
            })
        })
        .collect()
}

fn check_inputs(args: &BenchArgs) -> Result<()> {
    let missing: Vec<String> = args
        .images
        .iter()
        .filter(|p| !p.is_file())
        .map(|p| p.display().to_string())
        .collect();
    if !missing.is_empty() {
        bail!("missing input images:\n  {}", missing.join("\n  "));
    }
    Ok(())
}

/// One measurement configuration within a suite.
struct Variant {
    label: String,
    kind: SolverKind,
    cfg: PipelineConfig,
}

fn solver_set(args: &BenchArgs, default: &[SolverKind]) -> Vec<SolverKind> {
    let chosen = if args.solvers.is_empty() {
        default.to_vec()
    } else {
        args.solvers.clone()
    };
    chosen.into_iter().map(|k| args.solver.resolve(k)).collect()
}

fn variants(args: &BenchArgs) -> Vec<Variant> {
    let base = args.solver.pipeline();
    let plain = |kind: SolverKind| Variant {
        label: kind.name().to_string(),
        kind,
        cfg: base.clone(),
    };
    match args.suite {
        Suite::Density | Suite::Resolution => solver_set(args, &SolverKind::ALL)
            .into_iter()
            .map(plain)
            .collect(),
        Suite::AlphaSweep => {
            let kinds = solver_set(args, &[SolverKind::Oras, SolverKind::MgOras]);
            ALPHAS
                .iter()
                .flat_map(|&alpha| {
                    kinds.iter().map(move |&kind| {
                        let mut v = plain(kind);
                        v.cfg.solver.alpha = alpha;
                        v
                    })
                })
                .collect()
        }
        Suite::Downsampling => {
            let kinds = solver_set(
                args,
                &[
                    SolverKind::MlCg,
                    SolverKind::MlOras,
                    SolverKind::MgCg,
                    SolverKind::MgOras,
                ],
            );
            kinds
                .iter()
                .flat_map(|&kind| {
                    [
                        ("naive", Downsampling::Naive),
                        ("modified", Downsampling::Modified),
                    ]
                    .map(|(name, d)| {
                        let mut v = plain(kind);
                        v.label = format!("{kind}:{name}");
                        v.cfg.multigrid.value_downsampling = d;
                        v
                    })
                })
                .collect()
        }
    }
}

/// (width, height, density) triples swept by the suite for one scene.
fn configs(args: &BenchArgs, scene: &Scene) -> Result<Vec<(usize, usize, f64)>> {
    let (w, h) = scene.fields[0].dims();
    Ok(match args.suite {
        Suite::Density => DENSITIES.iter().map(|&d| (w, h, d)).collect(),
        Suite::Resolution => {
            if let Some(&s) = args.sizes.iter().find(|&&s| s > w || s > h) {
                bail!("resolution suite needs images of at least {s}x{s}, got {w}x{h}");
            }
            args.sizes.iter().map(|&s| (s, s, args.density)).collect()
        }
        Suite::AlphaSweep | Suite::Downsampling => vec![(w, h, args.density)],
    })
}

pub fn run(args: &BenchArgs) -> Result<Vec<ReportRow>> {
    check_inputs(args)?;
    if args.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let (w, h) = match args.suite {
        Suite::Resolution => {
            let s = args.sizes.iter().copied().max().unwrap_or(0);
            (s, s)
        }
        _ => (args.width, args.height),
    };
    let variants = variants(args);
    let reference_cfg = args.solver.pipeline();
    let mut rows = Vec::new();
    for scene in scenes(args, w, h)? {
        for (cw, ch, density) in configs(args, &scene)? {
            let fields = if args.images.is_empty() {
                synthetic_image(cw, ch)
            } else {
                crop(&scene.fields, cw, ch)
            };
            for seed in args.seed..args.seed + args.seeds {
                let problem =
                    problem_from_fields(random_mask(cw, ch, density, seed)?, fields.clone())?;
                let truth = reference(&problem, &reference_cfg)?;
                for v in &variants {
                    let m = measure(&problem, v.kind, &v.cfg, &truth)?;
                    let r = row(&v.label, &problem, seed, &v.cfg, &m);
                    eprintln!(
                        "{:<16} {}x{} density {:.3} seed {}: {} iterations, mse {:.3e}, {:.3} s",
                        r.solver,
                        r.width,
                        r.height,
                        density,
                        seed,
                        r.iterations,
                        r.mse_vs_reference,
                        r.wall_time_s
                    );
                    rows.push(r);
                }
            }
        }
    }
    Ok(rows)
}

/// Per-solver slope of log wall time against log pixel count, averaging
/// repeated rows at the same size.
pub fn slopes(rows: &[ReportRow]) -> Vec<(String, Option<f64>)> {
    let mut labels: Vec<&str> = Vec::new();
    for r in rows {
        if !labels.contains(&r.solver.as_str()) {
            labels.push(&r.solver);
        }
    }
    labels
        .into_iter()
        .map(|label| {
            let mut points: Vec<(f64, f64, usize)> = Vec::new();
            for r in rows.iter().filter(|r| r.solver == label) {
                let n = (r.width * r.height) as f64;
                match points.iter_mut().find(|p| p.0 == n) {
                    Some(p) => {
                        p.1 += r.wall_time_s;
                        p.2 += 1;
                    }
                    None => points.push((n, r.wall_time_s, 1)),
                }
            }
            let means: Vec<(f64, f64)> =
                points.iter().map(|&(n, t, k)| (n, t / k as f64)).collect();
            (label.to_string(), loglog_slope(&means))
        })
        .collect()
}
