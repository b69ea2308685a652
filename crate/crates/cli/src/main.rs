//! `hdinpaint` command-line front end.

mod bench;
mod options;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hdinpaint::imageio::{report_csv_bytes, write_mask, write_pnm, ReportRow};
use hdinpaint::maskgen::{generate_mask, MaskKind};
use hdinpaint::{solve, SolverKind};

use crate::bench::BenchArgs;
use crate::options::SolverArgs;

#[derive(Debug, Parser)]
#[command(
    name = "hdinpaint",
    version,
    about = "Homogeneous diffusion inpainting from sparse masks"
)]
struct Cli {
    /// Worker threads; 0 picks one per core.
    #[arg(long, env = "INPAINT_THREADS", default_value_t = 0, global = true)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reconstruct an image from the pixels selected by a mask.
    Inpaint(InpaintArgs),
    /// Write a random or regular-lattice PBM mask.
    GenMask(GenMaskArgs),
    /// Run a benchmark suite and emit CSV rows.
    Bench(BenchArgs),
    /// Rank every solver by its error against a converged reference.
    Compare(CompareArgs),
}

#[derive(Debug, clap::Args)]
struct InpaintArgs {
    /// PGM or PPM input; only pixels under the mask are read.
    image: PathBuf,
    /// PBM mask; set bits mark known pixels.
    mask: PathBuf,
    #[arg(long, default_value = "mg-oras", value_parser = parse_solver)]
    solver: SolverKind,
    /// Output image path.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    options: SolverArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Random,
    Grid,
}

#[derive(Debug, clap::Args)]
struct GenMaskArgs {
    width: usize,
    height: usize,
    /// Fraction of known pixels in (0, 1].
    density: f64,
    #[arg(long, value_enum, default_value_t = KindArg::Random)]
    kind: KindArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output PBM path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, clap::Args)]
struct CompareArgs {
    image: PathBuf,
    mask: PathBuf,
    /// Also write the measurements as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    options: SolverArgs,
}

pub(crate) fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse().map_err(|e: hdinpaint::Error| e.to_string())
}

fn emit_csv(rows: &[ReportRow], path: Option<&PathBuf>) -> Result<()> {
    let bytes = report_csv_bytes(rows)?;
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().lock().write_all(&bytes)?),
    }
}

fn inpaint(args: &InpaintArgs) -> Result<()> {
    let problem = run::load_problem(&args.image, &args.mask)?;
    let kind = args.options.resolve(args.solver);
    let solution = solve(&problem, kind, &args.options.pipeline())?;
    write_pnm(&args.out, &run::image_from(&solution.channels)?)?;
    println!(
        "solver={kind} iterations={} rel_residual={:.3e} wall_time_s={:.4} converged={}",
        solution.iterations(),
        solution.rel_residual(),
        solution.wall_time,
        solution.converged()
    );
    if !solution.converged() {
        anyhow::bail!(
            "{kind} stopped at its iteration cap before reaching tol {}",
            args.options.tol
        );
    }
    Ok(())
}

fn gen_mask(args: &GenMaskArgs) -> Result<()> {
    let kind = match args.kind {
        KindArg::Random => MaskKind::Random,
        KindArg::Grid => MaskKind::Grid,
    };
    let mask = generate_mask(kind, args.width, args.height, args.density, args.seed)?;
    write_mask(&args.out, &mask)?;
    println!("{} of {} pixels known", mask.count(), mask.len());
    Ok(())
}

fn compare(args: &CompareArgs) -> Result<()> {
    let problem = run::load_problem(&args.image, &args.mask)?;
    let cfg = args.options.pipeline();
    let truth = run::reference(&problem, &cfg)?;
    let mut rows = Vec::new();
    for kind in SolverKind::ALL {
        let m = run::measure(&problem, kind, &cfg, &truth)?;
        rows.push(run::row(kind.name(), &problem, 0, &cfg, &m));
    }
    let mut ranking: Vec<&ReportRow> = rows.iter().collect();
    ranking.sort_by(|a, b| a.mse_vs_reference.total_cmp(&b.mse_vs_reference));
    for (place, r) in ranking.iter().enumerate() {
        println!(
            "{:>2}. {:<8} mse {:.3e}  iterations {:>5}  rel_residual {:.3e}  {:.4} s",
            place + 1,
            r.solver,
            r.mse_vs_reference,
            r.iterations,
            r.rel_residual,
            r.wall_time_s
        );
    }
    if let Some(path) = &args.csv {
        emit_csv(&rows, Some(path))?;
    }
    Ok(())
}

fn bench(args: &BenchArgs) -> Result<()> {
    let rows = bench::run(args)?;
    emit_csv(&rows, args.csv.as_ref())?;
    if args.suite == bench::Suite::Resolution {
        for (label, slope) in bench::slopes(&rows) {
            match slope {
                Some(s) => eprintln!("{label}: log-log runtime slope {s:.3}"),
                None => eprintln!("{label}: too few sizes for a slope"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: thread pool: {e}");
        return ExitCode::FAILURE;
    }
    let result = match &cli.command {
        Command::Inpaint(a) => inpaint(a),
        Command::GenMask(a) => gen_mask(a),
        Command::Bench(a) => bench(a),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
