use clap::{Args, ValueEnum};
use hdinpaint::multigrid::{Downsampling, MultigridConfig};
use hdinpaint::{PipelineConfig, SolverConfig, SolverKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Single,
    Multilevel,
    Multigrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DownsamplingArg {
    Naive,
    Modified,
}

impl From<DownsamplingArg> for Downsampling {
    fn from(d: DownsamplingArg) -> Self {
        match d {
            DownsamplingArg::Naive => Downsampling::Naive,
            DownsamplingArg::Modified => Downsampling::Modified,
        }
    }
}

/// Numerical settings shared by every subcommand that solves.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Relative residual at which a solve stops.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Robin weight on inner block boundaries.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// ORAS block edge length in pixels.
    #[arg(long, default_value_t = 32)]
    pub block_size: usize,
    /// ORAS block overlap in pixels.
    #[arg(long, default_value_t = 6)]
    pub overlap: usize,
    /// Local block solves stop at eta times the global squared residual.
    #[arg(long, default_value_t = 1e-5)]
    pub eta: f64,
    /// Smoothing iterations before restriction.
    #[arg(long, default_value_t = 1)]
    pub nu_pre: usize,
    /// Smoothing iterations after prolongation.
    #[arg(long, default_value_t = 1)]
    pub nu_post: usize,
    /// CG steps that make up one smoothing iteration.
    #[arg(long, default_value_t = 10)]
    pub smoother_cg_iters: usize,
    /// Restriction of known values to coarser levels.
    #[arg(long, value_enum, default_value_t = DownsamplingArg::Modified)]
    pub downsampling: DownsamplingArg,
    /// Overrides the level structure of the chosen solver, keeping its smoother.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

impl SolverArgs {
    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            solver: SolverConfig {
                tol_rel: self.tol,
                alpha: self.alpha,
                eta: self.eta,
                smoother_cg_iters: self.smoother_cg_iters,
                ..SolverConfig::default()
            },
            multigrid: MultigridConfig {
                nu_pre: self.nu_pre,
                nu_post: self.nu_post,
                block_size: self.block_size,
                overlap: self.overlap,
                value_downsampling: self.downsampling.into(),
                ..MultigridConfig::default()
            },
        }
    }

    pub fn resolve(&self, kind: SolverKind) -> SolverKind {
        match self.mode {
            Some(mode) => with_mode(kind, mode),
            None => kind,
        }
    }
}

pub fn with_mode(kind: SolverKind, mode: ModeArg) -> SolverKind {
    use hdinpaint::multigrid::SmootherKind::{Cg, Oras};
    match (kind.smoother(), mode) {
        (Cg, ModeArg::Single) => SolverKind::Cg,
        (Oras, ModeArg::Single) => SolverKind::Oras,
        (Cg, ModeArg::Multilevel) => SolverKind::MlCg,
        (Oras, ModeArg::Multilevel) => SolverKind::MlOras,
        (Cg, ModeArg::Multigrid) => SolverKind::MgCg,
        (Oras, ModeArg::Multigrid) => SolverKind::MgOras,
    }
}
