//! Dyadic level hierarchy, V-cycle and the reduced full multigrid scheme,
//! with ORAS or CG as the smoother.

mod cycle;
mod transfer;

pub use cycle::{fmg_solve, multigrid_solve, v_cycle};
pub use transfer::{
    coarse_dims, downsample_mask, downsample_values_modified, downsample_values_naive,
    interpolate_bilinear, prolongate_correction, prolongate_solution, restrict_residual,
};

use crate::error::{Error, Result};
use crate::field::{MaskGrid, ScalarField};
use crate::operator::Operator;
use crate::partition::{
    build_partition, build_weights, BlockPartition, BlockWeights, DEFAULT_BLOCK_SIZE,
    DEFAULT_OVERLAP,
};
use crate::problem::InpaintingProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmootherKind {
    Oras,
    Cg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Downsampling {
    Naive,
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleMode {
    /// Coarse-to-fine only: every level is smoothed to the tolerance.
    Multilevel,
    /// Reduced full multigrid followed by V-cycles on the finest level.
    FullMultigrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultigridConfig {
    pub nu_pre: usize,
    pub nu_post: usize,
    pub v_cycles_max: usize,
    pub smoother: SmootherKind,
    pub value_downsampling: Downsampling,
    pub mode: CycleMode,
    /// Levels are added until both dimensions fit in one block of this size.
    pub block_size: usize,
    pub overlap: usize,
    /// Relative tolerance of the coarsest-level solve; capped by the outer one.
    pub coarse_tol: f64,
}

impl Default for MultigridConfig {
    fn default() -> Self {
        Self {
            nu_pre: 1,
            nu_post: 1,
            v_cycles_max: 100,
            smoother: SmootherKind::Oras,
            value_downsampling: Downsampling::Modified,
            mode: CycleMode::FullMultigrid,
            block_size: DEFAULT_BLOCK_SIZE,
            overlap: DEFAULT_OVERLAP,
            coarse_tol: 1e-8,
        }
    }
}

impl MultigridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nu_pre + self.nu_post == 0 {
            return Err(Error::InvalidArgument(
                "at least one pre- or post-smoothing iteration is required".into(),
            ));
        }
        if !(self.coarse_tol > 0.0 && self.coarse_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "coarse tolerance must lie in (0, 1), got {}",
                self.coarse_tol
            )));
        }
        if self.block_size <= self.overlap {
            return Err(Error::InvalidArgument(format!(
                "block size {} must exceed overlap {}",
                self.block_size, self.overlap
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Level {
    pub mask: MaskGrid,
    /// `C_l f_l` per channel.
    pub rhs: Vec<ScalarField>,
    pub spacing: f64,
    pub partition: BlockPartition,
    pub weights: BlockWeights,
}

impl Level {
    pub fn dims(&self) -> (usize, usize) {
        self.mask.dims()
    }

    pub fn operator(&self) -> Operator<'_> {
        Operator::new(&self.mask, self.spacing).expect("spacing validated at construction")
    }
}

/// Levels ordered fine to coarse; `levels()[0]` is the input problem.
#[derive(Debug, Clone)]
pub struct LevelHierarchy {
    levels: Vec<Level>,
}

impl LevelHierarchy {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn finest(&self) -> &Level {
        &self.levels[0]
    }

    pub fn coarsest(&self) -> &Level {
        self.levels
            .last()
            .expect("a hierarchy has at least one level")
    }

    pub fn channels(&self) -> usize {
        self.levels[0].rhs.len()
    }
}

fn make_level(
    mask: MaskGrid,
    rhs: Vec<ScalarField>,
    spacing: f64,
    cfg: &MultigridConfig,
) -> Result<Level> {
    let (w, h) = mask.dims();
    let partition = build_partition(w, h, cfg.block_size, cfg.overlap)?;
    let weights = build_weights(&partition);
    Ok(Level {
        mask,
        rhs,
        spacing,
        partition,
        weights,
    })
}

/// Halves the problem until both dimensions are at most `cfg.block_size`.
pub fn build_hierarchy(
    problem: &InpaintingProblem,
    cfg: &MultigridConfig,
) -> Result<LevelHierarchy> {
    cfg.validate()?;
    let rhs = (0..problem.channels())
        .map(|c| problem.rhs(c))
        .collect::<Result<Vec<_>>>()?;
    let mut levels = vec![make_level(
        problem.mask().clone(),
        rhs,
        problem.spacing(),
        cfg,
    )?];
    loop {
        let fine = levels.last().expect("non-empty");
        let (w, h) = fine.dims();
        if w <= cfg.block_size && h <= cfg.block_size {
            break;
        }
        let mask = downsample_mask(&fine.mask);
        let rhs = fine
            .rhs
            .iter()
            .map(|b| match cfg.value_downsampling {
                Downsampling::Naive => Ok(downsample_values_naive(&fine.mask, b)),
                Downsampling::Modified => downsample_values_modified(&fine.mask, &mask, b),
            })
            .collect::<Result<Vec<_>>>()?;
        let spacing = 2.0 * fine.spacing;
        levels.push(make_level(mask, rhs, spacing, cfg)?);
    }
    Ok(LevelHierarchy { levels })
}
