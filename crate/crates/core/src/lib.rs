//! Homogeneous diffusion inpainting: reconstruct an image from a sparse set
//! of known pixels by solving the discrete Laplace equation with the known
//! pixels as Dirichlet data and reflecting image borders.
//!
//! Solvers: global conjugate gradients, the ORAS block iteration, and
//! multilevel or full multigrid schemes with either as smoother. A dense
//! direct solver serves as ground truth on small grids.

// `!(x <= tol)` forms are deliberate: NaN must take the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod imageio;
pub mod maskgen;
pub mod multigrid;
pub mod operator;
pub mod oracle;
mod par;
pub mod partition;
pub mod pipeline;
pub mod problem;
pub mod solvers;

pub use error::{Error, Result};
pub use field::{compute_metrics, compute_metrics_multi, MaskGrid, Metrics, ScalarField};
pub use multigrid::{CycleMode, Downsampling, MultigridConfig, SmootherKind};
pub use operator::{apply_operator, residual, Operator};
pub use pipeline::{solve, PipelineConfig, Solution, SolverKind};
pub use problem::InpaintingProblem;
pub use solvers::{SolveReport, SolverConfig};
