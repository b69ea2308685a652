//! Overlapping block decomposition with a separable partition of unity.
//!
//! Blocks are laid out on a regular lattice with stride `block_size - overlap`;
//! the last block on each axis is snapped so that its far edge meets the image
//! edge. Every block of a partition has the same extent.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;

pub const DEFAULT_BLOCK_SIZE: usize = 32;
pub const DEFAULT_OVERLAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Side lies on the image border (reflecting condition).
    Image,
    /// Side cuts through the image (Robin transmission condition).
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFlags {
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    pub top: BoundaryKind,
    pub bottom: BoundaryKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRect {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
    pub boundary: BoundaryFlags,
}

impl BlockRect {
    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x0 + self.w && y >= self.y0 && y < self.y0 + self.h
    }

    fn check_within(&self, width: usize, height: usize) -> Result<()> {
        if self.x0 + self.w > width || self.y0 + self.h > height {
            return Err(Error::OutOfBounds {
                rect: (self.x0, self.y0, self.w, self.h),
                width,
                height,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BlockPartition {
    width: usize,
    height: usize,
    block_size: usize,
    overlap: usize,
    x_starts: Vec<usize>,
    y_starts: Vec<usize>,
    blocks: Vec<BlockRect>,
}

impl BlockPartition {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    /// Blocks in row-major order of their lattice position.
    pub fn blocks(&self) -> &[BlockRect] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Number of blocks along x and y.
    pub fn grid(&self) -> (usize, usize) {
        (self.x_starts.len(), self.y_starts.len())
    }

    pub fn x_starts(&self) -> &[usize] {
        &self.x_starts
    }

    pub fn y_starts(&self) -> &[usize] {
        &self.y_starts
    }
}

fn axis_starts(dim: usize, block_size: usize, stride: usize) -> Vec<usize> {
    if dim <= block_size {
        return vec![0];
    }
    let count = (dim - block_size).div_ceil(stride) + 1;
    (0..count)
        .map(|i| (i * stride).min(dim - block_size))
        .collect()
}

pub fn build_partition(
    width: usize,
    height: usize,
    block_size: usize,
    overlap: usize,
) -> Result<BlockPartition> {
    if block_size <= overlap {
        return Err(Error::InvalidArgument(format!(
            "block size {block_size} must exceed overlap {overlap}"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!(
            "cannot partition an empty {width}x{height} image"
        )));
    }
    let stride = block_size - overlap;
    let x_starts = axis_starts(width, block_size, stride);
    let y_starts = axis_starts(height, block_size, stride);
    let bw = block_size.min(width);
    let bh = block_size.min(height);
    let side = |inner: bool| {
        if inner {
            BoundaryKind::Inner
        } else {
            BoundaryKind::Image
        }
    };
    let mut blocks = Vec::with_capacity(x_starts.len() * y_starts.len());
    for &y0 in &y_starts {
        for &x0 in &x_starts {
            blocks.push(BlockRect {
                x0,
                y0,
                w: bw,
                h: bh,
                boundary: BoundaryFlags {
                    left: side(x0 > 0),
                    right: side(x0 + bw < width),
                    top: side(y0 > 0),
                    bottom: side(y0 + bh < height),
                },
            });
        }
    }
    Ok(BlockPartition {
        width,
        height,
        block_size,
        overlap,
        x_starts,
        y_starts,
        blocks,
    })
}

/// Per-axis weight profiles; the weight of a block pixel is `wx[i] * wy[j]`.
#[derive(Debug, Clone)]
pub struct BlockWeights {
    x: Vec<Vec<f64>>,
    y: Vec<Vec<f64>>,
    nx: usize,
}

impl BlockWeights {
    /// Weight vectors `(wx, wy)` of block `index`.
    pub fn for_block(&self, index: usize) -> (&[f64], &[f64]) {
        let ix = index % self.nx;
        let iy = index / self.nx;
        (&self.x[ix], &self.y[iy])
    }

    pub fn x_profiles(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn y_profiles(&self) -> &[Vec<f64>] {
        &self.y
    }
}

/// Linear ramp across the overlap, 0 at the outermost pixel and 1 at the
/// innermost one. `distance` counts pixels inward from the cut side.
fn ramp(distance: usize, overlap: usize) -> f64 {
    if overlap < 2 {
        1.0
    } else {
        (distance as f64 / (overlap - 1) as f64).min(1.0)
    }
}

fn axis_weights(dim: usize, starts: &[usize], extent: usize, overlap: usize) -> Vec<Vec<f64>> {
    let raw: Vec<Vec<f64>> = starts
        .iter()
        .map(|&s| {
            let inner_lo = s > 0;
            let inner_hi = s + extent < dim;
            (0..extent)
                .map(|k| {
                    let lo = if inner_lo { ramp(k, overlap) } else { 1.0 };
                    let hi = if inner_hi {
                        ramp(extent - 1 - k, overlap)
                    } else {
                        1.0
                    };
                    lo.min(hi)
                })
                .collect()
        })
        .collect();
    let mut total = vec![0.0; dim];
    for (&s, w) in starts.iter().zip(&raw) {
        for (k, &v) in w.iter().enumerate() {
            total[s + k] += v;
        }
    }
    starts
        .iter()
        .zip(raw)
        .map(|(&s, w)| {
            w.into_iter()
                .enumerate()
                .map(|(k, v)| v / total[s + k])
                .collect()
        })
        .collect()
}

pub fn build_weights(partition: &BlockPartition) -> BlockWeights {
    let bw = partition.blocks.first().map_or(0, |b| b.w);
    let bh = partition.blocks.first().map_or(0, |b| b.h);
    BlockWeights {
        x: axis_weights(partition.width, &partition.x_starts, bw, partition.overlap),
        y: axis_weights(partition.height, &partition.y_starts, bh, partition.overlap),
        nx: partition.x_starts.len(),
    }
}

/// Copies the sub-rectangle `rect` out of `global`.
pub fn restrict_to_block(global: &ScalarField, rect: &BlockRect) -> Result<ScalarField> {
    rect.check_within(global.width(), global.height())?;
    let mut data = Vec::with_capacity(rect.w * rect.h);
    let src = global.as_slice();
    for y in rect.y0..rect.y0 + rect.h {
        let row = y * global.width() + rect.x0;
        data.extend_from_slice(&src[row..row + rect.w]);
    }
    ScalarField::from_vec(rect.w, rect.h, data)
}

/// `global += R^T D local` for a single block.
pub fn extend_add_weighted(
    global: &mut ScalarField,
    rect: &BlockRect,
    wx: &[f64],
    wy: &[f64],
    local: &ScalarField,
) -> Result<()> {
    rect.check_within(global.width(), global.height())?;
    if local.dims() != (rect.w, rect.h) || wx.len() != rect.w || wy.len() != rect.h {
        return Err(Error::DimensionMismatch {
            expected: (rect.w, rect.h),
            actual: local.dims(),
        });
    }
    let width = global.width();
    let dst = global.as_mut_slice();
    for (j, &wyj) in wy.iter().enumerate() {
        let row = (rect.y0 + j) * width + rect.x0;
        let lrow = &local.as_slice()[j * rect.w..(j + 1) * rect.w];
        for (i, (&wxi, &v)) in wx.iter().zip(lrow).enumerate() {
            dst[row + i] += wxi * wyj * v;
        }
    }
    Ok(())
}

/// `global += sum_i R_i^T D_i local_i` over all blocks.
///
/// Rows are processed in parallel; within a row, contributions are added in
/// block order, so the result does not depend on the worker count.
pub fn accumulate_weighted(
    global: &mut ScalarField,
    partition: &BlockPartition,
    weights: &BlockWeights,
    locals: &[ScalarField],
) -> Result<()> {
    if global.dims() != (partition.width, partition.height) {
        return Err(Error::DimensionMismatch {
            expected: (partition.width, partition.height),
            actual: global.dims(),
        });
    }
    if locals.len() != partition.blocks.len() {
        return Err(Error::InvalidArgument(format!(
            "{} local fields for {} blocks",
            locals.len(),
            partition.blocks.len()
        )));
    }
    for (b, l) in partition.blocks.iter().zip(locals) {
        if l.dims() != (b.w, b.h) {
            return Err(Error::DimensionMismatch {
                expected: (b.w, b.h),
                actual: l.dims(),
            });
        }
    }
    let width = partition.width;
    let nx = partition.x_starts.len();
    global
        .as_mut_slice()
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(y, row)| {
            for (iy, &y0) in partition.y_starts.iter().enumerate() {
                let bh = weights.y[iy].len();
                if y < y0 || y >= y0 + bh {
                    continue;
                }
                let j = y - y0;
                let wyj = weights.y[iy][j];
                if wyj == 0.0 {
                    continue;
                }
                for (ix, &x0) in partition.x_starts.iter().enumerate() {
                    let wx = &weights.x[ix];
                    let local = &locals[iy * nx + ix];
                    let lrow = &local.as_slice()[j * wx.len()..(j + 1) * wx.len()];
                    for (i, (&wxi, &v)) in wx.iter().zip(lrow).enumerate() {
                        row[x0 + i] += wxi * wyj * v;
                    }
                }
            }
        });
    Ok(())
}
