//! Explicitly assembled system and a dense direct solver, used as ground
//! truth for the iterative solvers on small grids.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::problem::InpaintingProblem;

/// Largest grid (in pixels) that [`assemble`] will materialize.
pub const MAX_PIXELS: usize = 16_384;

/// `A` and `b = C f` as dense arrays. Matrix row `y * width + x` belongs to
/// pixel `(x, y)`.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    width: usize,
    height: usize,
    n: usize,
    matrix: Vec<f64>,
    rhs: Vec<f64>,
}

impl DenseSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.n + col]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn row_of(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn pixel_of(&self, row: usize) -> (usize, usize) {
        (row % self.width, row / self.width)
    }

    /// Dense matrix-vector product.
    pub fn mul(&self, v: &ScalarField) -> Result<ScalarField> {
        crate::error::ensure_dims((self.width, self.height), v.dims())?;
        let x = v.as_slice();
        let data = self
            .matrix
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        ScalarField::from_vec(self.width, self.height, data)
    }
}

pub fn assemble(problem: &InpaintingProblem, channel: usize) -> Result<DenseSystem> {
    let (w, h) = problem.dims();
    let n = w * h;
    if n > MAX_PIXELS {
        return Err(Error::TooLarge {
            pixels: n,
            limit: MAX_PIXELS,
        });
    }
    let rhs = problem.rhs(channel)?.into_vec();
    let mask = problem.mask();
    let inv_h2 = 1.0 / (problem.spacing() * problem.spacing());
    let mut matrix = vec![0.0; n * n];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let row = &mut matrix[i * n..(i + 1) * n];
            if mask.get(x, y) {
                row[i] = 1.0;
                continue;
            }
            let mut neighbors = Vec::with_capacity(4);
            if x > 0 {
                neighbors.push(i - 1);
            }
            if x + 1 < w {
                neighbors.push(i + 1);
            }
            if y > 0 {
                neighbors.push(i - w);
            }
            if y + 1 < h {
                neighbors.push(i + w);
            }
            row[i] = neighbors.len() as f64 * inv_h2;
            for j in neighbors {
                row[j] = -inv_h2;
            }
        }
    }
    Ok(DenseSystem {
        width: w,
        height: h,
        n,
        matrix,
        rhs,
    })
}

/// Gaussian elimination with partial pivoting.
///
/// Each row keeps the index of its last structurally nonzero column, so the
/// elimination only touches the band the stencil actually fills.
pub fn dense_solve(system: &DenseSystem) -> Result<ScalarField> {
    let n = system.n;
    if n == 0 {
        return ScalarField::from_vec(system.width, system.height, Vec::new());
    }
    let has_identity_row = (0..n).any(|i| {
        let row = &system.matrix[i * n..(i + 1) * n];
        row[i] == 1.0 && row.iter().filter(|&&v| v != 0.0).count() == 1
    });
    if !has_identity_row {
        return Err(Error::NoDirichletData);
    }

    let mut a = system.matrix.clone();
    let mut b = system.rhs.clone();
    let mut last: Vec<usize> = (0..n)
        .map(|i| {
            a[i * n..(i + 1) * n]
                .iter()
                .rposition(|&v| v != 0.0)
                .unwrap_or(i)
        })
        .collect();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    for k in 0..n {
        let (pivot_row, pivot_abs) =
            (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_abs <= 1e-13 * scale {
            return Err(Error::Singular { step: k });
        }
        if pivot_row != k {
            let (lo, hi) = a.split_at_mut(pivot_row * n);
            lo[k * n..(k + 1) * n].swap_with_slice(&mut hi[..n]);
            b.swap(k, pivot_row);
            last.swap(k, pivot_row);
        }
        let pivot = a[k * n + k];
        let end = last[k];
        let (top, bottom) = a.split_at_mut((k + 1) * n);
        let prow = &top[k * n..(k + 1) * n];
        for i in 0..n - k - 1 {
            let row = &mut bottom[i * n..(i + 1) * n];
            let lead = row[k];
            if lead == 0.0 {
                continue;
            }
            let factor = lead / pivot;
            row[k] = 0.0;
            for j in k + 1..=end {
                row[j] -= factor * prow[j];
            }
            b[k + 1 + i] -= factor * b[k];
            let li = &mut last[k + 1 + i];
            *li = (*li).max(end);
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let row = &a[i * n..(i + 1) * n];
        let mut s = b[i];
        for j in i + 1..=last[i].max(i) {
            s -= row[j] * x[j];
        }
        x[i] = s / row[i];
    }
    ScalarField::from_vec(system.width, system.height, x)
}
