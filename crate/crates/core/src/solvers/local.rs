//! Block-local systems with Robin transmission conditions.
//!
//! A neighbor cut off by an inner block side is eliminated through a one-sided
//! ghost value: the coupling is dropped and that direction adds `alpha / h`
//! to the diagonal instead of `1 / h^2`. Neighbors beyond the image border are
//! dropped entirely, as in the global operator.

use crate::field::{MaskGrid, ScalarField};
use crate::partition::BlockRect;

const WEST: u8 = 1;
const EAST: u8 = 2;
const NORTH: u8 = 4;
const SOUTH: u8 = 8;

#[derive(Debug, Clone)]
pub struct LocalSystem {
    w: usize,
    h: usize,
    inv_h2: f64,
    /// Diagonal entry; unused at mask pixels, whose rows are identity rows.
    diag: Vec<f64>,
    /// In-block couplings per pixel.
    links: Vec<u8>,
    mask: Vec<bool>,
}

pub fn build_local_system(
    rect: &BlockRect,
    mask: &MaskGrid,
    spacing: f64,
    alpha: f64,
) -> LocalSystem {
    let (gw, gh) = mask.dims();
    let inv_h2 = 1.0 / (spacing * spacing);
    let robin = alpha / spacing;
    let n = rect.w * rect.h;
    let mut diag = vec![0.0; n];
    let mut links = vec![0u8; n];
    let mut local_mask = vec![false; n];

    for j in 0..rect.h {
        let y = rect.y0 + j;
        for i in 0..rect.w {
            let x = rect.x0 + i;
            let k = j * rect.w + i;
            if mask.get(x, y) {
                local_mask[k] = true;
                diag[k] = 1.0;
                continue;
            }
            let mut d = 0.0;
            let mut l = 0u8;
            let mut side = |in_image: bool, in_block: bool, bit: u8| {
                if !in_image {
                    return;
                }
                if in_block {
                    d += inv_h2;
                    l |= bit;
                } else {
                    d += robin;
                }
            };
            side(x > 0, i > 0, WEST);
            side(x + 1 < gw, i + 1 < rect.w, EAST);
            side(y > 0, j > 0, NORTH);
            side(y + 1 < gh, j + 1 < rect.h, SOUTH);
            diag[k] = d;
            links[k] = l;
        }
    }

    LocalSystem {
        w: rect.w,
        h: rect.h,
        inv_h2,
        diag,
        links,
        mask: local_mask,
    }
}

impl LocalSystem {
    pub fn dims(&self) -> (usize, usize) {
        (self.w, self.h)
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let w = self.w;
        for (k, o) in out.iter_mut().enumerate() {
            if self.mask[k] {
                *o = v[k];
                continue;
            }
            let l = self.links[k];
            let mut s = 0.0;
            if l & WEST != 0 {
                s += v[k - 1];
            }
            if l & EAST != 0 {
                s += v[k + 1];
            }
            if l & NORTH != 0 {
                s += v[k - w];
            }
            if l & SOUTH != 0 {
                s += v[k + w];
            }
            *o = self.diag[k] * v[k] - self.inv_h2 * s;
        }
    }

    /// Materialized matrix, row-major, for inspection and testing.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.w * self.h;
        let mut rows = vec![vec![0.0; n]; n];
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for c in 0..n {
            e[c] = 1.0;
            self.apply(&e, &mut col);
            for (r, &v) in col.iter().enumerate() {
                rows[r][c] = v;
            }
            e[c] = 0.0;
        }
        rows
    }
}

/// CG on the local system from a zero guess. Stops once the squared local
/// residual is at most `target_sq_norm` or after `max_iters` steps.
///
/// Returns the correction and the number of iterations taken.
pub fn local_solve(
    system: &LocalSystem,
    rhs: &ScalarField,
    target_sq_norm: f64,
    max_iters: usize,
) -> (ScalarField, usize) {
    let n = system.w * system.h;
    debug_assert_eq!(rhs.len(), n);
    let b = rhs.as_slice();
    let mut v = vec![0.0; n];
    for k in 0..n {
        if system.mask[k] {
            v[k] = b[k];
        }
    }
    let mut r = vec![0.0; n];
    system.apply(&v, &mut r);
    for (rk, bk) in r.iter_mut().zip(b) {
        *rk = bk - *rk;
    }
    let mut rr: f64 = r.iter().map(|x| x * x).sum();
    let mut p = r.clone();
    let mut q = vec![0.0; n];
    let mut iterations = 0;
    while rr > target_sq_norm && rr > 0.0 && iterations < max_iters {
        system.apply(&p, &mut q);
        let pq: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
        if !(pq > 0.0) {
            break;
        }
        let step = rr / pq;
        for k in 0..n {
            v[k] += step * p[k];
            r[k] -= step * q[k];
        }
        let rr_next: f64 = r.iter().map(|x| x * x).sum();
        let beta = rr_next / rr;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_next;
        iterations += 1;
    }
    (
        ScalarField::from_vec(system.w, system.h, v).expect("dims match"),
        iterations,
    )
}
