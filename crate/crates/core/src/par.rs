//! Reductions with a fixed summation order.
//!
//! Partial sums are taken over fixed-size chunks and then combined
//! sequentially, so results are bitwise identical for any worker count.

use rayon::prelude::*;

const CHUNK: usize = 4096;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= CHUNK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let partials: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partials.iter().sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    if y.len() <= CHUNK {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
        return;
    }
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(ys, xs)| ys.iter_mut().zip(xs).for_each(|(yi, xi)| *yi += alpha * xi));
}

/// `p = r + beta * p`
pub fn xpby(r: &[f64], beta: f64, p: &mut [f64]) {
    if p.len() <= CHUNK {
        p.iter_mut()
            .zip(r)
            .for_each(|(pi, ri)| *pi = ri + beta * *pi);
        return;
    }
    p.par_chunks_mut(CHUNK)
        .zip(r.par_chunks(CHUNK))
        .for_each(|(ps, rs)| {
            ps.iter_mut()
                .zip(rs)
                .for_each(|(pi, ri)| *pi = ri + beta * *pi)
        });
}
