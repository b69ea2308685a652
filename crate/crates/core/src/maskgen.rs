//! Seeded random and regular-lattice masks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::MaskGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskKind {
    Random,
    Grid,
}

fn check_density(density: f64) -> Result<()> {
    if density > 0.0 && density <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "density must lie in (0, 1], got {density}"
        )))
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!(
            "mask dimensions must be positive, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Exactly `round(density * N)` known pixels, drawn without replacement.
pub fn random_mask(width: usize, height: usize, density: f64, seed: u64) -> Result<MaskGrid> {
    check_density(density)?;
    check_dims(width, height)?;
    let n = width * height;
    let count = ((density * n as f64).round() as usize).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits = vec![false; n];
    for k in rand::seq::index::sample(&mut rng, n, count) {
        bits[k] = true;
    }
    MaskGrid::from_vec(width, height, bits)
}

fn lattice(width: usize, height: usize, step: usize) -> MaskGrid {
    let offset = step / 2;
    MaskGrid::from_fn(width, height, |x, y| {
        x % step == offset && y % step == offset
    })
}

/// Square lattice whose density is closest to `density`.
pub fn grid_mask(width: usize, height: usize, density: f64) -> Result<MaskGrid> {
    check_density(density)?;
    check_dims(width, height)?;
    let max_step = width.max(height);
    let mut best = (f64::INFINITY, 1);
    for step in 1..=max_step {
        let d = lattice(width, height, step).density();
        let gap = (d - density).abs();
        if gap < best.0 {
            best = (gap, step);
        }
        if d < density {
            break;
        }
    }
    Ok(lattice(width, height, best.1))
}

pub fn generate_mask(
    kind: MaskKind,
    width: usize,
    height: usize,
    density: f64,
    seed: u64,
) -> Result<MaskGrid> {
    match kind {
        MaskKind::Random => random_mask(width, height, density, seed),
        MaskKind::Grid => grid_mask(width, height, density),
    }
}
