//! Inter-grid transfers on a cell-centered dyadic hierarchy.
//!
//! Coarse pixel `(X, Y)` covers fine pixels `(2X..2X+1, 2Y..2Y+1)`; cells on
//! the far edge of an odd dimension have fewer constituents.

use crate::error::{Error, Result};
use crate::field::{MaskGrid, ScalarField};

#[inline]
pub fn coarse_dims(width: usize, height: usize) -> (usize, usize) {
    (width.div_ceil(2), height.div_ceil(2))
}

fn check_dyadic(fine: (usize, usize), coarse: (usize, usize)) -> Result<()> {
    let expected = coarse_dims(fine.0, fine.1);
    if expected != coarse {
        return Err(Error::DimensionMismatch {
            expected,
            actual: coarse,
        });
    }
    Ok(())
}

/// Fine pixels of the cell `(cx, cy)` that exist in a `fw x fh` grid.
fn cell(cx: usize, cy: usize, fw: usize, fh: usize) -> impl Iterator<Item = (usize, usize)> {
    let xs = 2 * cx..(2 * cx + 2).min(fw);
    let ys = 2 * cy..(2 * cy + 2).min(fh);
    ys.flat_map(move |y| xs.clone().map(move |x| (x, y)))
}

/// Max pooling: a coarse pixel is known if any of its constituents is.
pub fn downsample_mask(fine: &MaskGrid) -> MaskGrid {
    let (fw, fh) = fine.dims();
    let (cw, ch) = coarse_dims(fw, fh);
    MaskGrid::from_fn(cw, ch, |cx, cy| {
        cell(cx, cy, fw, fh).any(|(x, y)| fine.get(x, y))
    })
}

/// Weighted mean of `(weight, value)` pairs, `None` if the weights sum to 0.
/// Computed as an offset from the first value, so equal values are
/// reproduced exactly.
fn weighted_mean(items: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let mut base = None;
    let mut num = 0.0;
    let mut den = 0.0;
    for (w, v) in items {
        let b = *base.get_or_insert(v);
        num += w * (v - b);
        den += w;
    }
    match base {
        Some(b) if den > 0.0 => Some(b + num / den),
        _ => None,
    }
}

/// Mean of the known values in each cell; 0 where a cell has none.
pub fn downsample_values_naive(fine_mask: &MaskGrid, fine_rhs: &ScalarField) -> ScalarField {
    let (fw, fh) = fine_mask.dims();
    let (cw, ch) = coarse_dims(fw, fh);
    ScalarField::from_fn(cw, ch, |cx, cy| {
        let known = cell(cx, cy, fw, fh)
            .filter(|&(x, y)| fine_mask.get(x, y))
            .map(|(x, y)| (1.0, fine_rhs.get(x, y)));
        weighted_mean(known).unwrap_or(0.0)
    })
}

/// Weighted mean in which each known fine pixel counts `4 - k`, `k` being
/// how many of its four direct neighbors are known. Neighbors inside the cell
/// are read from the fine mask, neighbors across the cell border from the
/// adjacent coarse pixels; neighbors beyond the image count as unknown.
///
/// A known coarse pixel whose weights all vanish takes the plain mean.
pub fn downsample_values_modified(
    fine_mask: &MaskGrid,
    coarse_mask: &MaskGrid,
    fine_rhs: &ScalarField,
) -> Result<ScalarField> {
    let (fw, fh) = fine_mask.dims();
    let (cw, ch) = coarse_mask.dims();
    check_dyadic((fw, fh), (cw, ch))?;
    if fine_rhs.dims() != (fw, fh) {
        return Err(Error::DimensionMismatch {
            expected: (fw, fh),
            actual: fine_rhs.dims(),
        });
    }

    let known = |x: isize, y: isize, cx: usize, cy: usize| -> f64 {
        if x < 0 || y < 0 || x as usize >= fw || y as usize >= fh {
            return 0.0;
        }
        let (x, y) = (x as usize, y as usize);
        let indicator = if x / 2 == cx && y / 2 == cy {
            fine_mask.get(x, y)
        } else {
            let (nx, ny) = (x / 2, y / 2);
            nx < cw && ny < ch && coarse_mask.get(nx, ny)
        };
        if indicator {
            1.0
        } else {
            0.0
        }
    };

    let mut out = ScalarField::zeros(cw, ch);
    for cy in 0..ch {
        for cx in 0..cw {
            if !coarse_mask.get(cx, cy) {
                continue;
            }
            let members = || cell(cx, cy, fw, fh).filter(|&(x, y)| fine_mask.get(x, y));
            let weighted = members().map(|(x, y)| {
                let (xi, yi) = (x as isize, y as isize);
                let blocked = known(xi - 1, yi, cx, cy)
                    + known(xi + 1, yi, cx, cy)
                    + known(xi, yi - 1, cx, cy)
                    + known(xi, yi + 1, cx, cy);
                (4.0 - blocked, fine_rhs.get(x, y))
            });
            let value = weighted_mean(weighted)
                .or_else(|| weighted_mean(members().map(|(x, y)| (1.0, fine_rhs.get(x, y)))))
                .unwrap_or(0.0);
            out.set(cx, cy, value);
        }
    }
    Ok(out)
}

/// Cell average of the residual at unknown coarse pixels, 0 at known ones.
pub fn restrict_residual(fine_r: &ScalarField, coarse_mask: &MaskGrid) -> Result<ScalarField> {
    let (fw, fh) = fine_r.dims();
    check_dyadic((fw, fh), coarse_mask.dims())?;
    let (cw, ch) = coarse_mask.dims();
    Ok(ScalarField::from_fn(cw, ch, |cx, cy| {
        if coarse_mask.get(cx, cy) {
            return 0.0;
        }
        let mut sum = 0.0;
        let mut count = 0usize;
        for (x, y) in cell(cx, cy, fw, fh) {
            sum += fine_r.get(x, y);
            count += 1;
        }
        sum / count as f64
    }))
}

/// Cell-centered bilinear interpolation with weights 9/16, 3/16, 3/16, 1/16,
/// clamping at the borders.
pub fn interpolate_bilinear(coarse: &ScalarField, fw: usize, fh: usize) -> Result<ScalarField> {
    check_dyadic((fw, fh), coarse.dims())?;
    let (cw, ch) = coarse.dims();
    let partner = |f: usize, n: usize| -> usize {
        let c = f / 2;
        if f.is_multiple_of(2) {
            c.saturating_sub(1)
        } else {
            (c + 1).min(n - 1)
        }
    };
    Ok(ScalarField::from_fn(fw, fh, |x, y| {
        let (cx, cy) = (x / 2, y / 2);
        let (px, py) = (partner(x, cw), partner(y, ch));
        // Offsets from the nearest coarse value keep constants exact.
        let a = coarse.get(cx, cy);
        a + 0.1875 * (coarse.get(px, cy) - a)
            + 0.1875 * (coarse.get(cx, py) - a)
            + 0.0625 * (coarse.get(px, py) - a)
    }))
}

/// Interpolates a coarse solution and restores the known values at the
/// fine mask pixels.
pub fn prolongate_solution(
    coarse_u: &ScalarField,
    fine_mask: &MaskGrid,
    fine_f: &ScalarField,
) -> Result<ScalarField> {
    let (fw, fh) = fine_mask.dims();
    let mut u = interpolate_bilinear(coarse_u, fw, fh)?;
    crate::problem::impose_mask_values(fine_mask, fine_f.as_slice(), u.as_mut_slice());
    Ok(u)
}

/// Interpolates a coarse correction and zeroes it at the fine mask pixels.
pub fn prolongate_correction(coarse_e: &ScalarField, fine_mask: &MaskGrid) -> Result<ScalarField> {
    let (fw, fh) = fine_mask.dims();
    let mut e = interpolate_bilinear(coarse_e, fw, fh)?;
    for (v, &m) in e.as_mut_slice().iter_mut().zip(fine_mask.as_slice()) {
        if m {
            *v = 0.0;
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_mask_pixel_marks_coarse_cell() {
        let mut fine = MaskGrid::empty(4, 4);
        fine.set(3, 2, true);
        let coarse = downsample_mask(&fine);
        assert_eq!(coarse.dims(), (2, 2));
        assert_eq!(coarse.as_slice(), &[false, false, false, true]);
    }

    #[test]
    fn empty_and_full_masks_are_preserved() {
        assert_eq!(downsample_mask(&MaskGrid::empty(7, 5)).count(), 0);
        let full = downsample_mask(&MaskGrid::full(7, 5));
        assert_eq!(full.dims(), (4, 3));
        assert_eq!(full.count(), 12);
    }

    #[test]
    fn naive_mean_of_known_values() {
        let mask = MaskGrid::from_vec(2, 2, vec![true, false, false, true]).unwrap();
        let rhs = ScalarField::from_vec(2, 2, vec![100.0, 0.0, 0.0, 200.0]).unwrap();
        assert_eq!(downsample_values_naive(&mask, &rhs).as_slice(), &[150.0]);
        let none = MaskGrid::empty(2, 2);
        assert_eq!(downsample_values_naive(&none, &rhs).as_slice(), &[0.0]);
        let one = MaskGrid::from_vec(2, 2, vec![false, false, true, false]).unwrap();
        let v = ScalarField::from_vec(2, 2, vec![0.0, 0.0, 37.5, 0.0]).unwrap();
        assert_eq!(downsample_values_naive(&one, &v).as_slice(), &[37.5]);
    }

    #[test]
    fn modified_isolated_pixel_keeps_value() {
        let mut mask = MaskGrid::empty(8, 8);
        mask.set(5, 2, true);
        let rhs = ScalarField::from_fn(8, 8, |x, y| if x == 5 && y == 2 { 91.0 } else { 0.0 });
        let coarse = downsample_mask(&mask);
        let out = downsample_values_modified(&mask, &coarse, &rhs).unwrap();
        assert_eq!(out.get(2, 1), 91.0);
        assert_eq!(out.as_slice().iter().filter(|&&v| v != 0.0).count(), 1);
    }

    #[test]
    fn modified_suppresses_enclosed_pixel() {
        // Cell (1,1) covers fine (2..4, 2..4). Fine (2,2) has fine neighbors
        // (3,2), (2,3) inside the cell and coarse neighbors (0,1), (1,0).
        let mut mask = MaskGrid::empty(6, 6);
        for (x, y) in [(2, 2), (3, 2), (2, 3), (1, 2), (2, 1)] {
            mask.set(x, y, true);
        }
        let rhs = ScalarField::from_fn(6, 6, |x, y| match (x, y) {
            (2, 2) => 1000.0,
            (3, 2) | (2, 3) => 10.0,
            _ => 0.0,
        });
        let coarse = downsample_mask(&mask);
        assert!(coarse.get(0, 1) && coarse.get(1, 0));
        let out = downsample_values_modified(&mask, &coarse, &rhs).unwrap();
        // (2,2): weight 0. (3,2): neighbors (2,2) fine, (3,3) fine=0, (4,2) coarse (2,1)=0,
        // (3,1) coarse (1,0)=1 -> weight 2. (2,3) symmetric -> weight 2.
        assert_eq!(out.get(1, 1), 10.0);
    }

    #[test]
    fn modified_falls_back_to_plain_mean_on_flat_regions() {
        let mask = MaskGrid::full(8, 8);
        let rhs = ScalarField::filled(8, 8, 123.0);
        let coarse = downsample_mask(&mask);
        let out = downsample_values_modified(&mask, &coarse, &rhs).unwrap();
        assert!(out.as_slice().iter().all(|&v| v == 123.0));
    }

    #[test]
    fn residual_restriction() {
        let r = ScalarField::from_vec(2, 2, vec![4.0, 0.0, 0.0, 0.0]).unwrap();
        let coarse = MaskGrid::empty(1, 1);
        assert_eq!(restrict_residual(&r, &coarse).unwrap().as_slice(), &[1.0]);
        let known = MaskGrid::full(1, 1);
        assert_eq!(restrict_residual(&r, &known).unwrap().as_slice(), &[0.0]);
        let zero = restrict_residual(&ScalarField::zeros(9, 5), &MaskGrid::empty(5, 3)).unwrap();
        assert!(zero.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_prolongates_to_constant() {
        let c = ScalarField::filled(5, 3, 17.25);
        let fine = prolongate_correction(&c, &MaskGrid::empty(9, 6)).unwrap();
        assert!(fine.as_slice().iter().all(|&v| v == 17.25));
    }

    #[test]
    fn prolongation_honors_mask() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let coarse = ScalarField::from_fn(4, 4, |_, _| rng.gen_range(0.0..10.0));
        let mask = MaskGrid::from_fn(8, 8, |x, y| (x + y) % 5 == 0);
        let f = ScalarField::from_fn(8, 8, |x, y| (x * 8 + y) as f64);
        let u = prolongate_solution(&coarse, &mask, &f).unwrap();
        let e = prolongate_correction(&coarse, &mask).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                if mask.get(x, y) {
                    assert_eq!(u.get(x, y), f.get(x, y));
                    assert_eq!(e.get(x, y), 0.0);
                } else {
                    assert_eq!(u.get(x, y), e.get(x, y));
                }
            }
        }
    }

    #[test]
    fn one_dimensional_weights() {
        let coarse = ScalarField::from_vec(2, 1, vec![8.0, 4.0]).unwrap();
        let fine = interpolate_bilinear(&coarse, 4, 1).unwrap();
        // fine 1 is nearest to coarse 0 on its right side: (3a + b) / 4
        assert_eq!(fine.as_slice(), &[8.0, 7.0, 5.0, 4.0]);
    }

    /// Reference interpolation matrix assembled from the 1-D cell-centered
    /// rule `(3 a + b) / 4` as a tensor product.
    fn dense_prolongation(cw: usize, ch: usize, fw: usize, fh: usize) -> Vec<Vec<f64>> {
        let one_d = |f: usize, n: usize| -> Vec<f64> {
            let mut row = vec![0.0; n];
            let center = (f as f64 + 0.5) / 2.0 - 0.5;
            let c = center.clamp(0.0, (n - 1) as f64);
            let lo = c.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            let t = c - lo as f64;
            row[lo] += 1.0 - t;
            row[hi] += t;
            row
        };
        let mut m = vec![vec![0.0; cw * ch]; fw * fh];
        for y in 0..fh {
            let wy = one_d(y, ch);
            for x in 0..fw {
                let wx = one_d(x, cw);
                for cy in 0..ch {
                    for cx in 0..cw {
                        m[y * fw + x][cy * cw + cx] = wx[cx] * wy[cy];
                    }
                }
            }
        }
        m
    }

    #[test]
    fn bilinear_matches_dense_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        for (fw, fh) in [(8, 8), (7, 8), (8, 5), (3, 3)] {
            let (cw, ch) = coarse_dims(fw, fh);
            let coarse = ScalarField::from_fn(cw, ch, |_, _| rng.gen_range(-5.0..5.0));
            let fine = interpolate_bilinear(&coarse, fw, fh).unwrap();
            let m = dense_prolongation(cw, ch, fw, fh);
            for (k, row) in m.iter().enumerate() {
                let expect: f64 = row.iter().zip(coarse.as_slice()).map(|(a, b)| a * b).sum();
                assert!(
                    (fine.as_slice()[k] - expect).abs() < 1e-12,
                    "{fw}x{fh} pixel {k}"
                );
            }
        }
    }

    #[test]
    fn dimension_checks() {
        assert!(restrict_residual(&ScalarField::zeros(8, 8), &MaskGrid::empty(3, 4)).is_err());
        assert!(interpolate_bilinear(&ScalarField::zeros(3, 3), 8, 8).is_err());
    }

    proptest! {
        #[test]
        fn mask_density_never_decreases(seed in any::<u64>(), w in 1usize..60, h in 1usize..60, p in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fine = MaskGrid::from_fn(w, h, |_, _| rng.gen_bool(p));
            let coarse = downsample_mask(&fine);
            prop_assert!(coarse.density() + 1e-12 >= fine.density());
        }

        #[test]
        fn modified_values_stay_within_cell_range(seed in any::<u64>(), w in 1usize..40, h in 1usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fine = MaskGrid::from_fn(w, h, |_, _| rng.gen_bool(0.4));
            let rhs = crate::problem::masked(&fine, &ScalarField::from_fn(w, h, |_, _| rng.gen_range(0.0..255.0)));
            let coarse = downsample_mask(&fine);
            let out = downsample_values_modified(&fine, &coarse, &rhs).unwrap();
            for cy in 0..coarse.height() {
                for cx in 0..coarse.width() {
                    let vals: Vec<f64> = cell(cx, cy, w, h).filter(|&(x, y)| fine.get(x, y)).map(|(x, y)| rhs.get(x, y)).collect();
                    let v = out.get(cx, cy);
                    if vals.is_empty() {
                        prop_assert_eq!(v, 0.0);
                    } else {
                        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
                    }
                }
            }
        }
    }
}
