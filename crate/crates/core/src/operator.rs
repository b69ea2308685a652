//! Matrix-free inpainting operator `A = C + (I - C) L`.
//!
//! `L` is the 5-point negative Laplacian with reflecting image borders:
//! neighbors outside the image are dropped and the diagonal counts only the
//! neighbors that exist.

use rayon::prelude::*;

use crate::error::{ensure_dims, Error, Result};
use crate::field::{MaskGrid, ScalarField};
use crate::problem::InpaintingProblem;

/// Rows per parallel task.
const ROWS_PER_TASK: usize = 16;

/// The system operator of one grid level.
#[derive(Debug, Clone, Copy)]
pub struct Operator<'a> {
    mask: &'a MaskGrid,
    spacing: f64,
}

impl<'a> Operator<'a> {
    pub fn new(mask: &'a MaskGrid, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        Ok(Self { mask, spacing })
    }

    #[inline]
    pub fn mask(&self) -> &'a MaskGrid {
        self.mask
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.mask.dims()
    }

    /// `out = A u`
    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        self.rows_into(out, |_, au| au, u);
    }

    /// `out = rhs - A u`
    pub fn residual_into(&self, rhs: &[f64], u: &[f64], out: &mut [f64]) {
        self.rows_into(out, |i, au| rhs[i] - au, u);
    }

    pub fn apply(&self, u: &ScalarField) -> Result<ScalarField> {
        ensure_dims(self.dims(), u.dims())?;
        let (w, h) = self.dims();
        let mut out = ScalarField::zeros(w, h);
        self.apply_into(u.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    pub fn residual(&self, rhs: &ScalarField, u: &ScalarField) -> Result<ScalarField> {
        ensure_dims(self.dims(), u.dims())?;
        ensure_dims(self.dims(), rhs.dims())?;
        let (w, h) = self.dims();
        let mut out = ScalarField::zeros(w, h);
        self.residual_into(rhs.as_slice(), u.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    fn rows_into<F>(&self, out: &mut [f64], finish: F, u: &[f64])
    where
        F: Fn(usize, f64) -> f64 + Sync,
    {
        let (w, h) = self.dims();
        debug_assert_eq!(u.len(), w * h);
        debug_assert_eq!(out.len(), w * h);
        if w == 0 || h == 0 {
            return;
        }
        let inv_h2 = 1.0 / (self.spacing * self.spacing);
        let bits = self.mask.as_slice();
        let kernel = |y0: usize, rows: &mut [f64]| {
            for (dy, row) in rows.chunks_mut(w).enumerate() {
                let y = y0 + dy;
                let base = y * w;
                for (x, o) in row.iter_mut().enumerate() {
                    let i = base + x;
                    let au = if bits[i] {
                        u[i]
                    } else {
                        let mut count = 0.0;
                        let mut sum = 0.0;
                        if x > 0 {
                            count += 1.0;
                            sum += u[i - 1];
                        }
                        if x + 1 < w {
                            count += 1.0;
                            sum += u[i + 1];
                        }
                        if y > 0 {
                            count += 1.0;
                            sum += u[i - w];
                        }
                        if y + 1 < h {
                            count += 1.0;
                            sum += u[i + w];
                        }
                        (count * u[i] - sum) * inv_h2
                    };
                    *o = finish(i, au);
                }
            }
        };
        if h <= ROWS_PER_TASK {
            kernel(0, out);
        } else {
            out.par_chunks_mut(w * ROWS_PER_TASK)
                .enumerate()
                .for_each(|(t, rows)| kernel(t * ROWS_PER_TASK, rows));
        }
    }
}

/// Applies `A = C + (I - C) L` to `u`.
pub fn apply_operator(mask: &MaskGrid, spacing: f64, u: &ScalarField) -> Result<ScalarField> {
    Operator::new(mask, spacing)?.apply(u)
}

/// `b - A u` for one channel of `problem`.
pub fn residual(
    problem: &InpaintingProblem,
    channel: usize,
    u: &ScalarField,
) -> Result<ScalarField> {
    let rhs = problem.rhs(channel)?;
    problem.operator().residual(&rhs, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mask(w: usize, h: usize, p: f64, rng: &mut ChaCha8Rng) -> MaskGrid {
        MaskGrid::from_fn(w, h, |_, _| rng.gen_bool(p))
    }

    fn random_field(w: usize, h: usize, rng: &mut ChaCha8Rng) -> ScalarField {
        ScalarField::from_fn(w, h, |_, _| rng.gen_range(-100.0..100.0))
    }

    #[test]
    fn full_mask_is_identity() {
        let mask = MaskGrid::full(7, 5);
        let u = ScalarField::from_fn(7, 5, |x, y| (3 * x + 11 * y) as f64 - 4.5);
        assert_eq!(apply_operator(&mask, 1.0, &u).unwrap(), u);
    }

    #[test]
    fn interior_stencil_values() {
        let mask = MaskGrid::empty(3, 3);
        let mut u = ScalarField::zeros(3, 3);
        u.set(1, 1, 10.0);
        u.set(1, 0, 1.0);
        u.set(1, 2, 2.0);
        u.set(0, 1, 3.0);
        u.set(2, 1, 4.0);
        let au = apply_operator(&mask, 1.0, &u).unwrap();
        assert_eq!(au.get(1, 1), 40.0 - 1.0 - 2.0 - 3.0 - 4.0);
        // corner (0,0) has two neighbors: (1,0) = 1 and (0,1) = 3
        assert_eq!(au.get(0, 0), 0.0 * 2.0 - 1.0 - 3.0);
        let au2 = apply_operator(&mask, 2.0, &u).unwrap();
        assert_eq!(au2.get(1, 1), 30.0 / 4.0);
    }

    #[test]
    fn constant_maps_to_mask_indicator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mask = random_mask(13, 9, 0.3, &mut rng);
        let au = apply_operator(&mask, 0.5, &ScalarField::filled(13, 9, 1.0)).unwrap();
        assert_eq!(au, mask.indicator());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mask = MaskGrid::empty(4, 4);
        assert!(matches!(
            apply_operator(&mask, 1.0, &ScalarField::zeros(4, 5)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(apply_operator(&mask, 0.0, &ScalarField::zeros(4, 4)).is_err());
    }

    #[test]
    fn residual_vanishes_on_matching_mask_pixels() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mask = random_mask(10, 10, 0.2, &mut rng);
        let f = random_field(10, 10, &mut rng);
        let problem = InpaintingProblem::new(mask.clone(), vec![f.clone()], 1.0).unwrap();
        let mut u = random_field(10, 10, &mut rng);
        for y in 0..10 {
            for x in 0..10 {
                if mask.get(x, y) {
                    u.set(x, y, f.get(x, y));
                }
            }
        }
        let r = residual(&problem, 0, &u).unwrap();
        for y in 0..10 {
            for x in 0..10 {
                if mask.get(x, y) {
                    assert_eq!(r.get(x, y), 0.0);
                }
            }
        }
    }

    #[test]
    fn parallel_apply_matches_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mask = random_mask(97, 211, 0.05, &mut rng);
        let u = random_field(97, 211, &mut rng);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let a = one.install(|| apply_operator(&mask, 1.0, &u).unwrap());
        let b = apply_operator(&mask, 1.0, &u).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn operator_is_linear(seed in any::<u64>(), w in 1usize..24, h in 1usize..24,
                              alpha in -5.0f64..5.0, beta in -5.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mask = random_mask(w, h, 0.3, &mut rng);
            let u = random_field(w, h, &mut rng);
            let v = random_field(w, h, &mut rng);
            let combo = ScalarField::from_fn(w, h, |x, y| alpha * u.get(x, y) + beta * v.get(x, y));
            let lhs = apply_operator(&mask, 1.0, &combo).unwrap();
            let au = apply_operator(&mask, 1.0, &u).unwrap();
            let av = apply_operator(&mask, 1.0, &v).unwrap();
            let rhs = ScalarField::from_fn(w, h, |x, y| alpha * au.get(x, y) + beta * av.get(x, y));
            let diff: Vec<f64> = lhs.as_slice().iter().zip(rhs.as_slice()).map(|(a, b)| a - b).collect();
            let scale = rhs.norm().max(lhs.norm()).max(1.0);
            prop_assert!(par::norm(&diff) <= 1e-12 * scale);
        }

        #[test]
        fn reduced_system_is_symmetric(seed in any::<u64>(), w in 1usize..24, h in 1usize..24) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mask = random_mask(w, h, 0.25, &mut rng);
            let zero_on_mask = |f: ScalarField| ScalarField::from_fn(w, h, |x, y| {
                if mask.get(x, y) { 0.0 } else { f.get(x, y) }
            });
            let a = zero_on_mask(random_field(w, h, &mut rng));
            let b = zero_on_mask(random_field(w, h, &mut rng));
            let op = Operator::new(&mask, 1.0).unwrap();
            let ab = par::dot(op.apply(&a).unwrap().as_slice(), b.as_slice());
            let ba = par::dot(a.as_slice(), op.apply(&b).unwrap().as_slice());
            prop_assert!((ab - ba).abs() <= 1e-12 * ab.abs().max(ba.abs()).max(1.0));
        }

        #[test]
        fn constants_vanish_off_mask(seed in any::<u64>(), k in -3000i32..3000) {
            let c = f64::from(k) / 8.0;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mask = random_mask(11, 7, 0.4, &mut rng);
            let au = apply_operator(&mask, 2.0, &ScalarField::filled(11, 7, c)).unwrap();
            for y in 0..7 {
                for x in 0..11 {
                    let expect = if mask.get(x, y) { c } else { 0.0 };
                    prop_assert_eq!(au.get(x, y), expect);
                }
            }
        }
    }
}
