use crate::error::{ensure_dims, Error, Result};
use crate::field::{MaskGrid, ScalarField};
use crate::operator::Operator;

/// A mask plus known values per channel. The system `A u = C f` is implied;
/// nothing is ever assembled.
#[derive(Debug, Clone)]
pub struct InpaintingProblem {
    mask: MaskGrid,
    known: Vec<ScalarField>,
    spacing: f64,
}

impl InpaintingProblem {
    pub fn new(mask: MaskGrid, known: Vec<ScalarField>, spacing: f64) -> Result<Self> {
        if known.is_empty() {
            return Err(Error::InvalidArgument(
                "problem needs at least one channel".into(),
            ));
        }
        for channel in &known {
            ensure_dims(mask.dims(), channel.dims())?;
            if !channel.is_finite() {
                return Err(Error::InvalidArgument("known values must be finite".into()));
            }
        }
        Operator::new(&mask, spacing)?;
        Ok(Self {
            mask,
            known,
            spacing,
        })
    }

    pub fn mask(&self) -> &MaskGrid {
        &self.mask
    }

    pub fn known(&self) -> &[ScalarField] {
        &self.known
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn channels(&self) -> usize {
        self.known.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.mask.dims()
    }

    pub fn operator(&self) -> Operator<'_> {
        Operator::new(&self.mask, self.spacing).expect("spacing validated in constructor")
    }

    fn channel(&self, channel: usize) -> Result<&ScalarField> {
        self.known.get(channel).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "channel {channel} out of range ({} channels)",
                self.known.len()
            ))
        })
    }

    /// Right-hand side `b = C f`.
    pub fn rhs(&self, channel: usize) -> Result<ScalarField> {
        Ok(masked(&self.mask, self.channel(channel)?))
    }

    /// Starting guess: known values on the mask, their mean elsewhere.
    pub fn initial_guess(&self, channel: usize) -> Result<ScalarField> {
        Ok(mean_filled(&self.mask, &self.rhs(channel)?))
    }
}

/// Zeroes `values` outside the mask.
pub fn masked(mask: &MaskGrid, values: &ScalarField) -> ScalarField {
    let data = mask
        .as_slice()
        .iter()
        .zip(values.as_slice())
        .map(|(&m, &v)| if m { v } else { 0.0 })
        .collect();
    ScalarField::from_vec(mask.width(), mask.height(), data).expect("dims match")
}

/// Keeps `rhs` on the mask and fills every other pixel with the mean of the
/// mask values. A constant mask datum therefore yields the exact solution.
pub fn mean_filled(mask: &MaskGrid, rhs: &ScalarField) -> ScalarField {
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (&m, &v) in mask.as_slice().iter().zip(rhs.as_slice()) {
        if m {
            sum += v;
            count += 1;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    // A rounded mean of identical values need not equal them.
    let fill = match count {
        0 => 0.0,
        _ if lo == hi => lo,
        _ => (sum / count as f64).clamp(lo, hi),
    };
    let data = mask
        .as_slice()
        .iter()
        .zip(rhs.as_slice())
        .map(|(&m, &v)| if m { v } else { fill })
        .collect();
    ScalarField::from_vec(mask.width(), mask.height(), data).expect("dims match")
}

/// Writes the mask values of `rhs` into `u`.
pub(crate) fn impose_mask_values(mask: &MaskGrid, rhs: &[f64], u: &mut [f64]) {
    for ((&m, &b), ui) in mask.as_slice().iter().zip(rhs).zip(u.iter_mut()) {
        if m {
            *ui = b;
        }
    }
}
