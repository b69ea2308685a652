//! PNM images, PBM masks and the benchmark CSV.
//!
//! Masks use PBM with bit 1 marking a known pixel.

mod pnm;
mod report;

use std::path::Path;

pub use pnm::{decode_pbm, decode_pnm, encode_pbm, encode_pnm, Encoding};
pub use report::{report_csv_bytes, write_report_csv, ReportRow, REPORT_HEADER};

use crate::error::{Error, Result};
use crate::field::{MaskGrid, ScalarField};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PnmError {
    #[error("malformed header at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: String },
    #[error("truncated input at byte {offset}: {needed} more byte(s) expected")]
    Truncated { offset: usize, needed: usize },
    #[error("unsupported maxval {maxval} at byte {offset}; only 255 is accepted")]
    UnsupportedMaxval { offset: usize, maxval: usize },
    #[error("sample {value} at byte {offset} exceeds maxval {maxval}")]
    SampleOutOfRange {
        offset: usize,
        value: usize,
        maxval: usize,
    },
}

/// Decoded 8-bit image with interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageFile {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

impl ImageFile {
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        samples: Vec<u8>,
    ) -> Result<Self, String> {
        if channels != 1 && channels != 3 {
            return Err(format!("{channels} channels; expected 1 or 3"));
        }
        if samples.len() != width * height * channels {
            return Err(format!(
                "{} samples for a {width}x{height}x{channels} image",
                samples.len()
            ));
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    /// One field per channel, in sample units.
    pub fn to_fields(&self) -> Vec<ScalarField> {
        (0..self.channels)
            .map(|c| {
                let data = self
                    .samples
                    .iter()
                    .skip(c)
                    .step_by(self.channels)
                    .map(|&s| f64::from(s))
                    .collect();
                ScalarField::from_vec(self.width, self.height, data).expect("dims match")
            })
            .collect()
    }

    /// Rounds and clamps to `[0, 255]`; non-finite values become 0.
    pub fn from_fields(fields: &[ScalarField]) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::InvalidArgument("no channels".into()))?;
        let (w, h) = first.dims();
        for f in fields {
            crate::error::ensure_dims((w, h), f.dims())?;
        }
        let channels = fields.len();
        let mut samples = Vec::with_capacity(w * h * channels);
        for k in 0..w * h {
            for f in fields {
                let v = f.as_slice()[k];
                let v = if v.is_finite() {
                    v.round().clamp(0.0, 255.0)
                } else {
                    0.0
                };
                samples.push(v as u8);
            }
        }
        Self::new(w, h, channels, samples).map_err(Error::InvalidArgument)
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn with_path(path: &Path, err: PnmError) -> Error {
    Error::Decode {
        path: path.display().to_string(),
        source: err,
    }
}

pub fn read_pnm(path: impl AsRef<Path>) -> Result<ImageFile> {
    let path = path.as_ref();
    decode_pnm(&read_bytes(path)?).map_err(|e| with_path(path, e))
}

/// Writes the raw (P5/P6) variant.
pub fn write_pnm(path: impl AsRef<Path>, image: &ImageFile) -> Result<()> {
    write_bytes(path.as_ref(), &encode_pnm(image, Encoding::Raw))
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<MaskGrid> {
    let path = path.as_ref();
    decode_pbm(&read_bytes(path)?).map_err(|e| with_path(path, e))
}

/// Writes the raw (P4) variant.
pub fn write_mask(path: impl AsRef<Path>, mask: &MaskGrid) -> Result<()> {
    write_bytes(path.as_ref(), &encode_pbm(mask, Encoding::Raw))
}
