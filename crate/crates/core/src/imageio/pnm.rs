//! Netpbm codecs over byte buffers: P2/P3/P5/P6 at maxval 255, and P1/P4.

use super::{ImageFile, PnmError};
use crate::field::MaskGrid;

/// Upper bound on decoded samples; guards allocation on hostile headers.
const MAX_SAMPLES: usize = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Plain,
    Raw,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn malformed(&self, reason: impl Into<String>) -> PnmError {
        PnmError::Malformed {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    /// Skips whitespace and `#` comments.
    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn magic(&mut self) -> Result<u8, PnmError> {
        match self.bytes {
            [b'P', d @ b'1'..=b'6', ..] => {
                self.pos = 2;
                Ok(*d)
            }
            [] | [b'P'] => Err(PnmError::Truncated {
                offset: self.bytes.len(),
                needed: 2,
            }),
            _ => Err(self.malformed("missing P1-P6 magic number")),
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, PnmError> {
        self.skip_blank();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(usize::from(b - b'0')))
                .ok_or_else(|| PnmError::Malformed {
                    offset: start,
                    reason: format!("{what} overflows"),
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(if self.pos >= self.bytes.len() {
                PnmError::Truncated {
                    offset: self.pos,
                    needed: 1,
                }
            } else {
                self.malformed(format!("expected {what}"))
            });
        }
        Ok(value)
    }

    /// The single whitespace byte separating a raw header from its raster.
    fn raster_separator(&mut self) -> Result<(), PnmError> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(self.malformed("expected whitespace before raster")),
            None => Err(PnmError::Truncated {
                offset: self.pos,
                needed: 1,
            }),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], PnmError> {
        let available = self.bytes.len() - self.pos;
        if available < n {
            return Err(PnmError::Truncated {
                offset: self.bytes.len(),
                needed: n - available,
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }
}

fn dimensions(cur: &mut Cursor<'_>, channels: usize) -> Result<(usize, usize), PnmError> {
    let width_at = cur.pos;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    if width == 0 || height == 0 {
        return Err(PnmError::Malformed {
            offset: width_at,
            reason: format!("empty image {width}x{height}"),
        });
    }
    match width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
    {
        Some(n) if n <= MAX_SAMPLES => Ok((width, height)),
        _ => Err(PnmError::Malformed {
            offset: width_at,
            reason: format!("image {width}x{height} is too large"),
        }),
    }
}

pub fn decode_pnm(bytes: &[u8]) -> Result<ImageFile, PnmError> {
    let mut cur = Cursor::new(bytes);
    let magic = cur.magic()?;
    let channels = match magic {
        b'2' | b'5' => 1,
        b'3' | b'6' => 3,
        _ => {
            return Err(PnmError::Malformed {
                offset: 0,
                reason: format!("P{} is not a graymap or pixmap", magic as char),
            })
        }
    };
    let (width, height) = dimensions(&mut cur, channels)?;
    cur.skip_blank();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(PnmError::UnsupportedMaxval {
            offset: maxval_at,
            maxval,
        });
    }
    let n = width * height * channels;
    let samples = if magic == b'5' || magic == b'6' {
        cur.raster_separator()?;
        cur.take(n)?.to_vec()
    } else {
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            cur.skip_blank();
            let at = cur.pos;
            let v = cur.number("sample")?;
            if v > maxval {
                return Err(PnmError::SampleOutOfRange {
                    offset: at,
                    value: v,
                    maxval,
                });
            }
            samples.push(v as u8);
        }
        samples
    };
    ImageFile::new(width, height, channels, samples)
        .map_err(|reason| PnmError::Malformed { offset: 0, reason })
}

pub fn encode_pnm(image: &ImageFile, encoding: Encoding) -> Vec<u8> {
    let magic = match (image.channels(), encoding) {
        (1, Encoding::Plain) => "P2",
        (1, Encoding::Raw) => "P5",
        (_, Encoding::Plain) => "P3",
        (_, Encoding::Raw) => "P6",
    };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    match encoding {
        Encoding::Raw => out.extend_from_slice(image.samples()),
        Encoding::Plain => {
            // Lines stay under the 70-character limit of the plain formats.
            for row in image.samples().chunks(16) {
                let line: Vec<String> = row.iter().map(u8::to_string).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    out
}

pub fn decode_pbm(bytes: &[u8]) -> Result<MaskGrid, PnmError> {
    let mut cur = Cursor::new(bytes);
    let magic = cur.magic()?;
    if magic != b'1' && magic != b'4' {
        return Err(PnmError::Malformed {
            offset: 0,
            reason: format!("P{} is not a bitmap", magic as char),
        });
    }
    let (width, height) = dimensions(&mut cur, 1)?;
    let mut bits = Vec::with_capacity(width * height);
    if magic == b'4' {
        cur.raster_separator()?;
        let stride = width.div_ceil(8);
        let raster = cur.take(stride * height)?;
        for row in raster.chunks(stride) {
            bits.extend((0..width).map(|x| row[x / 8] & (0x80 >> (x % 8)) != 0));
        }
    } else {
        for _ in 0..width * height {
            cur.skip_blank();
            match bytes.get(cur.pos) {
                Some(b'0') => bits.push(false),
                Some(b'1') => bits.push(true),
                Some(_) => return Err(cur.malformed("expected 0 or 1")),
                None => {
                    return Err(PnmError::Truncated {
                        offset: cur.pos,
                        needed: 1,
                    })
                }
            }
            cur.pos += 1;
        }
    }
    Ok(MaskGrid::from_vec(width, height, bits).expect("length matches dims"))
}

pub fn encode_pbm(mask: &MaskGrid, encoding: Encoding) -> Vec<u8> {
    let (width, height) = mask.dims();
    let magic = if encoding == Encoding::Raw {
        "P4"
    } else {
        "P1"
    };
    let mut out = format!("{magic}\n{width} {height}\n").into_bytes();
    for row in mask.as_slice().chunks(width) {
        match encoding {
            Encoding::Raw => {
                let mut packed = vec![0u8; width.div_ceil(8)];
                for (x, &bit) in row.iter().enumerate() {
                    if bit {
                        packed[x / 8] |= 0x80 >> (x % 8);
                    }
                }
                out.extend_from_slice(&packed);
            }
            Encoding::Plain => {
                for chunk in row.chunks(64) {
                    out.extend(chunk.iter().map(|&b| if b { b'1' } else { b'0' }));
                    out.push(b'\n');
                }
            }
        }
    }
    debug_assert!(height == 0 || !out.is_empty());
    out
}
