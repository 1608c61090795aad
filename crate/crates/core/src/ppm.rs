//! Binary Netpbm images: PPM (`P6`) and PGM (`P5`) with 8-bit samples.
//! <https://netpbm.sourceforge.net/doc/ppm.html>

use crate::error::{Error, Result};
use crate::image::RgbImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnmKind {
    /// `P5`, one sample per pixel.
    Graymap,
    /// `P6`, three samples per pixel.
    Pixmap,
}

/// Returns true if `bytes` starts with a `P5` or `P6` magic number.
pub fn is_pnm(bytes: &[u8]) -> bool {
    matches!(bytes, [b'P', b'5' | b'6', ..])
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::format(start, format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(start, format!("{what} out of range")))
    }
}

/// Parses a binary PPM or PGM. Graymaps become RGB images with three equal
/// planes. Samples with a maxval below 255 are rescaled to 0..=255.
pub fn decode_pnm(bytes: &[u8]) -> Result<(RgbImage, PnmKind)> {
    let kind = match bytes {
        [b'P', b'6', ..] => PnmKind::Pixmap,
        [b'P', b'5', ..] => PnmKind::Graymap,
        _ => return Err(Error::format(0, "not a binary PPM/PGM (expected P6 or P5)")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval_pos = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::format(
            maxval_pos,
            format!("unsupported maxval {maxval} (only 8-bit samples)"),
        ));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::format(cur.pos, "expected whitespace before raster")),
    }

    let channels = if kind == PnmKind::Pixmap { 3 } else { 1 };
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::format(2, "image dimensions overflow"))?;
    let raster = &bytes[cur.pos..];
    if raster.len() < expected {
        return Err(Error::format(
            bytes.len(),
            format!(
                "truncated raster: expected {expected} bytes, found {}",
                raster.len()
            ),
        ));
    }
    let raster = &raster[..expected];
    let scaled;
    let raster = if maxval == 255 {
        raster
    } else {
        scaled = raster
            .iter()
            .map(|&v| {
                if usize::from(v) > maxval {
                    255
                } else {
                    ((usize::from(v) * 255 + maxval / 2) / maxval) as u8
                }
            })
            .collect::<Vec<_>>();
        &scaled
    };

    let image = match kind {
        PnmKind::Pixmap => RgbImage::from_interleaved(width, height, raster)?,
        PnmKind::Graymap => RgbImage::from_gray(width, height, raster.to_vec())?,
    };
    Ok((image, kind))
}

/// Encodes a `P6` pixmap with maxval 255.
pub fn encode_ppm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.to_interleaved());
    out
}

/// Encodes a `P5` graymap from the R plane.
pub fn encode_pgm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.plane(0));
    out
}
