//! The `.sbtc` container.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "SBTC"
//!      4     1  version (1)
//!      5     1  mode: 0 grayscale BTC, 1 W-plane, 2 W-plane + hill climbing
//!      6     4  width, u32 little-endian
//!     10     4  height, u32 little-endian
//!     14     1  block rows m
//!     15     1  block cols n
//!     16     .  records, row-major block order
//! ```
//!
//! Each record is the bitmap, packed row-major and MSB-first, zero-padded to
//! `ceil(m·n / 8)` bytes, followed by the levels as bytes: `high, low` for
//! grayscale, `r_high, r_low, g_high, g_low, b_high, b_low` for color.

use crate::bitmap::Bitmap;
use crate::codec::Scheme;
use crate::error::{Error, Result};
use crate::image::{BlockSize, GridLayout};
use crate::quantize_level;
use crate::wplane::QuantPair;

pub const MAGIC: [u8; 4] = *b"SBTC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub scheme: Scheme,
    pub width: u32,
    pub height: u32,
    pub block: BlockSize,
}

impl Header {
    pub fn layout(&self) -> GridLayout {
        GridLayout::new(self.width as usize, self.height as usize, self.block)
    }
}

/// Quantization levels of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Levels {
    Gray { high: f64, low: f64 },
    Color(QuantPair),
}

impl Levels {
    fn to_vec(self) -> Vec<f64> {
        match self {
            Levels::Gray { high, low } => vec![high, low],
            Levels::Color(q) => q.to_array().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockCode {
    pub bitmap: Bitmap,
    pub levels: Levels,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedImage {
    pub header: Header,
    pub blocks: Vec<BlockCode>,
}

/// Bytes per record for a block size and scheme.
pub fn record_len(block: BlockSize, scheme: Scheme) -> usize {
    block.area().div_ceil(8) + scheme.level_count()
}

/// Exact file size, or `None` if it does not fit in `usize`.
pub fn encoded_len(width: u32, height: u32, block: BlockSize, scheme: Scheme) -> Option<usize> {
    let rows = (height as usize).div_ceil(block.rows());
    let cols = (width as usize).div_ceil(block.cols());
    rows.checked_mul(cols)?
        .checked_mul(record_len(block, scheme))?
        .checked_add(HEADER_LEN)
}

pub fn serialize(image: &EncodedImage) -> Result<Vec<u8>> {
    let h = &image.header;
    let expected_blocks = h.layout().block_count();
    if image.blocks.len() != expected_blocks {
        return Err(Error::invalid(format!(
            "header implies {expected_blocks} blocks but {} were given",
            image.blocks.len()
        )));
    }
    let total = encoded_len(h.width, h.height, h.block, h.scheme)
        .ok_or_else(|| Error::invalid("encoded size overflows"))?;

    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(h.scheme.mode_byte());
    out.extend_from_slice(&h.width.to_le_bytes());
    out.extend_from_slice(&h.height.to_le_bytes());
    out.push(h.block.rows() as u8);
    out.push(h.block.cols() as u8);

    for (index, code) in image.blocks.iter().enumerate() {
        if code.bitmap.rows() != h.block.rows() || code.bitmap.cols() != h.block.cols() {
            return Err(Error::invalid(format!(
                "block {index}: bitmap is {}x{}, header says {}",
                code.bitmap.rows(),
                code.bitmap.cols(),
                h.block
            )));
        }
        let gray = matches!(code.levels, Levels::Gray { .. });
        if gray != (h.scheme == Scheme::Gray) {
            return Err(Error::invalid(format!(
                "block {index}: level kind does not match mode {}",
                h.scheme
            )));
        }
        pack_bits(code.bitmap.bits(), &mut out);
        for value in code.levels.to_vec() {
            let byte = quantize_level(value).ok_or_else(|| {
                Error::Internal(format!("block {index}: level {value} outside [0, 255]"))
            })?;
            out.push(byte);
        }
    }
    debug_assert_eq!(out.len(), total);
    Ok(out)
}

pub fn deserialize(bytes: &[u8]) -> Result<EncodedImage> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(
            bytes.len(),
            format!(
                "truncated header: expected {HEADER_LEN} bytes, found {}",
                bytes.len()
            ),
        ));
    }
    if bytes[0..4] != MAGIC {
        return Err(Error::format(0, "bad magic, not an .sbtc stream"));
    }
    if bytes[4] != VERSION {
        return Err(Error::format(
            4,
            format!("unsupported version {}", bytes[4]),
        ));
    }
    let scheme = Scheme::from_mode_byte(bytes[5])
        .ok_or_else(|| Error::format(5, format!("unknown mode {}", bytes[5])))?;
    let width = u32::from_le_bytes(bytes[6..10].try_into().unwrap());
    let height = u32::from_le_bytes(bytes[10..14].try_into().unwrap());
    let block = BlockSize::new(usize::from(bytes[14]), usize::from(bytes[15]))
        .map_err(|e| Error::format(14, e.to_string()))?;

    let expected = encoded_len(width, height, block, scheme)
        .ok_or_else(|| Error::format(6, "image dimensions overflow the addressable size"))?;
    if bytes.len() < expected {
        return Err(Error::format(
            bytes.len(),
            format!(
                "truncated stream: expected {expected} bytes, found {}",
                bytes.len()
            ),
        ));
    }
    if bytes.len() > expected {
        return Err(Error::format(
            expected,
            format!(
                "{} trailing bytes after last record",
                bytes.len() - expected
            ),
        ));
    }

    let header = Header {
        scheme,
        width,
        height,
        block,
    };
    let bitmap_len = block.area().div_ceil(8);
    let rec_len = record_len(block, scheme);
    let mut blocks = Vec::with_capacity(header.layout().block_count());
    for (index, record) in bytes[HEADER_LEN..].chunks_exact(rec_len).enumerate() {
        let offset = HEADER_LEN + index * rec_len;
        let bits = unpack_bits(&record[..bitmap_len], block.area())
            .ok_or_else(|| Error::format(offset + bitmap_len - 1, "nonzero bitmap padding bits"))?;
        let lv = &record[bitmap_len..];
        let levels = match scheme {
            Scheme::Gray => Levels::Gray {
                high: f64::from(lv[0]),
                low: f64::from(lv[1]),
            },
            _ => Levels::Color(QuantPair::from_array(std::array::from_fn(|i| {
                f64::from(lv[i])
            }))),
        };
        blocks.push(BlockCode {
            bitmap: Bitmap::from_bits(block.rows(), block.cols(), bits),
            levels,
        });
    }
    Ok(EncodedImage { header, blocks })
}

fn pack_bits(bits: &[bool], out: &mut Vec<u8>) {
    for chunk in bits.chunks(8) {
        let byte = chunk
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i)));
        out.push(byte);
    }
}

/// Returns `None` if any padding bit past `count` is set.
fn unpack_bits(bytes: &[u8], count: usize) -> Option<Vec<bool>> {
    let bits: Vec<bool> = (0..bytes.len() * 8)
        .map(|i| bytes[i / 8] >> (7 - i % 8) & 1 == 1)
        .collect();
    if bits[count..].iter().any(|&b| b) {
        return None;
    }
    Some(bits[..count].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(m: usize, n: usize) -> BlockSize {
        BlockSize::new(m, n).unwrap()
    }

    fn example_record() -> BlockCode {
        BlockCode {
            bitmap: Bitmap::from_rows(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 1, 1, 1]]),
            levels: Levels::Color(QuantPair::from_array([
                235.0, 226.0, 182.0, 156.0, 255.0, 250.0,
            ])),
        }
    }

    #[test]
    fn reconstruction_example_record_layout() {
        let img = EncodedImage {
            header: Header {
                scheme: Scheme::Proposed,
                width: 4,
                height: 4,
                block: bs(4, 4),
            },
            blocks: vec![example_record()],
        };
        let bytes = serialize(&img).unwrap();
        assert_eq!(
            bytes,
            [
                b'S',
                b'B',
                b'T',
                b'C',
                1,
                2,
                4,
                0,
                0,
                0,
                4,
                0,
                0,
                0,
                4,
                4, //
                0b1000_0100,
                0b0010_1111,
                235,
                226,
                182,
                156,
                255,
                250,
            ]
        );
        assert_eq!(deserialize(&bytes).unwrap(), img);
    }

    #[test]
    fn size_formula() {
        assert_eq!(
            encoded_len(512, 512, bs(4, 4), Scheme::Proposed),
            Some(16 + 16384 * 8)
        );
        assert_eq!(
            encoded_len(512, 512, bs(8, 8), Scheme::WPlane),
            Some(16 + 4096 * 14)
        );
        assert_eq!(encoded_len(5, 5, bs(4, 4), Scheme::Gray), Some(16 + 4 * 4));
        assert_eq!(
            encoded_len(3, 3, bs(3, 3), Scheme::Proposed),
            Some(16 + 2 + 6)
        );
        assert_eq!(encoded_len(0, 0, bs(4, 4), Scheme::Proposed), Some(16));
    }

    #[test]
    fn empty_image_is_header_only() {
        let img = EncodedImage {
            header: Header {
                scheme: Scheme::WPlane,
                width: 0,
                height: 7,
                block: bs(4, 4),
            },
            blocks: vec![],
        };
        let bytes = serialize(&img).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN);
        assert_eq!(deserialize(&bytes).unwrap(), img);
    }

    #[test]
    fn truncated_stream_reports_lengths() {
        let img = EncodedImage {
            header: Header {
                scheme: Scheme::Proposed,
                width: 4,
                height: 4,
                block: bs(4, 4),
            },
            blocks: vec![example_record()],
        };
        let bytes = serialize(&img).unwrap();
        let err = deserialize(&bytes[..20]).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Format { offset: 20, .. }));
        assert!(
            msg.contains("expected 24") && msg.contains("found 20"),
            "{msg}"
        );

        assert!(matches!(
            deserialize(&bytes[..9]),
            Err(Error::Format { offset: 9, .. })
        ));
    }

    #[test]
    fn header_errors() {
        let good = serialize(&EncodedImage {
            header: Header {
                scheme: Scheme::Gray,
                width: 1,
                height: 1,
                block: bs(1, 1),
            },
            blocks: vec![BlockCode {
                bitmap: Bitmap::ones(1, 1),
                levels: Levels::Gray {
                    high: 9.0,
                    low: 9.0,
                },
            }],
        })
        .unwrap();
        assert_eq!(good.len(), 16 + 3);

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format { offset: 0, .. })
        ));
        let mut bad = good.clone();
        bad[4] = 9;
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format { offset: 4, .. })
        ));
        let mut bad = good.clone();
        bad[5] = 3;
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format { offset: 5, .. })
        ));
        let mut bad = good.clone();
        bad[14] = 0;
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format { offset: 14, .. })
        ));
        let mut bad = good.clone();
        bad.push(0);
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format { offset: 19, .. })
        ));
        let mut bad = good;
        bad[16] |= 0b0100_0000;
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format { offset: 16, .. })
        ));
    }

    #[test]
    fn huge_dimensions_do_not_allocate() {
        let mut bytes = Vec::from(MAGIC);
        bytes.extend([VERSION, 2]);
        bytes.extend(u32::MAX.to_le_bytes());
        bytes.extend(u32::MAX.to_le_bytes());
        bytes.extend([1, 1]);
        assert!(matches!(deserialize(&bytes), Err(Error::Format { .. })));
    }

    #[test]
    fn serialize_rejects_bad_levels_and_shapes() {
        let header = Header {
            scheme: Scheme::Proposed,
            width: 4,
            height: 4,
            block: bs(4, 4),
        };
        let mut rec = example_record();
        rec.levels = Levels::Color(QuantPair::from_array([256.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        let err = serialize(&EncodedImage {
            header,
            blocks: vec![rec],
        })
        .unwrap_err();
        assert!(matches!(err, Error::Internal(_)));

        let mut rec = example_record();
        rec.bitmap = Bitmap::zeros(2, 2);
        assert!(serialize(&EncodedImage {
            header,
            blocks: vec![rec]
        })
        .is_err());

        let mut rec = example_record();
        rec.levels = Levels::Gray {
            high: 1.0,
            low: 0.0,
        };
        assert!(serialize(&EncodedImage {
            header,
            blocks: vec![rec]
        })
        .is_err());

        assert!(serialize(&EncodedImage {
            header,
            blocks: vec![]
        })
        .is_err());
    }

    #[test]
    fn levels_round_half_even_on_write() {
        let header = Header {
            scheme: Scheme::WPlane,
            width: 4,
            height: 4,
            block: bs(4, 4),
        };
        let mut rec = example_record();
        rec.levels = Levels::Color(QuantPair::from_array([234.5, 225.5, 0.4, 254.6, 1.5, 2.5]));
        let bytes = serialize(&EncodedImage {
            header,
            blocks: vec![rec],
        })
        .unwrap();
        assert_eq!(&bytes[18..], &[234, 226, 0, 255, 2, 2]);
    }
}
