//! Whole-image encoder and decoder.

use std::fmt;
use std::str::FromStr;

use crate::bitstream::{BlockCode, EncodedImage, Header, Levels};
use crate::error::{Error, Result};
use crate::gray::{decode_gray_block, encode_gray_block};
use crate::image::{partition, reassemble, Block, BlockSize, GridLayout, RgbImage};
use crate::parallel::{encode_parallel, plan, resolve_threads};
use crate::reconstruct::{final_quantize, reconstruct_block};
use crate::refine::{refine_bitmap, refine_until_stable};
use crate::wplane::{initial_bitmap, quantize_channels};

/// Upper bound on refine/requantize rounds in iterate mode.
const MAX_ITERATE_ROUNDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Grayscale BTC on `(R + G + B) / 3`.
    Gray,
    /// W-plane common bitmap, no refinement.
    WPlane,
    /// W-plane bitmap refined by hill climbing, levels recomputed.
    Proposed,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Gray, Scheme::WPlane, Scheme::Proposed];

    pub fn mode_byte(self) -> u8 {
        match self {
            Scheme::Gray => 0,
            Scheme::WPlane => 1,
            Scheme::Proposed => 2,
        }
    }

    pub fn from_mode_byte(b: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.mode_byte() == b)
    }

    /// Quantization bytes per record.
    pub fn level_count(self) -> usize {
        match self {
            Scheme::Gray => 2,
            Scheme::WPlane | Scheme::Proposed => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Gray => "btc-gray",
            Scheme::WPlane => "wplane",
            Scheme::Proposed => "proposed",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "btc-gray" | "gray" => Ok(Scheme::Gray),
            "wplane" | "w-plane" => Ok(Scheme::WPlane),
            "proposed" => Ok(Scheme::Proposed),
            other => Err(Error::invalid(format!(
                "unknown scheme `{other}` (expected btc-gray, wplane or proposed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub block: BlockSize,
    pub scheme: Scheme,
    /// Worker threads; 0 picks the hardware core count.
    pub threads: usize,
    /// Repeat refinement and level recomputation until no bit changes.
    /// Only affects [`Scheme::Proposed`].
    pub iterate: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            block: BlockSize::new(4, 4).unwrap(),
            scheme: Scheme::Proposed,
            threads: 0,
            iterate: false,
        }
    }
}

/// Encodes one block. Levels come back rounded to the stored 8-bit values.
pub fn encode_block(block: &Block, scheme: Scheme, iterate: bool) -> BlockCode {
    match scheme {
        Scheme::Gray => {
            let code = encode_gray_block(&block.channel(0), block.rows(), block.cols());
            BlockCode {
                bitmap: code.bitmap,
                levels: Levels::Gray {
                    high: code.high.round_ties_even(),
                    low: code.low.round_ties_even(),
                },
            }
        }
        Scheme::WPlane => {
            let bitmap = initial_bitmap(block);
            let quant = quantize_channels(block, &bitmap);
            BlockCode {
                bitmap,
                levels: Levels::Color(quant.rounded()),
            }
        }
        Scheme::Proposed if iterate => {
            let (bitmap, quant, _) =
                refine_until_stable(block, &initial_bitmap(block), MAX_ITERATE_ROUNDS);
            BlockCode {
                bitmap,
                levels: Levels::Color(quant.rounded()),
            }
        }
        Scheme::Proposed => {
            let initial = initial_bitmap(block);
            let quant = quantize_channels(block, &initial);
            let bitmap = refine_bitmap(block, &initial, &quant).final_bitmap;
            let quant = final_quantize(block, &bitmap);
            BlockCode {
                bitmap,
                levels: Levels::Color(quant.rounded()),
            }
        }
    }
}

/// Pixels of one decoded block, row-major.
pub fn decode_block(code: &BlockCode) -> Vec<[u8; 3]> {
    match code.levels {
        Levels::Gray { high, low } => {
            let samples = decode_gray_block(&crate::gray::GrayBlockCode {
                bitmap: code.bitmap.clone(),
                high,
                low,
            });
            samples.into_iter().map(|v| [v; 3]).collect()
        }
        Levels::Color(q) => reconstruct_block(&code.bitmap, &q),
    }
}

/// The image the decoded output should be compared against: the input
/// itself for color schemes, its `(R + G + B) / 3` gray version for
/// [`Scheme::Gray`].
pub fn reference_image(image: &RgbImage, scheme: Scheme) -> RgbImage {
    match scheme {
        Scheme::Gray if !image.is_gray() => {
            RgbImage::from_gray(image.width(), image.height(), image.to_gray())
                .expect("same dimensions")
        }
        _ => image.clone(),
    }
}

pub fn encode_image(image: &RgbImage, opts: &EncodeOptions) -> Result<EncodedImage> {
    let width = u32::try_from(image.width()).map_err(|_| Error::invalid("image too wide"))?;
    let height = u32::try_from(image.height()).map_err(|_| Error::invalid("image too tall"))?;
    let header = Header {
        scheme: opts.scheme,
        width,
        height,
        block: opts.block,
    };
    if image.is_empty() {
        return Ok(EncodedImage {
            header,
            blocks: Vec::new(),
        });
    }

    let source = reference_image(image, opts.scheme);
    let grid = partition(&source, opts.block)?;
    let workers = resolve_threads(Some(opts.threads));
    let exec = plan(grid.len(), workers)?;
    let blocks = encode_parallel(
        grid.blocks(),
        |b| Ok(encode_block(b, opts.scheme, opts.iterate)),
        &exec,
    )?;
    Ok(EncodedImage { header, blocks })
}

pub fn decode_image(encoded: &EncodedImage) -> Result<RgbImage> {
    let layout: GridLayout = encoded.header.layout();
    if layout.width == 0 || layout.height == 0 {
        return RgbImage::new(
            layout.width,
            layout.height,
            [Vec::new(), Vec::new(), Vec::new()],
        );
    }
    let blocks: Vec<Vec<[u8; 3]>> = encoded.blocks.iter().map(decode_block).collect();
    reassemble(&layout, &blocks)
}
