//! Final quantization levels and block reconstruction.

use crate::bitmap::Bitmap;
use crate::image::Block;
use crate::wplane::{quantize_channels, QuantPair};

/// Levels recomputed from the refined bitmap. Same group-mean rule as the
/// initial levels.
pub fn final_quantize(block: &Block, final_bitmap: &Bitmap) -> QuantPair {
    quantize_channels(block, final_bitmap)
}

/// Row-major pixels: the high vector where the bit is set, the low vector
/// elsewhere, each component rounded half to even and clamped to `[0, 255]`.
pub fn reconstruct_block(bitmap: &Bitmap, quant: &QuantPair) -> Vec<[u8; 3]> {
    let high = quant.high().map(crate::clamp_sample);
    let low = quant.low().map(crate::clamp_sample);
    bitmap
        .bits()
        .iter()
        .map(|&b| if b { high } else { low })
        .collect()
}
