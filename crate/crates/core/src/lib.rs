//! Single-bitmap block truncation coding (SBBTC) for 8-bit RGB images.
//!
//! Each `m×n` block is coded as one binary bitmap shared by the R, G and B
//! planes plus a high/low quantization level per channel. The encoder starts
//! from the weighted-plane (W-plane) bitmap, refines it bit by bit with a
//! hill-climbing pass against the initial quantization vectors, and then
//! recomputes the six levels from the refined bitmap.
//!
//! The pipeline stages are exposed individually:
//!
//! * [`image`] partitions an [`RgbImage`] into blocks and reassembles them.
//! * [`gray`] is classic grayscale BTC.
//! * [`wplane`] builds the weighted plane, the initial bitmap and the levels.
//! * [`refine`] runs the per-bit hill-climbing pass.
//! * [`reconstruct`] recomputes levels and rebuilds pixel blocks.
//! * [`parallel`] spreads the per-block work over worker threads.
//! * [`metrics`] computes color MSE and SSIM.
//! * [`bitstream`] reads and writes the `.sbtc` container.
//!
//! [`codec`] ties them together into [`encode_image`] and [`decode_image`].

pub mod bitmap;
pub mod bitstream;
pub mod codec;
mod error;
pub mod gray;
pub mod image;
pub mod metrics;
pub mod parallel;
pub mod ppm;
pub mod reconstruct;
pub mod refine;
pub mod wplane;

pub use bitmap::Bitmap;
pub use bitstream::{BlockCode, EncodedImage, Header, Levels};
pub use codec::{decode_image, encode_image, EncodeOptions, Scheme};
pub use error::{Error, Result};
pub use image::{BlockSize, RgbImage};
pub use metrics::QualityReport;
pub use wplane::QuantPair;

/// Rounds a real level to the 8-bit value stored in the bitstream.
///
/// Ties go to the even integer. Returns `None` when the rounded value falls
/// outside `[0, 255]` or the input is not finite.
pub fn quantize_level(value: f64) -> Option<u8> {
    let rounded = value.round_ties_even();
    if rounded.is_finite() && (0.0..=255.0).contains(&rounded) {
        Some(rounded as u8)
    } else {
        None
    }
}

/// Rounds and clamps a real level to a pixel sample.
pub(crate) fn clamp_sample(value: f64) -> u8 {
    if value.is_nan() {
        return 0;
    }
    value.round_ties_even().clamp(0.0, 255.0) as u8
}
