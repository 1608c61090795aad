//! Weighted-plane (W-plane) common bitmap and per-channel quantization levels.

use crate::bitmap::Bitmap;
use crate::gray::encode_gray_block;
use crate::image::Block;

/// High/low quantization levels for each of the R, G and B channels, in
/// pixel units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantPair {
    pub r_high: f64,
    pub r_low: f64,
    pub g_high: f64,
    pub g_low: f64,
    pub b_high: f64,
    pub b_low: f64,
}

impl QuantPair {
    /// Builds from `[r_high, r_low, g_high, g_low, b_high, b_low]`.
    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            r_high: v[0],
            r_low: v[1],
            g_high: v[2],
            g_low: v[3],
            b_high: v[4],
            b_low: v[5],
        }
    }

    /// `[r_high, r_low, g_high, g_low, b_high, b_low]`, the serialization order.
    pub fn to_array(self) -> [f64; 6] {
        [
            self.r_high,
            self.r_low,
            self.g_high,
            self.g_low,
            self.b_high,
            self.b_low,
        ]
    }

    /// The high quantization vector `x_H`.
    pub fn high(&self) -> [f64; 3] {
        [self.r_high, self.g_high, self.b_high]
    }

    /// The low quantization vector `x_L`.
    pub fn low(&self) -> [f64; 3] {
        [self.r_low, self.g_low, self.b_low]
    }

    /// The vector selected by a bit.
    pub fn select(&self, bit: bool) -> [f64; 3] {
        if bit {
            self.high()
        } else {
            self.low()
        }
    }

    /// Each level rounded half to even, as stored in the bitstream.
    pub fn rounded(self) -> Self {
        Self::from_array(self.to_array().map(f64::round_ties_even))
    }
}

/// `w_ij = (R + G + B) / 3` for every pixel, row-major.
pub fn weighted_plane(block: &Block) -> Vec<f64> {
    block
        .pixels()
        .iter()
        .map(|px| f64::from(channel_sum(px)) / 3.0)
        .collect()
}

/// Bit is set iff `w_ij ≥ w̄`.
///
/// Thresholding `R + G + B` against its mean is the same test as
/// thresholding `w` against `w̄` (both sides scale by 3) and stays exact.
pub fn initial_bitmap(block: &Block) -> Bitmap {
    let sums: Vec<u16> = block.pixels().iter().map(channel_sum).collect();
    encode_gray_block(&sums, block.rows(), block.cols()).bitmap
}

/// Per-channel means of the set-bit pixels (high) and clear-bit pixels (low).
///
/// When one group is empty its levels are copied from the other group.
///
/// # Panics
///
/// Panics if the bitmap and block shapes differ.
pub fn quantize_channels(block: &Block, bitmap: &Bitmap) -> QuantPair {
    assert!(
        bitmap.rows() == block.rows() && bitmap.cols() == block.cols(),
        "bitmap shape does not match block"
    );
    let mut high = [0u64; 3];
    let mut low = [0u64; 3];
    let mut q = 0u64;
    for (px, &bit) in block.pixels().iter().zip(bitmap.bits()) {
        let acc = if bit {
            q += 1;
            &mut high
        } else {
            &mut low
        };
        for c in 0..3 {
            acc[c] += u64::from(px[c]);
        }
    }
    let rest = block.len() as u64 - q;
    let mean = |sum: u64, n: u64| sum as f64 / n as f64;

    let mut out = [0.0; 6];
    for c in 0..3 {
        let (h, l) = match (q, rest) {
            (0, _) => {
                let l = mean(low[c], rest);
                (l, l)
            }
            (_, 0) => {
                let h = mean(high[c], q);
                (h, h)
            }
            _ => (mean(high[c], q), mean(low[c], rest)),
        };
        out[2 * c] = h;
        out[2 * c + 1] = l;
    }
    QuantPair::from_array(out)
}

fn channel_sum(px: &[u8; 3]) -> u16 {
    px.iter().map(|&v| u16::from(v)).sum()
}
