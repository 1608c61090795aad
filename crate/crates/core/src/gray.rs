//! Classic grayscale block truncation coding.
//!
//! A block is thresholded at its mean: pixels at or above the mean form the
//! high group, the rest the low group, and each group is represented by its
//! own mean.

use crate::bitmap::Bitmap;

/// A coded grayscale block.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayBlockCode {
    pub bitmap: Bitmap,
    /// Mean of the high group.
    pub high: f64,
    /// Mean of the low group. Equal to `high` when the low group is empty.
    pub low: f64,
}

/// Block mean `x̄`.
pub fn block_mean<T: Copy + Into<u32>>(samples: &[T]) -> f64 {
    let sum: u64 = samples.iter().map(|&s| u64::from(s.into())).sum();
    sum as f64 / samples.len() as f64
}

/// Encodes one row-major `rows×cols` block.
///
/// The `x ≥ x̄` test is evaluated exactly as `x·N ≥ Σx`, so ties at the mean
/// always land in the high group. Samples may be any unsigned integer type;
/// the W-plane encoder feeds it `R + G + B` sums.
///
/// # Panics
///
/// Panics if `samples.len() != rows * cols` or the block is empty.
pub fn encode_gray_block<T: Copy + Into<u32>>(
    samples: &[T],
    rows: usize,
    cols: usize,
) -> GrayBlockCode {
    assert_eq!(samples.len(), rows * cols, "block shape mismatch");
    assert!(!samples.is_empty(), "empty block");

    let count = samples.len() as u64;
    let total: u64 = samples.iter().map(|&s| u64::from(s.into())).sum();

    let mut bits = Vec::with_capacity(samples.len());
    let (mut high_sum, mut high_n) = (0u64, 0u64);
    for &s in samples {
        let v = u64::from(s.into());
        let is_high = v * count >= total;
        if is_high {
            high_sum += v;
            high_n += 1;
        }
        bits.push(is_high);
    }
    let low_sum = total - high_sum;
    let low_n = count - high_n;

    // The maximum sample is always >= the mean, so high_n >= 1.
    let high = high_sum as f64 / high_n as f64;
    let low = if low_n == 0 {
        high
    } else {
        low_sum as f64 / low_n as f64
    };

    GrayBlockCode {
        bitmap: Bitmap::from_bits(rows, cols, bits),
        high,
        low,
    }
}

/// Rebuilds a block: `high` where the bit is set, `low` elsewhere, rounded
/// half to even and clamped to `[0, 255]`.
pub fn decode_gray_block(code: &GrayBlockCode) -> Vec<u8> {
    let high = crate::clamp_sample(code.high);
    let low = crate::clamp_sample(code.low);
    code.bitmap
        .bits()
        .iter()
        .map(|&b| if b { high } else { low })
        .collect()
}
