//! Hill-climbing refinement of the common bitmap.
//!
//! Each bit has exactly one neighbour, its complement. The pass visits every
//! bit once, evaluates the block cost with only that bit flipped while the
//! quantization vectors stay fixed, and keeps the flip iff the cost strictly
//! drops. Every decision is made against the initial bitmap, so the result
//! does not depend on the visiting order. With fixed quantization vectors the
//! cost is a sum of independent per-pixel terms, which makes the one pass
//! globally optimal for those vectors.

use crate::bitmap::Bitmap;
use crate::image::Block;
use crate::wplane::{quantize_channels, QuantPair};

/// Outcome of one refinement pass.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineResult {
    pub final_bitmap: Bitmap,
    /// Cost of the input bitmap.
    pub initial_cost: f64,
    /// Cost of `final_bitmap` under the same quantization vectors.
    pub final_cost: f64,
    /// Hamming distance between the input and final bitmaps.
    pub flips: usize,
}

/// Bit visiting order. The result is the same for both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Traversal {
    #[default]
    RowMajor,
    ColumnMajor,
}

fn squared_distance(px: &[u8; 3], level: [f64; 3]) -> f64 {
    px.iter()
        .zip(level)
        .map(|(&v, l)| {
            let d = f64::from(v) - l;
            d * d
        })
        .sum()
}

/// Unnormalized squared error of a block coded with `bitmap` and `quant`:
/// `Σ_{b=1} ‖x − x_H‖² + Σ_{b=0} ‖x − x_L‖²`.
pub fn block_cost(block: &Block, bitmap: &Bitmap, quant: &QuantPair) -> f64 {
    assert_shape(block, bitmap);
    let (high, low) = (quant.high(), quant.low());
    block
        .pixels()
        .iter()
        .zip(bitmap.bits())
        .map(|(px, &bit)| squared_distance(px, if bit { high } else { low }))
        .sum()
}

/// Change in [`block_cost`] from flipping the bit at `(row, col)`, in O(1).
pub fn flip_delta(
    block: &Block,
    bitmap: &Bitmap,
    quant: &QuantPair,
    (row, col): (usize, usize),
) -> f64 {
    assert_shape(block, bitmap);
    let bit = bitmap.get(row, col);
    let px = block.get(row, col);
    squared_distance(&px, quant.select(!bit)) - squared_distance(&px, quant.select(bit))
}

/// One hill-climbing pass in row-major order.
pub fn refine_bitmap(block: &Block, initial: &Bitmap, quant: &QuantPair) -> RefineResult {
    refine_bitmap_with(block, initial, quant, Traversal::RowMajor)
}

pub fn refine_bitmap_with(
    block: &Block,
    initial: &Bitmap,
    quant: &QuantPair,
    traversal: Traversal,
) -> RefineResult {
    assert_shape(block, initial);
    let (rows, cols) = (initial.rows(), initial.cols());
    let mut final_bitmap = initial.clone();
    let mut flips = 0;

    let mut visit = |row: usize, col: usize| {
        if flip_delta(block, initial, quant, (row, col)) < 0.0 {
            final_bitmap.set(row, col, !initial.get(row, col));
            flips += 1;
        }
    };
    match traversal {
        Traversal::RowMajor => (0..rows).for_each(|r| (0..cols).for_each(|c| visit(r, c))),
        Traversal::ColumnMajor => (0..cols).for_each(|c| (0..rows).for_each(|r| visit(r, c))),
    }

    RefineResult {
        initial_cost: block_cost(block, initial, quant),
        final_cost: block_cost(block, &final_bitmap, quant),
        final_bitmap,
        flips,
    }
}

/// Alternates level recomputation and refinement until a pass makes no
/// flips or `max_rounds` passes have run. Returns the final bitmap, its
/// levels and the number of passes.
///
/// Each pass strictly lowers the cost when it flips anything, so this
/// terminates well before any practical `max_rounds`.
pub fn refine_until_stable(
    block: &Block,
    initial: &Bitmap,
    max_rounds: usize,
) -> (Bitmap, QuantPair, usize) {
    let mut bitmap = initial.clone();
    let mut quant = quantize_channels(block, &bitmap);
    let mut rounds = 0;
    while rounds < max_rounds {
        rounds += 1;
        let result = refine_bitmap(block, &bitmap, &quant);
        if result.flips == 0 {
            break;
        }
        bitmap = result.final_bitmap;
        quant = quantize_channels(block, &bitmap);
    }
    (bitmap, quant, rounds)
}

fn assert_shape(block: &Block, bitmap: &Bitmap) {
    assert!(
        bitmap.rows() == block.rows() && bitmap.cols() == block.cols(),
        "bitmap shape does not match block"
    );
}
