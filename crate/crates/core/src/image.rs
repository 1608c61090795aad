//! Pixel data model and block partitioning.
//!
//! Images whose dimensions are not multiples of the block size are padded on
//! the right and bottom by repeating the last column and row. Padding only
//! exists inside a [`BlockGrid`]; [`reassemble`] crops it away again.

use crate::error::{Error, Result};

/// Largest supported block area, in pixels.
pub const MAX_BLOCK_AREA: usize = 4096;

/// An 8-bit RGB image stored as three planes of `width * height` samples.
#[derive(Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    planes: [Vec<u8>; 3],
}

impl RgbImage {
    pub fn new(width: usize, height: usize, planes: [Vec<u8>; 3]) -> Result<Self> {
        let len = width
            .checked_mul(height)
            .ok_or_else(|| Error::invalid("image dimensions overflow"))?;
        if planes.iter().any(|p| p.len() != len) {
            return Err(Error::invalid(format!(
                "plane sizes {:?} do not match {width}x{height}",
                planes.each_ref().map(Vec::len)
            )));
        }
        Ok(Self {
            width,
            height,
            planes,
        })
    }

    /// Builds an image from interleaved `RGBRGB...` bytes.
    pub fn from_interleaved(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        let len = width
            .checked_mul(height)
            .ok_or_else(|| Error::invalid("image dimensions overflow"))?;
        if data.len() != len * 3 {
            return Err(Error::invalid(format!(
                "expected {} interleaved bytes for {width}x{height}, got {}",
                len * 3,
                data.len()
            )));
        }
        let mut planes = [
            Vec::with_capacity(len),
            Vec::with_capacity(len),
            Vec::with_capacity(len),
        ];
        for px in data.chunks_exact(3) {
            for (plane, &v) in planes.iter_mut().zip(px) {
                plane.push(v);
            }
        }
        Self::new(width, height, planes)
    }

    /// Builds an image with all three planes equal to `gray`.
    pub fn from_gray(width: usize, height: usize, gray: Vec<u8>) -> Result<Self> {
        Self::new(width, height, [gray.clone(), gray.clone(), gray])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Self {
        let mut planes = [
            Vec::with_capacity(width * height),
            Vec::with_capacity(width * height),
            Vec::with_capacity(width * height),
        ];
        for row in 0..height {
            for col in 0..width {
                let px = f(row, col);
                for c in 0..3 {
                    planes[c].push(px[c]);
                }
            }
        }
        Self {
            width,
            height,
            planes,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    /// Plane 0, 1 or 2 (R, G, B).
    pub fn plane(&self, channel: usize) -> &[u8] {
        &self.planes[channel]
    }

    pub fn planes(&self) -> &[Vec<u8>; 3] {
        &self.planes
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let i = row * self.width + col;
        [self.planes[0][i], self.planes[1][i], self.planes[2][i]]
    }

    pub fn to_interleaved(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.width * self.height * 3);
        for i in 0..self.width * self.height {
            out.extend(self.planes.iter().map(|p| p[i]));
        }
        out
    }

    /// True when all three planes are identical.
    pub fn is_gray(&self) -> bool {
        self.planes[0] == self.planes[1] && self.planes[1] == self.planes[2]
    }

    /// Per-pixel `(R + G + B) / 3`, rounded half to even.
    pub fn to_gray(&self) -> Vec<u8> {
        (0..self.width * self.height)
            .map(|i| {
                let sum: u32 = self.planes.iter().map(|p| u32::from(p[i])).sum();
                crate::clamp_sample(f64::from(sum) / 3.0)
            })
            .collect()
    }
}

impl std::fmt::Debug for RgbImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RgbImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

/// Block dimensions: `rows` (m) by `cols` (n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockSize {
    rows: usize,
    cols: usize,
}

impl BlockSize {
    /// Each side must be in `1..=255` (it is stored in one byte) and the area
    /// must not exceed [`MAX_BLOCK_AREA`].
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "block size {rows}x{cols} has a zero side"
            )));
        }
        if rows > 255 || cols > 255 {
            return Err(Error::invalid(format!(
                "block size {rows}x{cols} exceeds 255 on a side"
            )));
        }
        if rows * cols > MAX_BLOCK_AREA {
            return Err(Error::invalid(format!(
                "block size {rows}x{cols} exceeds {MAX_BLOCK_AREA} pixels"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(self) -> usize {
        self.rows
    }

    pub fn cols(self) -> usize {
        self.cols
    }

    pub fn area(self) -> usize {
        self.rows * self.cols
    }
}

impl std::fmt::Display for BlockSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl std::str::FromStr for BlockSize {
    type Err = Error;

    /// Parses `MxN` (rows by columns), e.g. `4x4`.
    fn from_str(s: &str) -> Result<Self> {
        let (m, n) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::invalid(format!("block size `{s}` is not of the form MxN")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("block size `{s}` is not of the form MxN")))
        };
        Self::new(parse(m)?, parse(n)?)
    }
}

/// One `rows×cols` tile of pixel vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    origin: (usize, usize),
    rows: usize,
    cols: usize,
    pixels: Vec<[u8; 3]>,
}

impl Block {
    /// A free-standing block at origin `(0, 0)`; `pixels` is row-major.
    pub fn new(rows: usize, cols: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        Self::at((0, 0), rows, cols, pixels)
    }

    pub fn at(
        origin: (usize, usize),
        rows: usize,
        cols: usize,
        pixels: Vec<[u8; 3]>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(
                "block must have at least one row and column",
            ));
        }
        if pixels.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{} pixels do not fill a {rows}x{cols} block",
                pixels.len()
            )));
        }
        Ok(Self {
            origin,
            rows,
            cols,
            pixels,
        })
    }

    /// `(row, col)` of the top-left pixel in the padded image.
    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> [u8; 3] {
        self.pixels[row * self.cols + col]
    }

    /// Row-major pixel vectors.
    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    /// Samples of one channel, row-major.
    pub fn channel(&self, channel: usize) -> Vec<u8> {
        self.pixels.iter().map(|px| px[channel]).collect()
    }
}

/// Geometry of a block grid: everything needed to place blocks back into an
/// image of the original size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLayout {
    pub width: usize,
    pub height: usize,
    pub block: BlockSize,
}

impl GridLayout {
    pub fn new(width: usize, height: usize, block: BlockSize) -> Self {
        Self {
            width,
            height,
            block,
        }
    }

    pub fn block_rows(&self) -> usize {
        self.height.div_ceil(self.block.rows())
    }

    pub fn block_cols(&self) -> usize {
        self.width.div_ceil(self.block.cols())
    }

    /// Total block count, `ceil(height/m) * ceil(width/n)`.
    pub fn block_count(&self) -> usize {
        self.block_rows() * self.block_cols()
    }

    pub fn pad_right(&self) -> usize {
        self.block_cols() * self.block.cols() - self.width
    }

    pub fn pad_bottom(&self) -> usize {
        self.block_rows() * self.block.rows() - self.height
    }

    /// Origin of block `index` in row-major block order.
    pub fn origin(&self, index: usize) -> (usize, usize) {
        let cols = self.block_cols();
        (
            (index / cols) * self.block.rows(),
            (index % cols) * self.block.cols(),
        )
    }
}

/// The blocks of one image in row-major order.
#[derive(Debug, Clone)]
pub struct BlockGrid {
    layout: GridLayout,
    blocks: Vec<Block>,
}

impl BlockGrid {
    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_rows(&self) -> usize {
        self.layout.block_rows()
    }

    pub fn block_cols(&self) -> usize {
        self.layout.block_cols()
    }

    pub fn pad_right(&self) -> usize {
        self.layout.pad_right()
    }

    pub fn pad_bottom(&self) -> usize {
        self.layout.pad_bottom()
    }
}

/// Splits `image` into nonoverlapping blocks, replicating the last row and
/// column into any padding.
pub fn partition(image: &RgbImage, block: BlockSize) -> Result<BlockGrid> {
    if image.is_empty() {
        return Err(Error::invalid("cannot partition an empty image"));
    }
    let layout = GridLayout::new(image.width(), image.height(), block);
    let (m, n) = (block.rows(), block.cols());
    let last_row = image.height() - 1;
    let last_col = image.width() - 1;

    let mut blocks = Vec::with_capacity(layout.block_count());
    for index in 0..layout.block_count() {
        let (top, left) = layout.origin(index);
        let mut pixels = Vec::with_capacity(m * n);
        for i in 0..m {
            let row = (top + i).min(last_row);
            for j in 0..n {
                pixels.push(image.pixel(row, (left + j).min(last_col)));
            }
        }
        blocks.push(Block {
            origin: (top, left),
            rows: m,
            cols: n,
            pixels,
        });
    }
    Ok(BlockGrid { layout, blocks })
}

/// Places `blocks` (row-major, one per grid slot) back into an image and
/// crops the padding.
pub fn reassemble(layout: &GridLayout, blocks: &[Vec<[u8; 3]>]) -> Result<RgbImage> {
    if blocks.len() != layout.block_count() {
        return Err(Error::invalid(format!(
            "expected {} blocks, got {}",
            layout.block_count(),
            blocks.len()
        )));
    }
    let (m, n) = (layout.block.rows(), layout.block.cols());
    let (width, height) = (layout.width, layout.height);
    let mut planes = [
        vec![0u8; width * height],
        vec![0u8; width * height],
        vec![0u8; width * height],
    ];
    for (index, pixels) in blocks.iter().enumerate() {
        if pixels.len() != m * n {
            return Err(Error::invalid(format!(
                "block {index} has {} pixels, expected {}",
                pixels.len(),
                m * n
            )));
        }
        let (top, left) = layout.origin(index);
        for i in 0..m.min(height.saturating_sub(top)) {
            for j in 0..n.min(width.saturating_sub(left)) {
                let dst = (top + i) * width + left + j;
                let px = pixels[i * n + j];
                for c in 0..3 {
                    planes[c][dst] = px[c];
                }
            }
        }
    }
    RgbImage::new(width, height, planes)
}
