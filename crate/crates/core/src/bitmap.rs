//! Binary block bitmaps.

use std::fmt;

/// An `rows×cols` binary matrix stored row-major.
///
/// A set bit selects the high quantization level for that pixel.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitmap {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Bitmap {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![true; rows * cols],
        }
    }

    /// Builds a bitmap from row-major bits.
    ///
    /// # Panics
    ///
    /// Panics if `bits.len() != rows * cols`.
    pub fn from_bits(rows: usize, cols: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), rows * cols, "bitmap shape mismatch");
        Self { rows, cols, bits }
    }

    /// Builds a bitmap from nested 0/1 rows. Any nonzero value is a set bit.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut bits = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged bitmap rows");
            bits.extend(row.iter().map(|&b| b != 0));
        }
        Self {
            rows: rows.len(),
            cols,
            bits,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[self.index(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        let idx = self.index(row, col);
        self.bits[idx] = value;
    }

    /// Row-major bit slice.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of set bits (the high-group size `q`).
    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Number of positions where `self` and `other` differ.
    ///
    /// # Panics
    ///
    /// Panics if the shapes differ.
    pub fn hamming(&self, other: &Bitmap) -> usize {
        assert!(self.same_shape(other), "bitmap shape mismatch");
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn same_shape(&self, other: &Bitmap) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    fn index(&self, row: usize, col: usize) -> usize {
        assert!(
            row < self.rows && col < self.cols,
            "bit ({row}, {col}) out of range for {}x{} bitmap",
            self.rows,
            self.cols
        );
        row * self.cols + col
    }
}

impl fmt::Debug for Bitmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitmap({}x{}:", self.rows, self.cols)?;
        for row in self.bits.chunks(self.cols.max(1)) {
            f.write_str(" ")?;
            for &b in row {
                f.write_str(if b { "1" } else { "0" })?;
            }
        }
        f.write_str(")")
    }
}
