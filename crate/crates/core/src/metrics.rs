//! Image quality metrics: color MSE and SSIM.

use crate::error::{Error, Result};
use crate::image::RgbImage;

/// `(0.01 · 255)²`
pub const SSIM_C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
/// `(0.03 · 255)²`
pub const SSIM_C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

/// Side length of the default SSIM window.
pub const SSIM_WINDOW: usize = 8;

/// How SSIM statistics are gathered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsimMode {
    /// Non-overlapping square windows of the given side, scores averaged.
    /// Windows at the right and bottom edges may be smaller.
    Windowed(usize),
    /// One window spanning the whole image.
    Global,
}

impl Default for SsimMode {
    fn default() -> Self {
        SsimMode::Windowed(SSIM_WINDOW)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    pub ssim: f64,
    pub per_channel_mse: [f64; 3],
}

fn check_dims(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::invalid(format!(
            "image dimensions differ: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    if a.is_empty() {
        return Err(Error::invalid("cannot compare empty images"));
    }
    Ok(())
}

/// Mean squared error of each channel.
pub fn per_channel_mse(original: &RgbImage, reconstructed: &RgbImage) -> Result<[f64; 3]> {
    check_dims(original, reconstructed)?;
    let n = (original.width() * original.height()) as f64;
    let mut out = [0.0; 3];
    for (c, slot) in out.iter_mut().enumerate() {
        let sse: u64 = original
            .plane(c)
            .iter()
            .zip(reconstructed.plane(c))
            .map(|(&a, &b)| {
                let d = i64::from(a) - i64::from(b);
                (d * d) as u64
            })
            .sum();
        *slot = sse as f64 / n;
    }
    Ok(out)
}

/// Mean over pixels of the channel-averaged squared difference.
pub fn color_mse(original: &RgbImage, reconstructed: &RgbImage) -> Result<f64> {
    let per = per_channel_mse(original, reconstructed)?;
    Ok(per.iter().sum::<f64>() / 3.0)
}

/// SSIM over `SSIM_WINDOW`-sided windows, averaged over R, G and B.
pub fn ssim(original: &RgbImage, reconstructed: &RgbImage) -> Result<f64> {
    ssim_with(original, reconstructed, SsimMode::default())
}

pub fn ssim_with(original: &RgbImage, reconstructed: &RgbImage, mode: SsimMode) -> Result<f64> {
    check_dims(original, reconstructed)?;
    let (w, h) = (original.width(), original.height());
    let (win_w, win_h) = match mode {
        SsimMode::Windowed(0) => return Err(Error::invalid("SSIM window must be at least 1")),
        SsimMode::Windowed(s) => (s, s),
        SsimMode::Global => (w, h),
    };
    let total: f64 = (0..3)
        .map(|c| {
            plane_ssim(
                original.plane(c),
                reconstructed.plane(c),
                w,
                h,
                win_w,
                win_h,
            )
        })
        .sum();
    Ok(total / 3.0)
}

fn plane_ssim(x: &[u8], y: &[u8], width: usize, height: usize, win_w: usize, win_h: usize) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for top in (0..height).step_by(win_h) {
        for left in (0..width).step_by(win_w) {
            let rows = top..(top + win_h).min(height);
            let cols = left..(left + win_w).min(width);
            sum += window_ssim(x, y, width, rows, cols);
            count += 1;
        }
    }
    sum / count as f64
}

fn window_ssim(
    x: &[u8],
    y: &[u8],
    width: usize,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> f64 {
    let n = (rows.len() * cols.len()) as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for r in rows.clone() {
        for c in cols.clone() {
            sx += f64::from(x[r * width + c]);
            sy += f64::from(y[r * width + c]);
        }
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
    for r in rows {
        for c in cols.clone() {
            let dx = f64::from(x[r * width + c]) - mx;
            let dy = f64::from(y[r * width + c]) - my;
            vx += dx * dx;
            vy += dy * dy;
            cov += dx * dy;
        }
    }
    let (vx, vy, cov) = (vx / n, vy / n, cov / n);
    ((2.0 * mx * my + SSIM_C1) * (2.0 * cov + SSIM_C2))
        / ((mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2))
}

pub fn quality_report(
    original: &RgbImage,
    reconstructed: &RgbImage,
    mode: SsimMode,
) -> Result<QualityReport> {
    let per_channel_mse = per_channel_mse(original, reconstructed)?;
    Ok(QualityReport {
        mse: per_channel_mse.iter().sum::<f64>() / 3.0,
        ssim: ssim_with(original, reconstructed, mode)?,
        per_channel_mse,
    })
}
