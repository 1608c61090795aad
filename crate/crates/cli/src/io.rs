//! Image file ingestion and atomic output.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sbtc::ppm::{decode_pnm, encode_pgm, encode_ppm, is_pnm, PnmKind};
use sbtc::RgbImage;

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// A loaded image and whether the file itself was single-channel.
pub struct Loaded {
    pub image: RgbImage,
    pub gray: bool,
}

pub fn read_image(path: &Path) -> Result<Loaded> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if is_pnm(&bytes) {
        let (image, kind) =
            decode_pnm(&bytes).with_context(|| format!("parsing {}", path.display()))?;
        return Ok(Loaded {
            image,
            gray: kind == PnmKind::Graymap,
        });
    }
    if bytes.starts_with(PNG_MAGIC) {
        let decoded = image::load_from_memory_with_format(&bytes, image::ImageFormat::Png)
            .with_context(|| format!("decoding PNG {}", path.display()))?;
        let gray = !decoded.color().has_color();
        let rgb = decoded.to_rgb8();
        let image =
            RgbImage::from_interleaved(rgb.width() as usize, rgb.height() as usize, rgb.as_raw())?;
        return Ok(Loaded { image, gray });
    }
    bail!(
        "{}: unsupported image format (expected binary PPM/PGM or PNG)",
        path.display()
    )
}

/// Encodes by extension: `.png` as PNG, `.pgm` as P5, anything else as P6.
/// Gray PNG output is written when `gray` is set.
pub fn encode_image_file(path: &Path, img: &RgbImage, gray: bool) -> Result<Vec<u8>> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("png") => {
            let (w, h) = (img.width() as u32, img.height() as u32);
            let mut out = Vec::new();
            let encoder = image::codecs::png::PngEncoder::new(&mut out);
            if gray {
                image::ImageEncoder::write_image(
                    encoder,
                    img.plane(0),
                    w,
                    h,
                    image::ExtendedColorType::L8,
                )?;
            } else {
                image::ImageEncoder::write_image(
                    encoder,
                    &img.to_interleaved(),
                    w,
                    h,
                    image::ExtendedColorType::Rgb8,
                )?;
            }
            Ok(out)
        }
        Some("pgm") => Ok(encode_pgm(img)),
        _ => Ok(encode_ppm(img)),
    }
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so a failure never leaves a partial file at `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
