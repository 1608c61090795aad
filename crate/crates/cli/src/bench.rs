//! Corpus benchmark: one CSV row per (image, scheme, block size, threads).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use sbtc::codec::reference_image;
use sbtc::metrics::{quality_report, SsimMode};
use sbtc::{decode_image, encode_image, BlockSize, EncodeOptions, RgbImage, Scheme};

use crate::io::read_image;

pub const CSV_HEADER: [&str; 7] = [
    "image",
    "scheme",
    "block_size",
    "mse",
    "ssim",
    "encode_seconds",
    "threads",
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub image: String,
    pub scheme: Scheme,
    pub block: BlockSize,
    pub mse: f64,
    pub ssim: f64,
    pub encode_seconds: f64,
    pub threads: usize,
}

impl BenchRow {
    fn record(&self) -> [String; 7] {
        [
            self.image.clone(),
            self.scheme.to_string(),
            self.block.to_string(),
            format!("{:.4}", self.mse),
            format!("{:.4}", self.ssim),
            format!("{:.6}", self.encode_seconds),
            self.threads.to_string(),
        ]
    }
}

pub struct BenchConfig {
    pub blocks: Vec<BlockSize>,
    pub schemes: Vec<Scheme>,
    /// Thread counts to run; one row per entry.
    pub threads: Vec<usize>,
    pub ssim_mode: SsimMode,
    pub timing_out: Option<PathBuf>,
}

/// Known MSE values for common test images at 512x512, as
/// `(stem, block side, wplane, proposed)`.
const REFERENCE_MSE: &[(&str, usize, f64, f64)] = &[
    ("pepper", 4, 11.1420, 10.4734),
    ("fruits", 4, 19.5508, 16.8978),
    ("baboon", 4, 95.9592, 90.7861),
    ("tiffany", 4, 19.2256, 12.7837),
    ("lenna", 4, 19.9605, 18.7425),
    ("frymire", 4, 254.1143, 213.5586),
    ("pepper", 8, 32.8668, 29.8284),
    ("fruits", 8, 35.9711, 30.6846),
    ("baboon", 8, 145.6842, 135.5584),
    ("tiffany", 8, 31.7653, 22.9964),
    ("lenna", 8, 38.6159, 35.6684),
    ("frymire", 8, 468.8183, 394.8452),
];

fn reference_for(stem: &str, block: BlockSize, scheme: Scheme) -> Option<f64> {
    let stem = stem.to_ascii_lowercase();
    let key = match stem.as_str() {
        "peppers" => "pepper",
        "lena" => "lenna",
        "mandrill" => "baboon",
        other => other,
    };
    if block.rows() != block.cols() {
        return None;
    }
    REFERENCE_MSE
        .iter()
        .find(|(name, side, _, _)| *name == key && *side == block.rows())
        .and_then(|&(_, _, w, p)| match scheme {
            Scheme::WPlane => Some(w),
            Scheme::Proposed => Some(p),
            Scheme::Gray => None,
        })
}

pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading corpus directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension()
                        .and_then(|e| e.to_str())
                        .map(str::to_ascii_lowercase)
                        .as_deref(),
                    Some("ppm" | "pgm" | "png")
                )
        })
        .collect();
    files.sort();
    Ok(files)
}

fn bench_image(
    name: &str,
    image: &RgbImage,
    cfg: &BenchConfig,
    rows: &mut Vec<BenchRow>,
) -> Result<()> {
    for &block in &cfg.blocks {
        for &scheme in &cfg.schemes {
            let reference = reference_image(image, scheme);
            for &threads in &cfg.threads {
                let opts = EncodeOptions {
                    block,
                    scheme,
                    threads,
                    iterate: false,
                };
                let start = Instant::now();
                let encoded = encode_image(image, &opts)?;
                let encode_seconds = start.elapsed().as_secs_f64();
                let decoded = decode_image(&encoded)?;
                let report = quality_report(&reference, &decoded, cfg.ssim_mode)?;
                rows.push(BenchRow {
                    image: name.to_string(),
                    scheme,
                    block,
                    mse: report.mse,
                    ssim: report.ssim,
                    encode_seconds,
                    threads: sbtc::parallel::resolve_threads(Some(threads)),
                });
            }
            if let Some(want) = reference_for(name, block, scheme) {
                let got = rows.last().map(|r| r.mse).unwrap_or_default();
                eprintln!(
                    "note: {name} ({}x{}) {scheme} {block}: mse {got:.4} vs reference {want} ({:+.1}%)",
                    image.width(),
                    image.height(),
                    (got - want) / want * 100.0
                );
            }
        }
    }
    Ok(())
}

/// Runs the benchmark and writes CSV to `out`. Per-image failures are
/// reported on stderr and skipped. Returns the number of failed images.
pub fn run(dir: &Path, cfg: &BenchConfig, out: impl Write) -> Result<usize> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    writer.flush()?;

    let mut all_rows = Vec::new();
    let mut failures = 0;
    for path in corpus_files(dir)? {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut rows = Vec::new();
        let result =
            read_image(&path).and_then(|loaded| bench_image(&name, &loaded.image, cfg, &mut rows));
        match result {
            Ok(()) => {
                for row in &rows {
                    writer.write_record(row.record())?;
                }
                writer.flush()?;
                all_rows.extend(rows);
            }
            Err(e) => {
                failures += 1;
                eprintln!("error: {}: {e:#}", path.display());
            }
        }
    }

    if let Some(path) = &cfg.timing_out {
        crate::io::write_atomic(path, timing_table(&all_rows).as_bytes())?;
    }
    Ok(failures)
}

/// Whitespace-separated timing data, one gnuplot index block per
/// (image, scheme, block size) with `threads seconds` rows.
pub fn timing_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let mut last: Option<(&str, Scheme, BlockSize)> = None;
    for row in rows {
        let key = (row.image.as_str(), row.scheme, row.block);
        if last != Some(key) {
            if last.is_some() {
                out.push_str("\n\n");
            }
            out.push_str(&format!(
                "# {} {} {}\n# threads seconds\n",
                row.image, row.scheme, row.block
            ));
            last = Some(key);
        }
        out.push_str(&format!("{} {:.6}\n", row.threads, row.encode_seconds));
    }
    out
}
