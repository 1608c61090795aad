mod bench;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sbtc::bitstream::{deserialize, encoded_len, serialize};
use sbtc::codec::reference_image;
use sbtc::metrics::{quality_report, SsimMode};
use sbtc::parallel::resolve_threads;
use sbtc::{decode_image, encode_image, BlockSize, EncodeOptions, Scheme};

use crate::io::{encode_image_file, read_image, write_atomic};

#[derive(Parser)]
#[command(
    name = "sbtc",
    version,
    about = "Single-bitmap block truncation coding for color images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a PPM/PGM/PNG image to a .sbtc file.
    Encode {
        input: PathBuf,
        output: PathBuf,
        /// Block size as MxN (rows x columns).
        #[arg(long, default_value = "4x4")]
        block: BlockSize,
        /// btc-gray, wplane or proposed.
        #[arg(long, default_value = "proposed")]
        scheme: Scheme,
        /// Worker threads; 0 means all cores. Defaults to $SBTC_THREADS.
        #[arg(long)]
        threads: Option<usize>,
        /// Repeat refinement until the bitmap stops changing.
        #[arg(long)]
        iterate: bool,
    },
    /// Reconstruct an image from a .sbtc file.
    Decode { input: PathBuf, output: PathBuf },
    /// Compare two images: MSE and SSIM.
    Metrics {
        original: PathBuf,
        reconstructed: PathBuf,
        /// Use a single global SSIM window instead of 8x8 windows.
        #[arg(long)]
        ssim_global: bool,
    },
    /// Encode every image of a corpus directory and print a CSV report.
    Bench {
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "4x4,8x8")]
        blocks: Vec<BlockSize>,
        #[arg(long, value_delimiter = ',', default_value = "wplane,proposed")]
        schemes: Vec<Scheme>,
        /// Worker threads; 0 means all cores. Defaults to $SBTC_THREADS.
        #[arg(long, conflicts_with = "threads_sweep")]
        threads: Option<usize>,
        /// Time every configuration at each of these thread counts.
        #[arg(long, value_delimiter = ',')]
        threads_sweep: Vec<usize>,
        /// Also write a threads/seconds table for plotting.
        #[arg(long)]
        timing_out: Option<PathBuf>,
        #[arg(long)]
        ssim_global: bool,
    },
}

fn ssim_mode(global: bool) -> SsimMode {
    if global {
        SsimMode::Global
    } else {
        SsimMode::default()
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Encode {
            input,
            output,
            block,
            scheme,
            threads,
            iterate,
        } => {
            let loaded = read_image(&input)?;
            let img = &loaded.image;
            let opts = EncodeOptions {
                block,
                scheme,
                threads: resolve_threads(threads),
                iterate,
            };
            let encoded = encode_image(img, &opts)?;
            let bytes = serialize(&encoded)?;
            let expected = encoded_len(encoded.header.width, encoded.header.height, block, scheme);
            anyhow::ensure!(
                expected == Some(bytes.len()),
                "internal error: encoded size mismatch"
            );
            write_atomic(&output, &bytes)?;
            let pixels = img.width() * img.height();
            let bpp = if pixels == 0 {
                0.0
            } else {
                (bytes.len() * 8) as f64 / pixels as f64
            };
            println!(
                "{}: {} bytes, {bpp:.4} bits/pixel ({scheme}, {block}, {} threads)",
                output.display(),
                bytes.len(),
                opts.threads
            );
        }
        Command::Decode { input, output } => {
            let bytes =
                std::fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let encoded =
                deserialize(&bytes).with_context(|| format!("parsing {}", input.display()))?;
            let img = decode_image(&encoded)?;
            let gray = encoded.header.scheme == Scheme::Gray;
            write_atomic(&output, &encode_image_file(&output, &img, gray)?)?;
        }
        Command::Metrics {
            original,
            reconstructed,
            ssim_global,
        } => {
            let a = read_image(&original)?;
            let b = read_image(&reconstructed)?;
            // Comparing a color original against a gray reconstruction
            // means the gray scheme; measure against the gray reference.
            let reference = if b.gray && !a.gray {
                reference_image(&a.image, Scheme::Gray)
            } else {
                a.image
            };
            let report = quality_report(&reference, &b.image, ssim_mode(ssim_global))?;
            let [r, g, bl] = report.per_channel_mse;
            println!("mse {:.4}", report.mse);
            println!("mse_rgb {r:.4} {g:.4} {bl:.4}");
            println!("ssim {:.4}", report.ssim);
        }
        Command::Bench {
            corpus,
            blocks,
            schemes,
            threads,
            threads_sweep,
            timing_out,
            ssim_global,
        } => {
            let threads = if threads_sweep.is_empty() {
                vec![resolve_threads(threads)]
            } else {
                threads_sweep
                    .into_iter()
                    .map(|t| resolve_threads(Some(t)))
                    .collect()
            };
            let cfg = bench::BenchConfig {
                blocks,
                schemes,
                threads,
                ssim_mode: ssim_mode(ssim_global),
                timing_out,
            };
            let failures = bench::run(&corpus, &cfg, std::io::stdout().lock())?;
            if failures > 0 {
                eprintln!("{failures} image(s) failed");
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
