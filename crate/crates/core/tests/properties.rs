use proptest::prelude::*;

use sbtc::bitstream::{deserialize, serialize, BlockCode, EncodedImage, Header, Levels};
use sbtc::gray::{block_mean, decode_gray_block, encode_gray_block};
use sbtc::image::{partition, reassemble, Block, BlockSize};
use sbtc::metrics::{color_mse, ssim};
use sbtc::reconstruct::{final_quantize, reconstruct_block};
use sbtc::refine::{block_cost, flip_delta, refine_bitmap, refine_bitmap_with, Traversal};
use sbtc::wplane::{initial_bitmap, quantize_channels, weighted_plane};
use sbtc::{Bitmap, QuantPair, RgbImage, Scheme};

const CASES: u32 = 512;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(CASES)
}

fn pixel() -> impl Strategy<Value = [u8; 3]> {
    any::<[u8; 3]>()
}

/// Pixels drawn from a small palette so blocks contain repeated values and
/// ties at the mean actually occur.
fn clustered_pixel() -> impl Strategy<Value = [u8; 3]> {
    prop_oneof![
        pixel(),
        prop::sample::select(vec![
            [0, 0, 0],
            [10, 20, 30],
            [200, 200, 200],
            [255, 0, 128],
            [7, 7, 8]
        ]),
    ]
}

fn block_with(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Block> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(m, n)| {
        prop::collection::vec(clustered_pixel(), m * n)
            .prop_map(move |px| Block::new(m, n, px).unwrap())
    })
}

fn block_and_bitmap(max_rows: usize, max_cols: usize) -> impl Strategy<Value = (Block, Bitmap)> {
    block_with(max_rows, max_cols).prop_flat_map(|b| {
        let (m, n) = (b.rows(), b.cols());
        prop::collection::vec(any::<bool>(), m * n)
            .prop_map(move |bits| (b.clone(), Bitmap::from_bits(m, n, bits)))
    })
}

fn image(max: usize) -> impl Strategy<Value = RgbImage> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), w * h * 3)
            .prop_map(move |data| RgbImage::from_interleaved(w, h, &data).unwrap())
    })
}

/// Brute-force `Σ ‖x − level‖²` with an explicit double loop.
fn naive_cost(block: &Block, bitmap: &Bitmap, q: &QuantPair) -> f64 {
    let mut total = 0.0;
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            let px = block.get(i, j);
            let level = if bitmap.get(i, j) {
                [q.r_high, q.g_high, q.b_high]
            } else {
                [q.r_low, q.g_low, q.b_low]
            };
            for c in 0..3 {
                total += (f64::from(px[c]) - level[c]).powi(2);
            }
        }
    }
    total
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn partition_reassemble_identity(img in image(32), m in 1usize..=9, n in 1usize..=9) {
        let bs = BlockSize::new(m, n).unwrap();
        let grid = partition(&img, bs).unwrap();
        prop_assert_eq!(grid.len(), img.height().div_ceil(m) * img.width().div_ceil(n));
        let blocks: Vec<_> = grid.blocks().iter().map(|b| b.pixels().to_vec()).collect();
        prop_assert_eq!(reassemble(grid.layout(), &blocks).unwrap(), img);
    }

    #[test]
    fn gray_mean_preservation(samples in prop::collection::vec(any::<u8>(), 1..=64)) {
        let n = samples.len();
        let code = encode_gray_block(&samples, 1, n);
        let decoded = decode_gray_block(&code);
        let mean_dec = decoded.iter().map(|&v| f64::from(v)).sum::<f64>() / n as f64;
        prop_assert!((mean_dec - block_mean(&samples)).abs() <= 0.5);

        let mut distinct = decoded.clone();
        distinct.sort_unstable();
        distinct.dedup();
        prop_assert!(distinct.len() <= 2);

        let q = code.bitmap.popcount();
        prop_assert!(q >= 1);
        if q < n {
            prop_assert!(code.low <= block_mean(&samples) && block_mean(&samples) <= code.high);
        }
    }

    #[test]
    fn initial_bitmap_matches_gray_btc_on_weighted_plane(block in block_with(6, 6)) {
        // 3w is integral, so gray BTC on it thresholds exactly like w ≥ w̄.
        let tripled: Vec<u16> = weighted_plane(&block).iter().map(|w| (w * 3.0).round() as u16).collect();
        let oracle = encode_gray_block(&tripled, block.rows(), block.cols()).bitmap;
        prop_assert_eq!(initial_bitmap(&block), oracle);
    }

    #[test]
    fn levels_decompose_channel_sums((block, bitmap) in block_and_bitmap(5, 5)) {
        let q = quantize_channels(&block, &bitmap);
        let ones = bitmap.popcount() as f64;
        let zeros = block.len() as f64 - ones;
        for (c, (h, l)) in [(q.r_high, q.r_low), (q.g_high, q.g_low), (q.b_high, q.b_low)].into_iter().enumerate() {
            prop_assert!((0.0..=255.0).contains(&h) && (0.0..=255.0).contains(&l));
            if ones > 0.0 && zeros > 0.0 {
                let sum: f64 = block.pixels().iter().map(|p| f64::from(p[c])).sum();
                prop_assert!((ones * h + zeros * l - sum).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn levels_permutation_invariant((block, bitmap) in block_and_bitmap(4, 4), seed in any::<u64>()) {
        let n = block.len();
        let mut order: Vec<usize> = (0..n).collect();
        // Fisher-Yates with a simple LCG so the permutation is seeded.
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let px: Vec<_> = order.iter().map(|&i| block.pixels()[i]).collect();
        let bits: Vec<_> = order.iter().map(|&i| bitmap.bits()[i]).collect();
        let pb = Block::new(block.rows(), block.cols(), px).unwrap();
        let pbm = Bitmap::from_bits(block.rows(), block.cols(), bits);
        let a = quantize_channels(&block, &bitmap).to_array();
        let b = quantize_channels(&pb, &pbm).to_array();
        for (x, y) in a.iter().zip(b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn block_cost_matches_naive_loop((block, bitmap) in block_and_bitmap(4, 4), levels in any::<[u8; 6]>()) {
        let q = QuantPair::from_array(levels.map(f64::from));
        prop_assert!((block_cost(&block, &bitmap, &q) - naive_cost(&block, &bitmap, &q)).abs() < 1e-9);
    }

    #[test]
    fn flip_delta_matches_full_recompute(
        (block, bitmap) in block_and_bitmap(5, 5),
        levels in prop::array::uniform6(0.0f64..=255.0),
        pos_seed in any::<usize>(),
    ) {
        let q = QuantPair::from_array(levels);
        let idx = pos_seed % block.len();
        let (i, j) = (idx / block.cols(), idx % block.cols());
        let mut flipped = bitmap.clone();
        flipped.set(i, j, !bitmap.get(i, j));
        let full = naive_cost(&block, &flipped, &q) - naive_cost(&block, &bitmap, &q);
        prop_assert!((flip_delta(&block, &bitmap, &q, (i, j)) - full).abs() < 1e-9);
    }

    #[test]
    fn refine_monotone_idempotent_order_free(block in block_with(6, 6)) {
        let initial = initial_bitmap(&block);
        let q = quantize_channels(&block, &initial);
        let r = refine_bitmap(&block, &initial, &q);
        prop_assert!(r.final_cost <= r.initial_cost);
        prop_assert_eq!(r.flips, initial.hamming(&r.final_bitmap));

        let again = refine_bitmap(&block, &r.final_bitmap, &q);
        prop_assert_eq!(again.flips, 0);
        prop_assert_eq!(&again.final_bitmap, &r.final_bitmap);

        let col = refine_bitmap_with(&block, &initial, &q, Traversal::ColumnMajor);
        prop_assert_eq!(col.final_bitmap, r.final_bitmap);
    }

    #[test]
    fn pipeline_cost_not_worse_than_wplane(block in block_with(8, 8)) {
        let initial = initial_bitmap(&block);
        let q0 = quantize_channels(&block, &initial);
        let bf = refine_bitmap(&block, &initial, &q0).final_bitmap;
        let q1 = final_quantize(&block, &bf);
        prop_assert!(block_cost(&block, &bf, &q1) <= block_cost(&block, &initial, &q0) + 1e-9);

        let out = reconstruct_block(&bf, &q1);
        for c in 0..3 {
            let mut vals: Vec<u8> = out.iter().map(|p| p[c]).collect();
            vals.sort_unstable();
            vals.dedup();
            prop_assert!(vals.len() <= 2);
        }
    }

    #[test]
    fn bitstream_round_trip(
        scheme in prop::sample::select(Scheme::ALL.to_vec()),
        m in 1usize..=9,
        n in 1usize..=9,
        w in 0u32..=20,
        h in 0u32..=20,
        seed in any::<u64>(),
    ) {
        let bs = BlockSize::new(m, n).unwrap();
        let header = Header { scheme, width: w, height: h, block: bs };
        let count = header.layout().block_count();
        let mut s = seed;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let blocks: Vec<BlockCode> = (0..count)
            .map(|_| {
                let bits = (0..m * n).map(|_| next() & 1 == 1).collect();
                let levels = match scheme {
                    Scheme::Gray => Levels::Gray { high: (next() % 256) as f64, low: (next() % 256) as f64 },
                    _ => Levels::Color(QuantPair::from_array(std::array::from_fn(|_| (next() % 256) as f64))),
                };
                BlockCode { bitmap: Bitmap::from_bits(m, n, bits), levels }
            })
            .collect();
        let img = EncodedImage { header, blocks };
        let bytes = serialize(&img).unwrap();
        prop_assert_eq!(bytes.len(), sbtc::bitstream::encoded_len(w, h, bs, scheme).unwrap());
        let back = deserialize(&bytes).unwrap();
        prop_assert_eq!(&back, &img);
        prop_assert_eq!(serialize(&back).unwrap(), bytes);
    }

    #[test]
    fn deserialize_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        let _ = deserialize(&bytes);
    }

    #[test]
    fn deserialize_mutated_header_never_panics(
        tail in prop::collection::vec(any::<u8>(), 0..128),
        width in any::<u32>(),
        height in any::<u32>(),
        mode in 0u8..4,
        m in any::<u8>(),
        n in any::<u8>(),
    ) {
        let mut bytes = b"SBTC\x01".to_vec();
        bytes.push(mode);
        bytes.extend(width.to_le_bytes());
        bytes.extend(height.to_le_bytes());
        bytes.extend([m, n]);
        bytes.extend(tail);
        if let Ok(img) = deserialize(&bytes) {
            prop_assert_eq!(serialize(&img).unwrap(), bytes);
        }
    }

    #[test]
    fn metric_symmetry(a in image(12), seed in any::<u8>()) {
        let b = RgbImage::from_fn(a.width(), a.height(), |r, c| a.pixel(r, c).map(|v| v ^ seed));
        prop_assert_eq!(color_mse(&a, &b).unwrap(), color_mse(&b, &a).unwrap());
        prop_assert!((ssim(&a, &b).unwrap() - ssim(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mse_of_uniform_offset(a in image(12), d in 0u8..=40) {
        let base = RgbImage::from_fn(a.width(), a.height(), |r, c| a.pixel(r, c).map(|v| v.min(200)));
        let shifted = RgbImage::from_fn(a.width(), a.height(), |r, c| base.pixel(r, c).map(|v| v + d));
        prop_assert_eq!(color_mse(&base, &shifted).unwrap(), f64::from(d) * f64::from(d));
    }
}

#[test]
fn refine_matches_exhaustive_minimum() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for &(m, n) in &[(1, 1), (1, 3), (2, 2), (2, 3), (3, 2)] {
        for _ in 0..200 {
            let px: Vec<[u8; 3]> = (0..m * n).map(|_| rng.gen()).collect();
            let block = Block::new(m, n, px).unwrap();
            let initial = initial_bitmap(&block);
            let q = quantize_channels(&block, &initial);
            let r = refine_bitmap(&block, &initial, &q);
            let best = (0u32..1 << (m * n))
                .map(|mask| {
                    let bits = (0..m * n).map(|i| mask >> i & 1 == 1).collect();
                    naive_cost(&block, &Bitmap::from_bits(m, n, bits), &q)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(
                (r.final_cost - best).abs() < 1e-9,
                "{m}x{n}: {} vs {best}",
                r.final_cost
            );
        }
    }
}
