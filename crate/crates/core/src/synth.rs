//! Deterministic synthetic test sequences.
//!
//! Real capsule footage is not bundled, so benchmarks and tests run on
//! generated tissue-like textures: a smooth random color field (bilinear
//! interpolation of a coarse random grid) with per-pixel noise, mosaiced to
//! a CFA plane. Translating sequences are windows sliding over a larger scene.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frame::{mosaic, BayerPattern, CfaFrame, RgbFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TextureParams {
    /// Spacing of the coarse random grid, in pixels.
    pub cell: usize,
    /// Peak deviation of the smooth field around each channel's base level.
    pub swing: u8,
    /// Per-pixel uniform noise in `-noise..=noise`.
    pub noise: u8,
}

impl Default for TextureParams {
    fn default() -> Self {
        Self {
            cell: 16,
            swing: 40,
            noise: 3,
        }
    }
}

// Reddish mucosa: strong red, moderate green, weak blue.
const BASE_RGB: [i32; 3] = [170, 100, 70];

/// Tissue-like RGB texture.
pub fn tissue_rgb(width: usize, height: usize, params: TextureParams, seed: u64) -> RgbFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cell = params.cell.max(1);
    let gw = width / cell + 2;
    let gh = height / cell + 2;
    let swing = params.swing as i32;
    let grids: Vec<Vec<f64>> = (0..3)
        .map(|_| {
            (0..gw * gh)
                .map(|_| rng.random_range(-swing..=swing) as f64)
                .collect()
        })
        .collect();
    let noise = params.noise as i32;
    let mut pixels = Vec::with_capacity(width * height);
    for r in 0..height {
        let gy = r / cell;
        let fy = (r % cell) as f64 / cell as f64;
        for c in 0..width {
            let gx = c / cell;
            let fx = (c % cell) as f64 / cell as f64;
            let mut px = [0u8; 3];
            for (ch, grid) in grids.iter().enumerate() {
                let at = |y: usize, x: usize| grid[y * gw + x];
                let top = at(gy, gx) * (1.0 - fx) + at(gy, gx + 1) * fx;
                let bottom = at(gy + 1, gx) * (1.0 - fx) + at(gy + 1, gx + 1) * fx;
                let smooth = (top * (1.0 - fy) + bottom * fy).round() as i32;
                let n = if noise > 0 {
                    rng.random_range(-noise..=noise)
                } else {
                    0
                };
                px[ch] = (BASE_RGB[ch] + smooth + n).clamp(0, 255) as u8;
            }
            pixels.push(px);
        }
    }
    RgbFrame::new(width, height, pixels).expect("pixel count matches")
}

/// Tissue-like CFA frame. `width` and `height` must be even.
pub fn tissue_frame(
    width: usize,
    height: usize,
    pattern: BayerPattern,
    params: TextureParams,
    seed: u64,
) -> CfaFrame {
    mosaic(&tissue_rgb(width, height, params, seed), pattern).expect("even dimensions")
}

/// Uniform random samples.
pub fn noise_frame(width: usize, height: usize, pattern: BayerPattern, seed: u64) -> CfaFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CfaFrame::from_fn(width, height, pattern, |_, _| rng.random())
}

/// `frames` views of one RGB scene, each shifted `step = (dx, dy)` pixels
/// further right/down than the last and mosaiced with the same `pattern`, as
/// a fixed sensor would see it. The content of frame `t` at `(r, c)` appears
/// in frame `t - 1` at `(r + dy, c + dx)`; with even steps the CFA samples
/// match exactly. `width` and `height` must be even.
pub fn translating_sequence(
    width: usize,
    height: usize,
    frames: usize,
    step: (usize, usize),
    pattern: BayerPattern,
    params: TextureParams,
    seed: u64,
) -> Vec<CfaFrame> {
    let (dx, dy) = step;
    let span = frames.saturating_sub(1);
    let sw = width + dx * span;
    let scene = tissue_rgb(sw, height + dy * span, params, seed);
    (0..frames)
        .map(|t| {
            let (ox, oy) = (dx * t, dy * t);
            let pixels = (0..height)
                .flat_map(|r| (0..width).map(move |c| (r, c)))
                .map(|(r, c)| scene.pixel(r + oy, c + ox))
                .collect();
            let view = RgbFrame::new(width, height, pixels).expect("pixel count matches");
            mosaic(&view, pattern).expect("even dimensions")
        })
        .collect()
}
