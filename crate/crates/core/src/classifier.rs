//! Smooth / informative block classification from a Sobel gradient map.

use std::fmt;

use thiserror::Error;

use crate::frame::CfaFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockLabel {
    Smooth,
    Informative,
}

/// Per-pixel gradient magnitude `|Gx| + |Gy|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientMap {
    width: usize,
    height: usize,
    g: Vec<u32>,
}

impl GradientMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u32] {
        &self.g
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.g[row * self.width + col]
    }
}

/// Axis-aligned block rectangle in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRect {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

impl BlockRect {
    pub fn square(row: usize, col: usize, size: usize) -> Self {
        Self {
            row,
            col,
            height: size,
            width: size,
        }
    }
}

/// Smoothness threshold in tenths, the resolution stored in the container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Threshold(u16);

impl Threshold {
    pub const DEFAULT: Threshold = Threshold(100);

    pub fn from_tenths(tenths: u16) -> Self {
        Self(tenths)
    }

    /// Rounds to the nearest tenth. Returns `None` for negative, non-finite
    /// or out-of-range values.
    pub fn from_f64(value: f64) -> Option<Self> {
        let t = (value * 10.0).round();
        (value.is_finite() && (0.0..=u16::MAX as f64).contains(&t)).then_some(Self(t as u16))
    }

    pub fn tenths(self) -> u16 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("block {rect:?} exceeds {width}x{height} gradient map")]
pub struct OutOfBounds {
    pub rect: BlockRect,
    pub width: usize,
    pub height: usize,
}

/// 3×3 Sobel gradient of the raw CFA plane with replicated borders.
pub fn sobel_gradient(frame: &CfaFrame) -> GradientMap {
    let (w, h) = (frame.width(), frame.height());
    let px = |r: isize, c: isize| -> i32 {
        let r = r.clamp(0, h as isize - 1) as usize;
        let c = c.clamp(0, w as isize - 1) as usize;
        frame.get(r, c) as i32
    };
    let mut g = Vec::with_capacity(w * h);
    for r in 0..h as isize {
        for c in 0..w as isize {
            let gx = (px(r - 1, c + 1) + 2 * px(r, c + 1) + px(r + 1, c + 1))
                - (px(r - 1, c - 1) + 2 * px(r, c - 1) + px(r + 1, c - 1));
            let gy = (px(r + 1, c - 1) + 2 * px(r + 1, c) + px(r + 1, c + 1))
                - (px(r - 1, c - 1) + 2 * px(r - 1, c) + px(r - 1, c + 1));
            g.push(gx.unsigned_abs() + gy.unsigned_abs());
        }
    }
    GradientMap {
        width: w,
        height: h,
        g,
    }
}

/// `Smooth` iff the block mean of the gradient map is below `threshold`.
pub fn classify_block(
    gmap: &GradientMap,
    rect: BlockRect,
    threshold: Threshold,
) -> Result<BlockLabel, OutOfBounds> {
    if rect.width == 0
        || rect.height == 0
        || rect.row + rect.height > gmap.height
        || rect.col + rect.width > gmap.width
    {
        return Err(OutOfBounds {
            rect,
            width: gmap.width,
            height: gmap.height,
        });
    }
    let sum: u64 = (rect.row..rect.row + rect.height)
        .map(|r| {
            let start = r * gmap.width + rect.col;
            gmap.g[start..start + rect.width]
                .iter()
                .map(|&v| v as u64)
                .sum::<u64>()
        })
        .sum();
    // mean < t/10  <=>  10 * sum < t * area
    let area = (rect.width * rect.height) as u64;
    Ok(if sum * 10 < threshold.tenths() as u64 * area {
        BlockLabel::Smooth
    } else {
        BlockLabel::Informative
    })
}

/// Labels every `block_size` block of a frame whose dimensions are multiples
/// of `block_size`, in raster block order.
pub fn classify_frame(
    frame: &CfaFrame,
    block_size: usize,
    threshold: Threshold,
) -> Vec<BlockLabel> {
    let gmap = sobel_gradient(frame);
    let mut labels = Vec::new();
    for row in (0..frame.height() / block_size * block_size).step_by(block_size) {
        for col in (0..frame.width() / block_size * block_size).step_by(block_size) {
            labels.push(
                classify_block(&gmap, BlockRect::square(row, col, block_size), threshold)
                    .expect("block lies inside the frame"),
            );
        }
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::BayerPattern;
    use proptest::prelude::*;

    fn frame(w: usize, h: usize, f: impl FnMut(usize, usize) -> u8) -> CfaFrame {
        CfaFrame::from_fn(w, h, BayerPattern::Rggb, f)
    }

    // Direct 3×3 correlation with explicit kernels, used as the oracle.
    fn sobel_oracle(f: &CfaFrame, r: usize, c: usize) -> (i32, i32) {
        const KX: [[i32; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];
        let (mut gx, mut gy) = (0, 0);
        for (i, row) in KX.iter().enumerate() {
            for (j, _) in row.iter().enumerate() {
                let rr = (r as isize + i as isize - 1).clamp(0, f.height() as isize - 1) as usize;
                let cc = (c as isize + j as isize - 1).clamp(0, f.width() as isize - 1) as usize;
                let v = f.get(rr, cc) as i32;
                gx += KX[i][j] * v;
                gy += KX[j][i] * v;
            }
        }
        (gx, gy)
    }

    #[test]
    fn constant_frame_has_zero_gradient() {
        let g = sobel_gradient(&frame(7, 5, |_, _| 93));
        assert!(g.values().iter().all(|&v| v == 0));
        assert_eq!((g.width(), g.height()), (7, 5));
    }

    #[test]
    fn vertical_edge_by_hand() {
        let f = frame(3, 3, |_, c| if c == 2 { 255 } else { 0 });
        assert_eq!(sobel_oracle(&f, 1, 1), (1020, 0));
        assert_eq!(sobel_gradient(&f).get(1, 1), 1020);
    }

    #[test]
    fn transpose_swaps_axes() {
        let f = frame(6, 4, |r, c| (r * 37 + c * c * 11) as u8);
        let t = frame(4, 6, |r, c| f.get(c, r));
        for r in 0..4 {
            for c in 0..6 {
                let (gx, gy) = sobel_oracle(&f, r, c);
                let (tx, ty) = sobel_oracle(&t, c, r);
                assert_eq!((gx, gy), (ty, tx));
            }
        }
        let gf = sobel_gradient(&f);
        let gt = sobel_gradient(&t);
        for r in 0..4 {
            for c in 0..6 {
                assert_eq!(gf.get(r, c), gt.get(c, r));
            }
        }
    }

    #[test]
    fn classify_examples() {
        let flat = sobel_gradient(&frame(5, 5, |_, _| 40));
        let rect = BlockRect::square(0, 0, 5);
        assert_eq!(
            classify_block(&flat, rect, Threshold::DEFAULT),
            Ok(BlockLabel::Smooth)
        );
        assert_eq!(
            classify_block(&flat, rect, Threshold::from_tenths(0)),
            Ok(BlockLabel::Informative)
        );

        let edge = sobel_gradient(&frame(5, 5, |_, c| if c >= 3 { 255 } else { 0 }));
        assert_eq!(
            classify_block(&edge, rect, Threshold::DEFAULT),
            Ok(BlockLabel::Informative)
        );
    }

    #[test]
    fn out_of_bounds_rect() {
        let g = sobel_gradient(&frame(5, 5, |_, _| 0));
        assert!(classify_block(&g, BlockRect::square(1, 1, 5), Threshold::DEFAULT).is_err());
        assert!(classify_block(&g, BlockRect::square(0, 0, 0), Threshold::DEFAULT).is_err());
    }

    #[test]
    fn threshold_conversion() {
        assert_eq!(Threshold::from_f64(10.0), Some(Threshold::DEFAULT));
        assert_eq!(Threshold::from_f64(2.54).unwrap().tenths(), 25);
        assert_eq!(Threshold::from_f64(-1.0), None);
        assert_eq!(Threshold::from_f64(f64::NAN), None);
        assert_eq!(Threshold::from_f64(7000.0), None);
        assert_eq!(Threshold::DEFAULT.to_string(), "10.0");
    }

    proptest! {
        #[test]
        fn matches_oracle(w in 1usize..12, h in 1usize..12, seed in any::<u64>()) {
            let f = frame(w, h, |r, c| (seed.rotate_left((r * 12 + c) as u32 % 64) as u8) ^ (r * c) as u8);
            let g = sobel_gradient(&f);
            for r in 0..h {
                for c in 0..w {
                    let (gx, gy) = sobel_oracle(&f, r, c);
                    prop_assert_eq!(g.get(r, c), (gx.abs() + gy.abs()) as u32);
                }
            }
        }

        #[test]
        fn raising_threshold_never_unsmooths(seed in any::<u64>(), t in 0u16..2000, d in 0u16..2000) {
            let f = frame(10, 10, |r, c| (seed >> ((r + c) % 48)) as u8 & 0x1F);
            let g = sobel_gradient(&f);
            for (row, col) in [(0, 0), (0, 5), (5, 0), (5, 5)] {
                let rect = BlockRect::square(row, col, 5);
                let lo = classify_block(&g, rect, Threshold::from_tenths(t)).unwrap();
                let hi = classify_block(&g, rect, Threshold::from_tenths(t + d)).unwrap();
                if lo == BlockLabel::Smooth {
                    prop_assert_eq!(hi, BlockLabel::Smooth);
                }
            }
        }

        #[test]
        fn constant_frames_are_smooth(v in any::<u8>(), t in 1u16..1000, bs in 1usize..9) {
            let f = frame(bs * 3, bs * 2, |_, _| v);
            let labels = classify_frame(&f, bs, Threshold::from_tenths(t));
            prop_assert_eq!(labels.len(), 6);
            prop_assert!(labels.iter().all(|&l| l == BlockLabel::Smooth));
        }
    }
}
