//! DPCM for smooth blocks and median-edge-detector (MED) intra prediction.

use thiserror::Error;

use crate::frame::{BayerPattern, CfaFrame};

/// Prediction used for the very first sample of an intra-coded frame.
pub const INTRA_SEED: i32 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("reconstructed sample {value} at index {index} is outside 0..=255")]
pub struct RangeError {
    pub index: usize,
    pub value: i32,
}

/// First pixel plus successive raster-order differences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpcmBlock {
    pub seed: u8,
    pub diffs: Vec<i32>,
}

pub fn dpcm_encode(block: &[u8]) -> DpcmBlock {
    assert!(!block.is_empty(), "DPCM needs at least one pixel");
    DpcmBlock {
        seed: block[0],
        diffs: block
            .windows(2)
            .map(|p| p[1] as i32 - p[0] as i32)
            .collect(),
    }
}

pub fn dpcm_decode(d: &DpcmBlock) -> Result<Vec<u8>, RangeError> {
    let mut out = Vec::with_capacity(d.diffs.len() + 1);
    out.push(d.seed);
    let mut acc = d.seed as i32;
    for (i, &diff) in d.diffs.iter().enumerate() {
        acc += diff;
        out.push(to_sample(acc, i + 1)?);
    }
    Ok(out)
}

fn to_sample(value: i32, index: usize) -> Result<u8, RangeError> {
    u8::try_from(value).map_err(|_| RangeError { index, value })
}

/// MED predictor from left `a`, above `b` and above-left `c`.
#[inline]
pub fn med_predict(a: i32, b: i32, c: i32) -> i32 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if c >= hi {
        lo
    } else if c <= lo {
        hi
    } else {
        a + b - c
    }
}

/// Causal prediction at `(row, col)` of a raster plane whose earlier samples
/// are known. The origin predicts `seed`, the first row uses the left
/// neighbour, the first column the one above, everything else MED.
#[inline]
pub fn plane_prediction(plane: &[i32], width: usize, row: usize, col: usize, seed: i32) -> i32 {
    let i = row * width + col;
    match (row, col) {
        (0, 0) => seed,
        (0, _) => plane[i - 1],
        (_, 0) => plane[i - width],
        _ => med_predict(plane[i - 1], plane[i - width], plane[i - width - 1]),
    }
}

/// Raster-order MED residuals of a whole frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntraPlane {
    pub width: usize,
    pub height: usize,
    pub pattern: BayerPattern,
    pub residuals: Vec<i32>,
}

pub fn intra_encode(frame: &CfaFrame) -> IntraPlane {
    let (w, h) = (frame.width(), frame.height());
    let plane: Vec<i32> = frame.samples().iter().map(|&v| v as i32).collect();
    let mut residuals = Vec::with_capacity(plane.len());
    for r in 0..h {
        for c in 0..w {
            residuals.push(plane[r * w + c] - plane_prediction(&plane, w, r, c, INTRA_SEED));
        }
    }
    IntraPlane {
        width: w,
        height: h,
        pattern: frame.pattern(),
        residuals,
    }
}

pub fn intra_decode(plane: &IntraPlane) -> Result<CfaFrame, RangeError> {
    let (w, h) = (plane.width, plane.height);
    assert_eq!(plane.residuals.len(), w * h);
    let mut values = vec![0i32; w * h];
    let mut samples = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            let v = plane_prediction(&values, w, r, c, INTRA_SEED) + plane.residuals[i];
            samples.push(to_sample(v, i)?);
            values[i] = v;
        }
    }
    Ok(CfaFrame::new(w, h, plane.pattern, samples).expect("sample count matches"))
}
