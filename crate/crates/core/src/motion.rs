//! Full-search block matching against the previous frame.

use thiserror::Error;

use crate::frame::CfaFrame;

/// Offset from a current block to its reference block in the previous frame:
/// the reference starts at `(row + dy, col + dx)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MotionVector {
    pub dx: i32,
    pub dy: i32,
}

impl MotionVector {
    /// Reserved vector that marks a smooth (DPCM-coded) block.
    pub const SMOOTH_MARKER: MotionVector = MotionVector { dx: 4, dy: 0 };
    pub const ZERO: MotionVector = MotionVector { dx: 0, dy: 0 };

    pub fn new(dx: i32, dy: i32) -> Self {
        Self { dx, dy }
    }

    pub fn is_smooth_marker(self) -> bool {
        self == Self::SMOOTH_MARKER
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SearchMode {
    /// Every offset in the square window.
    #[default]
    Full,
    /// Only offsets with even `dx` and `dy`, which keep the Bayer phase.
    CfaPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchParams {
    pub block_size: usize,
    pub radius: usize,
    pub mode: SearchMode,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            block_size: 5,
            radius: 3,
            mode: SearchMode::Full,
        }
    }
}

impl SearchParams {
    /// Side of the pixel area the candidates cover: `2R + N`.
    pub fn window_side(&self) -> usize {
        2 * self.radius + self.block_size
    }
}

/// `current = reference + values`, row-major over the block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualBlock {
    pub row: usize,
    pub col: usize,
    pub values: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMatch {
    pub mv: MotionVector,
    pub residual: ResidualBlock,
    pub ssd: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("block sizes differ: {0} vs {1} pixels")]
pub struct SizeMismatch(pub usize, pub usize);

/// Candidate `(dy, dx)` offsets in raster order, `dy` outer.
pub fn candidate_offsets(params: &SearchParams) -> Vec<(i32, i32)> {
    let r = params.radius as i32;
    let step = match params.mode {
        SearchMode::Full => 1,
        SearchMode::CfaPhase => 2,
    };
    let axis: Vec<i32> = (-r..=r)
        .filter(|v| step == 1 || v.rem_euclid(2) == 0)
        .collect();
    axis.iter()
        .flat_map(|&dy| axis.iter().map(move |&dx| (dy, dx)))
        .collect()
}

/// Sum of squared differences. Same argmin as MSE for a fixed block area.
pub fn block_ssd(cur: &[u8], reference: &[u8]) -> Result<u64, SizeMismatch> {
    if cur.len() != reference.len() {
        return Err(SizeMismatch(cur.len(), reference.len()));
    }
    Ok(cur
        .iter()
        .zip(reference)
        .map(|(&a, &b)| {
            let d = a as i64 - b as i64;
            (d * d) as u64
        })
        .sum())
}

/// Copies the `size`×`size` block at `(row, col)`.
pub fn extract_block(frame: &CfaFrame, row: usize, col: usize, size: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(size * size);
    let w = frame.width();
    for r in row..row + size {
        out.extend_from_slice(&frame.samples()[r * w + col..r * w + col + size]);
    }
    out
}

/// Whether the reference block for `mv` lies fully inside a `width`×`height` frame.
pub fn reference_in_bounds(
    row: usize,
    col: usize,
    size: usize,
    mv: MotionVector,
    width: usize,
    height: usize,
) -> bool {
    let rr = row as i64 + mv.dy as i64;
    let rc = col as i64 + mv.dx as i64;
    rr >= 0 && rc >= 0 && rr + size as i64 <= height as i64 && rc + size as i64 <= width as i64
}

fn ssd_at(
    prev: &CfaFrame,
    cur_block: &[u8],
    row: usize,
    col: usize,
    size: usize,
    best: u64,
) -> u64 {
    let w = prev.width();
    let mut acc = 0u64;
    for (i, cur_row) in cur_block.chunks_exact(size).enumerate() {
        let start = (row + i) * w + col;
        let ref_row = &prev.samples()[start..start + size];
        acc += cur_row
            .iter()
            .zip(ref_row)
            .map(|(&a, &b)| {
                let d = a as i32 - b as i32;
                (d * d) as u64
            })
            .sum::<u64>();
        // Rows only add, so a partial sum at or above the best can't win.
        if acc >= best {
            return acc;
        }
    }
    acc
}

/// Finds the first minimum-SSD candidate in raster candidate order.
/// Candidates whose reference block leaves the frame are skipped.
pub fn best_match(
    prev: &CfaFrame,
    cur: &CfaFrame,
    row: usize,
    col: usize,
    params: &SearchParams,
) -> BlockMatch {
    let n = params.block_size;
    assert!(
        row + n <= cur.height() && col + n <= cur.width(),
        "block outside frame"
    );
    assert_eq!((prev.width(), prev.height()), (cur.width(), cur.height()));

    let cur_block = extract_block(cur, row, col, n);
    let mut best: Option<(MotionVector, u64)> = None;
    for (dy, dx) in candidate_offsets(params) {
        let mv = MotionVector::new(dx, dy);
        if !reference_in_bounds(row, col, n, mv, prev.width(), prev.height()) {
            continue;
        }
        let bound = best.map_or(u64::MAX, |(_, s)| s);
        let rr = (row as i64 + dy as i64) as usize;
        let rc = (col as i64 + dx as i64) as usize;
        let ssd = ssd_at(prev, &cur_block, rr, rc, n, bound);
        if ssd < bound {
            best = Some((mv, ssd));
        }
    }
    // (0, 0) is always a candidate and always in bounds.
    let (mv, ssd) = best.expect("zero offset is always a valid candidate");
    let reference = extract_block(
        prev,
        (row as i64 + mv.dy as i64) as usize,
        (col as i64 + mv.dx as i64) as usize,
        n,
    );
    let values = cur_block
        .iter()
        .zip(&reference)
        .map(|(&c, &r)| c as i32 - r as i32)
        .collect();
    BlockMatch {
        mv,
        residual: ResidualBlock { row, col, values },
        ssd,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::BayerPattern;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_frame(rng: &mut impl Rng, w: usize, h: usize) -> CfaFrame {
        CfaFrame::from_fn(w, h, BayerPattern::Rggb, |_, _| rng.random())
    }

    #[test]
    fn candidate_counts() {
        let full = candidate_offsets(&SearchParams::default());
        assert_eq!(full.len(), 49);
        assert_eq!(full[0], (-3, -3));
        assert_eq!(full[1], (-3, -2));
        assert_eq!(*full.last().unwrap(), (3, 3));

        let cfa = candidate_offsets(&SearchParams {
            mode: SearchMode::CfaPhase,
            ..Default::default()
        });
        let expect: Vec<_> = [-2, 0, 2]
            .iter()
            .flat_map(|&dy| [-2, 0, 2].map(|dx| (dy, dx)))
            .collect();
        assert_eq!(cfa, expect);

        let zero = candidate_offsets(&SearchParams {
            radius: 0,
            ..Default::default()
        });
        assert_eq!(zero, vec![(0, 0)]);
    }

    #[test]
    fn default_window_is_eleven() {
        assert_eq!(SearchParams::default().window_side(), 11);
    }

    #[test]
    fn ssd_examples() {
        assert_eq!(block_ssd(&[1, 2, 3], &[1, 2, 3]), Ok(0));
        assert_eq!(block_ssd(&[10], &[13]), Ok(9));
        assert_eq!(block_ssd(&[0; 25], &[255; 25]), Ok(1_625_625));
        assert_eq!(block_ssd(&[0; 4], &[0; 5]), Err(SizeMismatch(4, 5)));
    }

    #[test]
    fn identical_frames_match_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_frame(&mut rng, 20, 20);
        let m = best_match(&f, &f, 5, 5, &SearchParams::default());
        assert_eq!(m.mv, MotionVector::ZERO);
        assert_eq!(m.ssd, 0);
        assert!(m.residual.values.iter().all(|&v| v == 0));
    }

    #[test]
    fn tracks_translation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let scene = random_frame(&mut rng, 32, 20);
        let prev = scene.crop(30, 20);
        // The current view sits two columns to the right, so content is found at dx = +2.
        let cur = CfaFrame::from_fn(30, 20, BayerPattern::Rggb, |r, c| {
            scene.get(r, (c + 2).min(31))
        });
        for (row, col) in [(5, 5), (10, 10), (5, 15)] {
            let m = best_match(&prev, &cur, row, col, &SearchParams::default());
            assert_eq!(m.mv, MotionVector::new(2, 0));
            assert_eq!(m.ssd, 0);
        }
    }

    #[test]
    fn corner_blocks_stay_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let prev = random_frame(&mut rng, 10, 10);
        let cur = random_frame(&mut rng, 10, 10);
        for (row, col) in [(0, 0), (0, 5), (5, 0), (5, 5)] {
            let m = best_match(&prev, &cur, row, col, &SearchParams::default());
            assert!(reference_in_bounds(row, col, 5, m.mv, 10, 10));
        }
        // A frame exactly one block in size has only the zero candidate.
        let p = random_frame(&mut rng, 5, 5);
        let c = random_frame(&mut rng, 5, 5);
        assert_eq!(
            best_match(&p, &c, 0, 0, &SearchParams::default()).mv,
            MotionVector::ZERO
        );
    }

    proptest! {
        #[test]
        fn residual_reconstructs_block(seed in any::<u64>(), cfa in any::<bool>(), n in 2usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let prev = random_frame(&mut rng, 4 * n, 3 * n);
            let cur = random_frame(&mut rng, 4 * n, 3 * n);
            let params = SearchParams {
                block_size: n,
                radius: 3,
                mode: if cfa { SearchMode::CfaPhase } else { SearchMode::Full },
            };
            let row = rng.random_range(0..=2 * n);
            let col = rng.random_range(0..=3 * n);
            let m = best_match(&prev, &cur, row, col, &params);
            prop_assert!(!m.mv.is_smooth_marker());
            prop_assert!(m.mv.dx.abs() <= 3 && m.mv.dy.abs() <= 3);
            let reference = extract_block(
                &prev,
                (row as i32 + m.mv.dy) as usize,
                (col as i32 + m.mv.dx) as usize,
                n,
            );
            let cur_block = extract_block(&cur, row, col, n);
            for i in 0..n * n {
                prop_assert_eq!(reference[i] as i32 + m.residual.values[i], cur_block[i] as i32);
            }
            prop_assert_eq!(block_ssd(&cur_block, &reference).unwrap(), m.ssd);
        }

        #[test]
        fn cfa_phase_never_beats_full(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let prev = random_frame(&mut rng, 20, 20);
            let cur = random_frame(&mut rng, 20, 20);
            for row in [0, 5, 10, 15] {
                for col in [0, 5, 10, 15] {
                    let full = best_match(&prev, &cur, row, col, &SearchParams::default());
                    let sub = best_match(&prev, &cur, row, col, &SearchParams {
                        mode: SearchMode::CfaPhase,
                        ..Default::default()
                    });
                    prop_assert!(sub.ssd >= full.ssd);
                }
            }
        }
    }
}
