use crate::classifier::{classify_block, sobel_gradient, BlockLabel, BlockRect};
use crate::entropy::{zigzag_map, BitSink, RiceContext};
use crate::frame::{check_sequence, CfaFrame};
use crate::motion::{best_match, extract_block, MotionVector};
use crate::predictor::{dpcm_encode, intra_encode, plane_prediction};

use super::{mv_component_code, pad_frame, CodecParams, ContainerHeader, EncodeError, FrameKind};

/// Encodes a sequence: the first frame intra, every later frame inter.
pub fn encode_sequence(frames: &[CfaFrame], params: &CodecParams) -> Result<Vec<u8>, EncodeError> {
    encode(frames, params, false)
}

/// Encodes every frame intra. Serves as the spatial-only baseline; the
/// output is an ordinary container that [`super::decode_sequence`] reads.
pub fn encode_intra_only(
    frames: &[CfaFrame],
    params: &CodecParams,
) -> Result<Vec<u8>, EncodeError> {
    encode(frames, params, true)
}

fn encode(
    frames: &[CfaFrame],
    params: &CodecParams,
    intra_only: bool,
) -> Result<Vec<u8>, EncodeError> {
    params.validate()?;
    check_sequence(frames)?;
    let first = &frames[0];
    let (width, height) = match (u16::try_from(first.width()), u16::try_from(first.height())) {
        (Ok(w), Ok(h)) => (w, h),
        _ => {
            return Err(EncodeError::FrameTooLarge {
                width: first.width(),
                height: first.height(),
            })
        }
    };
    let frame_count =
        u32::try_from(frames.len()).map_err(|_| EncodeError::TooManyFrames(frames.len()))?;
    let header = ContainerHeader {
        width,
        height,
        pattern: first.pattern(),
        params: *params,
        frame_count,
    };

    let mut out = header.to_bytes().to_vec();
    let mut prev: Option<CfaFrame> = None;
    for frame in frames {
        let cur = pad_frame(frame, params.block_size);
        let (kind, payload) = match &prev {
            Some(reference) if !intra_only => {
                (FrameKind::Inter, encode_inter(reference, &cur, params))
            }
            _ => (FrameKind::Intra, encode_intra(&cur)),
        };
        out.push(kind as u8);
        out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&payload);
        prev = Some(cur);
    }
    Ok(out)
}

fn encode_intra(frame: &CfaFrame) -> Vec<u8> {
    let plane = intra_encode(frame);
    let mut sink = BitSink::new();
    let mut ctx = RiceContext::new();
    for &r in &plane.residuals {
        ctx.encode(&mut sink, zigzag_map(r));
    }
    sink.into_bytes()
}

fn put_mv(sink: &mut BitSink, mv: MotionVector) {
    sink.put_bits(mv_component_code(mv.dy), 3);
    sink.put_bits(mv_component_code(mv.dx), 3);
}

fn encode_inter(prev: &CfaFrame, cur: &CfaFrame, params: &CodecParams) -> Vec<u8> {
    let n = params.block_size;
    let w = cur.width();
    let search = params.search();
    let gmap = params.smooth.then(|| sobel_gradient(cur));

    let mut sink = BitSink::new();
    let mut motion_ctx = RiceContext::new();
    let mut dpcm_ctx = RiceContext::new();
    // Motion residuals by pixel position; smooth blocks stay zero.
    let mut residual_plane = vec![0i32; w * cur.height()];

    for row in (0..cur.height()).step_by(n) {
        for col in (0..w).step_by(n) {
            let smooth = gmap.as_ref().is_some_and(|g| {
                classify_block(g, BlockRect::square(row, col, n), params.threshold)
                    .expect("block lies inside the padded frame")
                    == BlockLabel::Smooth
            });
            if smooth {
                put_mv(&mut sink, MotionVector::SMOOTH_MARKER);
                let d = dpcm_encode(&extract_block(cur, row, col, n));
                sink.put_bits(d.seed as u32, 8);
                for diff in d.diffs {
                    dpcm_ctx.encode(&mut sink, zigzag_map(diff));
                }
                continue;
            }

            let m = best_match(prev, cur, row, col, &search);
            put_mv(&mut sink, m.mv);
            for (i, &r) in m.residual.values.iter().enumerate() {
                let (y, x) = (row + i / n, col + i % n);
                let coded = if params.recode_residuals {
                    let pred = plane_prediction(&residual_plane, w, y, x, 0);
                    residual_plane[y * w + x] = r;
                    r - pred
                } else {
                    r
                };
                motion_ctx.encode(&mut sink, zigzag_map(coded));
            }
        }
    }
    sink.into_bytes()
}
