use crate::entropy::{zigzag_unmap, BitSource, EndOfStream, RiceContext};
use crate::frame::CfaFrame;
use crate::motion::reference_in_bounds;
use crate::predictor::{plane_prediction, INTRA_SEED};

use super::{
    mv_from_codes, ContainerHeader, DecodeError, FrameKind, FrameStats, StreamStats,
    FRAME_RECORD_HEADER_LEN, HEADER_LEN,
};

/// Reconstructs the exact frame sequence stored in a container.
pub fn decode_sequence(bytes: &[u8]) -> Result<Vec<CfaFrame>, DecodeError> {
    decode_with_stats(bytes).map(|(frames, _)| frames)
}

/// Decodes and reports per-frame sizes and block statistics.
pub fn decode_with_stats(bytes: &[u8]) -> Result<(Vec<CfaFrame>, StreamStats), DecodeError> {
    let header = ContainerHeader::parse(bytes)?;
    let (pw, ph) = header.padded_dims();
    let mut pos = HEADER_LEN;
    let mut frames = Vec::with_capacity(header.frame_count.min(1 << 16) as usize);
    let mut frame_stats = Vec::with_capacity(frames.capacity());
    let mut prev: Option<CfaFrame> = None;

    for index in 0..header.frame_count as usize {
        let record = bytes
            .get(pos..pos + FRAME_RECORD_HEADER_LEN)
            .ok_or(DecodeError::TruncatedFrame { frame: index })?;
        let kind = FrameKind::from_byte(record[0]).ok_or(DecodeError::UnknownFrameType {
            frame: index,
            kind: record[0],
        })?;
        let len = u32::from_le_bytes([record[1], record[2], record[3], record[4]]) as usize;
        pos += FRAME_RECORD_HEADER_LEN;
        let payload = bytes
            .get(pos..pos.saturating_add(len))
            .ok_or(DecodeError::TruncatedFrame { frame: index })?;
        pos += len;

        let mut fd = FrameDecoder {
            header: &header,
            index,
            width: pw,
            height: ph,
            src: BitSource::new(payload),
            block: None,
            blocks: 0,
            smooth_blocks: 0,
        };
        let frame = match kind {
            FrameKind::Intra => fd.intra()?,
            FrameKind::Inter => {
                let reference = prev
                    .as_ref()
                    .ok_or(DecodeError::MissingReference { frame: index })?;
                fd.inter(reference)?
            }
        };
        fd.finish()?;
        frame_stats.push(FrameStats {
            index,
            kind,
            payload_bytes: len,
            blocks: fd.blocks,
            smooth_blocks: fd.smooth_blocks,
        });
        frames.push(frame.crop(header.width as usize, header.height as usize));
        prev = Some(frame);
    }
    if pos != bytes.len() {
        return Err(DecodeError::TrailingBytes(bytes.len() - pos));
    }
    let stats = StreamStats::new(&header, frame_stats, bytes.len());
    Ok((frames, stats))
}

struct FrameDecoder<'a> {
    header: &'a ContainerHeader,
    index: usize,
    width: usize,
    height: usize,
    src: BitSource<'a>,
    block: Option<usize>,
    blocks: usize,
    smooth_blocks: usize,
}

impl FrameDecoder<'_> {
    fn truncated(&self) -> DecodeError {
        DecodeError::TruncatedPayload {
            frame: self.index,
            block: self.block,
        }
    }

    fn bits(&mut self, count: u32) -> Result<u32, DecodeError> {
        self.src
            .get_bits(count)
            .map_err(|_: EndOfStream| self.truncated())
    }

    fn signed(&mut self, ctx: &mut RiceContext) -> Result<i32, DecodeError> {
        ctx.decode(&mut self.src)
            .map(zigzag_unmap)
            .map_err(|_| self.truncated())
    }

    fn sample(&self, value: i32) -> Result<u8, DecodeError> {
        u8::try_from(value).map_err(|_| DecodeError::PixelOverflow {
            frame: self.index,
            block: self.block,
            value,
        })
    }

    fn make_frame(&self, samples: Vec<u8>) -> CfaFrame {
        CfaFrame::new(self.width, self.height, self.header.pattern, samples)
            .expect("decoder fills every sample")
    }

    fn intra(&mut self) -> Result<CfaFrame, DecodeError> {
        let w = self.width;
        let mut ctx = RiceContext::new();
        let mut values = vec![0i32; w * self.height];
        let mut samples = Vec::with_capacity(values.len());
        for r in 0..self.height {
            for c in 0..w {
                let v = plane_prediction(&values, w, r, c, INTRA_SEED) + self.signed(&mut ctx)?;
                samples.push(self.sample(v)?);
                values[r * w + c] = v;
            }
        }
        Ok(self.make_frame(samples))
    }

    fn inter(&mut self, prev: &CfaFrame) -> Result<CfaFrame, DecodeError> {
        let params = self.header.params;
        let n = params.block_size;
        let (w, h) = (self.width, self.height);
        let radius = params.search_radius as i32;
        let mut motion_ctx = RiceContext::new();
        let mut dpcm_ctx = RiceContext::new();
        let mut residual_plane = vec![0i32; w * h];
        let mut samples = vec![0u8; w * h];

        for (block, (row, col)) in (0..h)
            .step_by(n)
            .flat_map(|r| (0..w).step_by(n).map(move |c| (r, c)))
            .enumerate()
        {
            self.block = Some(block);
            self.blocks += 1;
            let dy_code = self.bits(3)?;
            let dx_code = self.bits(3)?;
            let mv = mv_from_codes(dy_code, dx_code);

            if params.smooth && mv.is_smooth_marker() {
                self.smooth_blocks += 1;
                let mut acc = self.bits(8)? as i32;
                for i in 0..n * n {
                    if i > 0 {
                        acc += self.signed(&mut dpcm_ctx)?;
                    }
                    samples[(row + i / n) * w + col + i % n] = self.sample(acc)?;
                }
                continue;
            }

            if mv.dx.abs() > radius
                || mv.dy.abs() > radius
                || !reference_in_bounds(row, col, n, mv, w, h)
            {
                return Err(DecodeError::MotionVectorOutOfRange {
                    frame: self.index,
                    block,
                    dx: mv.dx,
                    dy: mv.dy,
                });
            }
            for i in 0..n * n {
                let (y, x) = (row + i / n, col + i % n);
                let mut r = self.signed(&mut motion_ctx)?;
                if params.recode_residuals {
                    r += plane_prediction(&residual_plane, w, y, x, 0);
                    residual_plane[y * w + x] = r;
                }
                let reference = prev.get((y as i32 + mv.dy) as usize, (x as i32 + mv.dx) as usize);
                samples[y * w + x] = self.sample(reference as i32 + r)?;
            }
        }
        self.block = None;
        Ok(self.make_frame(samples))
    }

    /// Only zero padding to the byte boundary may remain.
    fn finish(&mut self) -> Result<(), DecodeError> {
        let extra_bits = self.src.remaining();
        let padding = self.src.get_bits(extra_bits.min(7) as u32).unwrap_or(0);
        if extra_bits >= 8 || padding != 0 {
            return Err(DecodeError::PayloadLength {
                frame: self.index,
                extra_bits,
            });
        }
        Ok(())
    }
}
