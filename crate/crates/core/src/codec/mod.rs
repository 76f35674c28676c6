//! The WCEC container: a lossless sequence codec with one intra frame
//! followed by motion-compensated inter frames.
//!
//! Layout (all multi-byte integers little-endian):
//!
//! ```text
//! header (19 bytes)
//!   magic "WCEC" | version u8 = 1 | width u16 | height u16 | block_size u8
//!   search_radius u8 | bayer pattern u8 | flags u8 | threshold u16 (tenths)
//!   frame_count u32
//! per frame
//!   frame_type u8 (0 intra, 1 inter) | payload_len u32 | payload
//! ```
//!
//! Payloads are MSB-first bit streams padded with zeros to a byte boundary.
//! Every frame is coded on the frame padded to a multiple of the block size;
//! the header keeps the true dimensions.
//!
//! * Intra payload: MED residual of every padded pixel, zigzagged and
//!   Rice-coded with one adaptive context.
//! * Inter payload: for each block in raster order, a 3-bit `dy + 3` and a
//!   3-bit `dx + 3` code. The reserved vector `dx = 4, dy = 0` marks a smooth
//!   block, followed by its first pixel in 8 raw bits and the remaining
//!   raster-order DPCM differences. Any other vector is followed by the
//!   block's motion residuals. With residual recoding enabled, each residual
//!   is replaced by its error against a MED prediction over the frame's
//!   residual plane (smooth blocks read as zero there, the origin predicts 0).
//!   Motion residuals and DPCM differences use separate contexts. All
//!   contexts restart at every frame.

mod decode;
mod encode;
mod stats;

use thiserror::Error;

use crate::classifier::Threshold;
use crate::frame::{BayerPattern, CfaFrame, FrameError};
use crate::motion::{MotionVector, SearchMode, SearchParams};

pub use decode::{decode_sequence, decode_with_stats};
pub use encode::{encode_intra_only, encode_sequence};
pub use stats::{stream_stats, FrameStats, StreamStats};

pub const MAGIC: [u8; 4] = *b"WCEC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 19;
/// Bytes preceding each frame payload: type and length.
pub const FRAME_RECORD_HEADER_LEN: usize = 5;
/// Largest radius the 3-bit vector code can carry.
pub const MAX_SEARCH_RADIUS: usize = 3;

const FLAG_SMOOTH: u8 = 1 << 0;
const FLAG_CFA_PHASE: u8 = 1 << 1;
const FLAG_RECODE: u8 = 1 << 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameKind {
    Intra = 0,
    Inter = 1,
}

impl FrameKind {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Self::Intra),
            1 => Some(Self::Inter),
            _ => None,
        }
    }
}

/// Codec settings; all of them travel in the container header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodecParams {
    pub block_size: usize,
    pub search_radius: usize,
    pub threshold: Threshold,
    /// Route smooth blocks through DPCM instead of motion search.
    pub smooth: bool,
    /// Restrict motion search to Bayer-phase-preserving offsets.
    pub cfa_phase: bool,
    /// MED-predict the residual plane of inter frames before entropy coding.
    pub recode_residuals: bool,
}

impl Default for CodecParams {
    fn default() -> Self {
        Self {
            block_size: 5,
            search_radius: 3,
            threshold: Threshold::DEFAULT,
            smooth: true,
            cfa_phase: false,
            recode_residuals: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("block size must be between 1 and 255, got {0}")]
    BlockSize(usize),
    #[error("search radius {radius} exceeds the limit of {max}")]
    SearchRadius { radius: usize, max: usize },
}

impl CodecParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(1..=255).contains(&self.block_size) {
            return Err(ParamError::BlockSize(self.block_size));
        }
        let max = MAX_SEARCH_RADIUS.min(self.block_size);
        if self.search_radius > max {
            return Err(ParamError::SearchRadius {
                radius: self.search_radius,
                max,
            });
        }
        Ok(())
    }

    pub fn search(&self) -> SearchParams {
        SearchParams {
            block_size: self.block_size,
            radius: self.search_radius,
            mode: if self.cfa_phase {
                SearchMode::CfaPhase
            } else {
                SearchMode::Full
            },
        }
    }

    fn flags(&self) -> u8 {
        let mut f = 0;
        if self.smooth {
            f |= FLAG_SMOOTH;
        }
        if self.cfa_phase {
            f |= FLAG_CFA_PHASE;
        }
        if self.recode_residuals {
            f |= FLAG_RECODE;
        }
        f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContainerHeader {
    pub width: u16,
    pub height: u16,
    pub pattern: BayerPattern,
    pub params: CodecParams,
    pub frame_count: u32,
}

impl ContainerHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..4].copy_from_slice(&MAGIC);
        b[4] = VERSION;
        b[5..7].copy_from_slice(&self.width.to_le_bytes());
        b[7..9].copy_from_slice(&self.height.to_le_bytes());
        b[9] = self.params.block_size as u8;
        b[10] = self.params.search_radius as u8;
        b[11] = self.pattern.to_byte();
        b[12] = self.params.flags();
        b[13..15].copy_from_slice(&self.params.threshold.tenths().to_le_bytes());
        b[15..19].copy_from_slice(&self.frame_count.to_le_bytes());
        b
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, DecodeError> {
        if bytes.len() < 4 || bytes[0..4] != MAGIC {
            return Err(DecodeError::BadMagic);
        }
        if bytes.len() < HEADER_LEN {
            return Err(DecodeError::TruncatedHeader);
        }
        if bytes[4] != VERSION {
            return Err(DecodeError::UnsupportedVersion(bytes[4]));
        }
        let width = u16::from_le_bytes([bytes[5], bytes[6]]);
        let height = u16::from_le_bytes([bytes[7], bytes[8]]);
        if width == 0 || height == 0 {
            return Err(DecodeError::BadHeader("zero frame dimension".into()));
        }
        let pattern = BayerPattern::from_byte(bytes[11]).ok_or_else(|| {
            DecodeError::BadHeader(format!("unknown Bayer pattern {}", bytes[11]))
        })?;
        let flags = bytes[12];
        if flags & !(FLAG_SMOOTH | FLAG_CFA_PHASE | FLAG_RECODE) != 0 {
            return Err(DecodeError::BadHeader(format!(
                "unknown flag bits {flags:#04x}"
            )));
        }
        let params = CodecParams {
            block_size: bytes[9] as usize,
            search_radius: bytes[10] as usize,
            threshold: Threshold::from_tenths(u16::from_le_bytes([bytes[13], bytes[14]])),
            smooth: flags & FLAG_SMOOTH != 0,
            cfa_phase: flags & FLAG_CFA_PHASE != 0,
            recode_residuals: flags & FLAG_RECODE != 0,
        };
        params
            .validate()
            .map_err(|e| DecodeError::BadHeader(e.to_string()))?;
        Ok(Self {
            width,
            height,
            pattern,
            params,
            frame_count: u32::from_le_bytes([bytes[15], bytes[16], bytes[17], bytes[18]]),
        })
    }

    /// Dimensions rounded up to whole blocks.
    pub fn padded_dims(&self) -> (usize, usize) {
        let n = self.params.block_size;
        (
            (self.width as usize).div_ceil(n) * n,
            (self.height as usize).div_ceil(n) * n,
        )
    }
}

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Sequence(#[from] FrameError),
    #[error("frame dimensions {width}x{height} exceed the 65535 limit")]
    FrameTooLarge { width: usize, height: usize },
    #[error("too many frames ({0})")]
    TooManyFrames(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("not a WCEC container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("container header is truncated")]
    TruncatedHeader,
    #[error("invalid header: {0}")]
    BadHeader(String),
    #[error("frame {frame}: record truncated (container ends early)")]
    TruncatedFrame { frame: usize },
    #[error("frame {frame}{}: payload truncated", block_suffix(*.block))]
    TruncatedPayload { frame: usize, block: Option<usize> },
    #[error("frame {frame}: unknown frame type {kind}")]
    UnknownFrameType { frame: usize, kind: u8 },
    #[error("frame {frame}: inter frame without a preceding frame")]
    MissingReference { frame: usize },
    #[error("frame {frame}, block {block}: motion vector ({dx}, {dy}) out of decodable range")]
    MotionVectorOutOfRange {
        frame: usize,
        block: usize,
        dx: i32,
        dy: i32,
    },
    #[error("frame {frame}{}: reconstructed sample {value} outside 0..=255", block_suffix(*.block))]
    PixelOverflow {
        frame: usize,
        block: Option<usize>,
        value: i32,
    },
    #[error("frame {frame}: payload has {extra_bits} unused bits")]
    PayloadLength { frame: usize, extra_bits: usize },
    #[error("{0} trailing bytes after the last frame")]
    TrailingBytes(usize),
}

fn block_suffix(block: Option<usize>) -> String {
    block.map(|b| format!(", block {b}")).unwrap_or_default()
}

/// 3-bit code of one vector component: `value + 3`.
pub(crate) fn mv_component_code(v: i32) -> u32 {
    debug_assert!((-3..=4).contains(&v));
    (v + 3) as u32
}

pub(crate) fn mv_from_codes(dy_code: u32, dx_code: u32) -> MotionVector {
    MotionVector::new(dx_code as i32 - 3, dy_code as i32 - 3)
}

/// Extends a frame right and down to whole blocks by replicating its last
/// column and row.
pub fn pad_frame(frame: &CfaFrame, block_size: usize) -> CfaFrame {
    let w = frame.width().div_ceil(block_size) * block_size;
    let h = frame.height().div_ceil(block_size) * block_size;
    if (w, h) == (frame.width(), frame.height()) {
        return frame.clone();
    }
    CfaFrame::from_fn(w, h, frame.pattern(), |r, c| {
        frame.get(r.min(frame.height() - 1), c.min(frame.width() - 1))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        let h = ContainerHeader {
            width: 480,
            height: 320,
            pattern: BayerPattern::Gbrg,
            params: CodecParams {
                block_size: 8,
                search_radius: 2,
                threshold: Threshold::from_tenths(123),
                smooth: false,
                cfa_phase: true,
                recode_residuals: true,
            },
            frame_count: 40,
        };
        let b = h.to_bytes();
        assert_eq!(&b[..5], b"WCEC\x01");
        assert_eq!(&b[5..9], &[0xE0, 0x01, 0x40, 0x01]);
        assert_eq!(b[12], 0b110);
        assert_eq!(&b[13..15], &[123, 0]);
        assert_eq!(&b[15..], &[40, 0, 0, 0]);
        assert_eq!(ContainerHeader::parse(&b), Ok(h));
    }

    #[test]
    fn header_rejections() {
        let mut b = ContainerHeader {
            width: 5,
            height: 5,
            pattern: BayerPattern::Rggb,
            params: CodecParams::default(),
            frame_count: 1,
        }
        .to_bytes();
        assert_eq!(
            ContainerHeader::parse(&b[..10]),
            Err(DecodeError::TruncatedHeader)
        );
        b[4] = 2;
        assert_eq!(
            ContainerHeader::parse(&b),
            Err(DecodeError::UnsupportedVersion(2))
        );
        b[4] = 1;
        b[10] = 4;
        assert!(matches!(
            ContainerHeader::parse(&b),
            Err(DecodeError::BadHeader(_))
        ));
        b[10] = 3;
        b[0] = b'X';
        assert_eq!(ContainerHeader::parse(&b), Err(DecodeError::BadMagic));
    }

    #[test]
    fn param_validation() {
        let ok = CodecParams::default();
        assert!(ok.validate().is_ok());
        assert_eq!(
            CodecParams {
                block_size: 0,
                ..ok
            }
            .validate(),
            Err(ParamError::BlockSize(0))
        );
        assert_eq!(
            CodecParams {
                block_size: 2,
                search_radius: 3,
                ..ok
            }
            .validate(),
            Err(ParamError::SearchRadius { radius: 3, max: 2 })
        );
        assert!(CodecParams {
            search_radius: 4,
            ..ok
        }
        .validate()
        .is_err());
    }

    #[test]
    fn mv_codes_are_bijective() {
        for dy in -3..=4 {
            for dx in -3..=4 {
                let dyc = mv_component_code(dy);
                let dxc = mv_component_code(dx);
                assert!(dyc < 8 && dxc < 8);
                assert_eq!(mv_from_codes(dyc, dxc), MotionVector::new(dx, dy));
            }
        }
        let m = MotionVector::SMOOTH_MARKER;
        assert_eq!((mv_component_code(m.dy), mv_component_code(m.dx)), (3, 7));
    }

    #[test]
    fn padding() {
        let f = CfaFrame::from_fn(480, 480, BayerPattern::Rggb, |r, c| (r ^ c) as u8);
        assert_eq!(pad_frame(&f, 5), f);

        let f = CfaFrame::from_fn(7, 7, BayerPattern::Rggb, |r, c| (r * 7 + c) as u8);
        let p = pad_frame(&f, 5);
        assert_eq!((p.width(), p.height()), (10, 10));
        assert_eq!(p.get(9, 9), f.get(6, 6));
        assert_eq!(p.get(2, 8), f.get(2, 6));
        assert_eq!(p.get(8, 3), f.get(6, 3));
        assert_eq!(p.crop(7, 7), f);
    }
}
