//! Lossless compression of capsule-endoscopy CFA frame sequences.
//!
//! Frames are split into blocks; after an intra-coded first frame, each
//! block is either DPCM-coded (when its Sobel gradient says it is smooth) or
//! predicted from the previous frame by full-search block matching. All
//! residuals go through an adaptive Golomb-Rice coder into the byte-aligned
//! WCEC container.

pub mod bench;
pub mod classifier;
pub mod codec;
pub mod entropy;
pub mod frame;
pub mod motion;
pub mod predictor;
pub mod synth;

pub use classifier::{BlockLabel, Threshold};
pub use codec::{
    decode_sequence, encode_intra_only, encode_sequence, stream_stats, CodecParams, DecodeError,
    EncodeError, StreamStats,
};
pub use frame::{BayerPattern, CfaFrame, RgbFrame};
pub use motion::{MotionVector, SearchMode, SearchParams};
