use super::{
    decode_with_stats, ContainerHeader, DecodeError, FrameKind, FRAME_RECORD_HEADER_LEN, HEADER_LEN,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameStats {
    pub index: usize,
    pub kind: FrameKind,
    pub payload_bytes: usize,
    /// Blocks coded in an inter frame; zero for intra frames.
    pub blocks: usize,
    pub smooth_blocks: usize,
}

impl FrameStats {
    /// Payload plus its type/length record.
    pub fn record_bytes(&self) -> usize {
        self.payload_bytes + FRAME_RECORD_HEADER_LEN
    }
}

/// Sizes of a container and the compression ratio `S_in / S_out`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamStats {
    pub width: usize,
    pub height: usize,
    pub frames: Vec<FrameStats>,
    /// Raw 8-bit size of the original (unpadded) frames.
    pub s_in: u64,
    /// Total container length.
    pub s_out: u64,
}

impl StreamStats {
    pub(super) fn new(
        header: &ContainerHeader,
        frames: Vec<FrameStats>,
        container_len: usize,
    ) -> Self {
        Self {
            width: header.width as usize,
            height: header.height as usize,
            s_in: header.width as u64 * header.height as u64 * frames.len() as u64,
            s_out: container_len as u64,
            frames,
        }
    }

    pub fn header_bytes(&self) -> usize {
        HEADER_LEN
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn compression_ratio(&self) -> f64 {
        self.s_in as f64 / self.s_out as f64
    }

    /// Percentage of inter-frame blocks coded as smooth; 0 without inter frames.
    pub fn smooth_pct(&self) -> f64 {
        let (blocks, smooth) = self
            .frames
            .iter()
            .filter(|f| f.kind == FrameKind::Inter)
            .fold((0usize, 0usize), |(b, s), f| {
                (b + f.blocks, s + f.smooth_blocks)
            });
        if blocks == 0 {
            0.0
        } else {
            100.0 * smooth as f64 / blocks as f64
        }
    }

    /// One-line summary, e.g. `10 frames 480x480: 2304000 -> 460800 bytes, CR 5.00, smooth 0.0%`.
    pub fn summary(&self) -> String {
        format!(
            "{} frames {}x{}: {} -> {} bytes, CR {:.2}, smooth {:.1}%",
            self.frame_count(),
            self.width,
            self.height,
            self.s_in,
            self.s_out,
            self.compression_ratio(),
            self.smooth_pct()
        )
    }
}

/// Parses (and fully decodes) a container to report its sizes.
pub fn stream_stats(bytes: &[u8]) -> Result<StreamStats, DecodeError> {
    decode_with_stats(bytes).map(|(_, s)| s)
}
