//! Raw frame types, netpbm (P5/P6) I/O and Bayer mosaicing.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

/// Bayer phase of a CFA frame, named by the 2×2 tile read in raster order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BayerPattern {
    #[default]
    Rggb,
    Grbg,
    Gbrg,
    Bggr,
}

/// Color channel index into an RGB triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Red = 0,
    Green = 1,
    Blue = 2,
}

impl BayerPattern {
    pub const ALL: [BayerPattern; 4] = [Self::Rggb, Self::Grbg, Self::Gbrg, Self::Bggr];

    /// Channel sampled at `(row, col)`. Depends only on the coordinate parities.
    pub fn channel_at(self, row: usize, col: usize) -> Channel {
        use Channel::*;
        let tile = match self {
            Self::Rggb => [Red, Green, Green, Blue],
            Self::Grbg => [Green, Red, Blue, Green],
            Self::Gbrg => [Green, Blue, Red, Green],
            Self::Bggr => [Blue, Green, Green, Red],
        };
        tile[(row & 1) * 2 + (col & 1)]
    }

    /// Byte tag used in the container header.
    pub fn to_byte(self) -> u8 {
        match self {
            Self::Rggb => 0,
            Self::Grbg => 1,
            Self::Gbrg => 2,
            Self::Bggr => 3,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        Self::ALL.get(b as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Rggb => "rggb",
            Self::Grbg => "grbg",
            Self::Gbrg => "gbrg",
            Self::Bggr => "bggr",
        }
    }
}

impl fmt::Display for BayerPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BayerPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown Bayer pattern {s:?} (expected rggb, grbg, gbrg or bggr)")
            })
    }
}

/// Errors from parsing netpbm data.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PnmError {
    #[error("bad magic: expected {expected}")]
    BadMagic { expected: &'static str },
    #[error("malformed header: {0}")]
    MalformedHeader(&'static str),
    #[error("unsupported maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("zero image dimension ({width}x{height})")]
    ZeroDimension { width: usize, height: usize },
    #[error("truncated pixel data: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}

/// Errors from frame construction, mosaicing and sequence loading.
#[derive(Debug, Error)]
pub enum FrameError {
    #[error("sample count {found} does not match {width}x{height}")]
    SampleCount {
        width: usize,
        height: usize,
        found: usize,
    },
    #[error("mosaicing needs even dimensions, got {width}x{height}")]
    OddDimension { width: usize, height: usize },
    #[error("empty frame sequence")]
    EmptySequence,
    #[error("frame {index} is {found_w}x{found_h}, expected {width}x{height}")]
    DimensionMismatch {
        index: usize,
        width: usize,
        height: usize,
        found_w: usize,
        found_h: usize,
    },
    #[error("frame {index} has Bayer pattern {found}, expected {expected}")]
    PatternMismatch {
        index: usize,
        expected: BayerPattern,
        found: BayerPattern,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: PnmError },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Interleaved 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbFrame {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbFrame {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self, FrameError> {
        if pixels.len() != width * height {
            return Err(FrameError::SampleCount {
                width,
                height,
                found: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        self.pixels[row * self.width + col]
    }
}

/// Single-channel 8-bit frame with its Bayer phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfaFrame {
    width: usize,
    height: usize,
    pattern: BayerPattern,
    samples: Vec<u8>,
}

impl CfaFrame {
    pub fn new(
        width: usize,
        height: usize,
        pattern: BayerPattern,
        samples: Vec<u8>,
    ) -> Result<Self, FrameError> {
        if samples.len() != width * height {
            return Err(FrameError::SampleCount {
                width,
                height,
                found: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pattern,
            samples,
        })
    }

    /// Builds a frame from a per-pixel function of `(row, col)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        pattern: BayerPattern,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Self {
            width,
            height,
            pattern,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pattern(&self) -> BayerPattern {
        self.pattern
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.samples[row * self.width + col]
    }

    /// Same samples, different Bayer phase.
    pub fn with_pattern(mut self, pattern: BayerPattern) -> Self {
        self.pattern = pattern;
        self
    }

    /// Top-left `width`×`height` region.
    pub fn crop(&self, width: usize, height: usize) -> CfaFrame {
        assert!(width <= self.width && height <= self.height);
        CfaFrame::from_fn(width, height, self.pattern, |r, c| self.get(r, c))
    }
}

/// Cursor over a netpbm header: whitespace-separated tokens with `#` comments.
struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &'static str) -> Result<u32, PnmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PnmError::MalformedHeader(what));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PnmError::MalformedHeader(what))
    }
}

/// Parses a P5/P6 header and returns `(width, height, payload)`.
fn parse_pnm<'a>(
    bytes: &'a [u8],
    magic: &'static str,
    channels: usize,
) -> Result<(usize, usize, &'a [u8]), PnmError> {
    if !bytes.starts_with(magic.as_bytes()) {
        return Err(PnmError::BadMagic { expected: magic });
    }
    let mut rd = HeaderReader { bytes, pos: 2 };
    if !rd.bytes.get(2).is_some_and(u8::is_ascii_whitespace) {
        return Err(PnmError::BadMagic { expected: magic });
    }
    let width = rd.number("missing width")? as usize;
    let height = rd.number("missing height")? as usize;
    let maxval = rd.number("missing maxval")?;
    // Exactly one whitespace byte separates maxval from the raster.
    if !rd.bytes.get(rd.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(PnmError::MalformedHeader("missing whitespace after maxval"));
    }
    rd.pos += 1;
    if maxval != 255 {
        return Err(PnmError::UnsupportedMaxval(maxval));
    }
    if width == 0 || height == 0 {
        return Err(PnmError::ZeroDimension { width, height });
    }
    let expected = width * height * channels;
    let payload = &bytes[rd.pos..];
    if payload.len() < expected {
        return Err(PnmError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    Ok((width, height, &payload[..expected]))
}

/// Parses a binary PGM. The Bayer phase defaults to RGGB; use
/// [`CfaFrame::with_pattern`] to override.
pub fn parse_pgm(bytes: &[u8]) -> Result<CfaFrame, PnmError> {
    let (width, height, payload) = parse_pnm(bytes, "P5", 1)?;
    Ok(CfaFrame {
        width,
        height,
        pattern: BayerPattern::default(),
        samples: payload.to_vec(),
    })
}

pub fn emit_pgm(frame: &CfaFrame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend_from_slice(&frame.samples);
    out
}

pub fn parse_ppm(bytes: &[u8]) -> Result<RgbFrame, PnmError> {
    let (width, height, payload) = parse_pnm(bytes, "P6", 3)?;
    let pixels = payload
        .chunks_exact(3)
        .map(|p| [p[0], p[1], p[2]])
        .collect();
    Ok(RgbFrame {
        width,
        height,
        pixels,
    })
}

pub fn emit_ppm(frame: &RgbFrame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend(frame.pixels.iter().flatten());
    out
}

/// Keeps the one channel the Bayer pattern selects at each pixel.
pub fn mosaic(frame: &RgbFrame, pattern: BayerPattern) -> Result<CfaFrame, FrameError> {
    if !frame.width.is_multiple_of(2) || !frame.height.is_multiple_of(2) {
        return Err(FrameError::OddDimension {
            width: frame.width,
            height: frame.height,
        });
    }
    Ok(CfaFrame::from_fn(
        frame.width,
        frame.height,
        pattern,
        |r, c| frame.pixel(r, c)[pattern.channel_at(r, c) as usize],
    ))
}

/// Checks that a sequence is nonempty and uniform in size and phase.
pub fn check_sequence(frames: &[CfaFrame]) -> Result<(), FrameError> {
    let first = frames.first().ok_or(FrameError::EmptySequence)?;
    for (index, f) in frames.iter().enumerate().skip(1) {
        if f.width != first.width || f.height != first.height {
            return Err(FrameError::DimensionMismatch {
                index,
                width: first.width,
                height: first.height,
                found_w: f.width,
                found_h: f.height,
            });
        }
        if f.pattern != first.pattern {
            return Err(FrameError::PatternMismatch {
                index,
                expected: first.pattern,
                found: f.pattern,
            });
        }
    }
    Ok(())
}

/// Loads PGM frames in the given order and applies `pattern` to each.
pub fn load_sequence<P: AsRef<Path>>(
    paths: &[P],
    pattern: BayerPattern,
) -> Result<Vec<CfaFrame>, FrameError> {
    if paths.is_empty() {
        return Err(FrameError::EmptySequence);
    }
    let frames = paths
        .iter()
        .map(|p| {
            let path = p.as_ref();
            let bytes = std::fs::read(path).map_err(|source| FrameError::Io {
                path: path.display().to_string(),
                source,
            })?;
            parse_pgm(&bytes)
                .map(|f| f.with_pattern(pattern))
                .map_err(|source| FrameError::Parse {
                    path: path.display().to_string(),
                    source,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_sequence(&frames)?;
    Ok(frames)
}
