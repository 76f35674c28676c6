//! Bit-level I/O and adaptive Golomb-Rice coding.

mod bits;
mod rice;

pub use bits::{BitSink, BitSource, EndOfStream};
pub use rice::{
    rice_decode, rice_encode, zigzag_map, zigzag_unmap, RiceContext, ESCAPE_QUOTIENT,
    ESCAPE_RAW_BITS, MAX_K, RESET_THRESHOLD,
};
