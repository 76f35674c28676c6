use super::bits::{BitSink, BitSource, EndOfStream};

/// Largest Rice parameter `select_k` will return.
pub const MAX_K: u32 = 15;
/// A unary prefix of this many ones introduces a raw escape value.
pub const ESCAPE_QUOTIENT: u32 = 24;
/// Width of the raw value following the escape prefix.
pub const ESCAPE_RAW_BITS: u32 = 16;
/// Context counters are halved when the count reaches this value.
pub const RESET_THRESHOLD: u32 = 64;

/// Folds signed values onto the non-negative integers: 0, -1, 1, -2, 2 -> 0, 1, 2, 3, 4.
#[inline]
pub fn zigzag_map(v: i32) -> u32 {
    ((v << 1) ^ (v >> 31)) as u32
}

#[inline]
pub fn zigzag_unmap(u: u32) -> i32 {
    ((u >> 1) as i32) ^ -((u & 1) as i32)
}

/// Running statistics that drive the Rice parameter: sample count and magnitude sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RiceContext {
    count: u32,
    sum: u32,
}

impl Default for RiceContext {
    fn default() -> Self {
        Self { count: 1, sum: 0 }
    }
}

impl RiceContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a context from raw counters. `count` is clamped to at least 1.
    pub fn from_parts(count: u32, sum: u32) -> Self {
        Self {
            count: count.max(1),
            sum,
        }
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn sum(&self) -> u32 {
        self.sum
    }

    /// Smallest `k` with `count * 2^k >= sum`, capped at [`MAX_K`].
    pub fn select_k(&self) -> u32 {
        let n = self.count as u64;
        let a = self.sum as u64;
        let mut k = 0;
        while k < MAX_K && (n << k) < a {
            k += 1;
        }
        k
    }

    pub fn update(&mut self, u: u32) {
        self.sum = self.sum.saturating_add(u);
        self.count += 1;
        if self.count >= RESET_THRESHOLD {
            self.count = (self.count / 2).max(1);
            self.sum /= 2;
        }
    }

    /// Codes `u` with the current parameter, then adapts. Returns bits written.
    pub fn encode(&mut self, sink: &mut BitSink, u: u32) -> u32 {
        let n = rice_encode(sink, u, self.select_k());
        self.update(u);
        n
    }

    pub fn decode(&mut self, src: &mut BitSource<'_>) -> Result<u32, EndOfStream> {
        let u = rice_decode(src, self.select_k())?;
        self.update(u);
        Ok(u)
    }
}

/// Writes the Golomb-Rice codeword of `u` with parameter `k`: `u >> k` ones,
/// a zero, then the `k` low bits. Quotients of [`ESCAPE_QUOTIENT`] or more are
/// written as that many ones followed by `u` in 16 raw bits.
pub fn rice_encode(sink: &mut BitSink, u: u32, k: u32) -> u32 {
    debug_assert!(k <= MAX_K);
    let q = u >> k;
    if q >= ESCAPE_QUOTIENT {
        debug_assert!(u < 1 << ESCAPE_RAW_BITS, "escape value {u} exceeds 16 bits");
        sink.put_ones(ESCAPE_QUOTIENT);
        sink.put_bits(u, ESCAPE_RAW_BITS);
        return ESCAPE_QUOTIENT + ESCAPE_RAW_BITS;
    }
    sink.put_ones(q);
    sink.put_bit(false);
    sink.put_bits(u & ((1 << k) - 1), k);
    q + 1 + k
}

pub fn rice_decode(src: &mut BitSource<'_>, k: u32) -> Result<u32, EndOfStream> {
    let mut q = 0;
    while q < ESCAPE_QUOTIENT && src.get_bit()? {
        q += 1;
    }
    if q == ESCAPE_QUOTIENT {
        return src.get_bits(ESCAPE_RAW_BITS);
    }
    Ok((q << k) | src.get_bits(k)?)
}
