use thiserror::Error;

/// Reading ran past the last byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("unexpected end of bitstream at bit {bit}")]
pub struct EndOfStream {
    pub bit: usize,
}

/// MSB-first bit writer over a growable buffer.
#[derive(Debug, Default, Clone)]
pub struct BitSink {
    buf: Vec<u8>,
    // Bits already used in the last byte of `buf`; 0 means byte-aligned.
    used: u8,
}

impl BitSink {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total bits written so far.
    pub fn bit_len(&self) -> usize {
        if self.used == 0 {
            self.buf.len() * 8
        } else {
            (self.buf.len() - 1) * 8 + self.used as usize
        }
    }

    #[inline]
    pub fn put_bit(&mut self, bit: bool) {
        if self.used == 0 {
            self.buf.push(0);
        }
        if bit {
            *self.buf.last_mut().unwrap() |= 0x80 >> self.used;
        }
        self.used = (self.used + 1) & 7;
    }

    /// Writes the low `count` bits of `value`, most significant first.
    pub fn put_bits(&mut self, value: u32, count: u32) {
        debug_assert!(count <= 32);
        for i in (0..count).rev() {
            self.put_bit((value >> i) & 1 == 1);
        }
    }

    /// Writes `count` one bits.
    pub fn put_ones(&mut self, count: u32) {
        for _ in 0..count {
            self.put_bit(true);
        }
    }

    /// Pads with zero bits up to the next byte boundary. Padding bits are
    /// already zero in the buffer, so only the position moves.
    pub fn align_to_byte(&mut self) {
        self.used = 0;
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.buf
    }

    /// Byte-aligns and returns the buffer.
    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

/// MSB-first bit reader over a byte slice.
#[derive(Debug, Clone)]
pub struct BitSource<'a> {
    bytes: &'a [u8],
    cursor: usize,
}

impl<'a> BitSource<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, cursor: 0 }
    }

    /// Absolute bit index of the next read.
    pub fn position(&self) -> usize {
        self.cursor
    }

    pub fn remaining(&self) -> usize {
        self.bytes.len() * 8 - self.cursor
    }

    #[inline]
    pub fn get_bit(&mut self) -> Result<bool, EndOfStream> {
        let byte = *self
            .bytes
            .get(self.cursor >> 3)
            .ok_or(EndOfStream { bit: self.cursor })?;
        let bit = (byte >> (7 - (self.cursor & 7))) & 1 == 1;
        self.cursor += 1;
        Ok(bit)
    }

    pub fn get_bits(&mut self, count: u32) -> Result<u32, EndOfStream> {
        debug_assert!(count <= 32);
        if self.remaining() < count as usize {
            return Err(EndOfStream {
                bit: self.bytes.len() * 8,
            });
        }
        let mut v = 0u32;
        for _ in 0..count {
            v = (v << 1) | self.get_bit()? as u32;
        }
        Ok(v)
    }

    pub fn align_to_byte(&mut self) {
        self.cursor = (self.cursor + 7) & !7;
    }
}
