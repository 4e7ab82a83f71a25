//! Binary and text codecs. Multi-byte integers are little-endian; floats are IEEE-754
//! binary64.

mod obsm;
mod stsk;
mod svec;

pub use obsm::{decode_observable, encode_observable, OBSM_MAGIC, OBSM_VERSION};
pub use stsk::{
    decode_compressed, decode_header, encode_compressed, encoded_len, StskHeader, STSK_MAGIC,
    STSK_VERSION,
};
pub use svec::{decode_state, encode_state, read_state_csv, SVEC_MAGIC, SVEC_VERSION};

use crate::error::{Error, Result};

/// Cursor over a byte slice that reports truncation as a format error.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                Error::Format(format!(
                    "truncated input: need {len} bytes at offset {}, have {}",
                    self.pos,
                    self.bytes.len() - self.pos
                ))
            })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub(crate) fn magic(&mut self, magic: &[u8; 4]) -> Result<()> {
        let got = self.take(4)?;
        if got != magic {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(got),
                String::from_utf8_lossy(magic)
            )));
        }
        Ok(())
    }

    pub(crate) fn version(&mut self, expected: u16) -> Result<()> {
        let found = self.u16()?;
        if found != expected {
            return Err(Error::Version { expected, found });
        }
        Ok(())
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub(crate) fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                self.bytes.len() - self.pos
            )));
        }
        Ok(())
    }
}

/// Packs bits LSB-first within each byte.
pub(crate) fn pack_bits(bits: impl IntoIterator<Item = bool>, out: &mut Vec<u8>) {
    let mut byte = 0u8;
    let mut filled = 0;
    for b in bits {
        byte |= u8::from(b) << filled;
        filled += 1;
        if filled == 8 {
            out.push(byte);
            byte = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        out.push(byte);
    }
}

pub(crate) fn unpack_bits(bytes: &[u8], count: usize) -> Result<Vec<bool>> {
    let bits: Vec<bool> = (0..count).map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1).collect();
    let used = count % 8;
    if used != 0 && bytes[count / 8] >> used != 0 {
        return Err(Error::Format("nonzero padding bits".into()));
    }
    Ok(bits)
}
