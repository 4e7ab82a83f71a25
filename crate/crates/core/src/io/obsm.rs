use num_complex::Complex64;

use super::Reader;
use crate::error::{Error, Result};
use crate::statevector::{DenseObservable, MAX_DENSE_OBSERVABLE_QUBITS};

pub const OBSM_MAGIC: &[u8; 4] = b"OBSM";
pub const OBSM_VERSION: u16 = 1;

/// Magic, version u16, n u16, declared rank bound u64, row-major `(re, im)` f64 pairs.
pub fn encode_observable(m: &DenseObservable) -> Result<Vec<u8>> {
    let entries = m.to_full_matrix()?;
    let mut out = Vec::with_capacity(16 + 16 * entries.len());
    out.extend_from_slice(OBSM_MAGIC);
    out.extend_from_slice(&OBSM_VERSION.to_le_bytes());
    out.extend_from_slice(&(m.num_qubits() as u16).to_le_bytes());
    out.extend_from_slice(&m.rank_bound().to_le_bytes());
    for e in entries {
        out.extend_from_slice(&e.re.to_le_bytes());
        out.extend_from_slice(&e.im.to_le_bytes());
    }
    Ok(out)
}

/// Decodes and validates Hermiticity and norm.
pub fn decode_observable(bytes: &[u8]) -> Result<DenseObservable> {
    let mut r = Reader::new(bytes);
    r.magic(OBSM_MAGIC)?;
    r.version(OBSM_VERSION)?;
    let n = r.u16()? as usize;
    let rank = r.u64()?;
    if n > MAX_DENSE_OBSERVABLE_QUBITS {
        return Err(Error::TooLarge {
            what: "dense observable",
            n,
            limit: MAX_DENSE_OBSERVABLE_QUBITS,
        });
    }
    let len = 1usize << (2 * n);
    let mut entries = Vec::with_capacity(len);
    for _ in 0..len {
        let re = r.f64()?;
        let im = r.f64()?;
        entries.push(Complex64::new(re, im));
    }
    r.finish()?;
    DenseObservable::from_matrix(n, rank, entries)
}
