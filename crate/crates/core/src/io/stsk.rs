use serde::Serialize;

use super::{pack_bits, unpack_bits, Reader};
use crate::clifford::CliffordTableau;
use crate::error::{Error, Result};
use crate::sketch::{CompressedRepresentation, StabilizerSketch, MAX_PRECISION_BITS};

pub const STSK_MAGIC: &[u8; 4] = b"STSK";
pub const STSK_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 2 + 2 + 2 + 1 + 8 + 8 + 8;

/// Fixed-size file header.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StskHeader {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub precision_bits: u8,
    pub epsilon: f64,
    pub p: f64,
    pub seed: u64,
}

fn value_bytes(precision_bits: u8) -> usize {
    (precision_bits as usize).div_ceil(8)
}

fn record_len(n: usize, k: usize, precision_bits: u8) -> usize {
    (4 * n * n).div_ceil(8) + (2 * n).div_ceil(8) + (2usize << k) * value_bytes(precision_bits)
}

/// Exact encoded size for the given parameters.
pub fn encoded_len(n: usize, k: usize, l: usize, precision_bits: u8) -> usize {
    HEADER_LEN + 2 * l * record_len(n, k, precision_bits)
}

/// Header fields, then per sketch: the `2n x 2n` symplectic matrix row-major (x bits then
/// z bits per row, LSB-first, padded to a byte), `2n` sign bits (padded), and `2^k`
/// `(re, im)` fixed-point pairs in `ceil(b/8)`-byte two's complement.
pub fn encode_compressed(d: &CompressedRepresentation) -> Vec<u8> {
    let (n, k, b) = (d.num_qubits(), d.k(), d.precision_bits());
    let mut out = Vec::with_capacity(encoded_len(n, k, d.l(), b));
    out.extend_from_slice(STSK_MAGIC);
    out.extend_from_slice(&STSK_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u16).to_le_bytes());
    out.extend_from_slice(&(k as u16).to_le_bytes());
    out.extend_from_slice(&(d.l() as u16).to_le_bytes());
    out.push(b);
    out.extend_from_slice(&d.epsilon().to_le_bytes());
    out.extend_from_slice(&d.p().to_le_bytes());
    out.extend_from_slice(&d.seed().to_le_bytes());
    let width = value_bytes(b);
    for s in d.sketches() {
        let t = s.tableau();
        pack_bits(t.symplectic_matrix().into_iter().flatten(), &mut out);
        pack_bits(t.phase_bits(), &mut out);
        for &v in s.quantized() {
            out.extend_from_slice(&v.to_le_bytes()[..width]);
        }
    }
    out
}

fn read_header(r: &mut Reader<'_>) -> Result<StskHeader> {
    r.magic(STSK_MAGIC)?;
    r.version(STSK_VERSION)?;
    let n = r.u16()? as usize;
    let k = r.u16()? as usize;
    let l = r.u16()? as usize;
    let precision_bits = r.u8()?;
    let epsilon = r.f64()?;
    let p = r.f64()?;
    let seed = r.u64()?;
    if n == 0 || k > n {
        return Err(Error::Format(format!("invalid n = {n}, k = {k}")));
    }
    if k >= usize::BITS as usize - 2 {
        return Err(Error::Format(format!("k = {k} too large")));
    }
    if l.is_multiple_of(2) {
        return Err(Error::Format(format!("L = {l} must be odd")));
    }
    if !(2..=MAX_PRECISION_BITS).contains(&precision_bits) {
        return Err(Error::Format(format!("precision_bits {precision_bits} unsupported")));
    }
    Ok(StskHeader {
        n,
        k,
        l,
        precision_bits,
        epsilon,
        p,
        seed,
    })
}

pub fn decode_header(bytes: &[u8]) -> Result<StskHeader> {
    read_header(&mut Reader::new(bytes))
}

/// Decodes and validates every sketch (symplectic tableau, value ranges, lengths).
pub fn decode_compressed(bytes: &[u8]) -> Result<CompressedRepresentation> {
    let mut r = Reader::new(bytes);
    let h = read_header(&mut r)?;
    let expected = encoded_len(h.n, h.k, h.l, h.precision_bits);
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "expected {expected} bytes for this header, found {}",
            bytes.len()
        )));
    }
    let (n, width) = (h.n, value_bytes(h.precision_bits));
    let mut sketches = Vec::with_capacity(2 * h.l);
    for _ in 0..2 * h.l {
        let bits = unpack_bits(r.take((4 * n * n).div_ceil(8))?, 4 * n * n)?;
        let matrix: Vec<Vec<bool>> = bits.chunks(2 * n).map(<[bool]>::to_vec).collect();
        let signs = unpack_bits(r.take((2 * n).div_ceil(8))?, 2 * n)?;
        let tableau = CliffordTableau::from_bits(n, &matrix, &signs)?;
        let mut values = Vec::with_capacity(2 << h.k);
        for _ in 0..2usize << h.k {
            let raw = r.take(width)?;
            let mut buf = if raw[width - 1] & 0x80 != 0 { [0xffu8; 8] } else { [0u8; 8] };
            buf[..width].copy_from_slice(raw);
            values.push(i64::from_le_bytes(buf));
        }
        sketches.push(StabilizerSketch::from_parts(h.k, tableau, h.precision_bits, values)?);
    }
    r.finish()?;
    CompressedRepresentation::from_parts(h.epsilon, h.p, h.seed, sketches)
}
