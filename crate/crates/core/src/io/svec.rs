use num_complex::Complex64;

use super::Reader;
use crate::error::{Error, Result};
use crate::statevector::{StateVector, MAX_STATE_QUBITS};

pub const SVEC_MAGIC: &[u8; 4] = b"SVEC";
pub const SVEC_VERSION: u16 = 1;

pub fn encode_state(state: &StateVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 16 * state.dim());
    out.extend_from_slice(SVEC_MAGIC);
    out.extend_from_slice(&SVEC_VERSION.to_le_bytes());
    out.extend_from_slice(&(state.num_qubits() as u16).to_le_bytes());
    for a in state.amplitudes() {
        out.extend_from_slice(&a.re.to_le_bytes());
        out.extend_from_slice(&a.im.to_le_bytes());
    }
    out
}

/// Decodes and checks unit norm.
pub fn decode_state(bytes: &[u8]) -> Result<StateVector> {
    let mut r = Reader::new(bytes);
    r.magic(SVEC_MAGIC)?;
    r.version(SVEC_VERSION)?;
    let n = r.u16()? as usize;
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooLarge {
            what: "state vector",
            n,
            limit: MAX_STATE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut amps = Vec::with_capacity(dim);
    for _ in 0..dim {
        let re = r.f64()?;
        let im = r.f64()?;
        amps.push(Complex64::new(re, im));
    }
    r.finish()?;
    StateVector::from_amplitudes(n, amps)
}

/// Lines `index,re,im`; an optional header line and unlisted indices (zero) are
/// allowed. The result is normalized.
pub fn read_state_csv(text: &str, n: usize) -> Result<StateVector> {
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooLarge {
            what: "state vector",
            n,
            limit: MAX_STATE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse_err = |msg: String| Error::Parse {
            line: lineno + 1,
            msg,
        };
        if fields.len() != 3 {
            return Err(parse_err(format!("expected 3 fields, found {}", fields.len())));
        }
        let Ok(index) = fields[0].parse::<usize>() else {
            if lineno == 0 {
                continue;
            }
            return Err(parse_err(format!("bad index {:?}", fields[0])));
        };
        if index >= dim {
            return Err(parse_err(format!("index {index} out of range for n = {n}")));
        }
        let re: f64 = fields[1].parse().map_err(|e| parse_err(format!("{e}")))?;
        let im: f64 = fields[2].parse().map_err(|e| parse_err(format!("{e}")))?;
        amps[index] = Complex64::new(re, im);
    }
    StateVector::normalized(n, amps)
}
