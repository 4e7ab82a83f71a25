use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use super::tableau::CliffordTableau;
use crate::error::{Error, Result};

/// Elementary Clifford gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Cx(usize, usize),
}

impl Gate {
    fn max_qubit(&self) -> usize {
        match *self {
            Gate::H(q) | Gate::S(q) => q,
            Gate::Cx(c, t) => c.max(t),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Cx(c, t) => write!(f, "CX {c} {t}"),
        }
    }
}

/// Time-ordered list of H, S and CNOT gates on `n` qubits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GateCircuit {
    n: usize,
    gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let q = gate.max_qubit();
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        if let Gate::Cx(c, t) = gate {
            if c == t {
                return Err(Error::InvalidArgument(format!("CX with control = target = {c}")));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Circuit applying `self` and then `next`.
    pub fn then(&self, next: &GateCircuit) -> Result<GateCircuit> {
        if next.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: next.n,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&next.gates);
        Ok(GateCircuit { n: self.n, gates })
    }

    /// Circuit for the inverse unitary (`S^dagger` is emitted as three `S` gates).
    pub fn inverse(&self) -> GateCircuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for &g in self.gates.iter().rev() {
            match g {
                Gate::S(q) => gates.extend([Gate::S(q); 3]),
                other => gates.push(other),
            }
        }
        GateCircuit { n: self.n, gates }
    }

    /// Replays the gates on the identity tableau.
    pub fn to_tableau(&self) -> CliffordTableau {
        let mut t = CliffordTableau::identity(self.n);
        for &g in &self.gates {
            match g {
                Gate::H(q) => t.apply_h(q),
                Gate::S(q) => t.apply_s(q),
                Gate::Cx(c, tg) => t.apply_cx(c, tg),
            }
        }
        t
    }

    /// Applies the circuit in place to `2^n` amplitudes. Qubit 0 is the most significant
    /// bit of the basis index.
    pub fn apply_to_amplitudes(&self, amps: &mut [Complex64]) -> Result<()> {
        if amps.len() != 1usize << self.n {
            return Err(Error::DimensionMismatch {
                expected: 1usize << self.n,
                found: amps.len(),
            });
        }
        for &g in &self.gates {
            apply_gate(self.n, g, amps);
        }
        Ok(())
    }

    /// Dense `2^n x 2^n` unitary (row-major), for small `n`.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let dim = 1usize << self.n;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        for j in 0..dim {
            col.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            col[j] = Complex64::new(1.0, 0.0);
            self.apply_to_amplitudes(&mut col).expect("dimension checked");
            for i in 0..dim {
                m[i * dim + j] = col[i];
            }
        }
        m
    }

    /// One gate per line: `H q`, `S q`, `CX c t`. A leading `n=<int>` line is optional
    /// when `n` is supplied by the caller.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str, n: Option<usize>) -> Result<Self> {
        let mut n = n;
        let mut gates = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            if let Some(v) = l.strip_prefix("n=") {
                let parsed: usize = v.trim().parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad qubit count {v:?}"),
                })?;
                if let Some(prev) = n {
                    if prev != parsed {
                        return Err(Error::DimensionMismatch {
                            expected: prev,
                            found: parsed,
                        });
                    }
                }
                n = Some(parsed);
                continue;
            }
            let parts: Vec<&str> = l.split_whitespace().collect();
            let idx = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad qubit index {s:?}"),
                })
            };
            let gate = match parts.as_slice() {
                ["H", q] => Gate::H(idx(q)?),
                ["S", q] => Gate::S(idx(q)?),
                ["CX", c, t] => Gate::Cx(idx(c)?, idx(t)?),
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unrecognized gate {l:?}"),
                    })
                }
            };
            gates.push(gate);
        }
        let n = n.ok_or(Error::Parse {
            line: 1,
            msg: "qubit count not given".into(),
        })?;
        Self::from_gates(n, gates)
    }
}

const PAR_THRESHOLD: usize = 1 << 14;

fn apply_gate(n: usize, gate: Gate, amps: &mut [Complex64]) {
    match gate {
        Gate::H(q) => {
            let stride = 1usize << (n - 1 - q);
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let kernel = |block: &mut [Complex64]| {
                let (lo, hi) = block.split_at_mut(stride);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (u, v) = (*a, *b);
                    *a = (u + v) * h;
                    *b = (u - v) * h;
                }
            };
            if amps.len() >= PAR_THRESHOLD {
                amps.par_chunks_mut(2 * stride).for_each(kernel);
            } else {
                amps.chunks_mut(2 * stride).for_each(kernel);
            }
        }
        Gate::S(q) => {
            let stride = 1usize << (n - 1 - q);
            let kernel = |block: &mut [Complex64]| {
                for a in &mut block[stride..] {
                    *a = Complex64::new(-a.im, a.re);
                }
            };
            if amps.len() >= PAR_THRESHOLD {
                amps.par_chunks_mut(2 * stride).for_each(kernel);
            } else {
                amps.chunks_mut(2 * stride).for_each(kernel);
            }
        }
        Gate::Cx(c, t) => {
            let cmask = 1usize << (n - 1 - c);
            let tmask = 1usize << (n - 1 - t);
            // Swap pairs (i, i | tmask) for every i with the control set and target clear.
            for i in 0..amps.len() {
                if i & cmask != 0 && i & tmask == 0 {
                    amps.swap(i, i | tmask);
                }
            }
        }
    }
}
