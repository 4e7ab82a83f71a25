use std::fmt;

use crate::error::{Error, Result};

/// Packed bit string used for the x and z parts of Pauli operators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn xor_assign(&mut self, other: &BitString) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

/// An n-qubit Pauli operator `i^phase * prod_j sigma_j`, where the per-qubit factor is
/// I, X, Y or Z according to the bits `(x_j, z_j)`. Under this convention the operator
/// is Hermitian exactly when `phase` is even.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    x: BitString,
    z: BitString,
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitString::zeros(n),
            z: BitString::zeros(n),
            phase: 0,
        }
    }

    pub fn new(x: BitString, z: BitString, phase: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(Self {
            x,
            z,
            phase: phase & 3,
        })
    }

    /// Single-qubit X on `q`.
    pub fn x_on(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.x.set(q, true);
        p
    }

    /// Single-qubit Z on `q`.
    pub fn z_on(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.z.set(q, true);
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitString {
        &self.x
    }

    pub fn z_bits(&self) -> &BitString {
        &self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    pub fn x(&self, q: usize) -> bool {
        self.x.get(q)
    }

    pub fn z(&self, q: usize) -> bool {
        self.z.get(q)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// True when the operator carries a minus sign (phase 2).
    pub fn is_negative(&self) -> bool {
        self.phase == 2
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub(crate) fn add_phase(&mut self, delta: u8) {
        self.phase = (self.phase + delta) & 3;
    }

    pub fn weight(&self) -> usize {
        (0..self.num_qubits())
            .filter(|&q| self.x(q) || self.z(q))
            .count()
    }

    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        let mut parity = 0u32;
        for i in 0..self.x.words().len() {
            let a = (self.x.words()[i] & other.z.words()[i]) ^ (self.z.words()[i] & other.x.words()[i]);
            parity ^= a.count_ones() & 1;
        }
        parity == 0
    }

    /// Operator product `self * rhs` with exact phase.
    pub fn mul(&self, rhs: &PauliOperator) -> PauliOperator {
        assert_eq!(self.num_qubits(), rhs.num_qubits(), "qubit count mismatch");
        let mut plus = 0u32;
        let mut minus = 0u32;
        for i in 0..self.x.words().len() {
            let (x1, z1) = (self.x.words()[i], self.z.words()[i]);
            let (x2, z2) = (rhs.x.words()[i], rhs.z.words()[i]);
            let y1 = x1 & z1;
            let xo1 = x1 & !z1;
            let zo1 = !x1 & z1;
            let y2 = x2 & z2;
            let xo2 = x2 & !z2;
            let zo2 = !x2 & z2;
            // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
            plus += ((y1 & zo2) | (xo1 & y2) | (zo1 & xo2)).count_ones();
            minus += ((y1 & xo2) | (xo1 & zo2) | (zo1 & y2)).count_ones();
        }
        let mut x = self.x.clone();
        x.xor_assign(&rhs.x);
        let mut z = self.z.clone();
        z.xor_assign(&rhs.z);
        let phase = (self.phase as u32 + rhs.phase as u32 + plus + 3 * minus) & 3;
        PauliOperator {
            x,
            z,
            phase: phase as u8,
        }
    }

    /// Conjugation `H P H` on qubit `q`.
    pub(crate) fn conjugate_h(&mut self, q: usize) {
        let (x, z) = (self.x(q), self.z(q));
        if x && z {
            self.add_phase(2);
        }
        self.x.set(q, z);
        self.z.set(q, x);
    }

    /// Conjugation `S P S^dagger` on qubit `q`.
    pub(crate) fn conjugate_s(&mut self, q: usize) {
        let (x, z) = (self.x(q), self.z(q));
        if x && z {
            self.add_phase(2);
        }
        self.z.set(q, z ^ x);
    }

    /// Conjugation by CNOT with control `c` and target `t`.
    pub(crate) fn conjugate_cx(&mut self, c: usize, t: usize) {
        let (xc, zc, xt, zt) = (self.x(c), self.z(c), self.x(t), self.z(t));
        if xc && zt && (xt == zc) {
            self.add_phase(2);
        }
        self.x.set(t, xt ^ xc);
        self.z.set(c, zc ^ zt);
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}")?;
        for q in 0..self.num_qubits() {
            let c = match (self.x(q), self.z(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else {
            (0, s)
        };
        let mut p = PauliOperator::identity(body.len());
        p.phase = phase;
        for (q, c) in body.chars().enumerate() {
            let (x, z) = match c {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                other => return Err(Error::Format(format!("bad Pauli letter {other:?}"))),
            };
            p.x.set(q, x);
            p.z.set(q, z);
        }
        Ok(p)
    }
}
