//! Vector-in-subspace instances from 1/4-partial matching, and a one-way protocol run
//! through the serialized compressed representation.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::estimator::estimate;
use crate::io::{decode_compressed, encode_compressed};
use crate::sketch::{compress, CompressParams, DEFAULT_PRECISION_BITS};
use crate::statevector::{
    expectation_dense, DenseObservable, Observable, StateVector, MAX_DENSE_OBSERVABLE_QUBITS,
};

/// Bob's decision threshold on the estimate.
pub const THRESHOLD: f64 = 0.5;

/// Alice holds `x`; Bob holds the matching and `w`. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingInstance {
    pub n: usize,
    pub x: Vec<bool>,
    pub matching: Vec<(usize, usize)>,
    pub w: Vec<bool>,
    pub b: bool,
}

impl MatchingInstance {
    pub fn big_n(&self) -> usize {
        1 << self.n
    }

    /// Sizes, index range, disjointness and the promise `w_k ^ x_i ^ x_j = b`.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > 30 {
            return Err(invalid(format!("n = {} outside [2, 30]", self.n)));
        }
        let big_n = self.big_n();
        if self.x.len() != big_n || self.matching.len() != big_n / 4 || self.w.len() != big_n / 4 {
            return Err(invalid("instance lengths do not match N = 2^n"));
        }
        let mut seen = vec![false; big_n];
        for &(i, j) in &self.matching {
            for idx in [i, j] {
                if idx >= big_n || seen[idx] {
                    return Err(invalid(format!("matching index {idx} repeated or out of range")));
                }
                seen[idx] = true;
            }
        }
        for (kk, &(i, j)) in self.matching.iter().enumerate() {
            if self.w[kk] ^ self.x[i] ^ self.x[j] != self.b {
                return Err(invalid(format!("promise violated at pair {kk}")));
            }
        }
        Ok(())
    }
}

/// Uniform `x` and matching; `w` follows from `b`.
pub fn random_matching_instance<R: Rng + ?Sized>(n: usize, b: bool, rng: &mut R) -> Result<MatchingInstance> {
    if !(2..=30).contains(&n) {
        return Err(invalid(format!("n = {n} outside [2, 30]")));
    }
    let big_n = 1usize << n;
    let x: Vec<bool> = (0..big_n).map(|_| rng.random()).collect();
    let mut perm: Vec<usize> = (0..big_n).collect();
    perm.shuffle(rng);
    let matching: Vec<(usize, usize)> = perm[..big_n / 2].chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let w = matching.iter().map(|&(i, j)| b ^ x[i] ^ x[j]).collect();
    Ok(MatchingInstance {
        n,
        x,
        matching,
        w,
        b,
    })
}

/// Alice's state, Bob's projector and the exact expectation.
#[derive(Clone, Debug, PartialEq)]
pub struct VspInstance {
    pub psi: StateVector,
    pub pi: DenseObservable,
    pub truth: f64,
}

/// `psi = N^{-1/2} sum_i (-1)^{x_i} |i>` and
/// `Pi = P + sum_k (|i_k> - (-1)^{w_k}|j_k>)(<i_k| - (-1)^{w_k}<j_k|) / 2`, with `P` the
/// projector onto the lexicographically first `N/4` unmatched basis vectors.
pub fn build_reduction(inst: &MatchingInstance) -> Result<VspInstance> {
    inst.validate()?;
    let n = inst.n;
    if n > MAX_DENSE_OBSERVABLE_QUBITS {
        return Err(crate::Error::TooLarge {
            what: "dense observable",
            n,
            limit: MAX_DENSE_OBSERVABLE_QUBITS,
        });
    }
    let big_n = inst.big_n();
    let amp = 1.0 / (big_n as f64).sqrt();
    let psi = StateVector::from_amplitudes(
        n,
        inst.x
            .iter()
            .map(|&xi| Complex64::new(if xi { -amp } else { amp }, 0.0))
            .collect(),
    )?;
    let mut pi = vec![Complex64::new(0.0, 0.0); big_n * big_n];
    let mut matched = vec![false; big_n];
    for (&(i, j), &wk) in inst.matching.iter().zip(&inst.w) {
        matched[i] = true;
        matched[j] = true;
        let s = if wk { -1.0 } else { 1.0 };
        pi[i * big_n + i] += 0.5;
        pi[j * big_n + j] += 0.5;
        pi[i * big_n + j] -= 0.5 * s;
        pi[j * big_n + i] -= 0.5 * s;
    }
    for idx in (0..big_n).filter(|&i| !matched[i]).take(big_n / 4) {
        pi[idx * big_n + idx] = Complex64::new(1.0, 0.0);
    }
    let pi = DenseObservable::from_matrix_unchecked(n, (big_n / 2) as u64, pi)?;
    let truth = expectation_dense(&psi, &Observable::Dense(pi.clone()))?;
    Ok(VspInstance { psi, pi, truth })
}

/// One protocol run: Bob's bit, his estimate, and the bytes Alice sent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolOutcome {
    pub bit: bool,
    pub estimate: f64,
    pub bytes: usize,
}

/// Alice compresses with `r = 2^n` and serializes; Bob decodes, estimates `<psi|Pi|psi>`
/// and outputs `E >= 1/2`.
pub fn run_protocol(v: &VspInstance, epsilon: f64, p: f64, seed: u64) -> Result<ProtocolOutcome> {
    let n = v.psi.num_qubits();
    let params = CompressParams {
        epsilon,
        p,
        rank: 1u64 << n,
        precision_bits: DEFAULT_PRECISION_BITS,
    };
    let bytes = encode_compressed(&compress(&v.psi, &params, seed)?);
    let received = decode_compressed(&bytes)?;
    let result = estimate(&received, &Observable::Dense(v.pi.clone()))?;
    Ok(ProtocolOutcome {
        bit: result.estimate >= THRESHOLD,
        estimate: result.estimate,
        bytes: bytes.len(),
    })
}
