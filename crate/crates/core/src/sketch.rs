//! Random stabilizer sketches and the compressed representation built from them.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::clifford::{random_clifford, synthesize_circuit, CliffordTableau, GateCircuit};
use crate::error::{invalid, Error, Result};
use crate::estimator::failure_bound;
use crate::statevector::{StateVector, NORM_TOLERANCE};

pub const DEFAULT_PRECISION_BITS: u8 = 24;
/// Quantized values are exact in an `f64` up to this width.
pub const MAX_PRECISION_BITS: u8 = 53;
pub const MIN_PRECISION_BITS: u8 = 2;

/// Largest `L` that `choose_L` will return.
const MAX_PAIRS: usize = 32_767;

fn check_precision(bits: u8) -> Result<()> {
    if !(MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&bits) {
        return Err(invalid(format!(
            "precision_bits {bits} outside [{MIN_PRECISION_BITS}, {MAX_PRECISION_BITS}]"
        )));
    }
    Ok(())
}

/// Largest representable quantized magnitude, `2^{b-1} - 1`.
pub fn quantization_limit(precision_bits: u8) -> i64 {
    (1i64 << (precision_bits - 1)) - 1
}

/// Fixed point with scale `2^{b-1}`, saturating at `±(2^{b-1} - 1)`.
pub fn quantize(x: f64, precision_bits: u8) -> i64 {
    let scale = (1u64 << (precision_bits - 1)) as f64;
    let limit = quantization_limit(precision_bits);
    let q = (x * scale).round();
    if q.is_nan() {
        0
    } else {
        (q as i64).clamp(-limit, limit)
    }
}

pub fn dequantize(q: i64, precision_bits: u8) -> f64 {
    q as f64 / (1u64 << (precision_bits - 1)) as f64
}

/// One Clifford and the `2^k` quantized amplitudes `<0^{n-k} z|C|psi>`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerSketch {
    n: usize,
    k: usize,
    tableau: CliffordTableau,
    circuit: GateCircuit,
    precision_bits: u8,
    /// Interleaved `(re, im)` pairs.
    values: Vec<i64>,
}

impl StabilizerSketch {
    /// Assembles a sketch from stored parts, resynthesizing the circuit.
    pub fn from_parts(
        k: usize,
        tableau: CliffordTableau,
        precision_bits: u8,
        values: Vec<i64>,
    ) -> Result<Self> {
        check_precision(precision_bits)?;
        let n = tableau.num_qubits();
        if k > n {
            return Err(invalid(format!("k = {k} exceeds n = {n}")));
        }
        if values.len() != 2usize << k {
            return Err(Error::DimensionMismatch {
                expected: 2usize << k,
                found: values.len(),
            });
        }
        let limit = quantization_limit(precision_bits);
        if values.iter().any(|v| v.abs() > limit) {
            return Err(invalid("quantized amplitude outside the precision range"));
        }
        let circuit = synthesize_circuit(&tableau)?;
        Ok(Self {
            n,
            k,
            tableau,
            circuit,
            precision_bits,
            values,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tableau(&self) -> &CliffordTableau {
        &self.tableau
    }

    /// The circuit fixing the global phase of `C`.
    pub fn circuit(&self) -> &GateCircuit {
        &self.circuit
    }

    pub fn precision_bits(&self) -> u8 {
        self.precision_bits
    }

    /// Raw fixed-point values, `(re, im)` interleaved.
    pub fn quantized(&self) -> &[i64] {
        &self.values
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.values
            .chunks_exact(2)
            .map(|c| {
                Complex64::new(
                    dequantize(c[0], self.precision_bits),
                    dequantize(c[1], self.precision_bits),
                )
            })
            .collect()
    }
}

/// Sketch of `state` under the Clifford `c` keeping `2^k` amplitudes.
pub fn make_sketch(
    state: &StateVector,
    c: &CliffordTableau,
    k: usize,
    precision_bits: u8,
) -> Result<StabilizerSketch> {
    check_precision(precision_bits)?;
    let n = state.num_qubits();
    if c.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.num_qubits(),
        });
    }
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    if (state.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
        return Err(invalid("state is not normalized"));
    }
    let circuit = synthesize_circuit(c)?;
    let mut amps = state.amplitudes().to_vec();
    circuit.apply_to_amplitudes(&mut amps)?;
    let values = amps[..1usize << k]
        .iter()
        .flat_map(|a| [quantize(a.re, precision_bits), quantize(a.im, precision_bits)])
        .collect();
    Ok(StabilizerSketch {
        n,
        k,
        tableau: c.clone(),
        circuit,
        precision_bits,
        values,
    })
}

/// `min(n, largest k with 2^k <= 24 max(eps^-2, sqrt(r)/eps))`.
pub fn choose_k(n: usize, r: u64, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if n == 0 || n > 63 {
        return Err(invalid(format!("n = {n} outside [1, 63]")));
    }
    if r == 0 || r > 1u64 << n {
        return Err(invalid(format!("rank {r} outside [1, 2^{n}]")));
    }
    let bound = 24.0 * (epsilon.powi(-2)).max((r as f64).sqrt() / epsilon);
    let mut k = bound.log2().floor() as i64;
    while 2f64.powi(k as i32 + 1) <= bound {
        k += 1;
    }
    while k > 0 && 2f64.powi(k as i32) > bound {
        k -= 1;
    }
    Ok((k.max(0) as usize).min(n))
}

/// Smallest odd `L` whose exact median failure bound is at most `p`.
#[allow(non_snake_case)]
pub fn choose_L(p: f64) -> Result<usize> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("p = {p} outside (0, 1)")));
    }
    let mut l = 1;
    while l <= MAX_PAIRS {
        if failure_bound(l)? <= p {
            return Ok(l);
        }
        l += 2;
    }
    Err(invalid(format!("p = {p} needs more than {MAX_PAIRS} pairs")))
}

/// Parameters for [`compress`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompressParams {
    pub epsilon: f64,
    pub p: f64,
    pub rank: u64,
    pub precision_bits: u8,
}

impl CompressParams {
    pub fn new(epsilon: f64, p: f64, rank: u64) -> Self {
        Self {
            epsilon,
            p,
            rank,
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

/// `D(psi, eps, p)`: `2L` independent sketches sharing `n`, `k` and precision.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressedRepresentation {
    n: usize,
    k: usize,
    epsilon: f64,
    p: f64,
    precision_bits: u8,
    seed: u64,
    sketches: Vec<StabilizerSketch>,
}

impl CompressedRepresentation {
    pub fn from_parts(
        epsilon: f64,
        p: f64,
        seed: u64,
        sketches: Vec<StabilizerSketch>,
    ) -> Result<Self> {
        let first = sketches
            .first()
            .ok_or_else(|| invalid("a compressed representation needs sketches"))?;
        let (n, k, precision_bits) = (first.n, first.k, first.precision_bits);
        if sketches
            .iter()
            .any(|s| s.n != n || s.k != k || s.precision_bits != precision_bits)
        {
            return Err(invalid("sketches disagree on n, k or precision"));
        }
        if sketches.len() % 4 != 2 {
            return Err(invalid(format!(
                "sketch count {} is not twice an odd number",
                sketches.len()
            )));
        }
        Ok(Self {
            n,
            k,
            epsilon,
            p,
            precision_bits,
            seed,
            sketches,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Number of sketch pairs.
    pub fn l(&self) -> usize {
        self.sketches.len() / 2
    }

    pub fn precision_bits(&self) -> u8 {
        self.precision_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sketches(&self) -> &[StabilizerSketch] {
        &self.sketches
    }

    /// Disjoint ordered pairs `(2i, 2i+1)`.
    pub fn pairs(&self) -> impl Iterator<Item = (&StabilizerSketch, &StabilizerSketch)> {
        self.sketches.chunks_exact(2).map(|c| (&c[0], &c[1]))
    }
}

/// Generator for sketch `index` of a run seeded with `seed`.
pub fn sketch_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Compresses `state` into `2L` sketches of size `2^k`.
pub fn compress(
    state: &StateVector,
    params: &CompressParams,
    seed: u64,
) -> Result<CompressedRepresentation> {
    let n = state.num_qubits();
    if n == 0 {
        return Err(invalid("cannot compress a zero-qubit state"));
    }
    check_precision(params.precision_bits)?;
    let mut k = choose_k(n, params.rank, params.epsilon)?;
    if params.epsilon < 2f64.powf(-(n as f64) / 2.0) {
        log::warn!(
            "epsilon {} is below 2^(-n/2); storing the state losslessly (k = n)",
            params.epsilon
        );
        k = n;
    }
    let l = choose_L(params.p)?;
    log::info!("compressing n = {n} with k = {k}, L = {l}");
    let sketches = (0..2 * l as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sketch_rng(seed, i);
            let c = random_clifford(n, &mut rng)?;
            make_sketch(state, &c, k, params.precision_bits)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CompressedRepresentation {
        n,
        k,
        epsilon: params.epsilon,
        p: params.p,
        precision_bits: params.precision_bits,
        seed,
        sketches,
    })
}
