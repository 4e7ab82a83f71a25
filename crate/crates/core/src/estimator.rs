//! Expectation values from a compressed representation: per-pair estimates `F`, their
//! median, and the variance and failure bounds.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{
    projected_inner_product, PauliOperator, StabilizerStateDesc,
    MAX_STABILIZER_QUBITS,
};
use crate::error::{invalid, Error, Result};
use crate::sketch::{choose_k, CompressedRepresentation, StabilizerSketch};
use crate::statevector::{inner, DenseObservable, Observable, StabilizerProjectorObservable};

/// Median estimate with its pair values and bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateResult {
    #[serde(rename = "E")]
    pub estimate: f64,
    pub pair_values: Vec<f64>,
    pub epsilon: f64,
    pub variance_bound: f64,
    pub failure_bound: f64,
}

fn check_pair(sa: &StabilizerSketch, sb: &StabilizerSketch, n: usize) -> Result<()> {
    if sa.num_qubits() != sb.num_qubits() || sa.k() != sb.k() {
        return Err(invalid("sketches in a pair disagree on n or k"));
    }
    if sa.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: sa.num_qubits(),
            found: n,
        });
    }
    Ok(())
}

fn scale(n: usize, k: usize) -> f64 {
    4f64.powi((n - k) as i32)
}

/// `F` for any observable, via `C M D^dagger` applied to the embedded `D`-side amplitudes.
fn pair_estimate_via_apply<F>(
    sa: &StabilizerSketch,
    sb: &StabilizerSketch,
    apply: F,
) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let n = sa.num_qubits();
    let mut v = vec![Complex64::new(0.0, 0.0); 1usize << n];
    for (slot, b) in v.iter_mut().zip(sb.amplitudes()) {
        *slot = b;
    }
    sb.circuit().inverse().apply_to_amplitudes(&mut v)?;
    let mut u = apply(&v)?;
    sa.circuit().apply_to_amplitudes(&mut u)?;
    let a = sa.amplitudes();
    Ok(scale(n, sa.k()) * inner(&a, &u[..a.len()]).re)
}

/// `F = 4^{n-k} Re sum_{x,y} conj(a_x) <0x|C M D^dagger|0y> b_y` with dense `M`.
pub fn pair_estimate_dense(
    sa: &StabilizerSketch,
    sb: &StabilizerSketch,
    m: &DenseObservable,
) -> Result<f64> {
    check_pair(sa, sb, m.num_qubits())?;
    pair_estimate_via_apply(sa, sb, |v| m.apply(v))
}

/// Same value as the dense path, with each matrix element computed as a stabilizer-state
/// inner product. Memory is `O(2^k)`.
pub fn pair_estimate_stabilizer(
    sa: &StabilizerSketch,
    sb: &StabilizerSketch,
    m: &StabilizerProjectorObservable,
) -> Result<f64> {
    let n = m.num_qubits();
    check_pair(sa, sb, n)?;
    if n > MAX_STABILIZER_QUBITS {
        return Err(Error::TooLarge {
            what: "stabilizer state",
            n,
            limit: MAX_STABILIZER_QUBITS,
        });
    }
    let k = sa.k();
    let zero_qubits: Vec<usize> = (0..m.m()).collect();
    let alphas = shifted_states(sa, m)?;
    let betas = shifted_states(sb, m)?;
    let a = sa.amplitudes();
    let b = sb.amplitudes();
    let rows = alphas
        .par_iter()
        .zip(a.par_iter())
        .map(|(alpha, ax)| {
            let mut row = Complex64::new(0.0, 0.0);
            for (beta, by) in betas.iter().zip(&b) {
                let elem = projected_inner_product(alpha, &zero_qubits, beta)?;
                if !elem.is_zero() {
                    row += elem.to_complex() * by;
                }
            }
            Ok(ax.conj() * row)
        })
        .collect::<Result<Vec<_>>>()?;
    let total: Complex64 = rows.iter().sum();
    Ok(scale(n, k) * total.re)
}

/// `E C^dagger |0^{n-k} x>` for every `x`, as the Pauli image of `X^x` acting on the
/// `x = 0` state.
fn shifted_states(
    s: &StabilizerSketch,
    m: &StabilizerProjectorObservable,
) -> Result<Vec<StabilizerStateDesc>> {
    let n = s.num_qubits();
    let k = s.k();
    let u = s.circuit().inverse().then(m.circuit())?;
    let base = StabilizerStateDesc::from_circuit(&u, 0)?;
    let tableau = u.to_tableau();
    let images: Vec<PauliOperator> = (n - k..n)
        .map(|q| tableau.conjugate(&PauliOperator::x_on(n, q)))
        .collect();
    (0..1u64 << k)
        .map(|x| {
            let mut p = PauliOperator::identity(n);
            for (j, img) in images.iter().enumerate() {
                let q = n - k + j;
                if (x >> (n - 1 - q)) & 1 == 1 {
                    p = p.mul(img);
                }
            }
            let mut state = base.clone();
            state.apply_pauli(&p)?;
            Ok(state)
        })
        .collect()
}

/// Chooses the path for a single pair. The stabilizer path costs `O(4^k n^3)` against
/// `O(2^n n^2)` for applying the projector densely, so it is taken when `4^k n <= 2^n`.
pub fn pair_estimate(sa: &StabilizerSketch, sb: &StabilizerSketch, m: &Observable) -> Result<f64> {
    match m {
        Observable::Dense(d) => pair_estimate_dense(sa, sb, d),
        Observable::StabilizerProjector(p) => {
            let (n, k) = (p.num_qubits(), sa.k());
            if n <= MAX_STABILIZER_QUBITS && ((n as u128) << (2 * k)) <= 1u128 << n {
                pair_estimate_stabilizer(sa, sb, p)
            } else {
                check_pair(sa, sb, n)?;
                pair_estimate_via_apply(sa, sb, |v| p.apply(v))
            }
        }
    }
}

/// Median of the `L` pair estimates over disjoint sketch pairs.
pub fn estimate(d: &CompressedRepresentation, m: &Observable) -> Result<EstimateResult> {
    let n = d.num_qubits();
    if m.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.num_qubits(),
        });
    }
    let needed = choose_k(n, m.rank_bound(), d.epsilon()).unwrap_or(n);
    if needed > d.k() {
        log::warn!(
            "observable rank bound {} calls for k = {needed}, but the sketches have k = {}",
            m.rank_bound(),
            d.k()
        );
    }
    let pairs: Vec<_> = d.pairs().collect();
    let pair_values = pairs
        .par_iter()
        .map(|(sa, sb)| pair_estimate(sa, sb, m))
        .collect::<Result<Vec<f64>>>()?;
    let l = pair_values.len();
    Ok(EstimateResult {
        estimate: median(&pair_values),
        pair_values,
        epsilon: d.epsilon(),
        variance_bound: variance_bound(n, d.k(), 1.0, m.trace_of_square()),
        failure_bound: failure_bound(l)?,
    })
}

/// Median of an odd-length slice.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[sorted.len() / 2]
}

/// `2 * 2^{-k} <psi|M^2|psi> + 4^{-k} Tr(M^2)`.
pub fn variance_bound(n: usize, k: usize, expectation_m2: f64, trace_m2: f64) -> f64 {
    debug_assert!(k <= n);
    2.0 * 2f64.powi(-(k as i32)) * expectation_m2 + 4f64.powi(-(k as i32)) * trace_m2
}

/// `sum_{(L-1)/2 <= l <= L} C(L, l) (3/4)^{L-l} (1/4)^l`, evaluated exactly.
pub fn failure_bound(l: usize) -> Result<f64> {
    if l.is_multiple_of(2) {
        return Err(invalid(format!("L = {l} must be odd")));
    }
    let mut numer = BigUint::zero();
    let mut binom = BigUint::one();
    let three = BigUint::from(3u32);
    for j in 0..=l {
        if j >= (l - 1) / 2 {
            numer += &binom * three.pow((l - j) as u32);
        }
        binom = binom * BigUint::from(l - j) / BigUint::from(j + 1);
    }
    let denom = BigUint::from(4u32).pow(l as u32);
    let ratio = BigRational::new(numer.into(), denom.into());
    Ok(ratio.to_f64().unwrap_or(0.0))
}

/// `<0x|C M D^dagger|0y>` for every `x, y`, by dense simulation. Row-major `2^k x 2^k`.
pub fn matrix_elements_dense(
    sa: &StabilizerSketch,
    sb: &StabilizerSketch,
    m: &Observable,
) -> Result<Vec<Complex64>> {
    let n = sa.num_qubits();
    check_pair(sa, sb, m.num_qubits())?;
    let dim_k = 1usize << sa.k();
    let mut out = vec![Complex64::new(0.0, 0.0); dim_k * dim_k];
    let d_inv = sb.circuit().inverse();
    for y in 0..dim_k {
        let mut v = vec![Complex64::new(0.0, 0.0); 1usize << n];
        v[y] = Complex64::new(1.0, 0.0);
        d_inv.apply_to_amplitudes(&mut v)?;
        let mut u = m.apply(&v)?;
        sa.circuit().apply_to_amplitudes(&mut u)?;
        for x in 0..dim_k {
            out[x * dim_k + y] = u[x];
        }
    }
    Ok(out)
}
