//! First and second moments of random stabilizer code projectors
//! `P = C^dagger (|0><0|^{n-k} (x) I_k) C`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{random_clifford, synthesize_circuit};
use crate::error::{invalid, Error, Result};
use crate::sketch::sketch_rng;

pub const MAX_FIRST_MOMENT_QUBITS: usize = 6;
pub const MAX_SECOND_MOMENT_QUBITS: usize = 4;
const CHUNK: usize = 1024;

/// Monte-Carlo deviations of the projector moments from their closed forms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub max_dev_first: Option<f64>,
    pub max_dev_second: Option<f64>,
    pub a: f64,
    pub b: f64,
}

/// `E[P (x) P] = a I + b SWAP`, exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct AbCoefficients {
    pub a: BigRational,
    pub b: BigRational,
}

impl AbCoefficients {
    pub fn a_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN)
    }

    pub fn b_f64(&self) -> f64 {
        self.b.to_f64().unwrap_or(f64::NAN)
    }
}

fn pow2(e: usize) -> BigInt {
    BigInt::from(1) << e
}

/// `a = (4^{k+n} - 2^{k+n}) / (4^{2n} - 4^n)`, `b = (4^n 2^k - 2^n 4^k) / (4^{2n} - 4^n)`.
pub fn ab_coefficients(n: usize, k: usize) -> Result<AbCoefficients> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    let denom = pow2(4 * n) - pow2(2 * n);
    let a = BigRational::new(pow2(2 * (k + n)) - pow2(k + n), denom.clone());
    let b = BigRational::new(pow2(2 * n + k) - pow2(n + 2 * k), denom);
    Ok(AbCoefficients { a, b })
}

/// Dense projector `P` (row-major) from the Clifford sampled by `rng`.
fn sample_projector(n: usize, k: usize, rng: &mut rand_chacha::ChaCha20Rng) -> Result<Vec<Complex64>> {
    let dim = 1usize << n;
    let c = synthesize_circuit(&random_clifford(n, rng)?)?;
    let c_inv = c.inverse();
    let mut p = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    for z in 0..1usize << k {
        v.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        v[z] = Complex64::new(1.0, 0.0);
        c_inv.apply_to_amplitudes(&mut v)?;
        for i in 0..dim {
            if v[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                p[i * dim + j] += v[i] * v[j].conj();
            }
        }
    }
    Ok(p)
}

/// Sums `f(P)` over `samples` projectors in fixed-size seeded chunks, in chunk order.
fn accumulate<F>(n: usize, k: usize, samples: usize, seed: u64, len: usize, f: F) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64], &mut [Complex64]) + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partials = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = sketch_rng(seed, c as u64);
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            let count = CHUNK.min(samples - c * CHUNK);
            for _ in 0..count {
                let p = sample_projector(n, k, &mut rng)?;
                f(&p, &mut acc);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = vec![Complex64::new(0.0, 0.0); len];
    for part in partials {
        for (t, x) in total.iter_mut().zip(part) {
            *t += x;
        }
    }
    let inv = 1.0 / samples as f64;
    total.iter_mut().for_each(|x| *x *= inv);
    Ok(total)
}

fn check_sizes(n: usize, k: usize, samples: usize, limit: usize) -> Result<()> {
    if n == 0 || k > n {
        return Err(invalid(format!("need 0 <= k <= n and n >= 1, got n = {n}, k = {k}")));
    }
    if n > limit {
        return Err(Error::TooLarge {
            what: "moment estimate",
            n,
            limit,
        });
    }
    if samples == 0 {
        return Err(invalid("samples must be positive"));
    }
    Ok(())
}

/// `max |mean(P) - 2^{k-n} I|` over entries.
pub fn first_moment_mc(n: usize, k: usize, samples: usize, seed: u64) -> Result<MomentReport> {
    check_sizes(n, k, samples, MAX_FIRST_MOMENT_QUBITS)?;
    let dim = 1usize << n;
    let mean = accumulate(n, k, samples, seed, dim * dim, |p, acc| {
        for (a, x) in acc.iter_mut().zip(p) {
            *a += x;
        }
    })?;
    let target = 2f64.powi(k as i32 - n as i32);
    let mut dev = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let want = if i == j { target } else { 0.0 };
            dev = dev.max((mean[i * dim + j] - want).norm());
        }
    }
    let ab = ab_coefficients(n, k)?;
    Ok(MomentReport {
        n,
        k,
        samples,
        max_dev_first: Some(dev),
        max_dev_second: None,
        a: ab.a_f64(),
        b: ab.b_f64(),
    })
}

/// `max |mean(P (x) P) - (a I + b SWAP)|` over entries.
pub fn second_moment_mc(n: usize, k: usize, samples: usize, seed: u64) -> Result<MomentReport> {
    check_sizes(n, k, samples, MAX_SECOND_MOMENT_QUBITS)?;
    let dim = 1usize << n;
    let big = dim * dim;
    let mean = accumulate(n, k, samples, seed, big * big, |p, acc| {
        for i in 0..dim {
            for j in 0..dim {
                let row = (i * dim + j) * big;
                for i2 in 0..dim {
                    let pii = p[i * dim + i2];
                    if pii == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for j2 in 0..dim {
                        acc[row + i2 * dim + j2] += pii * p[j * dim + j2];
                    }
                }
            }
        }
    })?;
    let ab = ab_coefficients(n, k)?;
    let (a, b) = (ab.a_f64(), ab.b_f64());
    let mut dev = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            for i2 in 0..dim {
                for j2 in 0..dim {
                    let mut want = 0.0;
                    if i == i2 && j == j2 {
                        want += a;
                    }
                    if i == j2 && j == i2 {
                        want += b;
                    }
                    let got = mean[(i * dim + j) * big + i2 * dim + j2];
                    dev = dev.max((got - want).norm());
                }
            }
        }
    }
    Ok(MomentReport {
        n,
        k,
        samples,
        max_dev_first: None,
        max_dev_second: Some(dev),
        a,
        b,
    })
}

/// Dense traces against their closed forms, with `R = |0><0|^{n-k} (x) I_k` and
/// `pi_pm = (I +- SWAP)/2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceIdentities {
    pub n: usize,
    pub k: usize,
    pub rr_pi_plus: i64,
    pub rr_pi_minus: i64,
    pub pi_plus: i64,
    pub pi_minus: i64,
    pub expected_rr_pi_plus: i64,
    pub expected_rr_pi_minus: i64,
    pub expected_pi_plus: i64,
    pub expected_pi_minus: i64,
}

impl TraceIdentities {
    pub fn holds(&self) -> bool {
        self.rr_pi_plus == self.expected_rr_pi_plus
            && self.rr_pi_minus == self.expected_rr_pi_minus
            && self.pi_plus == self.expected_pi_plus
            && self.pi_minus == self.expected_pi_minus
    }
}

pub fn design_trace_identities(n: usize, k: usize) -> Result<TraceIdentities> {
    check_sizes(n, k, 1, MAX_FIRST_MOMENT_QUBITS)?;
    let dim = 1usize << n;
    let r = |i: usize, j: usize| -> i64 { i64::from(i == j && i < 1 << k) };
    // Entries of I + s SWAP on the doubled space, as integers.
    let two_pi = |s: i64, a: usize, b: usize, c: usize, d: usize| -> i64 {
        i64::from(a == c && b == d) + s * i64::from(a == d && b == c)
    };
    let trace = |s: i64, with_r: bool| -> i64 {
        let mut total = 0i64;
        for a in 0..dim {
            for b in 0..dim {
                if !with_r {
                    total += two_pi(s, a, b, a, b);
                    continue;
                }
                for c in 0..dim {
                    let rac = r(a, c);
                    if rac == 0 {
                        continue;
                    }
                    for d in 0..dim {
                        total += rac * r(b, d) * two_pi(s, c, d, a, b);
                    }
                }
            }
        }
        total / 2
    };
    let (pk, pn) = (1i64 << k, 1i64 << n);
    Ok(TraceIdentities {
        n,
        k,
        rr_pi_plus: trace(1, true),
        rr_pi_minus: trace(-1, true),
        pi_plus: trace(1, false),
        pi_minus: trace(-1, false),
        expected_rr_pi_plus: (pk * pk + pk) / 2,
        expected_rr_pi_minus: (pk * pk - pk) / 2,
        expected_pi_plus: (pn * pn + pn) / 2,
        expected_pi_minus: (pn * pn - pn) / 2,
    })
}
