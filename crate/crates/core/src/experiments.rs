//! Reproducible experiment drivers: the symmetric-subspace histogram experiment, the
//! closed-form memory-savings calculation, and serialized-size sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::random_clifford;
use crate::error::{invalid, Result};
use crate::estimator::{pair_estimate_dense, variance_bound};
use crate::io::{encode_compressed, encoded_len};
use crate::sketch::{compress, make_sketch, sketch_rng, CompressParams, DEFAULT_PRECISION_BITS};
use crate::statevector::{random_state, random_symmetric_state, symmetric_subspace};

pub const HISTOGRAM_BINS: usize = 50;

/// Statistics of `F` for one `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig1Series {
    pub k: usize,
    pub samples: Vec<f64>,
    pub sample_mean: f64,
    pub sample_std: f64,
    /// `sqrt(2/2^k + Tr(Pi^2)/4^k)`
    pub bound_std: f64,
    /// `sqrt(2/2^k + sqrt(Tr(Pi^2))/4^k)`, i.e. with `||Pi||_F` in place of `Tr(Pi^2)`.
    pub bound_std_frobenius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig1Report {
    pub n: usize,
    pub rank: usize,
    pub trials: usize,
    pub seed: u64,
    pub expectation: f64,
    pub series: Vec<Fig1Series>,
}

/// `trials` independent values of `F` per `k` for one random symmetric state and the
/// symmetric-subspace projector.
pub fn fig1(trials: usize, n: usize, k_list: &[usize], seed: u64) -> Result<Fig1Report> {
    if trials < 2 {
        return Err(invalid("need at least two trials"));
    }
    if let Some(&k) = k_list.iter().find(|&&k| k > n) {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    let psi = random_symmetric_state(n, &mut sketch_rng(seed, 0))?;
    let (_, pi) = symmetric_subspace(n)?;
    let expectation = pi.expectation(&psi)?;
    let trace = pi.trace_of_square();
    let mut series = Vec::with_capacity(k_list.len());
    for (ki, &k) in k_list.iter().enumerate() {
        let samples = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = sketch_rng(seed, 1 + (ki * trials + t) as u64);
                let c = random_clifford(n, &mut rng)?;
                let d = random_clifford(n, &mut rng)?;
                let sa = make_sketch(&psi, &c, k, DEFAULT_PRECISION_BITS)?;
                let sb = make_sketch(&psi, &d, k, DEFAULT_PRECISION_BITS)?;
                pair_estimate_dense(&sa, &sb, &pi)
            })
            .collect::<Result<Vec<f64>>>()?;
        let (sample_mean, sample_std) = mean_std(&samples);
        series.push(Fig1Series {
            k,
            sample_mean,
            sample_std,
            bound_std: variance_bound(n, k, 1.0, trace).sqrt(),
            bound_std_frobenius: variance_bound(n, k, 1.0, trace.sqrt()).sqrt(),
            samples,
        });
    }
    Ok(Fig1Report {
        n,
        rank: n + 1,
        trials,
        seed,
        expectation,
        series,
    })
}

/// Mean and unbiased standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let len = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / len;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (len - 1.0);
    (mean, var.sqrt())
}

/// `(bin_left, bin_right, count)` over uniform bins spanning `[min, max]`.
pub fn histogram(samples: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    if samples.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c))
        .collect()
}

pub fn histogram_csv(hist: &[(f64, f64, usize)]) -> String {
    let mut out = String::from("bin_left,bin_right,count\n");
    for (l, r, c) in hist {
        out.push_str(&format!("{l},{r},{c}\n"));
    }
    out
}

/// Parses [`histogram_csv`] output.
pub fn parse_histogram_csv(text: &str) -> Result<Vec<(f64, f64, usize)>> {
    let mut lines = text.lines();
    if lines.next() != Some("bin_left,bin_right,count") {
        return Err(invalid("missing histogram header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            let err = || crate::Error::Parse {
                line: i + 2,
                msg: format!("bad histogram row {line:?}"),
            };
            if f.len() != 3 {
                return Err(err());
            }
            Ok((
                f[0].parse().map_err(|_| err())?,
                f[1].parse().map_err(|_| err())?,
                f[2].parse().map_err(|_| err())?,
            ))
        })
        .collect()
}

/// Closed-form error and savings for a worst-case observable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SavingsReport {
    pub n: usize,
    pub k: usize,
    pub rank: f64,
    pub variance_bound: f64,
    /// `2 sqrt(Var)`, from `Var(F) <= eps^2 / 4`.
    pub epsilon_est: f64,
    /// `4 sqrt(Var)`.
    pub epsilon_four_sigma: f64,
    /// `2^{n-k}`: full vector against one sketch.
    pub savings_factor: f64,
    /// `2^{n-k-1}`: full vector against one sketch pair.
    pub savings_factor_pair: f64,
}

pub fn memory_savings(n: usize, k: usize, rank: f64, m2_bound: f64) -> Result<SavingsReport> {
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    let var = variance_bound(n, k, m2_bound, rank);
    Ok(SavingsReport {
        n,
        k,
        rank,
        variance_bound: var,
        epsilon_est: 2.0 * var.sqrt(),
        epsilon_four_sigma: 4.0 * var.sqrt(),
        savings_factor: 2f64.powi((n - k) as i32),
        savings_factor_pair: 2f64.powi((n - k) as i32 - 1),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub epsilon: f64,
    pub p: f64,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `log2(bytes)` against `n`.
    pub slope: f64,
}

/// Compresses a random state at each `n` with `r = 2^n` and measures the serialized size.
pub fn scaling_sweep(
    n_min: usize,
    n_max: usize,
    epsilon: f64,
    p: f64,
    seed: u64,
) -> Result<SweepReport> {
    if n_min == 0 || n_min > n_max {
        return Err(invalid(format!("bad n range {n_min}..={n_max}")));
    }
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let psi = random_state(n, &mut sketch_rng(seed, n as u64))?;
        let d = compress(&psi, &CompressParams::new(epsilon, p, 1u64 << n), seed)?;
        let bytes = encode_compressed(&d).len();
        debug_assert_eq!(bytes, encoded_len(n, d.k(), d.l(), d.precision_bits()));
        rows.push(SweepRow {
            n,
            k: d.k(),
            l: d.l(),
            bytes,
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n as f64, (r.bytes as f64).log2()))
        .collect();
    Ok(SweepReport {
        epsilon,
        p,
        rows,
        slope: fit_slope(&points),
    })
}

pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("n,k,L,bytes\n");
    for r in &report.rows {
        out.push_str(&format!("{},{},{},{}\n", r.n, r.k, r.l, r.bytes));
    }
    out
}

/// Least-squares slope through `(x, y)` points.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
