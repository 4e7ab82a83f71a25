use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::{gaussian_complex, inner, StateVector};
use crate::clifford::{synthesize_circuit, CliffordTableau, GateCircuit};
use crate::error::{invalid, Error, Result};

/// Largest qubit count for which a full `2^n x 2^n` matrix may be stored.
pub const MAX_DENSE_OBSERVABLE_QUBITS: usize = 14;

/// Largest qubit count for spectrally stored observables (eigenvector lists).
const MAX_SPECTRAL_QUBITS: usize = 22;

const HERMITIAN_TOLERANCE: f64 = 1e-10;
const NORM_SLACK: f64 = 1e-8;
const POWER_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    /// Row-major entries.
    Full(Vec<Complex64>),
    /// `sum_i w_i |v_i><v_i|` with orthonormal `v_i`.
    Spectral {
        weights: Vec<f64>,
        vectors: Vec<Vec<Complex64>>,
    },
}

/// Hermitian operator with `||M|| <= 1` and a declared rank bound.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseObservable {
    n: usize,
    rank_bound: u64,
    storage: Storage,
}

impl DenseObservable {
    /// Validates Hermiticity (1e-10) and spectral norm (power iteration, accepts up to
    /// `1 + 1e-8`).
    pub fn from_matrix(n: usize, rank_bound: u64, entries: Vec<Complex64>) -> Result<Self> {
        let obs = Self::from_matrix_unchecked(n, rank_bound, entries)?;
        let dev = obs.hermitian_deviation();
        if dev > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian(dev));
        }
        let norm = obs.spectral_norm_estimate();
        if norm > 1.0 + NORM_SLACK {
            return Err(Error::NormTooLarge(norm));
        }
        Ok(obs)
    }

    /// Shape and rank-range checks only; for operators Hermitian and bounded by
    /// construction.
    pub(crate) fn from_matrix_unchecked(
        n: usize,
        rank_bound: u64,
        entries: Vec<Complex64>,
    ) -> Result<Self> {
        if n > MAX_DENSE_OBSERVABLE_QUBITS {
            return Err(Error::TooLarge {
                what: "dense observable",
                n,
                limit: MAX_DENSE_OBSERVABLE_QUBITS,
            });
        }
        let dim = 1usize << n;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        check_rank_bound(n, rank_bound)?;
        Ok(Self {
            n,
            rank_bound,
            storage: Storage::Full(entries),
        })
    }

    /// `sum_i weights[i] |v_i><v_i|` for orthonormal `vectors` and `|weights[i]| <= 1`.
    pub fn from_spectral(
        n: usize,
        rank_bound: u64,
        weights: Vec<f64>,
        vectors: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if n > MAX_SPECTRAL_QUBITS {
            return Err(Error::TooLarge {
                what: "spectral observable",
                n,
                limit: MAX_SPECTRAL_QUBITS,
            });
        }
        check_rank_bound(n, rank_bound)?;
        if weights.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: vectors.len(),
            });
        }
        let dim = 1usize << n;
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        for (i, a) in vectors.iter().enumerate() {
            for (j, b) in vectors.iter().enumerate().skip(i) {
                let g = inner(a, b);
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - Complex64::new(want, 0.0)).norm() > 1e-10 {
                    return Err(invalid("spectral vectors are not orthonormal"));
                }
            }
        }
        if let Some(w) = weights.iter().find(|w| w.abs() > 1.0 + NORM_SLACK) {
            return Err(Error::NormTooLarge(w.abs()));
        }
        let nonzero = weights.iter().filter(|w| **w != 0.0).count() as u64;
        if nonzero > rank_bound {
            return Err(invalid(format!(
                "{nonzero} nonzero eigenvalues exceed declared rank bound {rank_bound}"
            )));
        }
        Ok(Self {
            n,
            rank_bound,
            storage: Storage::Spectral { weights, vectors },
        })
    }

    /// Random observable of exact rank `rank` with eigenvalues uniform in `[-1, 1]` and
    /// Haar-random eigenvectors, stored as a full matrix.
    pub fn random<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<Self> {
        let dim = 1usize << n;
        if rank == 0 || rank > dim {
            return Err(invalid(format!("rank {rank} outside [1, {dim}]")));
        }
        let vectors = random_orthonormal(dim, rank, rng);
        let weights: Vec<f64> = (0..rank).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (w, v) in weights.iter().zip(&vectors) {
            for i in 0..dim {
                let vi = v[i] * *w;
                let row = &mut m[i * dim..(i + 1) * dim];
                for (e, vj) in row.iter_mut().zip(v) {
                    *e += vi * vj.conj();
                }
            }
        }
        // Exact symmetrization removes rounding asymmetry.
        for i in 0..dim {
            m[i * dim + i].im = 0.0;
            for j in i + 1..dim {
                let avg = (m[i * dim + j] + m[j * dim + i].conj()) * 0.5;
                m[i * dim + j] = avg;
                m[j * dim + i] = avg.conj();
            }
        }
        Self::from_matrix_unchecked(n, rank as u64, m)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn rank_bound(&self) -> u64 {
        self.rank_bound
    }

    pub fn is_full(&self) -> bool {
        matches!(self.storage, Storage::Full(_))
    }

    /// `M v`
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = self.dim();
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        Ok(match &self.storage {
            Storage::Full(m) => {
                use rayon::prelude::*;
                let row = |i: usize| -> Complex64 {
                    m[i * dim..(i + 1) * dim]
                        .iter()
                        .zip(v)
                        .map(|(a, b)| a * b)
                        .sum()
                };
                if dim >= 512 {
                    (0..dim).into_par_iter().map(row).collect()
                } else {
                    (0..dim).map(row).collect()
                }
            }
            Storage::Spectral { weights, vectors } => {
                let mut out = vec![Complex64::new(0.0, 0.0); dim];
                for (w, u) in weights.iter().zip(vectors) {
                    let c = inner(u, v) * *w;
                    for (o, x) in out.iter_mut().zip(u) {
                        *o += x * c;
                    }
                }
                out
            }
        })
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match &self.storage {
            Storage::Full(m) => m[i * self.dim() + j],
            Storage::Spectral { weights, vectors } => weights
                .iter()
                .zip(vectors)
                .map(|(w, v)| v[i] * v[j].conj() * *w)
                .sum(),
        }
    }

    /// Row-major entries, materializing spectral storage if needed.
    pub fn to_full_matrix(&self) -> Result<Vec<Complex64>> {
        match &self.storage {
            Storage::Full(m) => Ok(m.clone()),
            Storage::Spectral { .. } => {
                if self.n > MAX_DENSE_OBSERVABLE_QUBITS {
                    return Err(Error::TooLarge {
                        what: "dense observable",
                        n: self.n,
                        limit: MAX_DENSE_OBSERVABLE_QUBITS,
                    });
                }
                let dim = self.dim();
                let mut out = Vec::with_capacity(dim * dim);
                for i in 0..dim {
                    for j in 0..dim {
                        out.push(self.entry(i, j));
                    }
                }
                Ok(out)
            }
        }
    }

    /// `Tr(M^2)`
    pub fn trace_of_square(&self) -> f64 {
        match &self.storage {
            Storage::Full(m) => m.iter().map(|e| e.norm_sqr()).sum(),
            Storage::Spectral { weights, .. } => weights.iter().map(|w| w * w).sum(),
        }
    }

    /// `max |M_ij - conj(M_ji)|`
    pub fn hermitian_deviation(&self) -> f64 {
        match &self.storage {
            Storage::Full(m) => {
                let dim = self.dim();
                let mut dev = 0.0f64;
                for i in 0..dim {
                    for j in i..dim {
                        dev = dev.max((m[i * dim + j] - m[j * dim + i].conj()).norm());
                    }
                }
                dev
            }
            Storage::Spectral { .. } => 0.0,
        }
    }

    /// Lower estimate of `||M||` from power iteration.
    pub fn spectral_norm_estimate(&self) -> f64 {
        match &self.storage {
            Storage::Spectral { weights, .. } => {
                weights.iter().fold(0.0f64, |acc, w| acc.max(w.abs()))
            }
            Storage::Full(_) => {
                let dim = self.dim();
                let mut v: Vec<Complex64> = (0..dim)
                    .map(|i| Complex64::new(1.0 + 0.1 * (i % 7) as f64, 0.05 * (i % 3) as f64))
                    .collect();
                let mut estimate = 0.0f64;
                for _ in 0..POWER_ITERATIONS {
                    let norm = super::norm_sqr(&v).sqrt();
                    if norm == 0.0 {
                        break;
                    }
                    v.iter_mut().for_each(|x| *x /= norm);
                    v = self.apply(&v).expect("dimension matches");
                    let growth = super::norm_sqr(&v).sqrt();
                    estimate = estimate.max(growth);
                    if growth == 0.0 {
                        break;
                    }
                }
                estimate
            }
        }
    }

    /// Number of eigenvalues with magnitude above `tol`, by Hermitian eigendecomposition.
    pub fn numerical_rank(&self, tol: f64) -> Result<usize> {
        match &self.storage {
            Storage::Spectral { weights, .. } => {
                Ok(weights.iter().filter(|w| w.abs() > tol).count())
            }
            Storage::Full(m) => {
                let dim = self.dim();
                let mat = DMatrix::from_row_slice(dim, dim, m);
                let eig = mat.symmetric_eigenvalues();
                Ok(eig.iter().filter(|l| l.abs() > tol).count())
            }
        }
    }

    /// Checks the declared rank bound against the numerical rank (tolerance 1e-8).
    pub fn validate_rank(&self) -> Result<()> {
        let r = self.numerical_rank(1e-8)? as u64;
        if r > self.rank_bound {
            return Err(invalid(format!(
                "numerical rank {r} exceeds declared bound {}",
                self.rank_bound
            )));
        }
        Ok(())
    }

    /// `max |(M^2 - M)_ij|`, exploiting sparsity of full matrices.
    pub fn projector_deviation(&self) -> f64 {
        let dim = self.dim();
        let full;
        let m: &[Complex64] = match &self.storage {
            Storage::Full(m) => m,
            Storage::Spectral { .. } => {
                full = self.to_full_matrix().expect("within dense limit");
                &full
            }
        };
        let nonzero: Vec<Vec<usize>> = (0..dim)
            .map(|i| (0..dim).filter(|&j| m[i * dim + j] != Complex64::new(0.0, 0.0)).collect())
            .collect();
        let mut dev = 0.0f64;
        let mut row = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..dim {
            row.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            for &l in &nonzero[i] {
                let a = m[i * dim + l];
                for &j in &nonzero[l] {
                    row[j] += a * m[l * dim + j];
                }
            }
            for j in 0..dim {
                dev = dev.max((row[j] - m[i * dim + j]).norm());
            }
        }
        dev
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        let mv = self.apply(state.amplitudes())?;
        Ok(inner(state.amplitudes(), &mv).re)
    }
}

fn check_rank_bound(n: usize, rank_bound: u64) -> Result<()> {
    let dim = 1u64 << n;
    if rank_bound == 0 || rank_bound > dim {
        return Err(invalid(format!("rank bound {rank_bound} outside [1, {dim}]")));
    }
    Ok(())
}

fn random_orthonormal<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    while out.len() < count {
        let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        // Two Gram-Schmidt passes.
        for _ in 0..2 {
            for u in &out {
                let c = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= y * c;
                }
            }
        }
        let norm = super::norm_sqr(&v).sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            out.push(v);
        }
    }
    out
}

/// Stabilizer code projector `C^dagger (|0><0|^{m} (x) I_{n-m}) C`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerProjectorObservable {
    circuit: GateCircuit,
    tableau: CliffordTableau,
    m: usize,
}

impl StabilizerProjectorObservable {
    pub fn from_circuit(circuit: GateCircuit, m: usize) -> Result<Self> {
        let n = circuit.num_qubits();
        if m > n {
            return Err(invalid(format!("m = {m} exceeds n = {n}")));
        }
        let tableau = circuit.to_tableau();
        Ok(Self { circuit, tableau, m })
    }

    pub fn from_tableau(tableau: CliffordTableau, m: usize) -> Result<Self> {
        let circuit = synthesize_circuit(&tableau)?;
        Self::from_circuit(circuit, m)
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    /// Number of qubits projected onto `|0>`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn circuit(&self) -> &GateCircuit {
        &self.circuit
    }

    pub fn tableau(&self) -> &CliffordTableau {
        &self.tableau
    }

    /// `2^{n-m}`
    pub fn rank(&self) -> u64 {
        1u64 << (self.num_qubits() - self.m)
    }

    /// `M v`
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut w = v.to_vec();
        self.circuit.apply_to_amplitudes(&mut w)?;
        self.zero_out(&mut w);
        self.circuit.inverse().apply_to_amplitudes(&mut w)?;
        Ok(w)
    }

    fn zero_out(&self, w: &mut [Complex64]) {
        let n = self.num_qubits();
        let shift = n - self.m;
        for (i, x) in w.iter_mut().enumerate() {
            if self.m > 0 && (i >> shift) != 0 {
                *x = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        let mut w = state.amplitudes().to_vec();
        self.circuit.apply_to_amplitudes(&mut w)?;
        let shift = self.num_qubits() - self.m;
        Ok(w.iter()
            .enumerate()
            .filter(|(i, _)| self.m == 0 || (i >> shift) == 0)
            .map(|(_, x)| x.norm_sqr())
            .sum())
    }

    /// Full matrix as a [`DenseObservable`].
    pub fn to_dense(&self) -> Result<DenseObservable> {
        let n = self.num_qubits();
        if n > MAX_DENSE_OBSERVABLE_QUBITS {
            return Err(Error::TooLarge {
                what: "dense observable",
                n,
                limit: MAX_DENSE_OBSERVABLE_QUBITS,
            });
        }
        let dim = 1usize << n;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        for j in 0..dim {
            col.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            col[j] = Complex64::new(1.0, 0.0);
            let out = self.apply(&col)?;
            for i in 0..dim {
                m[i * dim + j] = out[i];
            }
        }
        DenseObservable::from_matrix_unchecked(n, self.rank(), m)
    }
}

/// Observable accepted by the estimator.
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    Dense(DenseObservable),
    StabilizerProjector(StabilizerProjectorObservable),
}

impl Observable {
    pub fn num_qubits(&self) -> usize {
        match self {
            Observable::Dense(m) => m.num_qubits(),
            Observable::StabilizerProjector(p) => p.num_qubits(),
        }
    }

    pub fn rank_bound(&self) -> u64 {
        match self {
            Observable::Dense(m) => m.rank_bound(),
            Observable::StabilizerProjector(p) => p.rank(),
        }
    }

    /// `Tr(M^2)`
    pub fn trace_of_square(&self) -> f64 {
        match self {
            Observable::Dense(m) => m.trace_of_square(),
            Observable::StabilizerProjector(p) => p.rank() as f64,
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        match self {
            Observable::Dense(m) => m.apply(v),
            Observable::StabilizerProjector(p) => p.apply(v),
        }
    }
}

impl From<DenseObservable> for Observable {
    fn from(m: DenseObservable) -> Self {
        Observable::Dense(m)
    }
}

impl From<StabilizerProjectorObservable> for Observable {
    fn from(p: StabilizerProjectorObservable) -> Self {
        Observable::StabilizerProjector(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::random_clifford;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_observable_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = DenseObservable::random(4, 3, &mut rng).unwrap();
        assert!(m.hermitian_deviation() < 1e-12);
        assert!(m.spectral_norm_estimate() <= 1.0 + 1e-8);
        assert_eq!(m.numerical_rank(1e-8).unwrap(), 3);
        m.validate_rank().unwrap();
        let entries = m.to_full_matrix().unwrap();
        DenseObservable::from_matrix(4, 3, entries).unwrap();
    }

    #[test]
    fn rejects_bad_matrices() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let non_herm = vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            DenseObservable::from_matrix(1, 2, non_herm),
            Err(Error::NotHermitian(_))
        ));
        let big = vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            DenseObservable::from_matrix(1, 1, big),
            Err(Error::NormTooLarge(_))
        ));
        let tiny_excess = vec![c(1.0 + 5e-9, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(DenseObservable::from_matrix(1, 1, tiny_excess).is_ok());
        let ok = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(DenseObservable::from_matrix(1, 1, ok).unwrap().validate_rank().is_err());
        assert!(DenseObservable::from_matrix_unchecked(15, 1, vec![]).is_err());
    }

    #[test]
    fn stabilizer_projector_is_idempotent_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            for m in 0..=n {
                let t = random_clifford(n, &mut rng).unwrap();
                let p = StabilizerProjectorObservable::from_tableau(t, m).unwrap();
                let d = p.to_dense().unwrap();
                assert!(d.hermitian_deviation() < 1e-10);
                assert!(d.projector_deviation() < 1e-10);
                let trace: f64 = (0..d.dim()).map(|i| d.entry(i, i).re).sum();
                assert!((trace - p.rank() as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn spectral_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vecs = random_orthonormal(8, 2, &mut rng);
        let s = DenseObservable::from_spectral(3, 2, vec![0.5, -1.0], vecs).unwrap();
        let f = DenseObservable::from_matrix(3, 2, s.to_full_matrix().unwrap()).unwrap();
        let v: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, 1.0)).collect();
        for (a, b) in s.apply(&v).unwrap().iter().zip(f.apply(&v).unwrap()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((s.trace_of_square() - 1.25).abs() < 1e-12);
        assert!((f.trace_of_square() - 1.25).abs() < 1e-12);
        assert!((f.spectral_norm_estimate() - 1.0).abs() < 1e-6);
    }
}
