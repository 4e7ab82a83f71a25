//! Dense state vectors and observables at desk scale.

mod observable;
mod symmetric;

pub use observable::{
    DenseObservable, Observable, StabilizerProjectorObservable, MAX_DENSE_OBSERVABLE_QUBITS,
};
pub use symmetric::{dicke_state, random_symmetric_state, symmetric_subspace};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Largest qubit count for dense state vectors.
pub const MAX_STATE_QUBITS: usize = 26;

/// Tolerance on `sum |a|^2 = 1`.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Dense vector of `2^n` complex amplitudes. Qubit 0 is the most significant bit of the
/// basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that must already have unit norm.
    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(n, amplitudes.len())?;
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(invalid(format!("state norm^2 is {norm}, expected 1")));
        }
        Ok(Self { n, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(n: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(n, amplitudes.len())?;
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n, amplitudes })
    }

    pub(crate) fn from_amplitudes_unchecked(n: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n);
        Self { n, amplitudes }
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_len(n, 1 << n)?;
        if index >= 1 << n {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooLarge {
            what: "state vector",
            n,
            limit: MAX_STATE_QUBITS,
        });
    }
    if len != 1usize << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: len,
        });
    }
    Ok(())
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// `sum conj(a_i) b_i`
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random state: i.i.d. complex Gaussian amplitudes, normalized.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooLarge {
            what: "state vector",
            n,
            limit: MAX_STATE_QUBITS,
        });
    }
    let amps = (0..1usize << n).map(|_| gaussian_complex(rng)).collect();
    StateVector::normalized(n, amps)
}

/// Ground-truth `<psi|M|psi>` by dense linear algebra.
pub fn expectation_dense(state: &StateVector, obs: &Observable) -> Result<f64> {
    if state.num_qubits() != obs.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.num_qubits(),
            found: obs.num_qubits(),
        });
    }
    match obs {
        Observable::Dense(m) => {
            let mv = m.apply(state.amplitudes())?;
            let z = inner(state.amplitudes(), &mv);
            if z.im.abs() > 1e-10 {
                return Err(Error::NotHermitian(z.im.abs()));
            }
            Ok(z.re)
        }
        Observable::StabilizerProjector(p) => p.expectation(state),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn projector_1q(index: usize) -> Observable {
        let mut m = vec![c(0.0); 4];
        m[index * 2 + index] = c(1.0);
        Observable::Dense(DenseObservable::from_matrix(1, 1, m).unwrap())
    }

    #[test]
    fn single_qubit_expectations() {
        let zero = StateVector::basis(1, 0).unwrap();
        assert_eq!(expectation_dense(&zero, &projector_1q(0)).unwrap(), 1.0);
        assert_eq!(expectation_dense(&zero, &projector_1q(1)).unwrap(), 0.0);
        let plus = StateVector::normalized(1, vec![c(1.0), c(1.0)]).unwrap();
        assert!((expectation_dense(&plus, &projector_1q(0)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = StateVector::basis(2, 0).unwrap();
        assert!(matches!(
            expectation_dense(&s, &projector_1q(0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_states_are_normalized_and_seeded() {
        let a = random_state(6, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = random_state(6, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        assert_ne!(a, b);
        let a2 = random_state(6, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, a2);
    }

    #[test]
    fn haar_first_moment() {
        // E|<0|psi>|^2 = 2^-n; the variance of |<0|psi>|^2 is (2^-n)^2 (n-1 dof) roughly
        // 2^-2n * (2^n - 1)/(2^n + 1).
        let n = 3;
        let trials = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let vals: Vec<f64> = (0..trials)
            .map(|_| random_state(n, &mut rng).unwrap().amplitudes()[0].norm_sqr())
            .collect();
        let mean = vals.iter().sum::<f64>() / trials as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!((mean - 0.125).abs() < 5.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(StateVector::from_amplitudes(1, vec![c(1.0), c(1.0)]).is_err());
        assert!(StateVector::normalized(1, vec![c(0.0), c(0.0)]).is_err());
        assert!(StateVector::from_amplitudes(1, vec![c(1.0)]).is_err());
    }
}
