use num_complex::Complex64;
use rand::Rng;

use super::{gaussian_complex, DenseObservable, StateVector, MAX_STATE_QUBITS};
use crate::error::{invalid, Error, Result};

/// Uniform superposition of all `n`-qubit basis states of Hamming weight `w`.
pub fn dicke_state(n: usize, w: usize) -> Result<StateVector> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooLarge {
            what: "state vector",
            n,
            limit: MAX_STATE_QUBITS,
        });
    }
    if w > n {
        return Err(invalid(format!("weight {w} exceeds n = {n}")));
    }
    let amps = (0..1usize << n)
        .map(|i| {
            if i.count_ones() as usize == w {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    StateVector::normalized(n, amps)
}

/// The `n + 1` Dicke states and the rank-`(n+1)` projector onto their span.
pub fn symmetric_subspace(n: usize) -> Result<(Vec<StateVector>, DenseObservable)> {
    let basis = (0..=n).map(|w| dicke_state(n, w)).collect::<Result<Vec<_>>>()?;
    let vectors = basis.iter().map(|s| s.amplitudes().to_vec()).collect();
    let projector = DenseObservable::from_spectral(n, (n + 1) as u64, vec![1.0; n + 1], vectors)?;
    Ok((basis, projector))
}

/// Gaussian combination of Dicke states, normalized.
pub fn random_symmetric_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    let coeffs: Vec<Complex64> = (0..=n).map(|_| gaussian_complex(rng)).collect();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n.min(MAX_STATE_QUBITS)];
    for (w, c) in coeffs.iter().enumerate() {
        let d = dicke_state(n, w)?;
        for (a, x) in amps.iter_mut().zip(d.amplitudes()) {
            *a += c * x;
        }
    }
    StateVector::normalized(n, amps)
}
