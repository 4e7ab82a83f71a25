//! Clifford group machinery: Pauli algebra, symplectic tableaux, uniform sampling,
//! circuit synthesis and phase-exact stabilizer states.

mod circuit;
mod pauli;
mod sample;
mod stabilizer_state;
mod synth;
mod tableau;

pub use circuit::{Gate, GateCircuit};
pub use pauli::{BitString, PauliOperator};
pub use sample::random_clifford;
pub use stabilizer_state::{
    projected_inner_product, stabilizer_inner_product, Amplitude, StabilizerStateDesc,
    MAX_STABILIZER_QUBITS,
};
pub use synth::{synthesize_circuit, SYNTH_GATE_CONSTANT};
pub use tableau::CliffordTableau;

use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Applies a Clifford circuit to a dense state vector.
pub fn apply_clifford(state: &StateVector, circuit: &GateCircuit) -> Result<StateVector> {
    if state.num_qubits() != circuit.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.num_qubits(),
            found: circuit.num_qubits(),
        });
    }
    let mut amps = state.amplitudes().to_vec();
    circuit.apply_to_amplitudes(&mut amps)?;
    Ok(StateVector::from_amplitudes_unchecked(state.num_qubits(), amps))
}

/// Tableau of "apply `a`, then `b`".
pub fn compose(a: &CliffordTableau, b: &CliffordTableau) -> Result<CliffordTableau> {
    a.then(b)
}

pub fn inverse(a: &CliffordTableau) -> CliffordTableau {
    a.inverse()
}
