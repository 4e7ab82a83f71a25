//! Compression of n-qubit pure states into random stabilizer sketches, and estimation of
//! `<psi|M|psi>` for bounded observables from the compressed form.
//!
//! Qubit 0 is the most significant bit of a basis index throughout, so the `2^k`
//! retained amplitudes of a sketch are a prefix of `C|psi>`.

pub mod clifford;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod io;
pub mod moments;
pub mod sketch;
pub mod statevector;
pub mod vsp;

pub use clifford::{
    apply_clifford, random_clifford, synthesize_circuit, CliffordTableau, Gate, GateCircuit,
    PauliOperator, StabilizerStateDesc,
};
pub use error::{Error, Result};
pub use estimator::{estimate, EstimateResult};
pub use sketch::{compress, CompressParams, CompressedRepresentation, StabilizerSketch};
pub use statevector::{
    expectation_dense, DenseObservable, Observable, StabilizerProjectorObservable, StateVector,
};
