use super::circuit::{Gate, GateCircuit};
use super::tableau::CliffordTableau;
use crate::error::Result;

/// Gate-count constant: synthesized circuits have at most `SYNTH_GATE_CONSTANT * n^2`
/// gates.
pub const SYNTH_GATE_CONSTANT: usize = 12;

/// Synthesizes an H/S/CNOT circuit whose tableau replay equals `t`, phases included.
///
/// The inverse tableau is reduced qubit by qubit to a Pauli frame with `O(n)` gates per
/// qubit; those gates followed by the frame correction implement `t`.
pub fn synthesize_circuit(t: &CliffordTableau) -> Result<GateCircuit> {
    t.validate()?;
    let n = t.num_qubits();
    let mut work = t.inverse();
    let mut circuit = GateCircuit::new(n);
    let mut emit = |work: &mut CliffordTableau, g: Gate| {
        match g {
            Gate::H(q) => work.apply_h(q),
            Gate::S(q) => work.apply_s(q),
            Gate::Cx(c, tg) => work.apply_cx(c, tg),
        }
        circuit.push(g).expect("indices in range");
    };

    for q in 0..n {
        // Bring the image of X_q to +-X_q.
        let row = work.x_image(q).clone();
        if (q..n).all(|j| !row.x(j)) {
            let j = (q..n).find(|&j| row.z(j)).expect("image of X_q is not identity");
            emit(&mut work, Gate::H(j));
        }
        let row = work.x_image(q).clone();
        if !row.x(q) {
            let j = (q + 1..n).find(|&j| row.x(j)).expect("some x bit is set");
            emit(&mut work, Gate::Cx(j, q));
        }
        let row = work.x_image(q).clone();
        for j in q + 1..n {
            if row.x(j) {
                emit(&mut work, Gate::Cx(q, j));
            }
        }
        if work.x_image(q).z(q) {
            emit(&mut work, Gate::S(q));
        }
        let row = work.x_image(q).clone();
        let z_support: Vec<usize> = (q + 1..n).filter(|&j| row.z(j)).collect();
        for &j in &z_support {
            emit(&mut work, Gate::H(j));
        }
        for &j in &z_support {
            emit(&mut work, Gate::Cx(q, j));
        }

        // Bring the image of Z_q to +-Z_q while keeping X_q fixed.
        if work.z_image(q).x(q) {
            emit(&mut work, Gate::H(q));
            emit(&mut work, Gate::S(q));
            emit(&mut work, Gate::H(q));
        }
        let row = work.z_image(q).clone();
        let mut support = Vec::new();
        for j in q + 1..n {
            match (row.x(j), row.z(j)) {
                (false, false) => continue,
                (true, false) => emit(&mut work, Gate::H(j)),
                (true, true) => {
                    emit(&mut work, Gate::S(j));
                    emit(&mut work, Gate::H(j));
                }
                (false, true) => {}
            }
            support.push(j);
        }
        for j in support {
            emit(&mut work, Gate::Cx(j, q));
        }
    }

    // `work` is now a Pauli frame F with gates G: G t^dagger = F, so t = F G.
    for q in 0..n {
        let flip_x = work.x_image(q).is_negative();
        let flip_z = work.z_image(q).is_negative();
        if flip_x {
            // Z_q anticommutes with X_q.
            emit(&mut work, Gate::S(q));
            emit(&mut work, Gate::S(q));
        }
        if flip_z {
            emit(&mut work, Gate::H(q));
            emit(&mut work, Gate::S(q));
            emit(&mut work, Gate::S(q));
            emit(&mut work, Gate::H(q));
        }
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::random_clifford;
    use crate::error::Error;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_gives_empty_circuit() {
        for n in 1..5 {
            let c = synthesize_circuit(&CliffordTableau::identity(n)).unwrap();
            assert!(c.is_empty());
        }
    }

    #[test]
    fn hadamard_roundtrip() {
        let mut t = CliffordTableau::identity(1);
        t.apply_h(0);
        let c = synthesize_circuit(&t).unwrap();
        assert_eq!(c.to_tableau(), t);
    }

    #[test]
    fn random_roundtrips_within_gate_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for n in [1, 2, 3, 5, 8] {
            for _ in 0..100 {
                let t = random_clifford(n, &mut rng).unwrap();
                let c = synthesize_circuit(&t).unwrap();
                assert_eq!(c.to_tableau(), t);
                assert!(c.len() <= SYNTH_GATE_CONSTANT * n * n, "{} gates for n={n}", c.len());
            }
        }
    }

    #[test]
    fn rejects_malformed_tableau() {
        let bad = CliffordTableau::from_rows_unchecked(
            1,
            vec!["X".parse().unwrap(), "X".parse().unwrap()],
        );
        assert!(matches!(synthesize_circuit(&bad), Err(Error::NotSymplectic)));
    }
}
