use std::collections::HashMap;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use stabsketch::clifford::{
    apply_clifford, compose, inverse, random_clifford, stabilizer_inner_product,
    synthesize_circuit, BitString, CliffordTableau, PauliOperator, StabilizerStateDesc,
    SYNTH_GATE_CONSTANT,
};
use stabsketch::statevector::{random_state, StateVector};

fn pauli_strategy(n: usize) -> impl Strategy<Value = PauliOperator> {
    (
        proptest::collection::vec(any::<bool>(), n),
        proptest::collection::vec(any::<bool>(), n),
        0u8..4,
    )
        .prop_map(|(x, z, phase)| {
            PauliOperator::new(BitString::from_bools(&x), BitString::from_bools(&z), phase)
                .unwrap()
        })
}

fn pauli_dense(p: &PauliOperator) -> Vec<Complex64> {
    let n = p.num_qubits();
    let dim = 1usize << n;
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    let global = Complex64::i().powu(p.phase() as u32);
    for col in 0..dim {
        let mut row = col;
        let mut amp = global;
        for q in 0..n {
            let shift = n - 1 - q;
            let bit = (col >> shift) & 1;
            let (x, z) = (p.x(q), p.z(q));
            // Y = i X Z, with Z applied first.
            if z && bit == 1 {
                amp = -amp;
            }
            if x {
                row ^= 1 << shift;
            }
            if x && z {
                amp *= Complex64::i();
            }
        }
        m[row * dim + col] = amp;
    }
    m
}

fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for l in 0..dim {
            let x = a[i * dim + l];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += x * b[l * dim + j];
            }
        }
    }
    out
}

fn close_up_to_phase(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let idx = a
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .unwrap()
        .0;
    if b[idx].norm() < 1e-12 {
        return false;
    }
    let phase = a[idx] / b[idx];
    a.iter().zip(b).all(|(x, y)| (x - y * phase).norm() < tol)
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pauli_product_is_associative(
        (a, b, c) in (1usize..6).prop_flat_map(|n| (pauli_strategy(n), pauli_strategy(n), pauli_strategy(n)))
    ) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn pauli_product_matches_dense((a, b) in (1usize..4).prop_flat_map(|n| (pauli_strategy(n), pauli_strategy(n)))) {
        let dim = 1 << a.num_qubits();
        let lhs = pauli_dense(&a.mul(&b));
        let rhs = matmul(&pauli_dense(&a), &pauli_dense(&b), dim);
        for (x, y) in lhs.iter().zip(&rhs) {
            prop_assert!((x - y).norm() < 1e-12);
        }
        prop_assert_eq!(a.commutes_with(&b), a.mul(&b) == b.mul(&a));
    }

    #[test]
    fn hermitian_iff_even_phase(p in (1usize..5).prop_flat_map(pauli_strategy)) {
        let dim = 1 << p.num_qubits();
        let m = pauli_dense(&p);
        let herm = (0..dim).all(|i| (0..dim).all(|j| (m[i * dim + j] - m[j * dim + i].conj()).norm() < 1e-12));
        prop_assert_eq!(herm, p.is_hermitian());
    }

    #[test]
    fn synthesis_round_trips(seed in any::<u64>(), n in 1usize..9) {
        let t = random_clifford(n, &mut rng(seed)).unwrap();
        let c = synthesize_circuit(&t).unwrap();
        prop_assert!(c.len() <= SYNTH_GATE_CONSTANT * n * n);
        prop_assert_eq!(c.to_tableau(), t);
    }
}

#[test]
fn symplectic_after_sampling_composition_and_inversion() {
    let mut r = rng(1);
    for i in 0..1200 {
        let n = 1 + i % 8;
        let a = random_clifford(n, &mut r).unwrap();
        let b = random_clifford(n, &mut r).unwrap();
        let ab = compose(&a, &b).unwrap();
        let inv = inverse(&a);
        for t in [&a, &ab, &inv] {
            assert!(t.is_symplectic());
        }
        assert!(compose(&a, &inv).unwrap().is_identity());
        assert_eq!(compose(&CliffordTableau::identity(n), &a).unwrap(), a);
    }
}

#[test]
fn composition_matches_dense_product() {
    let mut r = rng(2);
    for _ in 0..50 {
        let a = random_clifford(3, &mut r).unwrap();
        let b = random_clifford(3, &mut r).unwrap();
        let ua = synthesize_circuit(&a).unwrap().to_dense();
        let ub = synthesize_circuit(&b).unwrap().to_dense();
        let uab = synthesize_circuit(&compose(&a, &b).unwrap()).unwrap().to_dense();
        assert!(close_up_to_phase(&uab, &matmul(&ub, &ua, 8), 1e-10));
    }
}

#[test]
fn tableau_rows_match_dense_conjugation() {
    let mut r = rng(3);
    for n in 1..=3 {
        let t = random_clifford(n, &mut r).unwrap();
        let u = synthesize_circuit(&t).unwrap().to_dense();
        let dim = 1 << n;
        let mut u_dag = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                u_dag[j * dim + i] = u[i * dim + j].conj();
            }
        }
        for q in 0..n {
            for (p, img) in [
                (PauliOperator::x_on(n, q), t.x_image(q)),
                (PauliOperator::z_on(n, q), t.z_image(q)),
            ] {
                let conj = matmul(&matmul(&u, &pauli_dense(&p), dim), &u_dag, dim);
                let want = pauli_dense(img);
                for (x, y) in conj.iter().zip(&want) {
                    assert!((x - y).norm() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn apply_clifford_matches_dense_matrix_and_preserves_norm() {
    let mut r = rng(4);
    for _ in 0..20 {
        let psi = random_state(4, &mut r).unwrap();
        let c = synthesize_circuit(&random_clifford(4, &mut r).unwrap()).unwrap();
        let out = apply_clifford(&psi, &c).unwrap();
        let u = c.to_dense();
        for i in 0..16 {
            let want: Complex64 = (0..16).map(|j| u[i * 16 + j] * psi.amplitudes()[j]).sum();
            assert!((out.amplitudes()[i] - want).norm() < 1e-10);
        }
    }
    for n in [10usize, 14] {
        let psi = random_state(n, &mut r).unwrap();
        let c = synthesize_circuit(&random_clifford(n, &mut r).unwrap()).unwrap();
        let out = apply_clifford(&psi, &c).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }
    let zero = StateVector::basis(3, 0).unwrap();
    let empty = stabsketch::GateCircuit::new(3);
    assert_eq!(apply_clifford(&zero, &empty).unwrap(), zero);
}

fn all_symplectic(n: usize) -> Vec<Vec<Vec<bool>>> {
    let size = 2 * n;
    let mut out = Vec::new();
    for code in 0u64..1 << (size * size) {
        let m: Vec<Vec<bool>> = (0..size)
            .map(|i| (0..size).map(|j| (code >> (i * size + j)) & 1 == 1).collect())
            .collect();
        let form = |a: &[bool], b: &[bool]| -> bool {
            (0..n).fold(false, |acc, q| acc ^ (a[q] & b[n + q]) ^ (a[n + q] & b[q]))
        };
        let ok = (0..size).all(|i| {
            (0..size).all(|j| {
                let want = (i as isize - j as isize).unsigned_abs() == n;
                form(&m[i], &m[j]) == want
            })
        });
        if ok {
            out.push(m);
        }
    }
    out
}

/// Wilson-Hilferty upper quantile of chi-square at significance 1e-3.
fn chi_square_critical(dof: f64) -> f64 {
    let z = 3.090_232;
    let h = 2.0 / (9.0 * dof);
    dof * (1.0 - h + z * h.sqrt()).powi(3)
}

fn uniformity(n: usize, samples: usize, seed: u64) {
    let classes = all_symplectic(n);
    let signs = 1usize << (2 * n);
    let index: HashMap<Vec<Vec<bool>>, usize> =
        classes.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut counts = vec![0usize; classes.len() * signs];
    let mut r = rng(seed);
    for _ in 0..samples {
        let t = random_clifford(n, &mut r).unwrap();
        let class = index[&t.symplectic_matrix()];
        let sign = t.phase_bits().iter().enumerate().fold(0, |acc, (i, &b)| acc | (usize::from(b) << i));
        counts[class * signs + sign] += 1;
    }
    let expected = samples as f64 / counts.len() as f64;
    let chi: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = (counts.len() - 1) as f64;
    assert!(chi < chi_square_critical(dof), "n = {n}: chi^2 = {chi}, dof = {dof}");
}

#[test]
fn sampler_is_uniform() {
    assert_eq!(all_symplectic(1).len(), 6);
    assert_eq!(all_symplectic(2).len(), 720);
    uniformity(1, 24_000, 5);
    uniformity(1, 100_000, 6);
    uniformity(2, 100_000, 7);
}

#[test]
fn stabilizer_inner_products_match_dense() {
    let mut r = rng(8);
    for n in 1..=6 {
        let pairs = if n == 5 { 500 } else { 100 };
        for i in 0..pairs {
            let ca = synthesize_circuit(&random_clifford(n, &mut r).unwrap()).unwrap();
            let cb = synthesize_circuit(&random_clifford(n, &mut r).unwrap()).unwrap();
            let (ia, ib) = ((i * 7 % (1 << n)) as u64, (i * 13 % (1 << n)) as u64);
            let a = StabilizerStateDesc::from_circuit(&ca, ia).unwrap();
            let b = StabilizerStateDesc::from_circuit(&cb, ib).unwrap();
            let got = stabilizer_inner_product(&a, &b).unwrap().to_complex();
            let mut va = vec![Complex64::new(0.0, 0.0); 1 << n];
            va[ia as usize] = Complex64::new(1.0, 0.0);
            ca.apply_to_amplitudes(&mut va).unwrap();
            let mut vb = vec![Complex64::new(0.0, 0.0); 1 << n];
            vb[ib as usize] = Complex64::new(1.0, 0.0);
            cb.apply_to_amplitudes(&mut vb).unwrap();
            let want: Complex64 = va.iter().zip(&vb).map(|(x, y)| x.conj() * y).sum();
            assert!((got - want).norm() < 1e-10, "n {n}: {got} vs {want}");
            assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
