//! Uniform sampling from the symplectic group `Sp(2n, F_2)` by the transvection
//! construction of Koenig and Smolin, plus uniformly random sign bits.
//!
//! Vectors here use interleaved coordinates `(x_0, z_0, x_1, z_1, ...)`.

use rand::Rng;

use super::pauli::{BitString, PauliOperator};
use super::tableau::CliffordTableau;
use crate::error::{invalid, Result};

type Vector = Vec<bool>;

fn inner(v: &[bool], w: &[bool]) -> bool {
    let mut t = false;
    for i in 0..v.len() / 2 {
        t ^= v[2 * i] & w[2 * i + 1];
        t ^= w[2 * i] & v[2 * i + 1];
    }
    t
}

/// Symplectic transvection `Z_k(v) = v + <k, v> k`.
fn transvection(k: &[bool], v: &mut [bool]) {
    if inner(k, v) {
        for (a, &b) in v.iter_mut().zip(k) {
            *a ^= b;
        }
    }
}

fn add(a: &[bool], b: &[bool]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| x ^ y).collect()
}

/// Finds `h1, h2` such that applying `Z_h1` and then `Z_h2` maps `x` to `y`.
fn find_transvection(x: &[bool], y: &[bool]) -> (Vector, Vector) {
    let len = x.len();
    let zero = vec![false; len];
    if x == y {
        return (zero.clone(), zero);
    }
    if inner(x, y) {
        return (add(x, y), zero);
    }
    let mut z = vec![false; len];
    for i in 0..len / 2 {
        let ii = 2 * i;
        if (x[ii] || x[ii + 1]) && (y[ii] || y[ii + 1]) {
            z[ii] = x[ii] ^ y[ii];
            z[ii + 1] = x[ii + 1] ^ y[ii + 1];
            if !z[ii] && !z[ii + 1] {
                z[ii + 1] = true;
                if x[ii] != x[ii + 1] {
                    z[ii] = true;
                }
            }
            return (add(x, &z), add(y, &z));
        }
    }
    // No qubit where both are nonzero: bridge through one where only x is nonzero and
    // one where only y is nonzero.
    for i in 0..len / 2 {
        let ii = 2 * i;
        if (x[ii] || x[ii + 1]) && !(y[ii] || y[ii + 1]) {
            if x[ii] == x[ii + 1] {
                z[ii + 1] = true;
            } else {
                z[ii + 1] = x[ii];
                z[ii] = x[ii + 1];
            }
            break;
        }
    }
    for i in 0..len / 2 {
        let ii = 2 * i;
        if !(x[ii] || x[ii + 1]) && (y[ii] || y[ii + 1]) {
            if y[ii] == y[ii + 1] {
                z[ii + 1] = true;
            } else {
                z[ii + 1] = y[ii];
                z[ii] = y[ii + 1];
            }
            break;
        }
    }
    (add(x, &z), add(y, &z))
}

/// Uniformly random element of `Sp(2n, F_2)`; row `j` is the image of basis vector `j`.
pub(crate) fn random_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Vector> {
    let nn = 2 * n;
    let mut f1: Vector = loop {
        let v: Vector = (0..nn).map(|_| rng.random::<bool>()).collect();
        if v.iter().any(|&b| b) {
            break v;
        }
    };
    let mut e1 = vec![false; nn];
    e1[0] = true;
    let (t0, t1) = find_transvection(&e1, &f1);

    let bits: Vector = (0..nn - 1).map(|_| rng.random::<bool>()).collect();
    let mut h0 = e1.clone();
    h0[2..nn].copy_from_slice(&bits[1..nn - 1]);
    transvection(&t0, &mut h0);
    transvection(&t1, &mut h0);
    if bits[0] {
        f1.iter_mut().for_each(|b| *b = false);
    }

    let mut g = vec![vec![false; nn]; nn];
    g[0][0] = true;
    g[1][1] = true;
    if n > 1 {
        let sub = random_symplectic(n - 1, rng);
        for (i, row) in sub.into_iter().enumerate() {
            g[i + 2][2..].copy_from_slice(&row);
        }
    }
    for row in g.iter_mut() {
        transvection(&t0, row);
        transvection(&t1, row);
        transvection(&h0, row);
        transvection(&f1, row);
    }
    g
}

/// Uniformly random n-qubit Clifford tableau (modulo global phase).
pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CliffordTableau> {
    if n == 0 {
        return Err(invalid("random_clifford needs n >= 1"));
    }
    let g = random_symplectic(n, rng);
    let mut rows = vec![PauliOperator::identity(n); 2 * n];
    for q in 0..n {
        for (slot, vec) in [(q, &g[2 * q]), (n + q, &g[2 * q + 1])] {
            let mut x = BitString::zeros(n);
            let mut z = BitString::zeros(n);
            for j in 0..n {
                x.set(j, vec[2 * j]);
                z.set(j, vec[2 * j + 1]);
            }
            let sign = if rng.random::<bool>() { 2 } else { 0 };
            rows[slot] = PauliOperator::new(x, z, sign)?;
        }
    }
    Ok(CliffordTableau::from_rows_unchecked(n, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transvection_maps_as_promised() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let nn = 2 * rng.random_range(1..5usize);
            let draw = |rng: &mut ChaCha8Rng| loop {
                let v: Vector = (0..nn).map(|_| rng.random()).collect();
                if v.iter().any(|&b| b) {
                    break v;
                }
            };
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let (h1, h2) = find_transvection(&x, &y);
            let mut v = x.clone();
            transvection(&h1, &mut v);
            transvection(&h2, &mut v);
            assert_eq!(v, y);
        }
    }

    #[test]
    fn sampled_tableaux_are_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=8 {
            for _ in 0..150 {
                let t = random_clifford(n, &mut rng).unwrap();
                assert!(t.is_symplectic(), "n={n}");
                t.validate().unwrap();
            }
        }
    }

    #[test]
    fn zero_qubits_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_clifford(0, &mut rng).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = random_clifford(4, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = random_clifford(4, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(a, b);
    }
}
