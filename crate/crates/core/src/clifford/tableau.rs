use std::fmt;

use super::pauli::{BitString, PauliOperator};
use crate::error::{invalid, Error, Result};

/// Binary symplectic representation of an n-qubit Clifford unitary `U`, modulo global
/// phase.
///
/// Row `j < n` stores `U X_j U^dagger` and row `n + j` stores `U Z_j U^dagger`, each a
/// Hermitian Pauli whose sign is the tableau phase bit for that generator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    rows: Vec<PauliOperator>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        rows.extend((0..n).map(|q| PauliOperator::x_on(n, q)));
        rows.extend((0..n).map(|q| PauliOperator::z_on(n, q)));
        Self { n, rows }
    }

    /// Builds a tableau from generator images, validating the symplectic condition.
    pub fn from_rows(n: usize, rows: Vec<PauliOperator>) -> Result<Self> {
        let t = Self { n, rows };
        t.validate()?;
        Ok(t)
    }

    pub(crate) fn from_rows_unchecked(n: usize, rows: Vec<PauliOperator>) -> Self {
        Self { n, rows }
    }

    /// Builds a tableau from a `2n x 2n` bit matrix (row `i` holds the x bits followed by
    /// the z bits of generator image `i`) and `2n` sign bits.
    pub fn from_bits(n: usize, matrix: &[Vec<bool>], signs: &[bool]) -> Result<Self> {
        if matrix.len() != 2 * n || signs.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: matrix.len().min(signs.len()),
            });
        }
        let mut rows = Vec::with_capacity(2 * n);
        for (row, &sign) in matrix.iter().zip(signs) {
            if row.len() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    found: row.len(),
                });
            }
            let x = BitString::from_bools(&row[..n]);
            let z = BitString::from_bools(&row[n..]);
            rows.push(PauliOperator::new(x, z, if sign { 2 } else { 0 })?);
        }
        Self::from_rows(n, rows)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PauliOperator] {
        &self.rows
    }

    /// Image of `X_q`.
    pub fn x_image(&self, q: usize) -> &PauliOperator {
        &self.rows[q]
    }

    /// Image of `Z_q`.
    pub fn z_image(&self, q: usize) -> &PauliOperator {
        &self.rows[self.n + q]
    }

    /// Symplectic part as a `2n x 2n` bit matrix.
    pub fn symplectic_matrix(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|r| r.x_bits().iter().chain(r.z_bits().iter()).collect())
            .collect()
    }

    /// Sign bits of the `2n` generator images.
    pub fn phase_bits(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.is_negative()).collect()
    }

    /// Checks row count, Hermitian rows and `M^T Lambda M = Lambda`.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.rows.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: self.rows.len(),
            });
        }
        for r in &self.rows {
            if r.num_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.num_qubits(),
                });
            }
            if !r.is_hermitian() {
                return Err(invalid("tableau row has imaginary phase"));
            }
        }
        if !self.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        Ok(())
    }

    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let should_anticommute = j == i + n && i < n;
                if self.rows[i].commutes_with(&self.rows[j]) == should_anticommute {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// `U P U^dagger` with exact phase.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        assert_eq!(p.num_qubits(), self.n, "qubit count mismatch");
        let mut acc = PauliOperator::identity(self.n);
        acc.set_phase(p.phase());
        for q in 0..self.n {
            let (x, z) = (p.x(q), p.z(q));
            if x {
                acc = acc.mul(&self.rows[q]);
            }
            if z {
                acc = acc.mul(&self.rows[self.n + q]);
            }
            if x && z {
                acc.add_phase(1);
            }
        }
        acc
    }

    /// Tableau of "apply `self`, then `next`".
    pub fn then(&self, next: &CliffordTableau) -> Result<CliffordTableau> {
        if next.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: next.n,
            });
        }
        let rows = self.rows.iter().map(|r| next.conjugate(r)).collect();
        Ok(Self { n: self.n, rows })
    }

    /// Tableau of `U^dagger`.
    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n;
        // Unsigned symplectic inverse: row i of the inverse is Lambda M^T Lambda row i.
        // Generator i of the inverse is the Pauli whose image under U is +-generator i.
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..2 * n {
            let mut x = BitString::zeros(n);
            let mut z = BitString::zeros(n);
            // Q_i must satisfy: U Q_i U^dagger = +-g_i.  Expanding Q_i in the generator
            // basis, its coefficient on X_q is the symplectic product of g_i with row n+q
            // and on Z_q with row q.
            let gi = if i < n {
                PauliOperator::x_on(n, i)
            } else {
                PauliOperator::z_on(n, i - n)
            };
            for q in 0..n {
                x.set(q, !gi.commutes_with(&self.rows[n + q]));
                z.set(q, !gi.commutes_with(&self.rows[q]));
            }
            let mut candidate = PauliOperator::new(x, z, 0).expect("same length");
            let image = self.conjugate(&candidate);
            debug_assert!(image.x_bits() == gi.x_bits() && image.z_bits() == gi.z_bits());
            if image.is_negative() {
                candidate.set_phase(2);
            }
            rows.push(candidate);
        }
        Self { n, rows }
    }

    pub fn apply_h(&mut self, q: usize) {
        self.rows.iter_mut().for_each(|r| r.conjugate_h(q));
    }

    pub fn apply_s(&mut self, q: usize) {
        self.rows.iter_mut().for_each(|r| r.conjugate_s(q));
    }

    pub fn apply_cx(&mut self, c: usize, t: usize) {
        self.rows.iter_mut().for_each(|r| r.conjugate_cx(c, t));
    }

    /// Text form: `n=<n>` then one line per generator image with `2n` bits and a sign bit.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for r in &self.rows {
            for b in r.x_bits().iter().chain(r.z_bits().iter()) {
                out.push(if b { '1' } else { '0' });
            }
            out.push(' ');
            out.push(if r.is_negative() { '1' } else { '0' });
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected `n=<int>`, found {header:?}"),
            })?;
        let mut matrix = Vec::with_capacity(2 * n);
        let mut signs = Vec::with_capacity(2 * n);
        for (line, l) in lines {
            let mut parts = l.split_whitespace();
            let bits = parts.next().unwrap_or("");
            let sign = parts.next().ok_or_else(|| Error::Parse {
                line,
                msg: "missing sign column".into(),
            })?;
            let parse_bit = |c: char| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line,
                    msg: format!("bad bit {other:?}"),
                }),
            };
            let row = bits.chars().map(parse_bit).collect::<Result<Vec<_>>>()?;
            if row.len() != 2 * n {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} bits, found {}", 2 * n, row.len()),
                });
            }
            let mut sc = sign.chars();
            let s = parse_bit(sc.next().unwrap_or('?'))?;
            matrix.push(row);
            signs.push(s);
        }
        Self::from_bits(n, &matrix, &signs)
    }
}

impl fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CliffordTableau(n={})", self.n)?;
        for q in 0..self.n {
            writeln!(f, "  X{q} -> {}", self.rows[q])?;
        }
        for q in 0..self.n {
            writeln!(f, "  Z{q} -> {}", self.rows[self.n + q])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_symplectic_and_acts_trivially() {
        let t = CliffordTableau::identity(3);
        assert!(t.is_symplectic());
        let p: PauliOperator = "-XYZ".parse().unwrap();
        assert_eq!(t.conjugate(&p), p);
    }

    #[test]
    fn hadamard_tableau() {
        let mut t = CliffordTableau::identity(1);
        t.apply_h(0);
        assert_eq!(t.x_image(0).to_string(), "+Z");
        assert_eq!(t.z_image(0).to_string(), "+X");
        let y: PauliOperator = "Y".parse().unwrap();
        assert_eq!(t.conjugate(&y).to_string(), "-Y");
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut t = CliffordTableau::identity(3);
        t.apply_h(0);
        t.apply_s(0);
        t.apply_cx(0, 2);
        t.apply_s(2);
        t.apply_h(1);
        t.apply_cx(1, 0);
        assert!(t.then(&t.inverse()).unwrap().is_identity());
        assert!(t.inverse().then(&t).unwrap().is_identity());
    }

    #[test]
    fn rejects_non_symplectic_bits() {
        let m = vec![vec![true, false], vec![true, false]];
        assert!(matches!(
            CliffordTableau::from_bits(1, &m, &[false, false]),
            Err(Error::NotSymplectic)
        ));
    }

    #[test]
    fn text_roundtrip() {
        let mut t = CliffordTableau::identity(2);
        t.apply_h(1);
        t.apply_cx(1, 0);
        t.apply_s(0);
        t.apply_s(0);
        let text = t.to_text();
        assert!(text.starts_with("n=2\n"));
        assert_eq!(CliffordTableau::from_text(&text).unwrap(), t);
    }

    #[test]
    fn dimension_mismatch_on_compose() {
        let a = CliffordTableau::identity(2);
        let b = CliffordTableau::identity(3);
        assert!(matches!(a.then(&b), Err(Error::DimensionMismatch { .. })));
    }
}
