//! Phase-exact stabilizer states in affine/quadratic-form representation:
//!
//! `|phi> = w * sum_{u in F_2^r} i^{q(u)} |h + G u>`
//!
//! where `G` has `r` linearly independent columns, `q(u) = c + sum_a l_a u_a +
//! 2 sum_{a<b} J_ab u_a u_b (mod 4)` and `w = 2^{-e/2} exp(i pi theta / 4)`. Gate updates
//! and inner products reduce to exponential sums over such forms, each costing `O(n^3)`.
//!
//! Internally qubit `q` is bit `q` of a `u64` mask; dense vectors use the crate-wide
//! convention that qubit 0 is the most significant bit of the basis index.

use num_complex::Complex64;

use super::circuit::{Gate, GateCircuit};
use super::pauli::PauliOperator;
use crate::error::{Error, Result};

/// Largest qubit count supported by the mask-based representation.
pub const MAX_STABILIZER_QUBITS: usize = 32;

/// Exact scalar `2^{-half_powers/2} * exp(i pi eighths / 4)`, or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Amplitude {
    zero: bool,
    half_powers: i32,
    eighths: u8,
}

impl Amplitude {
    pub const ONE: Amplitude = Amplitude {
        zero: false,
        half_powers: 0,
        eighths: 0,
    };
    pub const ZERO: Amplitude = Amplitude {
        zero: true,
        half_powers: 0,
        eighths: 0,
    };

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.zero {
            return Complex64::new(0.0, 0.0);
        }
        let mag = 2f64.powf(-(self.half_powers as f64) / 2.0);
        let (re, im) = match self.eighths {
            0 => (1.0, 0.0),
            2 => (0.0, 1.0),
            4 => (-1.0, 0.0),
            6 => (0.0, -1.0),
            e => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                match e {
                    1 => (h, h),
                    3 => (-h, h),
                    5 => (-h, -h),
                    _ => (h, -h),
                }
            }
        };
        Complex64::new(mag * re, mag * im)
    }

    pub fn conj(&self) -> Amplitude {
        Amplitude {
            eighths: (8 - self.eighths) & 7,
            ..*self
        }
    }

    pub fn mul(&self, other: &Amplitude) -> Amplitude {
        if self.zero || other.zero {
            return Amplitude::ZERO;
        }
        Amplitude {
            zero: false,
            half_powers: self.half_powers + other.half_powers,
            eighths: (self.eighths + other.eighths) & 7,
        }
    }

    fn rotate(&mut self, eighths: u8) {
        self.eighths = (self.eighths + eighths) & 7;
    }

    fn scale_sqrt2(&mut self, halvings: i32) {
        self.half_powers += halvings;
    }

    /// `i^k`
    fn i_pow(k: u8) -> Amplitude {
        Amplitude {
            zero: false,
            half_powers: 0,
            eighths: (2 * k) & 7,
        }
    }
}

#[inline]
fn bit(mask: u64, i: usize) -> bool {
    (mask >> i) & 1 == 1
}

/// Quadratic form `c + sum l_a u_a + 2 sum_{a<b} J_ab u_a u_b` over `Z_4`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct QuadForm {
    constant: u8,
    linear: Vec<u8>,
    /// Symmetric coupling rows with zero diagonal.
    coupling: Vec<u64>,
}

impl QuadForm {
    fn zero(r: usize) -> Self {
        Self {
            constant: 0,
            linear: vec![0; r],
            coupling: vec![0; r],
        }
    }

    fn vars(&self) -> usize {
        self.linear.len()
    }

    fn toggle_pairs(&mut self, set: u64) {
        for b in 0..self.vars() {
            if bit(set, b) {
                self.coupling[b] ^= set & !(1u64 << b);
            }
        }
    }

    fn toggle_pair(&mut self, a: usize, b: usize) {
        self.coupling[a] ^= 1 << b;
        self.coupling[b] ^= 1 << a;
    }

    #[cfg(test)]
    fn eval(&self, u: u64) -> u8 {
        let mut v = self.constant as u32;
        for a in 0..self.vars() {
            if bit(u, a) {
                v += self.linear[a] as u32;
                v += 2 * (self.coupling[a] & u & !((1u64 << (a + 1)) - 1)).count_ones();
            }
        }
        (v & 3) as u8
    }

    fn negated(&self) -> Self {
        Self {
            constant: (4 - self.constant) & 3,
            linear: self.linear.iter().map(|&l| (4 - l) & 3).collect(),
            coupling: self.coupling.clone(),
        }
    }

    /// Block-diagonal sum of two forms on disjoint variable sets (`self` first).
    fn direct_sum(&self, other: &Self) -> Self {
        let ra = self.vars();
        let mut out = Self::zero(ra + other.vars());
        out.constant = (self.constant + other.constant) & 3;
        out.linear[..ra].copy_from_slice(&self.linear);
        out.linear[ra..].copy_from_slice(&other.linear);
        out.coupling[..ra].copy_from_slice(&self.coupling);
        for (i, &row) in other.coupling.iter().enumerate() {
            out.coupling[ra + i] = row << ra;
        }
        out
    }

    /// Affine change of variables: old variable `a` becomes
    /// `offset_a XOR parity(map[a] & w)` for `w` in `F_2^{new_vars}`.
    fn substitute(&self, offset: u64, map: &[u64], new_vars: usize) -> Self {
        debug_assert_eq!(map.len(), self.vars());
        let mut out = Self::zero(new_vars);
        let mut constant = self.constant as u32;
        let mut linear = vec![0u32; new_vars];
        for a in 0..self.vars() {
            let la = self.linear[a] as u32;
            if la == 0 {
                continue;
            }
            let ca = bit(offset, a);
            let ba = map[a];
            // Z_4 lift of c XOR parity(B): c + (1 or 3) * sum_B w + 2 * sum_{pairs in B}.
            let s = if ca { 3 } else { 1 };
            if ca {
                constant += la;
            }
            for (b, lin) in linear.iter_mut().enumerate() {
                if bit(ba, b) {
                    *lin += la * s;
                }
            }
            if la & 1 == 1 {
                out.toggle_pairs(ba);
            }
        }
        for a in 0..self.vars() {
            let mut row = self.coupling[a] & !((1u64 << (a + 1)) - 1);
            while row != 0 {
                let a2 = row.trailing_zeros() as usize;
                row &= row - 1;
                let (c1, c2) = (bit(offset, a), bit(offset, a2));
                let (b1, b2) = (map[a], map[a2]);
                // 2 * (u_a u_a2 mod 2)
                if c1 && c2 {
                    constant += 2;
                }
                let lin_mask = (if c1 { b2 } else { 0 }) ^ (if c2 { b1 } else { 0 }) ^ (b1 & b2);
                for (b, lin) in linear.iter_mut().enumerate() {
                    if bit(lin_mask, b) {
                        *lin += 2;
                    }
                }
                for b in 0..new_vars {
                    let t = (if bit(b1, b) { b2 } else { 0 }) ^ (if bit(b2, b) { b1 } else { 0 });
                    out.coupling[b] ^= t;
                }
            }
        }
        out.constant = (constant & 3) as u8;
        for (o, l) in out.linear.iter_mut().zip(linear) {
            *o = (l & 3) as u8;
        }
        for (b, row) in out.coupling.iter_mut().enumerate() {
            *row &= !(1u64 << b);
        }
        out
    }

    /// Map that deletes variable `t` (setting it to zero) and renumbers the rest.
    fn deletion_map(r: usize, t: usize) -> Vec<u64> {
        (0..r)
            .map(|a| match a.cmp(&t) {
                std::cmp::Ordering::Less => 1u64 << a,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => 1u64 << (a - 1),
            })
            .collect()
    }

    /// Map that eliminates variable `s` via `u_s = parity(rest & others)`, renumbering.
    fn elimination_map(r: usize, s: usize, others: u64) -> Vec<u64> {
        let squeeze = |mask: u64| squeeze_out(mask, s);
        (0..r)
            .map(|a| {
                if a == s {
                    squeeze(others)
                } else {
                    squeeze(1u64 << a)
                }
            })
            .collect()
    }
}

/// Outcome of summing a free variable out of an exponential sum.
enum SumOut {
    /// Variable removed; multiply the prefactor by the amplitude.
    Dropped(Amplitude),
    /// Variable removed and the remaining variables satisfy `parity(mask & w) = value`.
    Constrained { factor: Amplitude, mask: u64, value: bool },
    Zero,
}

/// Sums variable `t` out of `sum_w i^{q(w)}`, mutating the form's remaining terms.
/// The caller still has to delete `t` from the form.
fn sum_out_variable(form: &mut QuadForm, t: usize) -> SumOut {
    let a_mask = form.coupling[t];
    let lt = form.linear[t];
    // Strip t's own terms; the caller deletes the variable afterwards.
    for a in 0..form.vars() {
        if bit(a_mask, a) {
            form.toggle_pair(a, t);
        }
    }
    form.linear[t] = 0;
    if a_mask == 0 {
        let mut f = Amplitude::ONE;
        match lt {
            0 => f.scale_sqrt2(-2),
            1 => {
                f.scale_sqrt2(-1);
                f.rotate(1);
            }
            2 => return SumOut::Zero,
            _ => {
                f.scale_sqrt2(-1);
                f.rotate(7);
            }
        }
        return SumOut::Dropped(f);
    }
    if lt & 1 == 0 {
        let mut f = Amplitude::ONE;
        f.scale_sqrt2(-2);
        return SumOut::Constrained {
            factor: f,
            mask: a_mask,
            value: lt == 2,
        };
    }
    // 1 + i^{lt + 2m} with m = parity(A & w).
    let mut f = Amplitude::ONE;
    f.scale_sqrt2(-1);
    f.rotate(1);
    let d = lt == 3;
    let sigma = if d { 1 } else { 3 };
    if d {
        form.constant = (form.constant + 3) & 3;
    }
    for a in 0..form.vars() {
        if bit(a_mask, a) {
            form.linear[a] = (form.linear[a] + sigma) & 3;
        }
    }
    form.toggle_pairs(a_mask);
    SumOut::Dropped(f)
}

/// `sum_{w in F_2^r} i^{q(w)}` evaluated exactly.
fn exponential_sum(mut form: QuadForm) -> Amplitude {
    let mut acc = Amplitude::ONE;
    while form.vars() > 0 {
        let t = form.vars() - 1;
        let r = form.vars();
        match sum_out_variable(&mut form, t) {
            SumOut::Zero => return Amplitude::ZERO,
            SumOut::Dropped(f) => {
                acc = acc.mul(&f);
                form = form.substitute(0, &QuadForm::deletion_map(r, t), r - 1);
            }
            SumOut::Constrained { factor, mask, value } => {
                acc = acc.mul(&factor);
                form = form.substitute(0, &QuadForm::deletion_map(r, t), r - 1);
                let r = r - 1;
                let s = mask.trailing_zeros() as usize;
                let offset = if value { 1u64 << s } else { 0 };
                let map = QuadForm::elimination_map(r, s, mask & !(1u64 << s));
                form = form.substitute(offset, &map, r - 1);
            }
        }
    }
    acc.mul(&Amplitude::i_pow(form.constant))
}

/// Compact, phase-exact description of an n-qubit stabilizer state (possibly
/// unnormalized after projections).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerStateDesc {
    n: usize,
    scale: Amplitude,
    shift: u64,
    columns: Vec<u64>,
    form: QuadForm,
}

impl StabilizerStateDesc {
    /// Computational basis state `|index>` (qubit 0 is the most significant bit).
    pub fn basis(n: usize, index: u64) -> Result<Self> {
        if n > MAX_STABILIZER_QUBITS {
            return Err(Error::TooLarge {
                what: "stabilizer state",
                n,
                limit: MAX_STABILIZER_QUBITS,
            });
        }
        if n < 64 && index >> n != 0 {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
        }
        let mut shift = 0u64;
        for q in 0..n {
            if bit(index, n - 1 - q) {
                shift |= 1 << q;
            }
        }
        Ok(Self {
            n,
            scale: Amplitude::ONE,
            shift,
            columns: Vec::new(),
            form: QuadForm::zero(0),
        })
    }

    /// `circuit |index>`.
    pub fn from_circuit(circuit: &GateCircuit, index: u64) -> Result<Self> {
        let mut s = Self::basis(circuit.num_qubits(), index)?;
        s.apply_circuit(circuit)?;
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Dimension of the affine support.
    pub fn support_dimension(&self) -> usize {
        self.columns.len()
    }

    pub fn is_zero(&self) -> bool {
        self.scale.is_zero()
    }

    pub fn norm_sqr(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let m = self.scale.to_complex().norm();
        m * m * 2f64.powi(self.columns.len() as i32)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &GateCircuit) -> Result<()> {
        if circuit.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: circuit.num_qubits(),
            });
        }
        for &g in circuit.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        match gate {
            Gate::H(q) => {
                self.check_qubit(q)?;
                self.apply_h(q);
            }
            Gate::S(q) => {
                self.check_qubit(q)?;
                self.apply_s(q);
            }
            Gate::Cx(c, t) => {
                self.check_qubit(c)?;
                self.check_qubit(t)?;
                self.apply_cx(c, t);
            }
        }
        Ok(())
    }

    fn row_support(&self, q: usize) -> u64 {
        let mut m = 0u64;
        for (a, &col) in self.columns.iter().enumerate() {
            if bit(col, q) {
                m |= 1 << a;
            }
        }
        m
    }

    fn apply_x(&mut self, q: usize) {
        self.shift ^= 1 << q;
    }

    fn apply_z(&mut self, q: usize) {
        if bit(self.shift, q) {
            self.scale.rotate(4);
        }
        let a_mask = self.row_support(q);
        for a in 0..self.columns.len() {
            if bit(a_mask, a) {
                self.form.linear[a] = (self.form.linear[a] + 2) & 3;
            }
        }
    }

    fn apply_s(&mut self, q: usize) {
        // i^{h XOR parity(A u)}
        let a_mask = self.row_support(q);
        let h = bit(self.shift, q);
        let delta = if h { 3 } else { 1 };
        if h {
            self.scale.rotate(2);
        }
        for a in 0..self.columns.len() {
            if bit(a_mask, a) {
                self.form.linear[a] = (self.form.linear[a] + delta) & 3;
            }
        }
        self.form.toggle_pairs(a_mask);
    }

    fn apply_cx(&mut self, c: usize, t: usize) {
        if bit(self.shift, c) {
            self.shift ^= 1 << t;
        }
        for col in &mut self.columns {
            if bit(*col, c) {
                *col ^= 1 << t;
            }
        }
    }

    fn apply_h(&mut self, q: usize) {
        let r = self.columns.len();
        let a_mask = self.row_support(q);
        let h = bit(self.shift, q);
        // New variable w = r carries the output bit; phase (-1)^{w (h + parity(A u))}.
        let mut form = self.form.substitute(
            0,
            &(0..r).map(|a| 1u64 << a).collect::<Vec<_>>(),
            r + 1,
        );
        form.linear[r] = if h { 2 } else { 0 };
        for a in 0..r {
            if bit(a_mask, a) {
                form.toggle_pair(a, r);
            }
        }
        let mut columns: Vec<u64> = self.columns.iter().map(|&c| c & !(1u64 << q)).collect();
        columns.push(1 << q);
        self.shift &= !(1u64 << q);
        self.scale.scale_sqrt2(1);
        self.form = form;
        self.columns = columns;

        if let Some(dep) = dependent_subset(&self.columns[..r]) {
            // Re-parametrize so that variable s no longer moves the support, then sum it
            // out.
            let s = dep.trailing_zeros() as usize;
            let rr = self.columns.len();
            let map: Vec<u64> = (0..rr)
                .map(|a| {
                    if a != s && bit(dep, a) {
                        (1u64 << a) | (1u64 << s)
                    } else {
                        1u64 << a
                    }
                })
                .collect();
            self.substitute(0, &map, rr);
            debug_assert_eq!(self.columns[s], 0);
            self.sum_out_free(s);
        }
    }

    /// Applies an affine change of variables to form, columns and shift together.
    fn substitute(&mut self, offset: u64, map: &[u64], new_vars: usize) {
        self.form = self.form.substitute(offset, map, new_vars);
        let mut columns = vec![0u64; new_vars];
        for (a, &m) in map.iter().enumerate() {
            for (b, col) in columns.iter_mut().enumerate() {
                if bit(m, b) {
                    *col ^= self.columns[a];
                }
            }
            if bit(offset, a) {
                self.shift ^= self.columns[a];
            }
        }
        self.columns = columns;
    }

    /// Sums out variable `t`, whose column must be zero.
    fn sum_out_free(&mut self, t: usize) {
        let r = self.columns.len();
        match sum_out_variable(&mut self.form, t) {
            SumOut::Zero => {
                self.set_zero();
            }
            SumOut::Dropped(f) => {
                self.scale = self.scale.mul(&f);
                self.substitute(0, &QuadForm::deletion_map(r, t), r - 1);
            }
            SumOut::Constrained { factor, mask, value } => {
                self.scale = self.scale.mul(&factor);
                self.substitute(0, &QuadForm::deletion_map(r, t), r - 1);
                self.constrain(squeeze_out(mask, t), value);
            }
        }
    }

    /// Restricts the support to `parity(mask & u) = value`.
    fn constrain(&mut self, mask: u64, value: bool) {
        if mask == 0 {
            if value {
                self.set_zero();
            }
            return;
        }
        let r = self.columns.len();
        let s = mask.trailing_zeros() as usize;
        let offset = if value { 1u64 << s } else { 0 };
        let map = QuadForm::elimination_map(r, s, mask & !(1u64 << s));
        self.substitute(offset, &map, r - 1);
    }

    fn set_zero(&mut self) {
        self.scale = Amplitude::ZERO;
        self.columns.clear();
        self.form = QuadForm::zero(0);
        self.shift = 0;
    }

    /// Applies a Pauli operator, including its phase.
    pub fn apply_pauli(&mut self, p: &PauliOperator) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.num_qubits(),
            });
        }
        let mut phase = p.phase();
        for q in 0..self.n {
            let (x, z) = (p.x(q), p.z(q));
            if z {
                self.apply_z(q);
            }
            if x {
                self.apply_x(q);
            }
            if x && z {
                phase += 1;
            }
        }
        self.scale = self.scale.mul(&Amplitude::i_pow(phase & 3));
        Ok(())
    }

    /// Projects onto `|0>` on every qubit in `qubits` (no renormalization).
    pub fn project_zero(&mut self, qubits: &[usize]) -> Result<()> {
        for &q in qubits {
            self.check_qubit(q)?;
            if self.is_zero() {
                return Ok(());
            }
            let mask = self.row_support(q);
            self.constrain(mask, bit(self.shift, q));
        }
        Ok(())
    }

    /// Dense amplitudes (length `2^n`).
    pub fn to_amplitudes(&self) -> Vec<Complex64> {
        let dim = 1usize << self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        if self.is_zero() {
            return out;
        }
        let r = self.columns.len();
        for u in 0..(1u64 << r) {
            let mut x = self.shift;
            let mut q = self.form.constant as u32;
            for a in 0..r {
                if bit(u, a) {
                    x ^= self.columns[a];
                    q += self.form.linear[a] as u32;
                    q += 2 * (self.form.coupling[a] & u & !((1u64 << (a + 1)) - 1)).count_ones();
                }
            }
            let amp = self.scale.mul(&Amplitude::i_pow((q & 3) as u8));
            out[self.dense_index(x)] = amp.to_complex();
        }
        out
    }

    fn dense_index(&self, mask: u64) -> usize {
        let mut idx = 0usize;
        for q in 0..self.n {
            if bit(mask, q) {
                idx |= 1 << (self.n - 1 - q);
            }
        }
        idx
    }
}

/// Removes bit `t` from `mask`, shifting higher bits down.
fn squeeze_out(mask: u64, t: usize) -> u64 {
    let low = mask & ((1u64 << t) - 1);
    let high = (mask >> (t + 1)) << t;
    low | high
}

/// Finds a nonempty subset of columns summing to zero, if any.
fn dependent_subset(columns: &[u64]) -> Option<u64> {
    // Gaussian elimination tracking which original columns make up each reduced vector.
    let mut basis: Vec<(u64, u64)> = Vec::new();
    for (a, &col) in columns.iter().enumerate() {
        let mut v = col;
        let mut combo = 1u64 << a;
        for &(bv, bc) in &basis {
            let pivot = 63 - bv.leading_zeros();
            if bit(v, pivot as usize) {
                v ^= bv;
                combo ^= bc;
            }
        }
        if v == 0 {
            return Some(combo);
        }
        basis.push((v, combo));
        basis.sort_by_key(|x| std::cmp::Reverse(x.0));
    }
    None
}

/// Solves `A x = b` over F_2 where each equation is `(mask over unknowns, rhs)`.
/// Returns a particular solution and a nullspace basis, or `None` if inconsistent.
fn solve_gf2(equations: &[(u64, bool)], unknowns: usize) -> Option<(u64, Vec<u64>)> {
    let mut rows: Vec<(u64, bool)> = equations.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0;
    for col in 0..unknowns {
        let Some(p) = (rank..rows.len()).find(|&i| bit(rows[i].0, col)) else {
            continue;
        };
        rows.swap(rank, p);
        let (pm, pb) = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && bit(row.0, col) {
                row.0 ^= pm;
                row.1 ^= pb;
            }
        }
        pivots.push((rank, col));
        rank += 1;
    }
    if rows[rank..].iter().any(|&(m, b)| m == 0 && b) {
        return None;
    }
    let pivot_cols: u64 = pivots.iter().fold(0, |m, &(_, c)| m | (1 << c));
    let mut particular = 0u64;
    for &(r, c) in &pivots {
        if rows[r].1 {
            particular |= 1 << c;
        }
    }
    let mut null = Vec::new();
    for free in 0..unknowns {
        if bit(pivot_cols, free) {
            continue;
        }
        let mut v = 1u64 << free;
        for &(r, c) in &pivots {
            if bit(rows[r].0, free) {
                v |= 1 << c;
            }
        }
        null.push(v);
    }
    Some((particular, null))
}

/// `<a| R |b>` where `R` projects the qubits listed in `zero_qubits` onto `|0>`.
pub fn projected_inner_product(
    a: &StabilizerStateDesc,
    zero_qubits: &[usize],
    b: &StabilizerStateDesc,
) -> Result<Amplitude> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    if let Some(&q) = zero_qubits.iter().find(|&&q| q >= a.n) {
        return Err(Error::QubitOutOfRange { qubit: q, n: a.n });
    }
    if a.is_zero() || b.is_zero() {
        return Ok(Amplitude::ZERO);
    }
    let (ra, rb) = (a.columns.len(), b.columns.len());
    let unknowns = ra + rb;
    // Unknowns (u, v): h_a + G_a u = h_b + G_b v, and (h_b + G_b v)_q = 0 on zero_qubits.
    let mut eqs = Vec::with_capacity(a.n + zero_qubits.len());
    for q in 0..a.n {
        let mask = a.row_support(q) | (b.row_support(q) << ra);
        eqs.push((mask, bit(a.shift, q) ^ bit(b.shift, q)));
    }
    for &q in zero_qubits {
        eqs.push((b.row_support(q) << ra, bit(b.shift, q)));
    }
    let Some((particular, null)) = solve_gf2(&eqs, unknowns) else {
        return Ok(Amplitude::ZERO);
    };
    let combined = a.form.negated().direct_sum(&b.form);
    let d = null.len();
    let map: Vec<u64> = (0..unknowns)
        .map(|var| {
            let mut m = 0u64;
            for (j, &nv) in null.iter().enumerate() {
                if bit(nv, var) {
                    m |= 1 << j;
                }
            }
            m
        })
        .collect();
    let reduced = combined.substitute(particular, &map, d);
    let sum = exponential_sum(reduced);
    Ok(a.scale.conj().mul(&b.scale).mul(&sum))
}

/// `<a|b>` computed exactly in polynomial time.
pub fn stabilizer_inner_product(a: &StabilizerStateDesc, b: &StabilizerStateDesc) -> Result<Amplitude> {
    projected_inner_product(a, &[], b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{random_clifford, synthesize_circuit};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_form(rng: &mut ChaCha8Rng, r: usize) -> QuadForm {
        let mut f = QuadForm::zero(r);
        f.constant = rng.random_range(0..4);
        for a in 0..r {
            f.linear[a] = rng.random_range(0..4);
            for b in a + 1..r {
                if rng.random() {
                    f.toggle_pair(a, b);
                }
            }
        }
        f
    }

    fn brute_sum(f: &QuadForm) -> Complex64 {
        (0..1u64 << f.vars())
            .map(|u| Amplitude::i_pow(f.eval(u)).to_complex())
            .sum()
    }

    #[test]
    fn substitution_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let r = rng.random_range(1..6);
            let r2 = rng.random_range(0..6);
            let f = random_form(&mut rng, r);
            let offset = rng.random_range(0..1u64 << r);
            let map: Vec<u64> = (0..r).map(|_| rng.random_range(0..1u64 << r2.max(1)) & ((1 << r2) - 1)).collect();
            let g = f.substitute(offset, &map, r2);
            for w in 0..1u64 << r2 {
                let mut u = offset;
                for (a, &m) in map.iter().enumerate() {
                    if (m & w).count_ones() & 1 == 1 {
                        u ^= 1 << a;
                    }
                }
                assert_eq!(g.eval(w), f.eval(u));
            }
        }
    }

    #[test]
    fn exponential_sum_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let r = rng.random_range(0..8);
            let f = random_form(&mut rng, r);
            let exact = exponential_sum(f.clone()).to_complex();
            assert!((exact - brute_sum(&f)).norm() < 1e-9, "r={r}");
        }
    }

    #[test]
    fn circuit_states_match_dense_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5 {
            for _ in 0..40 {
                let c = synthesize_circuit(&random_clifford(n, &mut rng).unwrap()).unwrap();
                let index = rng.random_range(0..1u64 << n);
                let s = StabilizerStateDesc::from_circuit(&c, index).unwrap();
                let mut dense = vec![Complex64::new(0.0, 0.0); 1 << n];
                dense[index as usize] = Complex64::new(1.0, 0.0);
                c.apply_to_amplitudes(&mut dense).unwrap();
                for (x, y) in s.to_amplitudes().iter().zip(&dense) {
                    assert!((x - y).norm() < 1e-12);
                }
                assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_overlap_is_one() {
        let a = StabilizerStateDesc::basis(4, 0).unwrap();
        let v = stabilizer_inner_product(&a, &a).unwrap();
        assert_eq!(v, Amplitude::ONE);
    }

    #[test]
    fn hadamard_overlap() {
        let a = StabilizerStateDesc::basis(1, 0).unwrap();
        let mut b = a.clone();
        b.apply_gate(Gate::H(0)).unwrap();
        let v = stabilizer_inner_product(&a, &b).unwrap().to_complex();
        assert!((v - Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pauli_application_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 3;
        let c = synthesize_circuit(&random_clifford(n, &mut rng).unwrap()).unwrap();
        let mut s = StabilizerStateDesc::from_circuit(&c, 0).unwrap();
        let before = s.to_amplitudes();
        let p: PauliOperator = "-iYXZ".parse().unwrap();
        s.apply_pauli(&p).unwrap();
        let after = s.to_amplitudes();
        // Dense: -i * Y (x) X (x) Z
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let ym = [[zero, -i], [i, zero]];
        let xm = [[zero, one], [one, zero]];
        let zm = [[one, zero], [zero, -one]];
        for row in 0..8usize {
            let mut acc = zero;
            for col in 0..8usize {
                let e = ym[row >> 2][col >> 2] * xm[(row >> 1) & 1][(col >> 1) & 1] * zm[row & 1][col & 1];
                acc += e * before[col];
            }
            assert!((after[row] - (-i) * acc).norm() < 1e-12);
        }
    }
}
