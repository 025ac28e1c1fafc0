//! Real-weighted sums of Pauli strings.
//!
//! Qubit `q` is character `q` of a string's text form (leftmost is qubit 0)
//! and bit `q` of a basis-state index. Strings are stored in symplectic form
//! (`x`, `z` bit masks, `Y = iXZ`), so at most 64 qubits are supported.

mod dense;
mod mixers;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex;

use crate::error::{domain, McoError, Result};
use crate::scalar::{Real, Scalar};

pub use dense::DenseMatrix;
pub use mixers::{
    c_dswap, col_swap, control_false, control_false_on, control_true, control_true_on, cost_hamiltonian,
    cost_hamiltonian_on, dswap, mixer_s1, mixer_s2, mixer_s2_components, swap_pauli, transverse_mixer,
    MixerComponent,
};

/// Largest qubit count [`PauliSum::realize_matrix`] will expand densely.
pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-qubit Paulis on `n` qubits.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64, "at most 64 qubits");
        Self { n, x: 0, z: 0 }
    }

    pub fn from_ops(ops: &[Pauli]) -> Self {
        let mut s = Self::identity(ops.len());
        for (q, &op) in ops.iter().enumerate() {
            s.set(q, op);
        }
        s
    }

    /// `op` on every listed qubit, identity elsewhere.
    pub fn on(n: usize, qubits: &[usize], op: Pauli) -> Self {
        let mut s = Self::identity(n);
        for &q in qubits {
            s.set(q, op);
        }
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Qubits acted on non-trivially.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn get(&self, q: usize) -> Pauli {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn set(&mut self, q: usize, op: Pauli) {
        assert!(q < self.n, "qubit {q} out of range");
        let bit = 1u64 << q;
        self.x &= !bit;
        self.z &= !bit;
        match op {
            Pauli::I => {}
            Pauli::X => self.x |= bit,
            Pauli::Y => {
                self.x |= bit;
                self.z |= bit;
            }
            Pauli::Z => self.z |= bit,
        }
    }

    pub fn ops(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Image of a basis state: `P|b> = phase * |b ^ x>`.
    pub fn act_on_basis<T: Scalar>(&self, b: u64) -> (u64, Complex<T>) {
        let mut phase = i_power::<T>(self.y_count());
        if (self.z & b).count_ones() % 2 == 1 {
            phase = -phase;
        }
        (b ^ self.x, phase)
    }

    /// Places this string on `n` qubits with qubit `q` moved to `q + offset`.
    pub fn shifted(&self, offset: usize, n: usize) -> Self {
        assert!(self.n + offset <= n && n <= 64);
        Self { n, x: self.x << offset, z: self.z << offset }
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then_with(|| {
            (0..self.n)
                .map(|q| self.get(q).cmp(&other.get(q)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl std::str::FromStr for PauliString {
    type Err = McoError;

    fn from_str(s: &str) -> Result<Self> {
        let ops: Option<Vec<Pauli>> = s.chars().map(Pauli::from_char).collect();
        let ops = ops.ok_or_else(|| McoError::Parse(format!("invalid Pauli string `{s}`")))?;
        if ops.len() > 64 {
            return Err(McoError::Parse("Pauli strings are limited to 64 qubits".into()));
        }
        Ok(Self::from_ops(&ops))
    }
}

pub(crate) fn i_power<T: Scalar>(k: u32) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match k % 4 {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}

/// Hermitian operator `sum_k c_k P_k` with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum<T> {
    n: usize,
    terms: BTreeMap<PauliString, T>,
}

impl<T: Scalar> PauliSum<T> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 64, "at most 64 qubits");
        Self { n, terms: BTreeMap::new() }
    }

    /// `c * I`.
    pub fn identity(n: usize, c: T) -> Self {
        let mut s = Self::zero(n);
        s.add_term(PauliString::identity(n), c);
        s
    }

    pub fn from_term(p: PauliString, c: T) -> Self {
        let mut s = Self::zero(p.n_qubits());
        s.add_term(p, c);
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &T)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &PauliString) -> T {
        self.terms.get(p).copied().unwrap_or_else(T::zero)
    }

    pub fn identity_coefficient(&self) -> T {
        self.coefficient(&PauliString::identity(self.n))
    }

    /// Adds `c * p`, merging with an existing term and dropping it if the
    /// result is negligible.
    pub fn add_term(&mut self, p: PauliString, c: T) {
        assert_eq!(p.n_qubits(), self.n, "qubit count mismatch");
        let merged = self.coefficient(&p) + c;
        if merged.is_negligible() {
            self.terms.remove(&p);
        } else {
            self.terms.insert(p, merged);
        }
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = Self::zero(self.n);
        for (p, &v) in &self.terms {
            out.add_term(*p, v * c);
        }
        out
    }

    pub fn add_assign_sum(&mut self, other: &Self) {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        for (p, &c) in &other.terms {
            self.add_term(*p, c);
        }
    }

    /// Union of the supports of all terms.
    pub fn support(&self) -> u64 {
        self.terms.keys().fold(0, |acc, p| acc | p.support())
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(PauliString::is_diagonal)
    }

    /// Product of two operators acting on disjoint qubits (a tensor product
    /// embedded in the same register), so no phases arise.
    pub fn disjoint_product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return domain("qubit count mismatch");
        }
        if self.support() & other.support() != 0 {
            return domain("operands act on overlapping qubits");
        }
        let mut out = Self::zero(self.n);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                out.add_term(PauliString { n: self.n, x: a.x | b.x, z: a.z | b.z }, ca * cb);
            }
        }
        Ok(out)
    }

    /// Embeds into `n` qubits with qubit `q` moved to `q + offset`.
    pub fn shifted(&self, offset: usize, n: usize) -> Self {
        let mut out = Self::zero(n);
        for (p, &c) in &self.terms {
            out.add_term(p.shifted(offset, n), c);
        }
        out
    }

    /// Sum of absolute coefficients, an upper bound on the spectral norm.
    pub fn one_norm(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, c| acc + c.abs())
    }

    /// `H|b>` as a sparse map from basis index to amplitude.
    pub fn apply_to_basis(&self, b: u64) -> BTreeMap<u64, Complex<T>> {
        let mut out: BTreeMap<u64, Complex<T>> = BTreeMap::new();
        for (p, &c) in &self.terms {
            let (target, phase) = p.act_on_basis::<T>(b);
            let e = out.entry(target).or_insert_with(|| Complex::new(T::zero(), T::zero()));
            *e = *e + phase * c;
        }
        out.retain(|_, v| !(v.re.is_negligible() && v.im.is_negligible()));
        out
    }

    /// Dense `2^n x 2^n` matrix; refuses more than [`MAX_DENSE_QUBITS`] qubits.
    pub fn realize_matrix(&self) -> Result<DenseMatrix<T>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(McoError::ResourceLimit(format!(
                "dense realization of {} qubits (limit {MAX_DENSE_QUBITS})",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let mut m = DenseMatrix::zeros(dim);
        for col in 0..dim {
            for (p, &c) in &self.terms {
                let (row, phase) = p.act_on_basis::<T>(col as u64);
                m.add_to(row as usize, col, phase * c);
            }
        }
        Ok(m)
    }

    /// Text form: one `<coefficient> <string>` line per term, strings sorted
    /// lexicographically.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<(String, T)> = self.terms.iter().map(|(p, &c)| (p.to_string(), c)).collect();
        lines.sort_by(|a, b| a.0.cmp(&b.0));
        lines.into_iter().map(|(s, c)| format!("{c} {s}\n")).collect()
    }
}

impl<T: Scalar + std::str::FromStr> PauliSum<T> {
    /// Parses the [`to_text`](Self::to_text) format. `n` is needed for empty sums.
    pub fn from_text(text: &str, n: usize) -> Result<Self> {
        let mut out = Self::zero(n);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(c), Some(s), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(McoError::Parse(format!("line {}: expected `<coefficient> <string>`", lineno + 1)));
            };
            let c: T = c.parse().map_err(|_| McoError::Parse(format!("line {}: bad coefficient", lineno + 1)))?;
            let p: PauliString = s.parse()?;
            if p.n_qubits() != n {
                return Err(McoError::Parse(format!("line {}: expected {n} qubits", lineno + 1)));
            }
            out.add_term(p, c);
        }
        Ok(out)
    }
}

impl<T: Real> PauliSum<T> {
    /// `out = H * input` over the full `2^n` register, term by term.
    pub fn apply_into(&self, input: &[Complex<T>], out: &mut [Complex<T>]) {
        assert_eq!(input.len(), 1usize << self.n);
        assert_eq!(out.len(), input.len());
        out.iter_mut().for_each(|v| *v = Complex::new(T::zero(), T::zero()));
        for (p, &c) in &self.terms {
            let base = i_power::<T>(p.y_count()) * c;
            let (x, z) = (p.x as usize, p.z as usize);
            for (b, &amp) in input.iter().enumerate() {
                let v = base * amp;
                if (z & b).count_ones() % 2 == 1 {
                    out[b ^ x] = out[b ^ x] - v;
                } else {
                    out[b ^ x] = out[b ^ x] + v;
                }
            }
        }
    }
}

impl<T: Scalar> Add for PauliSum<T> {
    type Output = PauliSum<T>;

    fn add(mut self, rhs: Self) -> Self {
        self.add_assign_sum(&rhs);
        self
    }
}

impl<T: Scalar> Mul<T> for PauliSum<T> {
    type Output = PauliSum<T>;

    fn mul(self, rhs: T) -> Self {
        self.scaled(rhs)
    }
}
