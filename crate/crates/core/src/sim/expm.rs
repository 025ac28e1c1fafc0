//! Matrix-free `exp(-i beta H)` by Chebyshev expansion.
//!
//! With the spectrum of `H` inside `[c - a, c + a]` and `X = (H - c) / a`,
//! `exp(-i beta H) = exp(-i beta c) * sum_k (2 - [k = 0]) (-i)^k J_k(beta a) T_k(X)`.
//! `T_k(X) psi` follows the three-term recurrence, one application of `H`
//! per order, and `||T_k(X) psi|| <= 1`, so `|coefficient_k|` bounds the norm
//! of each appended term.

use num_complex::Complex;

use crate::error::{McoError, Result};
use crate::pauli::{i_power, Pauli, PauliString, PauliSum};
use crate::scalar::{Real, Scalar};

use super::{check_size, StateVector};

/// Upper bound on `groups * 2^n` amplitudes held by the grouped backend.
const GROUPED_BUDGET: usize = 1 << 22;

/// Largest support of a block evolved as a dense local gate.
const BLOCK_MAX_QUBITS: usize = 8;

/// `J_0(z), ..., J_kmax(z)` for `z >= 0` by Miller's backward recurrence,
/// normalized with `J_0 + 2 sum_k J_2k = 1`.
pub fn bessel_j_sequence(z: f64, kmax: usize) -> Vec<f64> {
    assert!(z >= 0.0 && z.is_finite());
    let mut out = vec![0.0; kmax + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if z < 1e-3 {
        // power series; three terms reach full precision here
        let h = z / 2.0;
        let mut lead = 1.0; // (z/2)^k / k!
        for (k, v) in out.iter_mut().enumerate() {
            if k > 0 {
                lead *= h / k as f64;
            }
            let k = k as f64;
            *v = lead * (1.0 - h * h / (k + 1.0) + h.powi(4) / (2.0 * (k + 1.0) * (k + 2.0)));
        }
        return out;
    }
    let top = kmax.max(z.ceil() as usize);
    let mut m = top + 30 + (40.0 * top as f64).sqrt() as usize;
    m += m % 2;
    let (mut next, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for k in (1..=m).rev() {
        // cur = J_k (unnormalized), next = J_{k+1}
        if k <= kmax {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = 2.0 * k as f64 / z * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    out[0] = cur;
    norm += cur;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// How a prepared mixer applies `H` to a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixerBackend {
    /// Only single-qubit X terms: evolved exactly as a product of rotations.
    Rotations,
    /// Commuting blocks on disjoint qubits, each exponentiated as a small
    /// dense gate.
    Blocks,
    /// Terms grouped by X mask, each group stored as a diagonal.
    Grouped,
    /// Term-by-term application.
    Terms,
}

#[derive(Debug, Clone)]
struct Group<T> {
    x: usize,
    diag: Vec<Complex<T>>,
}

#[derive(Debug, Clone)]
struct Block<T> {
    /// Register qubits of the block, ascending; local qubit `t` is `qubits[t]`.
    qubits: Vec<usize>,
    local: PreparedMixer<T>,
}

#[derive(Debug, Clone)]
enum Backend<T> {
    Rotations(Vec<(usize, T)>),
    Blocks(Vec<Block<T>>, PauliSum<T>),
    Grouped(Vec<Group<T>>),
    Terms(PauliSum<T>),
}

/// Splits the non-identity terms into groups whose supports are disjoint
/// across groups.
fn disjoint_blocks<T: Scalar>(h: &PauliSum<T>) -> Vec<(u64, Vec<(PauliString, T)>)> {
    let mut blocks: Vec<(u64, Vec<(PauliString, T)>)> = Vec::new();
    for (p, &c) in h.terms().filter(|(p, _)| !p.is_identity()) {
        let mut support = p.support();
        let mut terms = vec![(*p, c)];
        let mut k = 0;
        while k < blocks.len() {
            if blocks[k].0 & support != 0 {
                let (s, t) = blocks.swap_remove(k);
                support |= s;
                terms.extend(t);
            } else {
                k += 1;
            }
        }
        blocks.push((support, terms));
    }
    blocks.sort_by_key(|b| b.0.trailing_zeros());
    blocks
}

/// A mixer Hamiltonian preprocessed for repeated evolution.
#[derive(Debug, Clone)]
pub struct PreparedMixer<T> {
    n: usize,
    center: T,
    half_width: T,
    backend: Backend<T>,
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> PreparedMixer<T> {
    pub fn new(h: &PauliSum<T>) -> Result<Self> {
        let n = h.n_qubits();
        check_size(n)?;
        let c0 = h.identity_coefficient();
        let rotations: Option<Vec<(usize, T)>> = h
            .terms()
            .filter(|(p, _)| !p.is_identity())
            .map(|(p, &c)| {
                let single_x = p.z_mask() == 0 && p.x_mask().count_ones() == 1;
                single_x.then(|| (p.x_mask().trailing_zeros() as usize, c))
            })
            .collect();
        if let Some(rot) = rotations {
            let width = rot.iter().fold(T::zero(), |acc, (_, c)| acc + c.abs());
            return Ok(Self { n, center: c0, half_width: width, backend: Backend::Rotations(rot) });
        }
        let blocks = disjoint_blocks(h);
        if blocks.len() > 1 && blocks.iter().all(|b| b.0.count_ones() as usize <= BLOCK_MAX_QUBITS) {
            return Self::blocks(h, blocks);
        }
        let mut masks: Vec<u64> = h.terms().map(|(p, _)| p.x_mask()).collect();
        masks.sort_unstable();
        masks.dedup();
        if masks.len().saturating_mul(1 << n) <= GROUPED_BUDGET {
            Ok(Self::grouped(h, &masks))
        } else {
            let width = h.one_norm() - c0.abs();
            Ok(Self { n, center: c0, half_width: width, backend: Backend::Terms(h.clone()) })
        }
    }

    fn blocks(h: &PauliSum<T>, raw: Vec<(u64, Vec<(PauliString, T)>)>) -> Result<Self> {
        let c0 = h.identity_coefficient();
        let (mut lo, mut hi) = (c0, c0);
        let mut blocks = Vec::with_capacity(raw.len());
        for (support, terms) in raw {
            let qubits: Vec<usize> = (0..64).filter(|q| support >> q & 1 == 1).collect();
            let mut local = PauliSum::zero(qubits.len());
            for (p, c) in terms {
                let ops: Vec<Pauli> = qubits.iter().map(|&q| p.get(q)).collect();
                local.add_term(PauliString::from_ops(&ops), c);
            }
            let local = PreparedMixer::new(&local)?;
            let (l, h) = local.spectral_bounds();
            lo = lo + l;
            hi = hi + h;
            blocks.push(Block { qubits, local });
        }
        let two = T::one() + T::one();
        Ok(Self {
            n: h.n_qubits(),
            center: c0,
            half_width: (hi - lo) / two,
            backend: Backend::Blocks(blocks, h.clone()),
        })
    }

    fn grouped(h: &PauliSum<T>, masks: &[u64]) -> Self {
        let n = h.n_qubits();
        let dim = 1usize << n;
        let mut groups: Vec<Group<T>> = masks.iter().map(|&x| Group { x: x as usize, diag: vec![czero(); dim] }).collect();
        for (p, &c) in h.terms() {
            let g = masks.binary_search(&p.x_mask()).expect("mask collected");
            let base = i_power::<T>((p.x_mask() & p.z_mask()).count_ones()) * c;
            let z = p.z_mask() as usize;
            for (b, d) in groups[g].diag.iter_mut().enumerate() {
                if (z & b).count_ones() % 2 == 1 {
                    *d = *d - base;
                } else {
                    *d = *d + base;
                }
            }
        }
        // Gershgorin discs give the spectral interval.
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        for r in 0..dim {
            let mut diag = T::zero();
            let mut radius = T::zero();
            for g in &groups {
                let v = g.diag[r ^ g.x];
                if g.x == 0 {
                    diag = v.re;
                } else {
                    radius = radius + v.norm();
                }
            }
            lo = lo.min(diag - radius);
            hi = hi.max(diag + radius);
        }
        let two = T::one() + T::one();
        Self { n, center: (lo + hi) / two, half_width: (hi - lo) / two, backend: Backend::Grouped(groups) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn backend(&self) -> MixerBackend {
        match self.backend {
            Backend::Rotations(_) => MixerBackend::Rotations,
            Backend::Blocks(..) => MixerBackend::Blocks,
            Backend::Grouped(_) => MixerBackend::Grouped,
            Backend::Terms(_) => MixerBackend::Terms,
        }
    }

    /// Interval containing the spectrum.
    pub fn spectral_bounds(&self) -> (T, T) {
        match &self.backend {
            Backend::Blocks(..) => self.block_bounds(),
            _ => (self.center - self.half_width, self.center + self.half_width),
        }
    }

    fn block_bounds(&self) -> (T, T) {
        let Backend::Blocks(blocks, _) = &self.backend else { unreachable!() };
        blocks.iter().fold((self.center, self.center), |(lo, hi), b| {
            let (l, h) = b.local.spectral_bounds();
            (lo + l, hi + h)
        })
    }

    /// `out = H * input`.
    pub fn apply(&self, input: &[Complex<T>], out: &mut [Complex<T>]) {
        match &self.backend {
            Backend::Rotations(rot) => {
                for (b, o) in out.iter_mut().enumerate() {
                    *o = input[b] * self.center;
                }
                for &(q, c) in rot {
                    for (b, o) in out.iter_mut().enumerate() {
                        *o = *o + input[b ^ (1 << q)] * c;
                    }
                }
            }
            Backend::Grouped(groups) => {
                out.iter_mut().for_each(|v| *v = czero());
                for g in groups {
                    for (b, (&d, &a)) in g.diag.iter().zip(input).enumerate() {
                        out[b ^ g.x] = out[b ^ g.x] + d * a;
                    }
                }
            }
            Backend::Blocks(_, h) | Backend::Terms(h) => h.apply_into(input, out),
        }
    }

    /// Replaces `sv` with `exp(-i beta H) sv`, then renormalizes.
    pub fn evolve(&self, sv: &mut StateVector<T>, beta: T, tol: T) -> Result<()> {
        if sv.n_qubits() != self.n {
            return Err(McoError::Domain(format!("mixer on {} qubits, state on {}", self.n, sv.n_qubits())));
        }
        if beta.is_zero() {
            return Ok(());
        }
        match &self.backend {
            Backend::Rotations(rot) => self.evolve_rotations(sv, rot, beta),
            Backend::Blocks(blocks, _) => {
                for b in blocks {
                    let gate = b.local.unitary(beta, tol)?;
                    apply_gate(sv.amps_mut(), &b.qubits, &gate);
                }
            }
            _ => self.evolve_chebyshev(sv, beta, tol)?,
        }
        let global = -beta * self.center;
        let phase = Complex::new(global.cos(), global.sin());
        sv.amps_mut().iter_mut().for_each(|a| *a = *a * phase);
        sv.renormalize();
        Ok(())
    }

    /// Dense `exp(-i beta H)`, column `j` being the image of basis state `j`.
    fn unitary(&self, beta: T, tol: T) -> Result<Vec<Vec<Complex<T>>>> {
        (0..1u64 << self.n)
            .map(|j| {
                let mut sv = StateVector::basis(self.n, j)?;
                self.evolve(&mut sv, beta, tol)?;
                Ok(sv.amplitudes().to_vec())
            })
            .collect()
    }

    fn evolve_rotations(&self, sv: &mut StateVector<T>, rot: &[(usize, T)], beta: T) {
        let amps = sv.amps_mut();
        for &(q, c) in rot {
            let theta = beta * c;
            let (cos, msin) = (Complex::new(theta.cos(), T::zero()), Complex::new(T::zero(), -theta.sin()));
            let bit = 1usize << q;
            for b in (0..amps.len()).filter(|b| b & bit == 0) {
                let (a0, a1) = (amps[b], amps[b | bit]);
                amps[b] = cos * a0 + msin * a1;
                amps[b | bit] = msin * a0 + cos * a1;
            }
        }
    }

    fn evolve_chebyshev(&self, sv: &mut StateVector<T>, beta: T, tol: T) -> Result<()> {
        let a = self.half_width;
        if a.is_zero() {
            return Ok(());
        }
        let z = (beta * a).to_f64_lossy();
        let zabs = z.abs();
        let cap = 10 * zabs.ceil() as usize + 100;
        let bessel = bessel_j_sequence(zabs, cap + 1);
        let tol = tol.to_f64_lossy();
        // coefficient of T_k: (2 - [k = 0]) (-i)^k J_k(z), with J_k(-z) = (-1)^k J_k(z)
        let coef = |k: usize| -> Complex<T> {
            let mut j = bessel[k] * if k == 0 { 1.0 } else { 2.0 };
            if z < 0.0 && k % 2 == 1 {
                j = -j;
            }
            i_power::<T>((3 * k % 4) as u32) * T::from_f64_lossy(j)
        };
        let small = |k: usize| bessel[k] * 2.0 < tol;

        let dim = sv.amplitudes().len();
        let inv_a = a.recip();
        let two = T::one() + T::one();
        let shift = self.center;
        let mut prev: Vec<Complex<T>> = sv.amplitudes().to_vec();
        let mut cur = vec![czero(); dim];
        self.apply(&prev, &mut cur);
        for (c, &p) in cur.iter_mut().zip(&prev) {
            *c = (*c - p * shift) * inv_a;
        }
        let (c0, c1) = (coef(0), coef(1));
        let mut acc: Vec<Complex<T>> = prev.iter().zip(&cur).map(|(&p, &c)| p * c0 + c * c1).collect();
        let mut scratch = vec![czero(); dim];
        let mut k = 1;
        while !(k as f64 >= zabs && small(k) && small(k + 1)) {
            k += 1;
            if k > cap {
                return Err(McoError::Numerical(format!(
                    "mixer exponential did not converge within {cap} terms (beta * width = {z})"
                )));
            }
            self.apply(&cur, &mut scratch);
            let ck = coef(k);
            for i in 0..dim {
                let next = (scratch[i] - cur[i] * shift) * inv_a * two - prev[i];
                acc[i] = acc[i] + next * ck;
                prev[i] = next;
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        *sv.amps_mut() = acc;
        Ok(())
    }
}

/// Applies a dense gate given column-wise on the listed (ascending) qubits.
fn apply_gate<T: Real>(amps: &mut [Complex<T>], qubits: &[usize], columns: &[Vec<Complex<T>>]) {
    let k = qubits.len();
    let support: usize = qubits.iter().map(|&q| 1usize << q).sum();
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|j| qubits.iter().enumerate().filter(|(t, _)| j >> t & 1 == 1).map(|(_, &q)| 1usize << q).sum())
        .collect();
    let mut local = vec![czero::<T>(); 1 << k];
    for base in (0..amps.len()).filter(|b| b & support == 0) {
        for (v, &o) in local.iter_mut().zip(&offsets) {
            *v = amps[base | o];
        }
        for &o in &offsets {
            amps[base | o] = czero();
        }
        for (j, col) in columns.iter().enumerate() {
            let a = local[j];
            if a.re.is_zero() && a.im.is_zero() {
                continue;
            }
            for (i, &u) in col.iter().enumerate() {
                amps[base | offsets[i]] = amps[base | offsets[i]] + u * a;
            }
        }
    }
}
