//! Dense state-vector simulation of QAOA circuits.

mod expm;
mod qaoa;

use std::io::{Read, Write};

use num_complex::Complex;
use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, McoError, Result};
use crate::layout::{mask, ConstraintSubspace, QubitLayout};
use crate::model::{McoProblem, Scenario};
use crate::pauli::PauliSum;
use crate::qubo::QuboModel;
use crate::scalar::Real;
use crate::solvers::SampleSet;

pub use expm::{bessel_j_sequence, MixerBackend, PreparedMixer};
pub use qaoa::{run_qaoa, MixerKind, QaoaParams, QaoaSimulator};

/// Largest register the simulator will allocate.
pub const MAX_SIM_QUBITS: usize = 22;

/// Default truncation tolerance for the mixer exponential.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Norm drift above which a renormalization is logged.
const RENORM_LOG_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_SIM_QUBITS {
        return Err(McoError::ResourceLimit(format!("{n} qubits exceeds the {MAX_SIM_QUBITS}-qubit simulator limit")));
    }
    Ok(())
}

impl<T: Real> StateVector<T> {
    /// Computational basis state `|b>`.
    pub fn basis(n: usize, b: u64) -> Result<Self> {
        check_size(n)?;
        if b >> n != 0 {
            return domain(format!("basis index {b} needs more than {n} qubits"));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amps[b as usize] = Complex::new(T::one(), T::zero());
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes; they must have length `2^n` and unit norm.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_size(n)?;
        if amps.len() != 1 << n {
            return domain(format!("expected {} amplitudes, got {}", 1usize << n, amps.len()));
        }
        let sv = Self { n, amps };
        let norm = sv.norm().to_f64_lossy();
        if (norm - 1.0).abs() > 1e-10 {
            return domain(format!("state norm {norm} is not 1"));
        }
        Ok(sv)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, b: u64) -> Complex<T> {
        self.amps[b as usize]
    }

    pub fn probability(&self, b: u64) -> T {
        self.amps[b as usize].norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()).sqrt()
    }

    /// Rescales to unit norm and returns the size of the correction.
    pub fn renormalize(&mut self) -> T {
        let norm = self.norm();
        let drift = (norm - T::one()).abs();
        if drift.to_f64_lossy() > RENORM_LOG_THRESHOLD {
            log::warn!("renormalizing state, norm drift {drift}");
        }
        if norm > T::zero() {
            let inv = norm.recip();
            self.amps.iter_mut().for_each(|a| *a = *a * inv);
        }
        drift
    }

    pub(crate) fn amps_mut(&mut self) -> &mut Vec<Complex<T>> {
        &mut self.amps
    }

    /// Binary dump: little-endian `u32` qubit count followed by `2^n`
    /// `(re, im)` pairs of little-endian `f64`.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.n as u32).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_f64_lossy().to_le_bytes())?;
            w.write_all(&a.im.to_f64_lossy().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| McoError::Parse(format!("state dump: {e}"));
        let mut word = [0u8; 4];
        r.read_exact(&mut word).map_err(io)?;
        let n = u32::from_le_bytes(word) as usize;
        check_size(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        let mut buf = [0u8; 16];
        for _ in 0..1usize << n {
            r.read_exact(&mut buf).map_err(io)?;
            let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
            amps.push(Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im)));
        }
        Ok(Self { n, amps })
    }
}

/// Equal superposition over all `2^n` basis states.
pub fn init_uniform<T: Real>(n: usize) -> Result<StateVector<T>> {
    if n == 0 {
        return domain("register needs at least one qubit");
    }
    check_size(n)?;
    let a = T::from_f64_lossy((1u64 << n) as f64).sqrt().recip();
    Ok(StateVector { n, amps: vec![Complex::new(a, T::zero()); 1 << n] })
}

/// Basis index with every resource on the unallocated mission.
pub fn unallocated_index(layout: &QubitLayout) -> u64 {
    let u = layout.unallocated();
    (0..layout.n_resources()).fold(0, |b, r| b | 1 << layout.assignment_qubit(u, r))
}

/// Every resource on the unallocated mission (single-constraint scenario).
pub fn init_unallocated<T: Real>(problem: &McoProblem, layout: &QubitLayout) -> Result<StateVector<T>> {
    if problem.scenario() != Scenario::S1 {
        return domain("the unallocated start state is for scenario 1 problems");
    }
    StateVector::basis(layout.total_qubits(), unallocated_index(layout))
}

/// Basis index with every resource unallocated and the `k`-th column of each
/// buddy set carrying pair ID `k`.
pub fn id_start_index(layout: &QubitLayout) -> Result<u64> {
    let mut b = unallocated_index(layout);
    for set in [layout.r1(), layout.r2()] {
        for (k, &r) in set.iter().enumerate() {
            for t in 0..layout.id_bits() {
                if k >> t & 1 == 1 {
                    b |= 1 << layout.id_qubit(r, t)?;
                }
            }
        }
    }
    Ok(b)
}

/// Every resource unallocated with mirrored pair IDs (buddy scenario).
pub fn init_with_ids<T: Real>(problem: &McoProblem, layout: &QubitLayout) -> Result<StateVector<T>> {
    if problem.scenario() != Scenario::S2 {
        return domain("the ID start state is for scenario 2 problems");
    }
    StateVector::basis(layout.total_qubits(), id_start_index(layout)?)
}

/// QUBO energies indexed by the low `n_vars` bits of a basis state.
#[derive(Debug, Clone)]
pub struct CostTable<T> {
    mask: u64,
    energies: Vec<T>,
}

impl<T: Real> CostTable<T> {
    pub fn new(q: &QuboModel<T>) -> Result<Self> {
        check_size(q.n_vars())?;
        Ok(Self { mask: mask(q.n_vars()), energies: q.energy_table()? })
    }

    pub fn energy(&self, b: u64) -> T {
        self.energies[(b & self.mask) as usize]
    }

    pub fn min(&self) -> T {
        self.energies.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.energies.iter().copied().fold(T::neg_infinity(), T::max)
    }
}

fn check_cost_fits<T: Real>(sv: &StateVector<T>, q: &QuboModel<T>) -> Result<()> {
    if q.n_vars() > sv.n {
        return domain(format!("{} QUBO variables on a {}-qubit state", q.n_vars(), sv.n));
    }
    Ok(())
}

/// Multiplies each amplitude by `exp(-i gamma E(b))`, where `E` reads only the
/// assignment qubits.
pub fn apply_cost_phase<T: Real>(sv: &mut StateVector<T>, q: &QuboModel<T>, gamma: T) -> Result<()> {
    check_cost_fits(sv, q)?;
    apply_cost_phase_table(sv, &CostTable::new(q)?, gamma);
    Ok(())
}

pub fn apply_cost_phase_table<T: Real>(sv: &mut StateVector<T>, table: &CostTable<T>, gamma: T) {
    if gamma.is_zero() {
        return;
    }
    for (b, a) in sv.amps.iter_mut().enumerate() {
        let theta = -gamma * table.energy(b as u64);
        *a = *a * Complex::new(theta.cos(), theta.sin());
    }
}

/// `exp(-i beta H)` applied in place, truncating the expansion at `tol`.
pub fn apply_mixer_evolution<T: Real>(sv: &mut StateVector<T>, h: &PauliSum<T>, beta: T, tol: T) -> Result<()> {
    PreparedMixer::new(h)?.evolve(sv, beta, tol)
}

/// `sum_b |a_b|^2 E(b)`.
pub fn expectation<T: Real>(sv: &StateVector<T>, q: &QuboModel<T>) -> Result<T> {
    check_cost_fits(sv, q)?;
    Ok(expectation_table(sv, &CostTable::new(q)?))
}

pub fn expectation_table<T: Real>(sv: &StateVector<T>, table: &CostTable<T>) -> T {
    sv.amps
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (b, a)| acc + a.norm_sqr() * table.energy(b as u64))
}

/// Draws `shots` basis states from `|a_b|^2`. Each sample holds the
/// assignment bits (`q.n_vars()` low qubits) and their QUBO energy.
pub fn sample<T: Real>(sv: &StateVector<T>, q: &QuboModel<T>, shots: usize, seed: u64) -> Result<SampleSet<T>> {
    check_cost_fits(sv, q)?;
    if shots == 0 {
        return domain("shots must be positive");
    }
    let weights: Vec<f64> = sv.amps.iter().map(|a| a.norm_sqr().to_f64_lossy()).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| McoError::Numerical(format!("sampling weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = q.n_vars();
    let reads = (0..shots)
        .map(|_| {
            let b = dist.sample(&mut rng) as u64;
            let bits: Vec<bool> = (0..nv).map(|i| b >> i & 1 == 1).collect();
            (bits, q.evaluate_index(b & mask(nv)))
        })
        .collect();
    Ok(SampleSet::from_reads(reads, seed, 0.0))
}

/// Probability mass outside the constrained subspace.
pub fn leakage<T: Real>(sv: &StateVector<T>, subspace: &ConstraintSubspace) -> T {
    sv.amps
        .iter()
        .enumerate()
        .filter(|(b, _)| !subspace.contains(*b as u64))
        .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_amplitudes() {
        let sv = init_uniform::<f64>(3).unwrap();
        for a in sv.amplitudes() {
            assert!((a.re - 8f64.sqrt().recip()).abs() < 1e-15);
        }
        assert!((init_uniform::<f64>(20).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(init_uniform::<f64>(0).is_err());
        assert!(matches!(init_uniform::<f64>(23), Err(McoError::ResourceLimit(_))));
    }

    #[test]
    fn unallocated_start() {
        let p = McoProblem::scenario1(&[1], &[2, 1]).unwrap();
        let l = QubitLayout::for_problem(&p);
        let sv = init_unallocated::<f64>(&p, &l).unwrap();
        assert_eq!(sv.probability(0b1100), 1.0);
    }

    #[test]
    fn id_start_mirrors_sets() {
        let p = McoProblem::scenario2(&[1, 1, 1], 4).unwrap();
        let l = QubitLayout::for_problem(&p);
        let b = id_start_index(&l).unwrap();
        for k in 0..4 {
            assert_eq!(l.read_id(b, l.r1()[k]), k);
            assert_eq!(l.read_id(b, l.r2()[k]), k);
        }
        assert!(ConstraintSubspace::for_problem(&p).contains(b));
    }

    #[test]
    fn cost_phase_keeps_magnitudes() {
        let mut q = QuboModel::<f64>::new(2);
        q.add_linear(0, 1.3);
        q.add_quadratic(0, 1, -0.7);
        let mut sv = init_uniform::<f64>(2).unwrap();
        let before = sv.probabilities();
        apply_cost_phase(&mut sv, &q, 0.9).unwrap();
        for (a, b) in sv.probabilities().iter().zip(&before) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn expectation_of_two_level_mix() {
        let mut q = QuboModel::<f64>::new(1);
        q.add_linear(0, 2.0);
        let sv = init_uniform::<f64>(1).unwrap();
        assert!((expectation(&sv, &q).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_seeded() {
        let q = QuboModel::<f64>::new(3);
        let sv = init_uniform::<f64>(3).unwrap();
        let a = sample(&sv, &q, 200, 7).unwrap();
        let b = sample(&sv, &q, 200, 7).unwrap();
        assert!(a.same_samples(&b));
        assert_eq!(a.total_count(), 200);
        let basis = StateVector::<f64>::basis(3, 5).unwrap();
        let s = sample(&basis, &q, 50, 1).unwrap();
        assert_eq!(s.samples.len(), 1);
    }

    #[test]
    fn dump_round_trip() {
        let mut sv = init_uniform::<f64>(2).unwrap();
        let mut q = QuboModel::<f64>::new(2);
        q.add_linear(1, 0.4);
        apply_cost_phase(&mut sv, &q, 1.1).unwrap();
        let mut buf = Vec::new();
        sv.write_dump(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 * 16);
        assert_eq!(StateVector::<f64>::read_dump(&buf[..]).unwrap(), sv);
    }
}
