//! Classical reference solvers: constraint-respecting brute force and a
//! simulated-annealing sampler over QUBO models.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, McoError, Result};
use crate::model::{self, Assignment, McoProblem, Scenario};
use crate::qubo::QuboModel;
use crate::scalar::{Real, Scalar};

/// How [`brute_force_with`] walks the feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BruteForceMode {
    /// Enumerate allocation counts per class of interchangeable resources and
    /// expand one representative per count profile.
    #[default]
    SymmetryPruned,
    /// Enumerate every one-hot column configuration.
    Exhaustive,
}

/// Feasible minimizer of the objective (no penalties), ties broken by the
/// lexicographically smallest flat bit-vector.
pub fn brute_force_constrained<T: Scalar>(problem: &McoProblem) -> Result<(Assignment, T)> {
    brute_force_with(problem, BruteForceMode::SymmetryPruned)
}

pub fn brute_force_with<T: Scalar>(problem: &McoProblem, mode: BruteForceMode) -> Result<(Assignment, T)> {
    if problem.scenario() == Scenario::S2 && problem.r1().len() != problem.r2().len() {
        return domain("buddy sets must be equally sized");
    }
    let best = match mode {
        BruteForceMode::Exhaustive => exhaustive(problem),
        BruteForceMode::SymmetryPruned => pruned(problem),
    };
    let (_, a) = best.ok_or_else(|| McoError::Domain("problem has no feasible assignment".into()))?;
    let cost = model::objective(problem, &a)?;
    Ok((a, cost))
}

type Candidate = (i64, Assignment);

fn better(candidate: &Candidate, incumbent: &Option<Candidate>) -> bool {
    match incumbent {
        None => true,
        Some((key, a)) => {
            candidate.0 < *key || (candidate.0 == *key && candidate.1.as_flat() < a.as_flat())
        }
    }
}

fn exhaustive(problem: &McoProblem) -> Option<Candidate> {
    let (n_m, n_r) = (problem.n_missions(), problem.n_resources());
    let mut digits = vec![0usize; n_r];
    let mut best = None;
    loop {
        let a = Assignment::from_columns(&digits, n_m).expect("digits in range");
        if model::is_feasible(problem, &a) {
            let cand = (model::objective_key(problem, &a), a);
            if better(&cand, &best) {
                best = Some(cand);
            }
        }
        // mixed-radix increment
        let mut k = 0;
        loop {
            if k == n_r {
                return best;
            }
            digits[k] += 1;
            if digits[k] < n_m {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// All ways to write `total` as an ordered sum of `parts` non-negative counts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Lexicographically smallest assignment realizing the per-class row counts:
/// row by row, each class fills its highest-indexed free resources.
fn expand_profile(problem: &McoProblem, classes: &[Vec<usize>], profile: &[&Vec<usize>]) -> Assignment {
    let mut a = Assignment::for_problem(problem);
    for (members, counts) in classes.iter().zip(profile) {
        let mut free: Vec<usize> = members.clone();
        for (m, &k) in counts.iter().enumerate() {
            for _ in 0..k {
                let r = free.pop().expect("counts sum to class size");
                a.set(m, r, true);
            }
        }
    }
    a
}

fn pruned(problem: &McoProblem) -> Option<Candidate> {
    let n_m = problem.n_missions();
    let classes = problem.symmetry_classes();
    let options: Vec<Vec<Vec<usize>>> = classes.iter().map(|c| compositions(c.len(), n_m)).collect();
    let mut choice = vec![0usize; classes.len()];
    let mut best = None;
    loop {
        let profile: Vec<&Vec<usize>> = choice.iter().zip(&options).map(|(&i, o)| &o[i]).collect();
        let a = expand_profile(problem, &classes, &profile);
        if model::is_feasible(problem, &a) {
            let cand = (model::objective_key(problem, &a), a);
            if better(&cand, &best) {
                best = Some(cand);
            }
        }
        let mut k = 0;
        loop {
            if k == classes.len() {
                return best;
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Unconstrained exhaustive minimum of a QUBO, ties to the smallest basis
/// index. Limited to 26 variables.
pub fn brute_force_qubo<T: Scalar>(q: &QuboModel<T>) -> Result<(u64, T)> {
    if q.n_vars() > 26 {
        return Err(McoError::ResourceLimit(format!("exhaustive search over {} variables", q.n_vars())));
    }
    let mut best = (0u64, q.evaluate_index(0));
    for b in 1..1u64 << q.n_vars() {
        let e = q.evaluate_index(b);
        if e < best.1 {
            best = (b, e);
        }
    }
    Ok(best)
}

/// Parameters of the Metropolis annealer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub reads: usize,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self { sweeps: 1000, beta_start: 0.1, beta_end: 10.0, reads: 50, seed: 0 }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.reads == 0 {
            return domain("sweeps and reads must be positive");
        }
        if !(self.beta_start > 0.0 && self.beta_start < self.beta_end && self.beta_end.is_finite()) {
            return domain("need 0 < beta_start < beta_end");
        }
        Ok(())
    }

    /// Geometric inverse-temperature ramp, one value per sweep.
    pub fn betas(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_end];
        }
        let ratio = (self.beta_end / self.beta_start).ln() / (self.sweeps - 1) as f64;
        (0..self.sweeps).map(|k| self.beta_start * (ratio * k as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample<T> {
    #[serde(with = "bits01")]
    pub bits: Vec<bool>,
    pub energy: T,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub reads: usize,
    pub seed: u64,
    pub wall_time: f64,
}

/// Unique samples sorted by energy (then bits), with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    pub samples: Vec<Sample<T>>,
    pub meta: SolverMeta,
}

impl<T: Scalar> SampleSet<T> {
    /// Aggregates raw reads. Energies of equal bit-vectors must agree.
    pub fn from_reads(reads: Vec<(Vec<bool>, T)>, seed: u64, wall_time: f64) -> Self {
        let total = reads.len();
        let mut unique: BTreeMap<Vec<bool>, (T, usize)> = BTreeMap::new();
        for (bits, e) in reads {
            unique.entry(bits).or_insert((e, 0)).1 += 1;
        }
        let mut samples: Vec<Sample<T>> =
            unique.into_iter().map(|(bits, (energy, count))| Sample { bits, energy, count }).collect();
        samples.sort_by(|a, b| {
            a.energy.partial_cmp(&b.energy).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.bits.cmp(&b.bits))
        });
        Self { samples, meta: SolverMeta { reads: total, seed, wall_time } }
    }

    pub fn best(&self) -> Option<&Sample<T>> {
        self.samples.first()
    }

    pub fn total_count(&self) -> usize {
        self.samples.iter().map(|s| s.count).sum()
    }

    /// Samples without timing metadata; equality here is the determinism contract.
    pub fn same_samples(&self, other: &Self) -> bool {
        self.samples == other.samples && self.meta.reads == other.meta.reads && self.meta.seed == other.meta.seed
    }
}

impl<T: Scalar + Serialize> SampleSet<T> {
    /// One JSON record `{bits, energy, count}` per unique sample.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            out.push_str(&serde_json::to_string(s).expect("sample serializes"));
            out.push('\n');
        }
        out
    }
}

mod bits01 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        bits.iter().map(|&b| b as u8).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        if raw.iter().any(|&v| v > 1) {
            return Err(serde::de::Error::custom("bits must be 0 or 1"));
        }
        Ok(raw.into_iter().map(|v| v == 1).collect())
    }
}

/// Single-spin-flip Metropolis annealing on the Ising form of `q`.
///
/// Read `k` uses seed `sched.seed + k`; read 0 starts from the all-zero
/// state and the others from uniformly random states. Each read reports the
/// lowest-energy state it visited, so the best sample is never worse than the
/// all-zero state.
pub fn simulated_anneal<T: Real>(q: &QuboModel<T>, sched: &AnnealSchedule) -> Result<SampleSet<T>> {
    sched.validate()?;
    let n = q.n_vars();
    if n == 0 {
        return domain("QUBO has no variables");
    }
    let start = Instant::now();
    let ising = q.to_ising();
    let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (&(i, j), &c) in &ising.j {
        let c = c.to_f64_lossy();
        neighbors[i].push((j, c));
        neighbors[j].push((i, c));
    }
    let h: Vec<f64> = (0..n).map(|i| ising.h.get(&i).map_or(0.0, |c| c.to_f64_lossy())).collect();
    let betas = sched.betas();

    let reads: Vec<(Vec<bool>, T)> = (0..sched.reads)
        .map(|read| {
            let mut rng = ChaCha8Rng::seed_from_u64(sched.seed.wrapping_add(read as u64));
            let mut spins: Vec<f64> =
                if read == 0 { vec![1.0; n] } else { (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect() };
            // local field f_i = h_i + sum_j J_ij s_j
            let mut field: Vec<f64> = (0..n)
                .map(|i| h[i] + neighbors[i].iter().map(|&(j, c)| c * spins[j]).sum::<f64>())
                .collect();
            let mut energy: f64 = ising.offset.to_f64_lossy()
                + (0..n).map(|i| h[i] * spins[i]).sum::<f64>()
                + ising.j.iter().map(|(&(i, j), c)| c.to_f64_lossy() * spins[i] * spins[j]).sum::<f64>();
            let mut best_energy = energy;
            let mut best = spins.clone();
            for &beta in &betas {
                for i in 0..n {
                    let delta = -2.0 * spins[i] * field[i];
                    if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                        let old = spins[i];
                        spins[i] = -old;
                        energy += delta;
                        for &(j, c) in &neighbors[i] {
                            field[j] -= 2.0 * c * old;
                        }
                        if energy < best_energy - 1e-12 {
                            best_energy = energy;
                            best.copy_from_slice(&spins);
                        }
                    }
                }
            }
            let bits: Vec<bool> = best.iter().map(|&s| s < 0.0).collect();
            let e = q.evaluate(&bits).expect("length matches");
            (bits, e)
        })
        .collect();
    Ok(SampleSet::from_reads(reads, sched.seed, start.elapsed().as_secs_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{build_qubo, PenaltyConfig};

    #[test]
    fn compositions_count() {
        // C(n + k - 1, k - 1)
        assert_eq!(compositions(3, 3).len(), 10);
        assert_eq!(compositions(0, 4), vec![vec![0, 0, 0, 0]]);
    }

    #[test]
    fn zero_requirement_puts_everything_on_u() {
        let p = McoProblem::scenario1(&[0], &[1, 1]).unwrap();
        let (a, cost) = brute_force_constrained::<f64>(&p).unwrap();
        assert_eq!(cost, 0.0);
        assert_eq!(a, Assignment::all_unallocated(&p));
    }

    #[test]
    fn pruned_matches_exhaustive_small() {
        for (reqs, caps) in [(vec![1, 1], vec![2, 1, 2]), (vec![2], vec![1, 1, 2, 2]), (vec![0, 3], vec![2, 2, 1])] {
            let p = McoProblem::scenario1(&reqs, &caps).unwrap();
            let a = brute_force_with::<f64>(&p, BruteForceMode::SymmetryPruned).unwrap();
            let b = brute_force_with::<f64>(&p, BruteForceMode::Exhaustive).unwrap();
            assert_eq!(a, b, "reqs {reqs:?} caps {caps:?}");
        }
        let p = McoProblem::scenario2(&[1, 1], 2).unwrap();
        assert_eq!(
            brute_force_with::<f64>(&p, BruteForceMode::SymmetryPruned).unwrap(),
            brute_force_with::<f64>(&p, BruteForceMode::Exhaustive).unwrap()
        );
    }

    #[test]
    fn single_variable_anneal() {
        let mut q = QuboModel::<f64>::new(1);
        q.add_linear(0, -1.0);
        q.add_offset(0.25);
        let s = simulated_anneal(&q, &AnnealSchedule { reads: 5, ..Default::default() }).unwrap();
        let best = s.best().unwrap();
        assert_eq!(best.bits, vec![true]);
        assert_eq!(best.energy, -0.75);
        assert_eq!(s.total_count(), 5);
    }

    #[test]
    fn anneal_is_deterministic() {
        let p = McoProblem::scenario1(&[1, 1], &[2, 1, 2]).unwrap();
        let q = build_qubo::<f64>(&p, &PenaltyConfig::default());
        let sched = AnnealSchedule { sweeps: 200, reads: 10, seed: 42, ..Default::default() };
        let a = simulated_anneal(&q, &sched).unwrap();
        let b = simulated_anneal(&q, &sched).unwrap();
        assert!(a.same_samples(&b));
    }

    #[test]
    fn schedule_validation() {
        let bad = AnnealSchedule { beta_start: 2.0, beta_end: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let betas = AnnealSchedule::default().betas();
        assert_eq!(betas.len(), 1000);
        assert!((betas[0] - 0.1).abs() < 1e-12 && (betas[999] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn jsonl_records() {
        let s = SampleSet::from_reads(vec![(vec![true, false], 1.5), (vec![true, false], 1.5), (vec![false, false], 0.0)], 3, 0.0);
        assert_eq!(s.to_jsonl(), "{\"bits\":[0,0],\"energy\":0.0,\"count\":1}\n{\"bits\":[1,0],\"energy\":1.5,\"count\":2}\n");
    }
}
