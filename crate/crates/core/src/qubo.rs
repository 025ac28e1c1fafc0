//! Penalized quadratic binary objectives compiled from mission covering
//! problems.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, McoError, Result};
use crate::model::{self, Assignment, McoProblem, Scenario};
use crate::scalar::Scalar;

/// `offset + sum_i linear[i] b_i + sum_{i<j} quadratic[(i, j)] b_i b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel<T> {
    n_vars: usize,
    linear: BTreeMap<usize, T>,
    quadratic: BTreeMap<(usize, usize), T>,
    offset: T,
}

impl<T: Scalar> QuboModel<T> {
    pub fn new(n_vars: usize) -> Self {
        Self { n_vars, linear: BTreeMap::new(), quadratic: BTreeMap::new(), offset: T::zero() }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn linear(&self) -> &BTreeMap<usize, T> {
        &self.linear
    }

    /// Pair-keyed couplings, keys normalized so that `i < j`.
    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), T> {
        &self.quadratic
    }

    pub fn add_offset(&mut self, c: T) {
        self.offset = self.offset + c;
    }

    pub fn add_linear(&mut self, i: usize, c: T) {
        assert!(i < self.n_vars, "variable {i} out of range");
        let e = self.linear.entry(i).or_insert_with(T::zero);
        *e = *e + c;
    }

    /// Adds `c * b_i * b_j`; a diagonal pair folds into the linear term.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: T) {
        if i == j {
            self.add_linear(i, c);
            return;
        }
        assert!(i < self.n_vars && j < self.n_vars, "variable pair ({i}, {j}) out of range");
        let key = (i.min(j), i.max(j));
        let e = self.quadratic.entry(key).or_insert_with(T::zero);
        *e = *e + c;
    }

    /// Adds `weight * (constant + sum_k a_k b_{i_k})^2`, expanded with `b^2 = b`.
    /// Variables in `terms` must be distinct.
    pub fn add_squared(&mut self, terms: &[(usize, T)], constant: T, weight: T) {
        let two = T::one() + T::one();
        self.add_offset(weight * constant * constant);
        for (k, &(i, a)) in terms.iter().enumerate() {
            self.add_linear(i, weight * (a * a + two * constant * a));
            for &(j, b) in &terms[k + 1..] {
                self.add_quadratic(i, j, weight * two * a * b);
            }
        }
    }

    /// Removes coefficients that cancelled to (numerically) zero.
    pub fn prune(&mut self) {
        self.linear.retain(|_, c| !c.is_negligible());
        self.quadratic.retain(|_, c| !c.is_negligible());
    }

    /// Energy of a bit-vector of length `n_vars`.
    pub fn evaluate(&self, bits: &[bool]) -> Result<T> {
        if bits.len() != self.n_vars {
            return domain(format!("expected {} bits, got {}", self.n_vars, bits.len()));
        }
        Ok(self.energy_with(|i| bits[i]))
    }

    /// Energy of the basis state whose bit `k` is variable `k`. Bits above
    /// `n_vars` are ignored.
    pub fn evaluate_index(&self, index: u64) -> T {
        self.energy_with(|i| (index >> i) & 1 == 1)
    }

    fn energy_with(&self, bit: impl Fn(usize) -> bool) -> T {
        let mut e = self.offset;
        for (&i, &c) in &self.linear {
            if bit(i) {
                e = e + c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if bit(i) && bit(j) {
                e = e + c;
            }
        }
        e
    }

    /// Substitutes `b_i = (1 - s_i) / 2`, so `s_i = +1` encodes `b_i = 0`.
    pub fn to_ising(&self) -> IsingModel<T> {
        let two = T::one() + T::one();
        let four = two * two;
        let mut h: BTreeMap<usize, T> = BTreeMap::new();
        let mut j = BTreeMap::new();
        let mut offset = self.offset;
        for (&i, &a) in &self.linear {
            offset = offset + a / two;
            let e = h.entry(i).or_insert_with(T::zero);
            *e = *e - a / two;
        }
        for (&(p, q), &b) in &self.quadratic {
            offset = offset + b / four;
            for v in [p, q] {
                let e = h.entry(v).or_insert_with(T::zero);
                *e = *e - b / four;
            }
            j.insert((p, q), b / four);
        }
        h.retain(|_, c: &mut T| !c.is_negligible());
        j.retain(|_, c: &mut T| !c.is_negligible());
        IsingModel { n_spins: self.n_vars, h, j, offset }
    }

    /// Converts coefficients to another scalar type.
    pub fn cast<U: Scalar>(&self) -> QuboModel<U> {
        QuboModel {
            n_vars: self.n_vars,
            linear: self.linear.iter().map(|(&i, &c)| (i, crate::scalar::convert(c))).collect(),
            quadratic: self.quadratic.iter().map(|(&k, &c)| (k, crate::scalar::convert(c))).collect(),
            offset: crate::scalar::convert(self.offset),
        }
    }

    /// Energies of all `2^n_vars` basis states, indexed by basis index.
    pub fn energy_table(&self) -> Result<Vec<T>> {
        if self.n_vars > 26 {
            return Err(McoError::ResourceLimit(format!(
                "energy table over {} variables",
                self.n_vars
            )));
        }
        Ok((0..1u64 << self.n_vars).map(|b| self.evaluate_index(b)).collect())
    }
}

/// Spin form `offset + sum h_i s_i + sum_{i<j} J_ij s_i s_j`, `s_i = 1 - 2 b_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel<T> {
    pub n_spins: usize,
    pub h: BTreeMap<usize, T>,
    pub j: BTreeMap<(usize, usize), T>,
    pub offset: T,
}

impl<T: Scalar> IsingModel<T> {
    pub fn energy(&self, spins: &[i8]) -> T {
        let mut e = self.offset;
        for (&i, &c) in &self.h {
            e = e + c * T::from_int(spins[i].into());
        }
        for (&(p, q), &c) in &self.j {
            e = e + c * T::from_int((spins[p] * spins[q]).into());
        }
        e
    }
}

/// JSON form: `{n_vars, offset, linear: [[i, c]], quadratic: [[i, j, c]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct QuboDocument<T> {
    n_vars: usize,
    offset: T,
    linear: Vec<(usize, T)>,
    quadratic: Vec<(usize, usize, T)>,
}

impl<T: Scalar + Serialize> Serialize for QuboModel<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuboDocument {
            n_vars: self.n_vars,
            offset: self.offset,
            linear: self.linear.iter().map(|(&i, &c)| (i, c)).collect(),
            quadratic: self.quadratic.iter().map(|(&(i, j), &c)| (i, j, c)).collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for QuboModel<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let doc = QuboDocument::<T>::deserialize(d)?;
        let mut q = QuboModel::new(doc.n_vars);
        q.offset = doc.offset;
        for (i, c) in doc.linear {
            if i >= doc.n_vars {
                return Err(D::Error::custom(format!("linear index {i} out of range")));
            }
            q.add_linear(i, c);
        }
        for (i, j, c) in doc.quadratic {
            if i >= j || j >= doc.n_vars {
                return Err(D::Error::custom(format!("invalid quadratic pair ({i}, {j})")));
            }
            q.add_quadratic(i, j, c);
        }
        Ok(q)
    }
}

/// Lagrange multiplier applied to every constraint penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig<T> {
    lambda: T,
}

impl<T: Scalar> PenaltyConfig<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if lambda <= T::zero() {
            return domain("lambda must be positive");
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }
}

impl<T: Scalar> Default for PenaltyConfig<T> {
    fn default() -> Self {
        Self { lambda: T::from_int(5) }
    }
}

/// `(sum_m x[m][r] - 1)^2`: resource `r` must sit in exactly one row.
pub fn constraint_penalty_column<T: Scalar>(problem: &McoProblem, a: &Assignment, r: usize) -> Result<T> {
    if r >= problem.n_resources() {
        return domain(format!("unknown resource index {r}"));
    }
    if a.n_resources() != problem.n_resources() || a.n_missions() != problem.n_missions() {
        return domain("assignment dimensions do not match problem");
    }
    let e = a.column_count(r) as i64 - 1;
    Ok(T::from_int(e * e))
}

/// `(sum_{R1} x[m][r] - sum_{R2} x[m][r])^2` for a real mission of a
/// scenario 2 problem.
pub fn constraint_penalty_buddy<T: Scalar>(problem: &McoProblem, a: &Assignment, m: usize) -> Result<T> {
    if problem.scenario() != Scenario::S2 {
        return domain("the buddy constraint only exists in scenario 2");
    }
    if m >= problem.n_missions() {
        return domain(format!("unknown mission index {m}"));
    }
    if m == problem.unallocated() {
        return domain("the buddy constraint does not apply to the unallocated mission");
    }
    if a.n_resources() != problem.n_resources() || a.n_missions() != problem.n_missions() {
        return domain("assignment dimensions do not match problem");
    }
    let e = model::buddy_imbalance(problem, a, m);
    Ok(T::from_int(e * e))
}

/// Total constraint penalty (column terms, plus buddy terms in scenario 2),
/// unweighted.
pub fn total_penalty<T: Scalar>(problem: &McoProblem, a: &Assignment) -> Result<T> {
    let mut total = T::zero();
    for r in 0..problem.n_resources() {
        total = total + constraint_penalty_column(problem, a, r)?;
    }
    if problem.scenario() == Scenario::S2 {
        for m in (0..problem.n_missions()).filter(|&m| m != problem.unallocated()) {
            total = total + constraint_penalty_buddy(problem, a, m)?;
        }
    }
    Ok(total)
}

/// QUBO of the objective alone (mission cost, plus weighted precedence cost
/// in scenario 1). Used as the cost Hamiltonian when constraints are
/// enforced by the mixer instead of by penalties.
pub fn build_objective_qubo<T: Scalar>(problem: &McoProblem) -> QuboModel<T> {
    let mut q = QuboModel::new(problem.n_vars());
    let n_r = problem.n_resources();
    let u = problem.unallocated();
    for m in (0..problem.n_missions()).filter(|&m| m != u) {
        let terms: Vec<(usize, T)> = (0..n_r)
            .filter(|&r| problem.counts_toward_requirement(r))
            .map(|r| (problem.var_index(m, r), T::one()))
            .collect();
        q.add_squared(&terms, -T::from_int(problem.req_mission(m, 0).into()), T::one());
    }
    if problem.scenario() == Scenario::S1 {
        let weight = T::ratio(1, n_r as i64);
        for r in 0..n_r {
            let terms: Vec<(usize, T)> =
                (0..problem.n_missions()).filter(|&m| m != u).map(|m| (problem.var_index(m, r), T::one())).collect();
            let constant = T::one() - T::from_int(problem.capability(r, 0).into());
            q.add_squared(&terms, constant, weight);
        }
    }
    q.prune();
    q
}

/// Lagrangian `objective + lambda * constraints` as a QUBO over
/// `n_missions * n_resources` variables.
pub fn build_qubo<T: Scalar>(problem: &McoProblem, cfg: &PenaltyConfig<T>) -> QuboModel<T> {
    let mut q = build_objective_qubo(problem);
    let lambda = cfg.lambda();
    for r in 0..problem.n_resources() {
        let terms: Vec<(usize, T)> =
            (0..problem.n_missions()).map(|m| (problem.var_index(m, r), T::one())).collect();
        q.add_squared(&terms, -T::one(), lambda);
    }
    if problem.scenario() == Scenario::S2 {
        for m in (0..problem.n_missions()).filter(|&m| m != problem.unallocated()) {
            let terms: Vec<(usize, T)> = problem
                .r1()
                .iter()
                .map(|&r| (problem.var_index(m, r), T::one()))
                .chain(problem.r2().iter().map(|&r| (problem.var_index(m, r), -T::one())))
                .collect();
            q.add_squared(&terms, T::zero(), lambda);
        }
    }
    q.prune();
    q
}
