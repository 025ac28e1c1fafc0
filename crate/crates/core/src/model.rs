//! Mission covering problems, assignments and their scoring.
//!
//! A problem allocates resources (columns) to missions (rows). The last
//! mission is always the unallocated mission `U`, which absorbs every resource
//! not in use so that a valid solution places each resource in exactly one row.
//! Variables are flattened row-major: `index(m, r) = m * n_resources + r`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, McoError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Primary (capability 2) and secondary (capability 1) resources, one qualification.
    S1,
    /// Buddy system: two equally sized resource sets that must be paired per mission.
    S2,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::S1 => f.pad("s1"),
            Scenario::S2 => f.pad("s2"),
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = McoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(Scenario::S1),
            "s2" => Ok(Scenario::S2),
            other => Err(McoError::Parse(format!("unknown scenario `{other}`"))),
        }
    }
}

/// The two resource sets of a buddy-system problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuddySet {
    R1,
    R2,
}

/// Wire form of a problem. Matrices are indexed `[row][qualification]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDocument {
    pub scenario: Scenario,
    pub missions: Vec<String>,
    pub resources: Vec<String>,
    pub qualifications: Vec<String>,
    pub capability: Vec<Vec<u32>>,
    pub req_mission: Vec<Vec<u32>>,
    pub req_resource: Vec<Vec<u32>>,
}

/// A validated mission covering problem. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemDocument", into = "ProblemDocument")]
pub struct McoProblem {
    scenario: Scenario,
    missions: Vec<String>,
    resources: Vec<String>,
    qualifications: Vec<String>,
    capability: Vec<Vec<u32>>,
    req_mission: Vec<Vec<u32>>,
    req_resource: Vec<Vec<u32>>,
    r1: Vec<usize>,
    r2: Vec<usize>,
}

impl TryFrom<ProblemDocument> for McoProblem {
    type Error = McoError;

    fn try_from(doc: ProblemDocument) -> Result<Self> {
        McoProblem::new(doc)
    }
}

impl From<McoProblem> for ProblemDocument {
    fn from(p: McoProblem) -> Self {
        ProblemDocument {
            scenario: p.scenario,
            missions: p.missions,
            resources: p.resources,
            qualifications: p.qualifications,
            capability: p.capability,
            req_mission: p.req_mission,
            req_resource: p.req_resource,
        }
    }
}

fn check_matrix(name: &str, m: &[Vec<u32>], rows: usize, cols: usize) -> Result<()> {
    if m.len() != rows || m.iter().any(|row| row.len() != cols) {
        return domain(format!("{name} must be a {rows}x{cols} matrix"));
    }
    Ok(())
}

impl McoProblem {
    /// Validates a problem document against the scenario rules.
    pub fn new(doc: ProblemDocument) -> Result<Self> {
        let ProblemDocument {
            scenario,
            missions,
            resources,
            qualifications,
            capability,
            req_mission,
            req_resource,
        } = doc;
        let (n_m, n_r, n_q) = (missions.len(), resources.len(), qualifications.len());
        if n_m < 2 {
            return domain("a problem needs at least one mission plus the unallocated mission");
        }
        if n_r == 0 {
            return domain("a problem needs at least one resource");
        }
        check_matrix("capability", &capability, n_r, n_q)?;
        check_matrix("req_mission", &req_mission, n_m, n_q)?;
        check_matrix("req_resource", &req_resource, n_r, n_q)?;
        if req_mission[n_m - 1].iter().any(|&v| v != 0) {
            return domain("the unallocated mission (last row) must have zero requirements");
        }

        let mut r1 = Vec::new();
        let mut r2 = Vec::new();
        match scenario {
            Scenario::S1 => {
                if n_q != 1 {
                    return domain("scenario 1 has exactly one qualification");
                }
                if capability.iter().any(|row| !(1..=2).contains(&row[0])) {
                    return domain("scenario 1 capabilities must be 1 or 2");
                }
                if req_resource.iter().flatten().any(|&v| v != 0) {
                    return domain("scenario 1 has no resource requirements");
                }
            }
            Scenario::S2 => {
                if n_q != 2 {
                    return domain("scenario 2 has exactly two qualifications");
                }
                for (r, (cap, req)) in capability.iter().zip(&req_resource).enumerate() {
                    match (cap.as_slice(), req.as_slice()) {
                        ([1, 0], [0, 1]) => r1.push(r),
                        ([0, 1], [1, 0]) => r2.push(r),
                        _ => {
                            return domain(format!(
                                "resource {} does not follow the buddy pattern",
                                resources[r]
                            ))
                        }
                    }
                }
                if r1.len() != r2.len() {
                    return domain(format!(
                        "buddy sets must be equally sized (|R1| = {}, |R2| = {})",
                        r1.len(),
                        r2.len()
                    ));
                }
                if req_mission.iter().any(|row| row[1] != 0) {
                    return domain("scenario 2 missions only require the first qualification");
                }
            }
        }
        Ok(Self {
            scenario,
            missions,
            resources,
            qualifications,
            capability,
            req_mission,
            req_resource,
            r1,
            r2,
        })
    }

    /// Scenario 1 problem with generated names. `requirements` lists the real
    /// missions only; the unallocated mission is appended.
    pub fn scenario1(requirements: &[u32], capabilities: &[u32]) -> Result<Self> {
        let n_m = requirements.len() + 1;
        let mut req_mission: Vec<Vec<u32>> = requirements.iter().map(|&q| vec![q]).collect();
        req_mission.push(vec![0]);
        Self::new(ProblemDocument {
            scenario: Scenario::S1,
            missions: mission_names(n_m),
            resources: (1..=capabilities.len()).map(|i| format!("r{i}")).collect(),
            qualifications: vec!["q1".into()],
            capability: capabilities.iter().map(|&c| vec![c]).collect(),
            req_mission,
            req_resource: vec![vec![0]; capabilities.len()],
        })
    }

    /// Scenario 2 problem with `per_set` resources in each buddy set; the
    /// first `per_set` resources form `R1`.
    pub fn scenario2(requirements: &[u32], per_set: usize) -> Result<Self> {
        let n_m = requirements.len() + 1;
        let mut req_mission: Vec<Vec<u32>> = requirements.iter().map(|&q| vec![q, 0]).collect();
        req_mission.push(vec![0, 0]);
        let n_r = 2 * per_set;
        let (capability, req_resource) = (0..n_r)
            .map(|r| {
                if r < per_set {
                    (vec![1, 0], vec![0, 1])
                } else {
                    (vec![0, 1], vec![1, 0])
                }
            })
            .unzip();
        Self::new(ProblemDocument {
            scenario: Scenario::S2,
            missions: mission_names(n_m),
            resources: (1..=n_r).map(|i| format!("r{i}")).collect(),
            qualifications: vec!["q1".into(), "q2".into()],
            capability,
            req_mission,
            req_resource,
        })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn n_missions(&self) -> usize {
        self.missions.len()
    }

    pub fn n_resources(&self) -> usize {
        self.resources.len()
    }

    pub fn n_qualifications(&self) -> usize {
        self.qualifications.len()
    }

    /// Number of binary assignment variables, `n_missions * n_resources`.
    pub fn n_vars(&self) -> usize {
        self.n_missions() * self.n_resources()
    }

    /// Index of the unallocated mission.
    pub fn unallocated(&self) -> usize {
        self.missions.len() - 1
    }

    pub fn missions(&self) -> &[String] {
        &self.missions
    }

    pub fn resources(&self) -> &[String] {
        &self.resources
    }

    pub fn qualifications(&self) -> &[String] {
        &self.qualifications
    }

    pub fn mission_index(&self, name: &str) -> Option<usize> {
        self.missions.iter().position(|m| m == name)
    }

    pub fn resource_index(&self, name: &str) -> Option<usize> {
        self.resources.iter().position(|r| r == name)
    }

    pub fn capability(&self, r: usize, q: usize) -> u32 {
        self.capability[r][q]
    }

    pub fn req_mission(&self, m: usize, q: usize) -> u32 {
        self.req_mission[m][q]
    }

    pub fn req_resource(&self, r: usize, q: usize) -> u32 {
        self.req_resource[r][q]
    }

    /// Resources qualified for the first qualification; these count toward
    /// mission requirements.
    pub fn counts_toward_requirement(&self, r: usize) -> bool {
        self.capability[r][0] > 0
    }

    /// Buddy set `R1` (empty outside scenario 2), in resource order.
    pub fn r1(&self) -> &[usize] {
        &self.r1
    }

    pub fn r2(&self) -> &[usize] {
        &self.r2
    }

    pub fn buddy_set(&self, r: usize) -> Option<BuddySet> {
        if self.r1.contains(&r) {
            Some(BuddySet::R1)
        } else if self.r2.contains(&r) {
            Some(BuddySet::R2)
        } else {
            None
        }
    }

    /// Flattened variable index of `x[m][r]`.
    pub fn var_index(&self, m: usize, r: usize) -> usize {
        m * self.n_resources() + r
    }

    /// Partition of the resources into interchangeable classes (identical
    /// capability and requirement vectors), in order of first appearance.
    pub fn symmetry_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<(&[u32], &[u32], Vec<usize>)> = Vec::new();
        for r in 0..self.n_resources() {
            let key = (self.capability[r].as_slice(), self.req_resource[r].as_slice());
            match classes.iter_mut().find(|(c, q, _)| (*c, *q) == key) {
                Some((_, _, members)) => members.push(r),
                None => classes.push((key.0, key.1, vec![r])),
            }
        }
        classes.into_iter().map(|(_, _, members)| members).collect()
    }

    pub fn to_document(&self) -> ProblemDocument {
        self.clone().into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| McoError::Parse(e.to_string()))
    }

    fn check_mission(&self, m: usize) -> Result<()> {
        if m >= self.n_missions() {
            return domain(format!("unknown mission index {m}"));
        }
        Ok(())
    }

    fn check_resource(&self, r: usize) -> Result<()> {
        if r >= self.n_resources() {
            return domain(format!("unknown resource index {r}"));
        }
        Ok(())
    }

    fn check_dims(&self, a: &Assignment) -> Result<()> {
        if a.n_missions() != self.n_missions() || a.n_resources() != self.n_resources() {
            return domain(format!(
                "assignment is {}x{} but problem is {}x{}",
                a.n_missions(),
                a.n_resources(),
                self.n_missions(),
                self.n_resources()
            ));
        }
        Ok(())
    }
}

fn mission_names(n_m: usize) -> Vec<String> {
    (1..n_m).map(|i| format!("m{i}")).chain(std::iter::once("U".to_string())).collect()
}

/// Boolean mission-by-resource allocation matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    n_missions: usize,
    n_resources: usize,
    bits: Vec<bool>,
}

impl Assignment {
    pub fn empty(n_missions: usize, n_resources: usize) -> Self {
        Self { n_missions, n_resources, bits: vec![false; n_missions * n_resources] }
    }

    /// Every resource on the unallocated mission.
    pub fn all_unallocated(problem: &McoProblem) -> Self {
        let mut a = Self::empty(problem.n_missions(), problem.n_resources());
        for r in 0..problem.n_resources() {
            a.set(problem.unallocated(), r, true);
        }
        a
    }

    pub fn for_problem(problem: &McoProblem) -> Self {
        Self::empty(problem.n_missions(), problem.n_resources())
    }

    pub fn from_flat(bits: Vec<bool>, n_missions: usize, n_resources: usize) -> Result<Self> {
        if bits.len() != n_missions * n_resources {
            return domain(format!(
                "flat vector has {} bits, expected {}",
                bits.len(),
                n_missions * n_resources
            ));
        }
        Ok(Self { n_missions, n_resources, bits })
    }

    /// Decodes the low `n_missions * n_resources` bits of a basis index
    /// (bit `k` is variable `k`).
    pub fn from_index(index: u64, n_missions: usize, n_resources: usize) -> Self {
        let bits = (0..n_missions * n_resources).map(|k| (index >> k) & 1 == 1).collect();
        Self { n_missions, n_resources, bits }
    }

    /// Assigns each resource to a single mission.
    pub fn from_columns(missions_of: &[usize], n_missions: usize) -> Result<Self> {
        let mut a = Self::empty(n_missions, missions_of.len());
        for (r, &m) in missions_of.iter().enumerate() {
            if m >= n_missions {
                return domain(format!("unknown mission index {m}"));
            }
            a.set(m, r, true);
        }
        Ok(a)
    }

    pub fn n_missions(&self) -> usize {
        self.n_missions
    }

    pub fn n_resources(&self) -> usize {
        self.n_resources
    }

    pub fn get(&self, m: usize, r: usize) -> bool {
        self.bits[m * self.n_resources + r]
    }

    pub fn set(&mut self, m: usize, r: usize, value: bool) {
        self.bits[m * self.n_resources + r] = value;
    }

    pub fn as_flat(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_flat(self) -> Vec<bool> {
        self.bits
    }

    pub fn to_index(&self) -> u64 {
        self.bits.iter().enumerate().filter(|(_, &b)| b).fold(0, |acc, (k, _)| acc | (1 << k))
    }

    pub fn row_count(&self, m: usize) -> usize {
        (0..self.n_resources).filter(|&r| self.get(m, r)).count()
    }

    pub fn column_count(&self, r: usize) -> usize {
        (0..self.n_missions).filter(|&m| self.get(m, r)).count()
    }

    /// Flat 0/1 array in variable order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.bits.iter().map(|&b| b as u8).collect::<Vec<_>>())
            .expect("bits serialize")
    }

    pub fn from_json(s: &str, n_missions: usize, n_resources: usize) -> Result<Self> {
        let raw: Vec<u8> = serde_json::from_str(s).map_err(|e| McoError::Parse(e.to_string()))?;
        if raw.iter().any(|&v| v > 1) {
            return Err(McoError::Parse("assignment bits must be 0 or 1".into()));
        }
        Self::from_flat(raw.into_iter().map(|v| v == 1).collect(), n_missions, n_resources)
    }
}

/// Constraint violation counts of an assignment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub column_violations: u32,
    pub row_violations: u32,
    pub total: u32,
}

/// Signed requirement shortfall of a real mission, `sum_r x[m][r] - REQ(m)`,
/// counting only resources qualified for the requirement.
fn mission_excess(problem: &McoProblem, a: &Assignment, m: usize) -> i64 {
    let allocated = (0..problem.n_resources())
        .filter(|&r| problem.counts_toward_requirement(r) && a.get(m, r))
        .count() as i64;
    allocated - i64::from(problem.req_mission(m, 0))
}

fn precedence_excess(problem: &McoProblem, a: &Assignment, r: usize) -> i64 {
    let u = problem.unallocated();
    let active = (0..problem.n_missions()).filter(|&m| m != u && a.get(m, r)).count() as i64;
    active - i64::from(problem.capability(r, 0)) + 1
}

/// Squared requirement error of mission `m`. The unallocated mission carries
/// no cost.
pub fn mission_cost<T: Scalar>(problem: &McoProblem, a: &Assignment, m: usize) -> Result<T> {
    problem.check_mission(m)?;
    problem.check_dims(a)?;
    if m == problem.unallocated() {
        return Ok(T::zero());
    }
    let e = mission_excess(problem, a, m);
    Ok(T::from_int(e * e))
}

/// Squared deviation of resource `r` from its preferred allocation state
/// (primaries on a real mission, secondaries unused). Scenario 1 only.
pub fn precedence_cost<T: Scalar>(problem: &McoProblem, a: &Assignment, r: usize) -> Result<T> {
    if problem.scenario() != Scenario::S1 {
        return domain("precedence cost is only defined for scenario 1");
    }
    problem.check_resource(r)?;
    problem.check_dims(a)?;
    let e = precedence_excess(problem, a, r);
    Ok(T::from_int(e * e))
}

/// Integer objective scaled by `n_resources` in scenario 1, so that exact
/// comparisons can be made without rounding. Scenario 2 returns the plain
/// mission cost.
pub fn objective_key(problem: &McoProblem, a: &Assignment) -> i64 {
    let u = problem.unallocated();
    let mc: i64 = (0..problem.n_missions())
        .filter(|&m| m != u)
        .map(|m| mission_excess(problem, a, m).pow(2))
        .sum();
    match problem.scenario() {
        Scenario::S1 => {
            let pc: i64 =
                (0..problem.n_resources()).map(|r| precedence_excess(problem, a, r).pow(2)).sum();
            mc * problem.n_resources() as i64 + pc
        }
        Scenario::S2 => mc,
    }
}

/// Denominator relating [`objective_key`] to [`objective`].
pub fn objective_scale(problem: &McoProblem) -> i64 {
    match problem.scenario() {
        Scenario::S1 => problem.n_resources() as i64,
        Scenario::S2 => 1,
    }
}

/// Solution score without constraint penalties: total mission cost, plus
/// precedence cost weighted by `1 / n_resources` in scenario 1.
pub fn objective<T: Scalar>(problem: &McoProblem, a: &Assignment) -> Result<T> {
    problem.check_dims(a)?;
    let u = problem.unallocated();
    let mc: i64 = (0..problem.n_missions())
        .filter(|&m| m != u)
        .map(|m| mission_excess(problem, a, m).pow(2))
        .sum();
    let mut total = T::from_int(mc);
    if problem.scenario() == Scenario::S1 {
        let pc: i64 =
            (0..problem.n_resources()).map(|r| precedence_excess(problem, a, r).pow(2)).sum();
        total = total + T::ratio(pc, problem.n_resources() as i64);
    }
    Ok(total)
}

/// Counts column violations (`|k - 1|` for a column with `k` active bits,
/// so an empty column counts once) and, in scenario 2, row imbalance
/// `|#R1 - #R2|` over the real missions.
pub fn count_violations(problem: &McoProblem, a: &Assignment) -> ViolationReport {
    let column_violations: u32 = (0..a.n_resources())
        .map(|r| (a.column_count(r) as i64 - 1).unsigned_abs() as u32)
        .sum();
    let row_violations = if problem.scenario() == Scenario::S2 {
        let u = problem.unallocated();
        (0..a.n_missions().min(problem.n_missions()))
            .filter(|&m| m != u)
            .map(|m| buddy_imbalance(problem, a, m).unsigned_abs() as u32)
            .sum()
    } else {
        0
    };
    ViolationReport { column_violations, row_violations, total: column_violations + row_violations }
}

pub(crate) fn buddy_imbalance(problem: &McoProblem, a: &Assignment, m: usize) -> i64 {
    let c1 = problem.r1().iter().filter(|&&r| a.get(m, r)).count() as i64;
    let c2 = problem.r2().iter().filter(|&&r| a.get(m, r)).count() as i64;
    c1 - c2
}

/// True when every column is one-hot and, in scenario 2, every real row is
/// balanced between the buddy sets.
pub fn is_feasible(problem: &McoProblem, a: &Assignment) -> bool {
    count_violations(problem, a).total == 0
}

/// `objective(a) - best_feasible_cost`.
pub fn relative_cost<T: Scalar>(problem: &McoProblem, a: &Assignment, best_feasible_cost: T) -> Result<T> {
    Ok(objective::<T>(problem, a)? - best_feasible_cost)
}

/// Per-mission allocation counts broken down by symmetry class; handy for
/// reports.
pub fn allocation_profile(problem: &McoProblem, a: &Assignment) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for (c, members) in problem.symmetry_classes().iter().enumerate() {
        for m in 0..problem.n_missions() {
            let k = members.iter().filter(|&&r| a.get(m, r)).count();
            if k > 0 {
                out.insert((c, m), k);
            }
        }
    }
    out
}
