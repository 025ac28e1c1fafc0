//! Qubit layout shared by mixers, initial states and subspace checks.
//!
//! Assignment qubits come first, in variable order. Scenario 2 appends one ID
//! block per resource: the `R1` blocks in `R1` order, then the `R2` blocks.
//! Within a block, qubit `t` holds bit `t` of the pair ID (least significant
//! bit first).

use crate::error::{domain, Result};
use crate::model::{BuddySet, McoProblem, Scenario};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitLayout {
    n_missions: usize,
    n_resources: usize,
    id_bits: usize,
    r1: Vec<usize>,
    r2: Vec<usize>,
}

impl QubitLayout {
    pub fn for_problem(problem: &McoProblem) -> Self {
        let id_bits = match problem.scenario() {
            Scenario::S1 => 0,
            Scenario::S2 => id_bits_for(problem.r1().len()),
        };
        Self {
            n_missions: problem.n_missions(),
            n_resources: problem.n_resources(),
            id_bits,
            r1: problem.r1().to_vec(),
            r2: problem.r2().to_vec(),
        }
    }

    pub fn n_missions(&self) -> usize {
        self.n_missions
    }

    pub fn n_resources(&self) -> usize {
        self.n_resources
    }

    pub fn unallocated(&self) -> usize {
        self.n_missions - 1
    }

    pub fn assignment_qubits(&self) -> usize {
        self.n_missions * self.n_resources
    }

    /// ID qubits per resource column (0 outside scenario 2).
    pub fn id_bits(&self) -> usize {
        self.id_bits
    }

    /// Number of distinct pair IDs, `|R1|`.
    pub fn id_count(&self) -> usize {
        self.r1.len()
    }

    pub fn id_qubits(&self) -> usize {
        self.id_bits * (self.r1.len() + self.r2.len())
    }

    pub fn total_qubits(&self) -> usize {
        self.assignment_qubits() + self.id_qubits()
    }

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

    pub fn assignment_qubit(&self, m: usize, r: usize) -> usize {
        debug_assert!(m < self.n_missions && r < self.n_resources);
        m * self.n_resources + r
    }

    fn id_block(&self, r: usize) -> Option<usize> {
        self.r1
            .iter()
            .position(|&x| x == r)
            .or_else(|| self.r2.iter().position(|&x| x == r).map(|k| k + self.r1.len()))
    }

    /// Qubit holding bit `t` of resource `r`'s pair ID.
    pub fn id_qubit(&self, r: usize, t: usize) -> Result<usize> {
        if t >= self.id_bits {
            return domain(format!("ID bit {t} exceeds the {} ID qubits per column", self.id_bits));
        }
        match self.id_block(r) {
            Some(block) => Ok(self.assignment_qubits() + block * self.id_bits + t),
            None => domain(format!("resource {r} has no ID block")),
        }
    }

    /// Pair ID stored for resource `r` in basis state `basis`.
    pub fn read_id(&self, basis: u64, r: usize) -> usize {
        let block = self.id_block(r).expect("resource has an ID block");
        let base = self.assignment_qubits() + block * self.id_bits;
        (0..self.id_bits).map(|t| (((basis >> (base + t)) & 1) as usize) << t).sum()
    }

    pub fn assignment_mask(&self) -> u64 {
        mask(self.assignment_qubits())
    }

    /// Mission holding resource `r`, if its column is one-hot.
    pub fn column_mission(&self, basis: u64, r: usize) -> Option<usize> {
        let mut found = None;
        for m in 0..self.n_missions {
            if (basis >> self.assignment_qubit(m, r)) & 1 == 1 {
                if found.is_some() {
                    return None;
                }
                found = Some(m);
            }
        }
        found
    }
}

pub(crate) fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// `ceil(log2(count))`, at least 1.
pub fn id_bits_for(count: usize) -> usize {
    if count <= 2 {
        1
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as usize
    }
}

/// Basis states that satisfy the hard constraints a constrained mixer must
/// preserve.
#[derive(Debug, Clone)]
pub enum ConstraintSubspace {
    /// Every column one-hot.
    OneHotColumns(QubitLayout),
    /// One-hot columns, each buddy set's IDs a permutation of `0..|R1|`, and
    /// the `R1` and `R2` columns sharing an ID sitting on the same mission
    /// (which balances every row).
    BuddyPairs(QubitLayout),
}

impl ConstraintSubspace {
    pub fn for_problem(problem: &McoProblem) -> Self {
        let layout = QubitLayout::for_problem(problem);
        match problem.scenario() {
            Scenario::S1 => Self::OneHotColumns(layout),
            Scenario::S2 => Self::BuddyPairs(layout),
        }
    }

    pub fn layout(&self) -> &QubitLayout {
        match self {
            Self::OneHotColumns(l) | Self::BuddyPairs(l) => l,
        }
    }

    pub fn contains(&self, basis: u64) -> bool {
        match self {
            Self::OneHotColumns(l) => {
                (0..l.n_resources()).all(|r| l.column_mission(basis, r).is_some()) && basis >> l.total_qubits() == 0
            }
            Self::BuddyPairs(l) => {
                let k = l.id_count();
                let mut home1 = vec![None; k];
                let mut home2 = vec![None; k];
                for (set, homes) in [(l.r1(), &mut home1), (l.r2(), &mut home2)] {
                    for &r in set {
                        let Some(m) = l.column_mission(basis, r) else { return false };
                        let id = l.read_id(basis, r);
                        if id >= k || homes[id].is_some() {
                            return false;
                        }
                        homes[id] = Some(m);
                    }
                }
                home1 == home2
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_bit_counts() {
        assert_eq!(id_bits_for(1), 1);
        assert_eq!(id_bits_for(2), 1);
        assert_eq!(id_bits_for(3), 2);
        assert_eq!(id_bits_for(4), 2);
        assert_eq!(id_bits_for(5), 3);
    }

    #[test]
    fn s2_layout_positions() {
        let p = McoProblem::scenario2(&[1, 1, 1], 4).unwrap();
        let l = QubitLayout::for_problem(&p);
        assert_eq!(l.assignment_qubits(), 32);
        assert_eq!(l.id_bits(), 2);
        assert_eq!(l.total_qubits(), 48);
        assert_eq!(l.id_qubit(0, 0).unwrap(), 32);
        assert_eq!(l.id_qubit(1, 1).unwrap(), 35);
        assert_eq!(l.id_qubit(4, 0).unwrap(), 40);
        assert!(l.id_qubit(0, 2).is_err());
    }

    #[test]
    fn s1_has_no_ids() {
        let p = McoProblem::scenario1(&[1, 2], &[2, 2, 1]).unwrap();
        let l = QubitLayout::for_problem(&p);
        assert_eq!(l.id_qubits(), 0);
        assert_eq!(l.total_qubits(), 9);
        assert!(l.id_qubit(0, 0).is_err());
    }

    #[test]
    fn buddy_subspace_membership() {
        let p = McoProblem::scenario2(&[1], 2).unwrap();
        let sub = ConstraintSubspace::for_problem(&p);
        let l = sub.layout().clone();
        // all on U, R1 IDs (0,1), R2 IDs (0,1)
        let mut b = 0u64;
        for r in 0..4 {
            b |= 1 << l.assignment_qubit(1, r);
        }
        let with_ids = b | 1 << l.id_qubit(1, 0).unwrap() | 1 << l.id_qubit(3, 0).unwrap();
        assert!(sub.contains(with_ids));
        // duplicate IDs
        assert!(!sub.contains(b));
        // move R1[0] (ID 0) alone to mission 0: pair split
        let split = with_ids ^ (1 << l.assignment_qubit(1, 0)) ^ (1 << l.assignment_qubit(0, 0));
        assert!(!sub.contains(split));
        // move its partner R2[0] too
        let moved = split ^ (1 << l.assignment_qubit(1, 2)) ^ (1 << l.assignment_qubit(0, 2));
        assert!(sub.contains(moved));
    }
}
