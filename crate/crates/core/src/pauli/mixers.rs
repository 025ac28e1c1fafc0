//! Cost and mixer Hamiltonians expanded into Pauli sums.

use crate::error::{domain, Result};
use crate::layout::QubitLayout;
use crate::model::{BuddySet, McoProblem, Scenario};
use crate::qubo::QuboModel;
use crate::scalar::Scalar;

use super::{Pauli, PauliString, PauliSum};

fn half<T: Scalar>() -> T {
    T::ratio(1, 2)
}

/// Diagonal operator with `<b|H|b> = q.evaluate(b)`, on `q.n_vars()` qubits.
pub fn cost_hamiltonian<T: Scalar>(q: &QuboModel<T>) -> PauliSum<T> {
    cost_hamiltonian_on(q, q.n_vars()).expect("register matches the model")
}

/// As [`cost_hamiltonian`] but on an `n`-qubit register; extra qubits are
/// left untouched.
pub fn cost_hamiltonian_on<T: Scalar>(q: &QuboModel<T>, n: usize) -> Result<PauliSum<T>> {
    if n < q.n_vars() || n > 64 {
        return domain(format!("register of {n} qubits cannot hold {} variables", q.n_vars()));
    }
    let id = PauliString::identity(n);
    let z = |i: usize| PauliString::on(n, &[i], Pauli::Z);
    let quarter = T::ratio(1, 4);
    let mut h = PauliSum::zero(n);
    h.add_term(id, q.offset());
    // x_i = (1 - Z_i) / 2
    for (&i, &c) in q.linear() {
        h.add_term(id, c * half());
        h.add_term(z(i), -c * half());
    }
    for (&(i, j), &c) in q.quadratic() {
        h.add_term(id, c * quarter);
        h.add_term(z(i), -c * quarter);
        h.add_term(z(j), -c * quarter);
        h.add_term(PauliString::on(n, &[i, j], Pauli::Z), c * quarter);
    }
    Ok(h)
}

/// `sum_i X_i`.
pub fn transverse_mixer<T: Scalar>(n: usize) -> PauliSum<T> {
    let mut h = PauliSum::zero(n);
    for i in 0..n {
        h.add_term(PauliString::on(n, &[i], Pauli::X), T::one());
    }
    h
}

/// `(I + X_i X_j + Y_i Y_j + Z_i Z_j) / 2`, the exchange of qubits `i` and `j`.
pub fn swap_pauli<T: Scalar>(i: usize, j: usize, n: usize) -> Result<PauliSum<T>> {
    if i == j {
        return domain("swap needs two distinct qubits");
    }
    if i >= n || j >= n {
        return domain(format!("swap qubits ({i}, {j}) outside a {n}-qubit register"));
    }
    let mut h = PauliSum::identity(n, half());
    for op in [Pauli::X, Pauli::Y, Pauli::Z] {
        h.add_term(PauliString::on(n, &[i, j], op), half());
    }
    Ok(h)
}

/// Identity plus one swap between the unallocated row and every other row,
/// for every resource column.
pub fn mixer_s1<T: Scalar>(problem: &McoProblem) -> Result<PauliSum<T>> {
    if problem.scenario() != Scenario::S1 {
        return domain("the single-constraint mixer needs a scenario 1 problem");
    }
    let n = problem.n_vars();
    let u = problem.unallocated();
    let mut h = PauliSum::identity(n, T::one());
    for r in 0..problem.n_resources() {
        for m in 0..u {
            h.add_assign_sum(&swap_pauli(problem.var_index(u, r), problem.var_index(m, r), n)?);
        }
    }
    Ok(h)
}

fn controlled_on<T: Scalar>(a: &PauliSum<T>, q: usize, fire_on_one: bool) -> Result<PauliSum<T>> {
    let n = a.n_qubits();
    if q >= n {
        return domain(format!("control qubit {q} outside a {n}-qubit register"));
    }
    if a.support() >> q & 1 == 1 {
        return domain(format!("control qubit {q} is also a target"));
    }
    let sign = if fire_on_one { -T::one() } else { T::one() };
    let zq = PauliSum::from_term(PauliString::on(n, &[q], Pauli::Z), half::<T>());
    // fires on |1>: (I + Z)/2 (x) I + (I - Z)/2 (x) A
    let mut h = PauliSum::identity(n, half());
    h.add_assign_sum(&zq.scaled(-sign));
    h.add_assign_sum(&a.scaled(half()));
    h.add_assign_sum(&zq.disjoint_product(a)?.scaled(sign));
    Ok(h)
}

/// `a` controlled on qubit `q` of the same register being `|1>`.
pub fn control_true_on<T: Scalar>(a: &PauliSum<T>, q: usize) -> Result<PauliSum<T>> {
    controlled_on(a, q, true)
}

/// `a` controlled on qubit `q` of the same register being `|0>`.
pub fn control_false_on<T: Scalar>(a: &PauliSum<T>, q: usize) -> Result<PauliSum<T>> {
    controlled_on(a, q, false)
}

/// Prepends a control qubit (the new qubit 0) that enables `a` when `|1>`.
pub fn control_true<T: Scalar>(a: &PauliSum<T>) -> PauliSum<T> {
    let n = a.n_qubits() + 1;
    controlled_on(&a.shifted(1, n), 0, true).expect("fresh control qubit")
}

/// Prepends a control qubit (the new qubit 0) that enables `a` when `|0>`.
pub fn control_false<T: Scalar>(a: &PauliSum<T>) -> PauliSum<T> {
    let n = a.n_qubits() + 1;
    controlled_on(&a.shifted(1, n), 0, false).expect("fresh control qubit")
}

/// Two simultaneous swaps on disjoint qubit pairs.
pub fn dswap<T: Scalar>(a: (usize, usize), b: (usize, usize), n: usize) -> Result<PauliSum<T>> {
    swap_pauli::<T>(a.0, a.1, n)?.disjoint_product(&swap_pauli(b.0, b.1, n)?)
}

/// Moves the buddy pair `(r1, r2)` between the unallocated row and mission
/// `m` when both columns carry pair ID `id_value`.
pub fn c_dswap<T: Scalar>(r1: usize, r2: usize, m: usize, id_value: usize, layout: &QubitLayout) -> Result<PauliSum<T>> {
    if layout.id_bits() == 0 {
        return domain("layout has no ID qubits");
    }
    if layout.buddy_set(r1) != Some(BuddySet::R1) || layout.buddy_set(r2) != Some(BuddySet::R2) {
        return domain(format!("resources ({r1}, {r2}) are not an R1 x R2 pair"));
    }
    let u = layout.unallocated();
    if m >= u {
        return domain(format!("mission {m} is not an allocatable mission"));
    }
    if id_value >= layout.id_count() {
        return domain(format!("ID {id_value} exceeds the {} pair IDs", layout.id_count()));
    }
    let n = layout.total_qubits();
    let mut h = dswap(
        (layout.assignment_qubit(u, r1), layout.assignment_qubit(m, r1)),
        (layout.assignment_qubit(u, r2), layout.assignment_qubit(m, r2)),
        n,
    )?;
    for r in [r1, r2] {
        for t in 0..layout.id_bits() {
            let q = layout.id_qubit(r, t)?;
            h = controlled_on(&h, q, id_value >> t & 1 == 1)?;
        }
    }
    Ok(h)
}

/// Exchanges two whole columns of the same buddy set, ID qubits included.
pub fn col_swap<T: Scalar>(r: usize, r_prime: usize, layout: &QubitLayout) -> Result<PauliSum<T>> {
    let set = layout.buddy_set(r);
    if set.is_none() || set != layout.buddy_set(r_prime) {
        return domain(format!("resources {r} and {r_prime} are not in the same buddy set"));
    }
    if r == r_prime {
        return domain("column swap needs two distinct columns");
    }
    let n = layout.total_qubits();
    let mut pairs: Vec<(usize, usize)> =
        (0..layout.n_missions()).map(|m| (layout.assignment_qubit(m, r), layout.assignment_qubit(m, r_prime))).collect();
    for t in 0..layout.id_bits() {
        pairs.push((layout.id_qubit(r, t)?, layout.id_qubit(r_prime, t)?));
    }
    let mut h = PauliSum::identity(n, T::one());
    for (a, b) in pairs {
        h = h.disjoint_product(&swap_pauli(a, b, n)?)?;
    }
    Ok(h)
}

/// One summand family of the buddy-constraint mixer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixerComponent {
    CDswap { r1: usize, r2: usize, mission: usize, id: usize },
    /// Unordered column pair; the two ordered terms of weight 1/2 combine
    /// into one of weight 1.
    ColSwap { a: usize, b: usize },
}

/// Summand families of [`mixer_s2`], in construction order.
pub fn mixer_s2_components(problem: &McoProblem, layout: &QubitLayout, reduced: bool) -> Result<Vec<MixerComponent>> {
    if problem.scenario() != Scenario::S2 {
        return domain("the buddy-constraint mixer needs a scenario 2 problem");
    }
    let mut out = Vec::new();
    for &r1 in layout.r1() {
        for &r2 in layout.r2() {
            for mission in 0..layout.unallocated() {
                for id in 0..layout.id_count() {
                    out.push(MixerComponent::CDswap { r1, r2, mission, id });
                }
            }
        }
    }
    if !reduced {
        for set in [layout.r1(), layout.r2()] {
            for (i, &a) in set.iter().enumerate() {
                for &b in &set[i + 1..] {
                    out.push(MixerComponent::ColSwap { a, b });
                }
            }
        }
    }
    Ok(out)
}

/// Buddy-constraint mixer: ID-controlled pair moves, plus column swaps within
/// each set unless `reduced`.
pub fn mixer_s2<T: Scalar>(problem: &McoProblem, layout: &QubitLayout, reduced: bool) -> Result<PauliSum<T>> {
    let mut h = PauliSum::zero(layout.total_qubits());
    for c in mixer_s2_components(problem, layout, reduced)? {
        let part = match c {
            MixerComponent::CDswap { r1, r2, mission, id } => c_dswap(r1, r2, mission, id, layout)?,
            MixerComponent::ColSwap { a, b } => col_swap(a, b, layout)?,
        };
        h.add_assign_sum(&part);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::DenseMatrix;
    use num_rational::Rational64;

    fn swap_bits(b: usize, i: usize, j: usize) -> usize {
        let (bi, bj) = (b >> i & 1, b >> j & 1);
        if bi == bj {
            b
        } else {
            b ^ (1 << i) ^ (1 << j)
        }
    }

    #[test]
    fn cost_single_linear() {
        let mut q = QuboModel::<Rational64>::new(1);
        q.add_linear(0, Rational64::from_integer(1));
        let h = cost_hamiltonian(&q);
        assert_eq!(h.len(), 2);
        assert_eq!(h.identity_coefficient(), Rational64::new(1, 2));
        assert_eq!(h.coefficient(&"Z".parse().unwrap()), Rational64::new(-1, 2));
    }

    #[test]
    fn cost_offset_only() {
        let mut q = QuboModel::<f64>::new(3);
        q.add_offset(2.5);
        let h = cost_hamiltonian(&q);
        assert_eq!(h.len(), 1);
        assert_eq!(h.identity_coefficient(), 2.5);
    }

    #[test]
    fn swap_is_exact_permutation() {
        let m = swap_pauli::<Rational64>(0, 1, 2).unwrap().realize_matrix().unwrap();
        assert_eq!(m, DenseMatrix::permutation(4, |b| swap_bits(b, 0, 1)));
        assert!(swap_pauli::<f64>(1, 1, 2).is_err());
        assert!(swap_pauli::<f64>(0, 2, 2).is_err());
    }

    #[test]
    fn control_true_fires_on_one() {
        let x = PauliSum::<Rational64>::from_term("X".parse().unwrap(), Rational64::from_integer(1));
        let ct = control_true(&x);
        // control is qubit 0, target qubit 1
        let img = ct.apply_to_basis(0b01);
        assert_eq!(img.keys().copied().collect::<Vec<_>>(), [0b11]);
        let img = ct.apply_to_basis(0b00);
        assert_eq!(img.keys().copied().collect::<Vec<_>>(), [0b00]);
        let cf = control_false(&x);
        assert_eq!(cf.apply_to_basis(0b00).keys().copied().collect::<Vec<_>>(), [0b10]);
    }

    #[test]
    fn s1_mixer_single_column() {
        let p = McoProblem::scenario1(&[1, 1, 1], &[2]).unwrap();
        let h = mixer_s1::<Rational64>(&p).unwrap();
        // I + 3 swaps: identity weight 1 + 3/2, then XX/YY/ZZ for 3 pairs
        assert_eq!(h.identity_coefficient(), Rational64::new(5, 2));
        assert_eq!(h.len(), 1 + 9);
        assert!(mixer_s1::<f64>(&McoProblem::scenario2(&[1], 1).unwrap()).is_err());
    }

    #[test]
    fn component_counts() {
        let p = McoProblem::scenario2(&[1], 2).unwrap();
        let l = QubitLayout::for_problem(&p);
        let reduced = mixer_s2_components(&p, &l, true).unwrap();
        assert_eq!(reduced.len(), 2 * 2 * 2);
        let full = mixer_s2_components(&p, &l, false).unwrap();
        assert_eq!(full.len(), reduced.len() + 2);
    }

    #[test]
    fn c_dswap_argument_checks() {
        let p = McoProblem::scenario2(&[1], 2).unwrap();
        let l = QubitLayout::for_problem(&p);
        assert!(c_dswap::<f64>(0, 2, 0, 2, &l).is_err());
        assert!(c_dswap::<f64>(0, 1, 0, 0, &l).is_err());
        assert!(c_dswap::<f64>(0, 2, 1, 0, &l).is_err());
        assert!(col_swap::<f64>(0, 2, &l).is_err());
        assert!(col_swap::<f64>(0, 1, &l).is_ok());
    }
}
