#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use mco_core::{McoProblem, PauliSum, Rational64, Scenario};
use proptest::prelude::*;

/// Scenario 1 instances with total demand at most the primary count and at
/// most `max_vars` variables.
pub fn s1_problem(max_vars: usize) -> impl Strategy<Value = McoProblem> {
    (1usize..=3, 1usize..=5)
        .prop_filter("size", move |(m, r)| (m + 1) * r <= max_vars)
        .prop_flat_map(|(m, r)| {
            (proptest::collection::vec(1u32..=2, r), proptest::collection::vec(0u32..=2, m))
        })
        .prop_filter_map("demand", |(mut caps, reqs)| {
            if !caps.contains(&2) {
                caps[0] = 2;
            }
            let primaries = caps.iter().filter(|&&c| c == 2).count() as u32;
            (reqs.iter().sum::<u32>() <= primaries).then(|| McoProblem::scenario1(&reqs, &caps).unwrap())
        })
}

/// Scenario 2 instances with total demand at most `|R1|`.
pub fn s2_problem(max_vars: usize) -> impl Strategy<Value = McoProblem> {
    (1usize..=3, 1usize..=3)
        .prop_filter("size", move |(m, k)| (m + 1) * 2 * k <= max_vars)
        .prop_flat_map(|(m, k)| (proptest::collection::vec(0u32..=2, m), Just(k)))
        .prop_filter_map("demand", |(reqs, k)| {
            (reqs.iter().sum::<u32>() as usize <= k).then(|| McoProblem::scenario2(&reqs, k).unwrap())
        })
}

pub fn any_problem(max_vars: usize) -> impl Strategy<Value = McoProblem> {
    prop_oneof![s1_problem(max_vars), s2_problem(max_vars)]
}

/// Objective plus `lambda` times the squared constraint residuals, computed
/// straight from the problem tables on a flat bit-vector.
pub fn oracle_energy(p: &McoProblem, bits: &[bool], lambda: Rational64) -> Rational64 {
    let (n_m, n_r) = (p.n_missions(), p.n_resources());
    let u = n_m - 1;
    let x = |m: usize, r: usize| i64::from(bits[m * n_r + r]);
    let sq = |v: i64| Rational64::from_integer(v * v);
    let mut e = Rational64::from_integer(0);
    for m in 0..u {
        let assigned: i64 = (0..n_r).filter(|&r| p.capability(r, 0) > 0).map(|r| x(m, r)).sum();
        e += sq(assigned - i64::from(p.req_mission(m, 0)));
    }
    if p.scenario() == Scenario::S1 {
        for r in 0..n_r {
            let used: i64 = (0..u).map(|m| x(m, r)).sum();
            e += sq(used - i64::from(p.capability(r, 0)) + 1) / Rational64::from_integer(n_r as i64);
        }
    }
    for r in 0..n_r {
        let k: i64 = (0..n_m).map(|m| x(m, r)).sum();
        e += lambda * sq(k - 1);
    }
    if p.scenario() == Scenario::S2 {
        for m in 0..u {
            let c1: i64 = p.r1().iter().map(|&r| x(m, r)).sum();
            let c2: i64 = p.r2().iter().map(|&r| x(m, r)).sum();
            e += lambda * sq(c1 - c2);
        }
    }
    e
}

pub fn bits_of(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| index >> i & 1 == 1).collect()
}

pub fn swap_bits(b: u64, i: usize, j: usize) -> u64 {
    if (b >> i & 1) == (b >> j & 1) {
        b
    } else {
        b ^ (1 << i) ^ (1 << j)
    }
}

/// Checks `h |b> = |f(b)>` exactly for every basis state of `h`'s register.
pub fn acts_as_permutation(h: &PauliSum<Rational64>, f: impl Fn(u64) -> u64) -> Result<(), String> {
    for b in 0..1u64 << h.n_qubits() {
        let img = h.apply_to_basis(b);
        let expected = f(b);
        let ok = img.len() == 1
            && img.get(&expected).is_some_and(|v| *v == num_complex::Complex::new(1.into(), 0.into()));
        if !ok {
            return Err(format!("basis {b:#b}: expected |{expected:#b}>, got {img:?}"));
        }
    }
    Ok(())
}

/// Basis states reachable from `start` along nonzero off-diagonal elements.
pub fn reachable(h: &PauliSum<Rational64>, start: u64) -> BTreeSet<u64> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(b) = queue.pop_front() {
        for &t in h.apply_to_basis(b).keys() {
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Images of `b` that fall outside the predicate.
pub fn escapes(h: &PauliSum<Rational64>, b: u64, inside: impl Fn(u64) -> bool) -> BTreeMap<u64, String> {
    h.apply_to_basis(b).into_iter().filter(|(t, _)| !inside(*t)).map(|(t, v)| (t, format!("{v}"))).collect()
}
