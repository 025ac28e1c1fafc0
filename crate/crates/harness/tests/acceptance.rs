//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Every check compares library output with
//! an oracle written here from the problem tables alone.

use std::process::ExitCode;
use std::time::Instant;

use mco_core::layout::QubitLayout;
use mco_core::model::count_violations;
use mco_core::pauli::{c_dswap, col_swap, control_false, control_true, dswap, mixer_s1, mixer_s2, swap_pauli};
use mco_core::qubo::build_qubo;
use mco_core::sim::{apply_mixer_evolution, leakage};
use mco_core::{
    Assignment, Complex, DenseMatrix, McoProblem, MixerKind, PauliString, PauliSum, PenaltyConfig, QaoaParams,
    QaoaSimulator, Scenario, StateVector,
};
use mco_harness::config::{ExperimentConfig, SolverKind};
use mco_harness::export::to_csv_string;
use mco_harness::generator::generate_instance;
use mco_harness::run_experiment;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;
type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const LAMBDA: f64 = 5.0;

fn bit(b: u64, i: usize) -> i64 {
    (b >> i & 1) as i64
}

/// Objective plus `LAMBDA` times squared constraint residuals, from the tables.
fn oracle_energy(p: &McoProblem, b: u64) -> f64 {
    let (n_m, n_r) = (p.n_missions(), p.n_resources());
    let u = n_m - 1;
    let x = |m: usize, r: usize| bit(b, m * n_r + r);
    let mut e = 0.0;
    for m in 0..u {
        let got: i64 = (0..n_r).filter(|&r| p.capability(r, 0) > 0).map(|r| x(m, r)).sum();
        e += ((got - i64::from(p.req_mission(m, 0))).pow(2)) as f64;
    }
    if p.scenario() == Scenario::S1 {
        for r in 0..n_r {
            let used: i64 = (0..u).map(|m| x(m, r)).sum();
            e += ((used - i64::from(p.capability(r, 0)) + 1).pow(2)) as f64 / n_r as f64;
        }
    }
    e + LAMBDA * oracle_residual(p, b) as f64
}

/// Sum of squared hard-constraint residuals; zero exactly on feasible states.
fn oracle_residual(p: &McoProblem, b: u64) -> i64 {
    let (n_m, n_r) = (p.n_missions(), p.n_resources());
    let x = |m: usize, r: usize| bit(b, m * n_r + r);
    let mut s = 0;
    for r in 0..n_r {
        s += ((0..n_m).map(|m| x(m, r)).sum::<i64>() - 1).pow(2);
    }
    if p.scenario() == Scenario::S2 {
        for m in 0..n_m - 1 {
            let c1: i64 = p.r1().iter().map(|&r| x(m, r)).sum();
            let c2: i64 = p.r2().iter().map(|&r| x(m, r)).sum();
            s += (c1 - c2).pow(2);
        }
    }
    s
}

fn qubo_instances() -> Vec<McoProblem> {
    let mut out = Vec::new();
    for seed in 0..100 {
        out.push(generate_instance(Scenario::S1, 16, 1000 + seed).unwrap());
        out.push(generate_instance(Scenario::S2, 16, 2000 + seed).unwrap());
    }
    out
}

fn qubo_equivalence(instances: &[McoProblem]) -> Outcome {
    let mut worst = 0.0f64;
    let mut states = 0u64;
    for p in instances {
        let q = build_qubo(p, &PenaltyConfig::new(LAMBDA).unwrap());
        for b in 0..1u64 << p.n_vars() {
            worst = worst.max((q.evaluate_index(b) - oracle_energy(p, b)).abs());
            states += 1;
        }
    }
    let detail = format!("{} instances, {states} bit-vectors, max |diff| = {worst:.2e} (tol 1e-9)", instances.len());
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn penalty_dominance(instances: &[McoProblem]) -> Outcome {
    let mut min_gap = f64::INFINITY;
    for (i, p) in instances.iter().enumerate() {
        let q = build_qubo(p, &PenaltyConfig::new(LAMBDA).unwrap());
        let (mut best_feasible, mut best_infeasible) = (f64::INFINITY, f64::INFINITY);
        for b in 0..1u64 << p.n_vars() {
            let e = q.evaluate_index(b);
            if oracle_residual(p, b) == 0 {
                best_feasible = best_feasible.min(e);
            } else {
                best_infeasible = best_infeasible.min(e);
            }
        }
        let gap = best_infeasible - best_feasible;
        if gap.is_nan() || gap <= 0.0 {
            return Err(format!("instance {i}: infeasible energy {best_infeasible} <= feasible {best_feasible}"));
        }
        min_gap = min_gap.min(gap);
    }
    Ok(format!("{} instances, smallest infeasible-minus-feasible gap {min_gap:.3}", instances.len()))
}

fn swap_bits(b: u64, i: usize, j: usize) -> u64 {
    if (b >> i & 1) == (b >> j & 1) {
        b
    } else {
        b ^ (1 << i) ^ (1 << j)
    }
}

fn perm_matrix(n: usize, f: impl Fn(u64) -> u64) -> DenseMatrix<f64> {
    DenseMatrix::permutation(1 << n, |b| f(b as u64) as usize)
}

/// `|0><0| (x) I + |1><1| (x) A` (control on the new qubit 0), or the
/// reverse when `on_false`.
fn controlled_block(a: &DenseMatrix<f64>, on_false: bool) -> DenseMatrix<f64> {
    let zero = C::new(0.0, 0.0);
    DenseMatrix::from_fn(2 * a.dim(), |r, c| {
        if r & 1 != c & 1 {
            zero
        } else if (c & 1 == 1) != on_false {
            a.get(r >> 1, c >> 1)
        } else if r == c {
            C::new(1.0, 0.0)
        } else {
            zero
        }
    })
}

fn decomposition_exactness() -> Outcome {
    let mut worst = 0.0f64;
    let mut checks = 0;
    let mut record = |got: &PauliSum<f64>, want: &DenseMatrix<f64>| -> Result<(), String> {
        let m = got.realize_matrix().map_err(|e| e.to_string())?;
        worst = worst.max(m.max_abs_diff(want));
        checks += 1;
        Ok(())
    };
    for n in 2..=6 {
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let h = swap_pauli::<f64>(i, j, n).map_err(|e| e.to_string())?;
                record(&h, &perm_matrix(n, |b| swap_bits(b, i, j)))?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 1..=4 {
        for _ in 0..5 {
            let mut a = PauliSum::zero(n);
            for _ in 0..4 {
                let ops: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]).collect();
                a.add_term(ops.parse::<PauliString>().unwrap(), rng.gen_range(-1.0..1.0));
            }
            let dense = a.realize_matrix().map_err(|e| e.to_string())?;
            record(&control_true(&a), &controlled_block(&dense, false))?;
            record(&control_false(&a), &controlled_block(&dense, true))?;
        }
    }
    for n in 4..=6 {
        let h = dswap::<f64>((0, n - 1), (1, n - 2), n).map_err(|e| e.to_string())?;
        record(&h, &perm_matrix(n, |b| swap_bits(swap_bits(b, 0, n - 1), 1, n - 2)))?;
    }
    for reqs in [vec![1], vec![1, 0], vec![0, 1], vec![1, 1, 1]] {
        let p = McoProblem::scenario2(&reqs, 1).unwrap();
        let l = QubitLayout::for_problem(&p);
        let n = l.total_qubits();
        if n > 10 {
            return Err(format!("toy layout has {n} qubits"));
        }
        let u = l.unallocated();
        let (r1, r2) = (l.r1()[0], l.r2()[0]);
        for m in 0..u {
            for id in 0..l.id_count() {
                let h = c_dswap::<f64>(r1, r2, m, id, &l).map_err(|e| e.to_string())?;
                let want = perm_matrix(n, |b| {
                    if l.read_id(b, r1) == id && l.read_id(b, r2) == id {
                        let b = swap_bits(b, l.assignment_qubit(u, r1), l.assignment_qubit(m, r1));
                        swap_bits(b, l.assignment_qubit(u, r2), l.assignment_qubit(m, r2))
                    } else {
                        b
                    }
                });
                record(&h, &want)?;
            }
        }
    }
    // a column swap needs two resources per buddy set, which takes 12 qubits,
    // so its matrix is compared column by column instead of realized densely
    let p = McoProblem::scenario2(&[1], 2).unwrap();
    let l = QubitLayout::for_problem(&p);
    for (a, c) in [(l.r1()[0], l.r1()[1]), (l.r2()[0], l.r2()[1])] {
        let h = col_swap::<f64>(a, c, &l).map_err(|e| e.to_string())?;
        for b in 0..1u64 << l.total_qubits() {
            let mut t = b;
            for m in 0..l.n_missions() {
                t = swap_bits(t, l.assignment_qubit(m, a), l.assignment_qubit(m, c));
            }
            for k in 0..l.id_bits() {
                t = swap_bits(t, l.id_qubit(a, k).unwrap(), l.id_qubit(c, k).unwrap());
            }
            for (row, v) in h.apply_to_basis(b) {
                let want = if row == t { 1.0 } else { 0.0 };
                worst = worst.max((v - C::new(want, 0.0)).norm());
            }
            if !h.apply_to_basis(b).contains_key(&t) {
                worst = worst.max(1.0);
            }
        }
        checks += 1;
    }
    let detail = format!("{checks} operators (column swaps on 12 qubits, the rest on <= 10), max |diff| = {worst:.2e} (tol 1e-12)");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_leakage(sim: &QaoaSimulator<f64>, rng: &mut ChaCha8Rng, vectors: usize) -> Result<f64, String> {
    let sub = sim.subspace().ok_or("constrained simulator has no subspace")?;
    let mut worst = 0.0f64;
    for k in 0..vectors {
        let p = 1 + k % 4;
        let gammas = (0..p).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        let betas = (0..p).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect();
        let sv = sim.run(&QaoaParams::new(gammas, betas).unwrap()).map_err(|e| e.to_string())?;
        worst = worst.max(leakage(&sv, sub));
    }
    Ok(worst)
}

fn subspace_preservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let cfg = PenaltyConfig::new(LAMBDA).unwrap();
    let mut worst = 0.0f64;
    let mut largest = 0;
    for seed in 0..30 {
        let p = generate_instance(Scenario::S1, 12, 3000 + seed).unwrap();
        let sim = QaoaSimulator::new(&p, MixerKind::ConstrainedS1, &cfg).map_err(|e| e.to_string())?;
        largest = largest.max(sim.n_qubits());
        worst = worst.max(max_leakage(&sim, &mut rng, 50)?);
    }
    for seed in 0..10 {
        let p = generate_instance(Scenario::S2, 10, 4000 + seed).unwrap();
        for kind in [MixerKind::ConstrainedS2Reduced, MixerKind::ConstrainedS2Full] {
            let sim = QaoaSimulator::new(&p, kind, &cfg).map_err(|e| e.to_string())?;
            if sim.n_qubits() > 14 {
                return Err(format!("S2 instance uses {} qubits", sim.n_qubits()));
            }
            largest = largest.max(sim.n_qubits());
            worst = worst.max(max_leakage(&sim, &mut rng, 50)?);
        }
    }
    let detail = format!(
        "30 S1 + 10 S2 (both mixers) instances, 50 parameter vectors each, p 1..4, up to {largest} qubits, max leakage {worst:.2e} (tol 1e-8)"
    );
    if worst <= 1e-8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn violation_findings() -> Outcome {
    let cfg = ExperimentConfig {
        scenario: Scenario::S2,
        instance_count: 50,
        qubit_budget: 10,
        seed: 5000,
        solvers: vec![SolverKind::Anneal, SolverKind::Qaoa, SolverKind::Qaoah],
        ..Default::default()
    };
    let recs = run_experiment(&cfg).map_err(|e| e.to_string())?;
    if let Some(r) = recs.iter().find(|r| !r.is_ok()) {
        return Err(format!("instance {} {}: {}", r.instance, r.solver, r.status));
    }
    let of = |k: SolverKind| recs.iter().filter(move |r| r.solver == k).map(|r| r.total_violations().unwrap());
    let qaoah_max = of(SolverKind::Qaoah).max().unwrap_or(0);
    let sa_clean = of(SolverKind::Anneal).filter(|&v| v == 0).count();
    let qaoa_mean = of(SolverKind::Qaoa).map(f64::from).sum::<f64>() / 50.0;
    let detail = format!(
        "50 S2 instances: QAOAH max violations {qaoah_max}, SA violation-free on {sa_clean}/50, QAOA mean violations {qaoa_mean:.3}"
    );
    if qaoah_max == 0 && sa_clean * 100 >= 95 * 50 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn worked_examples() -> Outcome {
    // two resources spread over three and four missions
    let p = McoProblem::scenario1(&[1, 1, 1], &[2, 2]).unwrap();
    let mut a = Assignment::for_problem(&p);
    (0..3).for_each(|m| a.set(m, 0, true));
    (0..4).for_each(|m| a.set(m, 1, true));
    let first = count_violations(&p, &a).total;
    // four R1 and two R2 resources sharing one mission
    let p = McoProblem::scenario2(&[4], 4).unwrap();
    let mut a = Assignment::for_problem(&p);
    for r in [0, 1, 2, 3, 4, 5] {
        a.set(0, r, true);
    }
    a.set(1, 6, true);
    a.set(1, 7, true);
    let second = count_violations(&p, &a).total;
    let detail = format!("violation counts {first} and {second} (expected 5 and 2)");
    if (first, second) == (5, 2) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sa_vs_bf() -> Outcome {
    let cfg = ExperimentConfig {
        scenario: Scenario::S1,
        instance_count: 100,
        qubit_budget: 12,
        seed: 6000,
        solvers: vec![SolverKind::BruteForce, SolverKind::Anneal],
        ..Default::default()
    };
    let recs = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let hits = recs
        .iter()
        .filter(|r| r.solver == SolverKind::Anneal && r.relative_cost.is_some_and(|c| c.abs() <= 1e-9))
        .count();
    let detail = format!("SA matched the exhaustive optimum on {hits}/100 S1 instances (need 90)");
    if hits >= 90 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dense_exp_apply(h: &PauliSum<f64>, beta: f64, v: &[C]) -> Result<Vec<C>, String> {
    let m = h.realize_matrix().map_err(|e| e.to_string())?;
    let dim = m.dim();
    let eig = DMatrix::from_fn(dim, dim, |r, c| m.get(r, c)).symmetric_eigen();
    let phases = DVector::from_iterator(dim, eig.eigenvalues.iter().map(|&l| C::new(0.0, -beta * l).exp()));
    let u = &eig.eigenvectors;
    let y = u * DMatrix::from_diagonal(&phases) * (u.adjoint() * DVector::from_column_slice(v));
    Ok(y.iter().copied().collect())
}

fn exponential_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mixers: Vec<PauliSum<f64>> = {
        let s1 = McoProblem::scenario1(&[1, 1], &[2, 1, 1]).unwrap();
        let s2 = McoProblem::scenario2(&[1, 1], 1).unwrap();
        let l2 = QubitLayout::for_problem(&s2);
        vec![
            mixer_s1(&s1).unwrap(),
            mixer_s2(&s2, &l2, false).unwrap(),
            mixer_s2(&s2, &l2, true).unwrap(),
        ]
    };
    let mut worst = 0.0f64;
    for case in 0..100 {
        let h = if case < mixers.len() * 4 {
            mixers[case % mixers.len()].clone()
        } else {
            let n = rng.gen_range(1..=10);
            let mut h = PauliSum::zero(n);
            for _ in 0..rng.gen_range(1..=12) {
                let ops: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]).collect();
                h.add_term(ops.parse::<PauliString>().unwrap(), rng.gen_range(-1.5..1.5));
            }
            h
        };
        let n = h.n_qubits();
        let beta = rng.gen_range(-3.0..3.0);
        let mut amps: Vec<C> = (0..1 << n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        let want = dense_exp_apply(&h, beta, &amps)?;
        let mut sv = StateVector::from_amplitudes(n, amps).map_err(|e| e.to_string())?;
        apply_mixer_evolution(&mut sv, &h, beta, 1e-10).map_err(|e| e.to_string())?;
        for (a, b) in sv.amplitudes().iter().zip(&want) {
            worst = worst.max((a - b).norm());
        }
    }
    let detail = format!("100 (H, beta) cases on <= 10 qubits, max elementwise |diff| = {worst:.2e} (tol 1e-8)");
    if worst <= 1e-8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn determinism() -> Outcome {
    let cfg = ExperimentConfig {
        scenario: Scenario::S2,
        instance_count: 6,
        qubit_budget: 8,
        seed: 7000,
        shots: 200,
        max_evals: 80,
        ..Default::default()
    };
    let first = to_csv_string(&run_experiment(&cfg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let again = to_csv_string(&run_experiment(&cfg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let serial_cfg = ExperimentConfig { parallel: false, ..cfg };
    let serial = to_csv_string(&run_experiment(&serial_cfg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let detail = format!("{} csv bytes, repeated and serial runs identical", first.len());
    if first == again && first == serial {
        Ok(detail)
    } else {
        Err("csv output differs between runs".into())
    }
}

fn main() -> ExitCode {
    let instances = qubo_instances();
    let criteria: Vec<Criterion> = vec![
        ("qubo-equivalence", Box::new(|| qubo_equivalence(&instances))),
        ("penalty-dominance", Box::new(|| penalty_dominance(&instances))),
        ("decomposition-exactness", Box::new(decomposition_exactness)),
        ("subspace-preservation", Box::new(subspace_preservation)),
        ("violation-findings", Box::new(violation_findings)),
        ("worked-examples", Box::new(worked_examples)),
        ("sa-vs-bf", Box::new(sa_vs_bf)),
        ("exponential-oracle", Box::new(exponential_oracle)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t0 = Instant::now();
        let outcome = check();
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
