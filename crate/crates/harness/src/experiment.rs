use std::time::Instant;

use mco_core::model::{count_violations, objective};
use mco_core::optimizer::optimize_simulator;
use mco_core::qubo::build_qubo;
use mco_core::sim::sample;
use mco_core::solvers::{brute_force_constrained, simulated_anneal};
use mco_core::{Assignment, McoProblem, MixerKind, QaoaParams, QaoaSimulator, Scenario};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, SolverKind};
use crate::error::Result;
use crate::generator::generate_instance;

/// One solver applied to one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: usize,
    pub solver: SolverKind,
    pub scenario: Scenario,
    /// Assignment qubits.
    pub qubits: usize,
    /// Extra ID register qubits used by the simulator (0 for classical solvers).
    pub id_qubits: usize,
    pub cost: Option<f64>,
    pub relative_cost: Option<f64>,
    pub col_violations: Option<u32>,
    pub row_violations: Option<u32>,
    pub wall_time_build: f64,
    pub wall_time_solve: f64,
    /// Generator seed of the instance.
    pub seed: u64,
    /// Returned assignment as `0`/`1` characters in variable order.
    pub bits: String,
    /// `ok`, or `error: <message>`.
    pub status: String,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn total_violations(&self) -> Option<u32> {
        Some(self.col_violations? + self.row_violations?)
    }

    /// Decodes `bits` back into an assignment of `problem`.
    pub fn assignment(&self, problem: &McoProblem) -> Option<Assignment> {
        let bits: Vec<bool> = self.bits.chars().map(|c| c == '1').collect();
        Assignment::from_flat(bits, problem.n_missions(), problem.n_resources()).ok()
    }
}

pub fn instance_seed(master: u64, index: usize) -> u64 {
    master.wrapping_add(index as u64)
}

/// Independent sub-seed for one random stream of an instance.
fn stream_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Outcome {
    assignment: Assignment,
    id_qubits: usize,
    build: f64,
    solve: f64,
}

struct Clock(bool);

impl Clock {
    fn time<R>(&self, f: impl FnOnce() -> R) -> (R, f64) {
        let t0 = Instant::now();
        let r = f();
        let dt = if self.0 { t0.elapsed().as_secs_f64() } else { 0.0 };
        (r, dt)
    }
}

fn mixer_for(kind: SolverKind, cfg: &ExperimentConfig) -> MixerKind {
    match (kind, cfg.scenario) {
        (SolverKind::Qaoah, Scenario::S2) if cfg.full_s2_mixer => MixerKind::ConstrainedS2Full,
        (SolverKind::Qaoah, s) => MixerKind::constrained_for(s),
        _ => MixerKind::Transverse,
    }
}

fn solve(kind: SolverKind, problem: &McoProblem, cfg: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    let clock = Clock(cfg.record_wall_time);
    let n = (problem.n_missions(), problem.n_resources());
    match kind {
        SolverKind::BruteForce => {
            let (r, solve) = clock.time(|| brute_force_constrained::<f64>(problem));
            Ok(Outcome { assignment: r?.0, id_qubits: 0, build: 0.0, solve })
        }
        SolverKind::Anneal => {
            let (q, build) = clock.time(|| build_qubo(problem, &cfg.penalty()));
            let sched = cfg.anneal_schedule(stream_seed(seed, 1));
            let (set, solve) = clock.time(|| simulated_anneal(&q, &sched));
            let best = set?.best().expect("at least one read").bits.clone();
            Ok(Outcome { assignment: Assignment::from_flat(best, n.0, n.1)?, id_qubits: 0, build, solve })
        }
        SolverKind::Qaoa | SolverKind::Qaoah => {
            let (sim, build) = clock.time(|| QaoaSimulator::<f64>::new(problem, mixer_for(kind, cfg), &cfg.penalty()));
            let sim = sim?;
            let stream = if kind == SolverKind::Qaoa { 2 } else { 3 };
            let (bits, solve) = clock.time(|| -> Result<Vec<bool>> {
                let trace = optimize_simulator(&sim, &cfg.optimizer_config(stream_seed(seed, stream)))?;
                let sv = sim.run(&QaoaParams::from_flat(&trace.best.params)?)?;
                let set = sample(&sv, sim.qubo(), cfg.shots, stream_seed(seed, stream + 10))?;
                Ok(set.best().expect("at least one shot").bits.clone())
            });
            Ok(Outcome {
                assignment: Assignment::from_flat(bits?, n.0, n.1)?,
                id_qubits: sim.n_qubits() - problem.n_vars(),
                build,
                solve,
            })
        }
    }
}

/// Runs every selected solver on instance `index`. Failures become records
/// with an error status instead of aborting the batch.
pub fn run_instance(cfg: &ExperimentConfig, index: usize) -> Vec<RunRecord> {
    let seed = instance_seed(cfg.seed, index);
    let solvers = cfg.solver_order();
    let blank = |solver, qubits, status: String| RunRecord {
        instance: index,
        solver,
        scenario: cfg.scenario,
        qubits,
        id_qubits: 0,
        cost: None,
        relative_cost: None,
        col_violations: None,
        row_violations: None,
        wall_time_build: 0.0,
        wall_time_solve: 0.0,
        seed,
        bits: String::new(),
        status,
    };
    let problem = match generate_instance(cfg.scenario, cfg.qubit_budget, seed) {
        Ok(p) => p,
        Err(e) => return solvers.iter().map(|&s| blank(s, 0, format!("error: {e}"))).collect(),
    };
    // the exhaustive optimum is the reference for every relative cost
    let best = match brute_force_constrained::<f64>(&problem) {
        Ok((_, c)) => c,
        Err(e) => return solvers.iter().map(|&s| blank(s, problem.n_vars(), format!("error: {e}"))).collect(),
    };
    solvers
        .iter()
        .map(|&kind| {
            let outcome = solve(kind, &problem, cfg, seed).and_then(|o| {
                let cost = objective::<f64>(&problem, &o.assignment)?;
                Ok((o, cost))
            });
            match outcome {
                Ok((o, cost)) => {
                    let v = count_violations(&problem, &o.assignment);
                    RunRecord {
                        id_qubits: o.id_qubits,
                        cost: Some(cost),
                        relative_cost: Some(cost - best),
                        col_violations: Some(v.column_violations),
                        row_violations: Some(v.row_violations),
                        wall_time_build: o.build,
                        wall_time_solve: o.solve,
                        bits: o.assignment.as_flat().iter().map(|&b| if b { '1' } else { '0' }).collect(),
                        ..blank(kind, problem.n_vars(), "ok".into())
                    }
                }
                Err(e) => {
                    log::warn!("instance {index} solver {kind}: {e}");
                    blank(kind, problem.n_vars(), format!("error: {e}"))
                }
            }
        })
        .collect()
}

/// Runs the whole batch. Records come back ordered by instance, then solver,
/// whether or not the rayon pool is used.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let per_instance: Vec<Vec<RunRecord>> = if cfg.parallel {
        (0..cfg.instance_count).into_par_iter().map(|i| run_instance(cfg, i)).collect()
    } else {
        (0..cfg.instance_count).map(|i| run_instance(cfg, i)).collect()
    };
    Ok(per_instance.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(scenario: Scenario) -> ExperimentConfig {
        ExperimentConfig {
            scenario,
            instance_count: 3,
            qubit_budget: 6,
            shots: 100,
            reads: 5,
            sweeps: 100,
            restarts: 2,
            max_evals: 40,
            p: 1,
            parallel: false,
            ..Default::default()
        }
    }

    #[test]
    fn record_layout() {
        let recs = run_experiment(&small(Scenario::S1)).unwrap();
        assert_eq!(recs.len(), 12);
        for (i, r) in recs.iter().enumerate() {
            assert!(r.is_ok(), "{}", r.status);
            assert_eq!(r.instance, i / 4);
            assert_eq!(r.solver, SolverKind::ALL[i % 4]);
            assert_eq!(r.bits.len(), r.qubits);
        }
        let bf: Vec<_> = recs.iter().filter(|r| r.solver == SolverKind::BruteForce).collect();
        assert!(bf.iter().all(|r| r.relative_cost == Some(0.0) && r.total_violations() == Some(0)));
    }

    #[test]
    fn qaoah_reports_id_qubits_in_s2() {
        let cfg = ExperimentConfig { solvers: vec![SolverKind::Qaoah], ..small(Scenario::S2) };
        for r in run_experiment(&cfg).unwrap() {
            assert!(r.is_ok());
            assert!(r.id_qubits > 0);
            assert_eq!(r.total_violations(), Some(0));
        }
    }

    #[test]
    fn stream_seeds_differ() {
        assert_ne!(stream_seed(5, 1), stream_seed(5, 2));
        assert_ne!(stream_seed(5, 1), stream_seed(6, 1));
    }
}
