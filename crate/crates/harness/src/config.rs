use std::fmt;
use std::path::Path;
use std::str::FromStr;

use mco_core::optimizer::OptimizerConfig;
use mco_core::sim::MAX_SIM_QUBITS;
use mco_core::{AnnealSchedule, PenaltyConfig, Scenario};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Solver pipelines, in record order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    #[serde(rename = "BF")]
    BruteForce,
    #[serde(rename = "SA")]
    Anneal,
    #[serde(rename = "QAOA")]
    Qaoa,
    #[serde(rename = "QAOAH")]
    Qaoah,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [SolverKind::BruteForce, SolverKind::Anneal, SolverKind::Qaoa, SolverKind::Qaoah];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::BruteForce => "BF",
            SolverKind::Anneal => "SA",
            SolverKind::Qaoa => "QAOA",
            SolverKind::Qaoah => "QAOAH",
        }
    }

    pub fn uses_state_vector(self) -> bool {
        matches!(self, SolverKind::Qaoa | SolverKind::Qaoah)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| HarnessError::Config(format!("unknown solver `{s}` (expected BF, SA, QAOA or QAOAH)")))
    }
}

/// Everything that determines an experiment run. The JSON form is accepted
/// as a config file; missing fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub instance_count: usize,
    /// Largest `missions * resources` a generated instance may have. ID
    /// qubits are not counted.
    pub qubit_budget: usize,
    pub lambda: f64,
    pub p: usize,
    /// Annealer reads per instance.
    pub reads: usize,
    /// State-vector samples per QAOA run.
    pub shots: usize,
    pub seed: u64,
    pub solvers: Vec<SolverKind>,
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub restarts: usize,
    pub max_evals: usize,
    /// Use the scenario 2 mixer with column swaps instead of the reduced one.
    pub full_s2_mixer: bool,
    /// Measure wall time per phase. When off, timings are written as 0 and
    /// exports are byte-identical across repeated runs.
    pub record_wall_time: bool,
    /// Run instances on the rayon pool.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sched = AnnealSchedule::default();
        let opt = OptimizerConfig::default();
        Self {
            scenario: Scenario::S1,
            instance_count: 100,
            qubit_budget: 12,
            lambda: 5.0,
            p: opt.p,
            reads: sched.reads,
            shots: 1000,
            seed: 0,
            solvers: SolverKind::ALL.to_vec(),
            sweeps: sched.sweeps,
            beta_start: sched.beta_start,
            beta_end: sched.beta_end,
            restarts: opt.restarts,
            max_evals: opt.max_evals,
            full_s2_mixer: false,
            record_wall_time: false,
            parallel: true,
        }
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(HarnessError::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.instance_count == 0 {
            return invalid("instance_count must be at least 1");
        }
        if self.qubit_budget < 4 {
            return invalid("qubit_budget must be at least 4");
        }
        if self.solvers.iter().any(|s| s.uses_state_vector()) && self.qubit_budget > MAX_SIM_QUBITS {
            return invalid(format!("state-vector solvers need qubit_budget <= {MAX_SIM_QUBITS}"));
        }
        if self.solvers.is_empty() {
            return invalid("no solvers selected");
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return invalid("lambda must be positive");
        }
        if self.shots == 0 {
            return invalid("shots must be positive");
        }
        self.anneal_schedule(0).validate()?;
        self.optimizer_config(0).validate()?;
        Ok(())
    }

    /// Selected solvers in record order, without duplicates.
    pub fn solver_order(&self) -> Vec<SolverKind> {
        let mut s = self.solvers.clone();
        s.sort();
        s.dedup();
        s
    }

    pub fn penalty(&self) -> PenaltyConfig<f64> {
        PenaltyConfig::new(self.lambda).expect("validated lambda")
    }

    pub fn anneal_schedule(&self, seed: u64) -> AnnealSchedule {
        AnnealSchedule {
            sweeps: self.sweeps,
            beta_start: self.beta_start,
            beta_end: self.beta_end,
            reads: self.reads,
            seed,
        }
    }

    pub fn optimizer_config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig { p: self.p, restarts: self.restarts, max_evals: self.max_evals, seed, ..Default::default() }
    }
}
