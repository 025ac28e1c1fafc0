use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::layout::{ConstraintSubspace, QubitLayout};
use crate::model::{McoProblem, Scenario};
use crate::pauli::{mixer_s1, mixer_s2, transverse_mixer};
use crate::qubo::{build_objective_qubo, build_qubo, PenaltyConfig, QuboModel};
use crate::scalar::Real;

use super::{
    apply_cost_phase_table, expectation_table, init_uniform, init_unallocated, init_with_ids, CostTable, PreparedMixer,
    StateVector, DEFAULT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixerKind {
    /// `sum_i X_i` from the uniform superposition, on the penalized QUBO.
    Transverse,
    /// Column-preserving swaps from the all-unallocated state.
    ConstrainedS1,
    /// Pair moves and column swaps from the ID-labelled start state.
    ConstrainedS2Full,
    /// Pair moves only.
    ConstrainedS2Reduced,
}

impl MixerKind {
    pub fn is_constrained(self) -> bool {
        self != MixerKind::Transverse
    }

    /// Constrained mixer for a scenario (reduced form for scenario 2).
    pub fn constrained_for(scenario: Scenario) -> Self {
        match scenario {
            Scenario::S1 => MixerKind::ConstrainedS1,
            Scenario::S2 => MixerKind::ConstrainedS2Reduced,
        }
    }

    fn check(self, scenario: Scenario) -> Result<()> {
        match (self, scenario) {
            (MixerKind::Transverse, _)
            | (MixerKind::ConstrainedS1, Scenario::S1)
            | (MixerKind::ConstrainedS2Full | MixerKind::ConstrainedS2Reduced, Scenario::S2) => Ok(()),
            _ => domain(format!("mixer {self:?} does not apply to scenario {scenario}")),
        }
    }
}

/// Layer angles; layer `k` applies the cost phase with `gammas[k]`, then the
/// mixer with `betas[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams<T> {
    gammas: Vec<T>,
    betas: Vec<T>,
}

impl<T: Real> QaoaParams<T> {
    pub fn new(gammas: Vec<T>, betas: Vec<T>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return domain(format!("{} gammas but {} betas", gammas.len(), betas.len()));
        }
        Ok(Self { gammas, betas })
    }

    /// `[gamma_1..gamma_p, beta_1..beta_p]`.
    pub fn from_flat(flat: &[T]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return domain("flat parameter vector must have even length");
        }
        let p = flat.len() / 2;
        Self::new(flat[..p].to_vec(), flat[p..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<T> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[T] {
        &self.gammas
    }

    pub fn betas(&self) -> &[T] {
        &self.betas
    }
}

/// A problem compiled for repeated QAOA runs with one mixer.
#[derive(Debug, Clone)]
pub struct QaoaSimulator<T> {
    kind: MixerKind,
    qubo: QuboModel<T>,
    table: CostTable<T>,
    mixer: PreparedMixer<T>,
    initial: StateVector<T>,
    subspace: Option<ConstraintSubspace>,
    tol: T,
}

impl<T: Real> QaoaSimulator<T> {
    pub fn new(problem: &McoProblem, kind: MixerKind, cfg: &PenaltyConfig<T>) -> Result<Self> {
        kind.check(problem.scenario())?;
        let layout = QubitLayout::for_problem(problem);
        let (qubo, h, initial) = match kind {
            MixerKind::Transverse => {
                let n = problem.n_vars();
                (build_qubo(problem, cfg), transverse_mixer(n), init_uniform(n)?)
            }
            MixerKind::ConstrainedS1 => {
                (build_objective_qubo(problem), mixer_s1(problem)?, init_unallocated(problem, &layout)?)
            }
            MixerKind::ConstrainedS2Full | MixerKind::ConstrainedS2Reduced => {
                let initial = init_with_ids(problem, &layout)?;
                let reduced = kind == MixerKind::ConstrainedS2Reduced;
                (build_objective_qubo(problem), mixer_s2(problem, &layout, reduced)?, initial)
            }
        };
        let subspace = kind.is_constrained().then(|| ConstraintSubspace::for_problem(problem));
        Ok(Self {
            kind,
            table: CostTable::new(&qubo)?,
            qubo,
            mixer: PreparedMixer::new(&h)?,
            initial,
            subspace,
            tol: T::from_f64_lossy(DEFAULT_TOL),
        })
    }

    pub fn with_tolerance(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn kind(&self) -> MixerKind {
        self.kind
    }

    /// The QUBO whose energy the circuit minimizes.
    pub fn qubo(&self) -> &QuboModel<T> {
        &self.qubo
    }

    pub fn cost_table(&self) -> &CostTable<T> {
        &self.table
    }

    pub fn mixer(&self) -> &PreparedMixer<T> {
        &self.mixer
    }

    pub fn initial_state(&self) -> &StateVector<T> {
        &self.initial
    }

    /// Constrained subspace for constrained mixers.
    pub fn subspace(&self) -> Option<&ConstraintSubspace> {
        self.subspace.as_ref()
    }

    pub fn n_qubits(&self) -> usize {
        self.initial.n_qubits()
    }

    pub fn run(&self, params: &QaoaParams<T>) -> Result<StateVector<T>> {
        let mut sv = self.initial.clone();
        for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
            apply_cost_phase_table(&mut sv, &self.table, gamma);
            self.mixer.evolve(&mut sv, beta, self.tol)?;
        }
        Ok(sv)
    }

    pub fn expectation(&self, params: &QaoaParams<T>) -> Result<T> {
        Ok(expectation_table(&self.run(params)?, &self.table))
    }
}

/// Builds the simulator for `kind` and runs one parameter set.
pub fn run_qaoa<T: Real>(
    problem: &McoProblem,
    kind: MixerKind,
    cfg: &PenaltyConfig<T>,
    params: &QaoaParams<T>,
) -> Result<StateVector<T>> {
    QaoaSimulator::new(problem, kind, cfg)?.run(params)
}
