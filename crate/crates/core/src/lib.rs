//! Mission covering optimization: problem model, QUBO construction, classical
//! solvers, Pauli-sum Hamiltonians, state-vector QAOA simulation and a
//! parameter optimizer.
//!
//! The core is generic over the scalar type. Floating point (`f32`, `f64`)
//! and exact rationals (`Rational64`) are both supported where the math
//! allows it; simulation needs a [`Real`] type.

pub mod error;
pub mod layout;
pub mod model;
pub mod optimizer;
pub mod pauli;
pub mod qubo;
pub mod scalar;
pub mod sim;
pub mod solvers;

pub use error::{McoError, Result};
pub use layout::{ConstraintSubspace, QubitLayout};
pub use model::{Assignment, BuddySet, McoProblem, ProblemDocument, Scenario, ViolationReport};
pub use pauli::{DenseMatrix, Pauli, PauliString, PauliSum};
pub use qubo::{IsingModel, PenaltyConfig, QuboModel};
pub use scalar::{Real, Scalar};
pub use optimizer::{OptimizationTrace, OptimizerConfig};
pub use sim::{MixerKind, QaoaParams, QaoaSimulator, StateVector};
pub use solvers::{AnnealSchedule, BruteForceMode, Sample, SampleSet, SolverMeta};

pub use num_complex::Complex;
pub use num_rational::Rational64;

pub type Qubo = QuboModel<f64>;
pub type ExactQubo = QuboModel<Rational64>;
pub type Hamiltonian = PauliSum<f64>;
pub type ExactHamiltonian = PauliSum<Rational64>;
pub type State = StateVector<f64>;
pub type State32 = StateVector<f32>;
