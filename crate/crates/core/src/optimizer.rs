//! Derivative-free search over QAOA angles.
//!
//! Each restart runs Nelder-Mead from a seeded random point in the initial
//! box. The evaluation budget is split evenly across restarts.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::model::McoProblem;
use crate::qubo::PenaltyConfig;
use crate::scalar::Real;
use crate::sim::{MixerKind, QaoaParams, QaoaSimulator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub p: usize,
    pub restarts: usize,
    pub max_evals: usize,
    pub seed: u64,
    /// Half-open interval for the initial cost angles.
    pub gamma_box: (f64, f64),
    /// Half-open interval for the initial mixer angles.
    pub beta_box: (f64, f64),
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { p: 2, restarts: 8, max_evals: 400, seed: 0, gamma_box: (0.0, 2.0 * PI), beta_box: (0.0, PI) }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return domain("at least one layer is required");
        }
        if self.restarts == 0 {
            return domain("at least one restart is required");
        }
        if self.max_evals < self.restarts {
            return domain("max_evals must be at least the number of restarts");
        }
        for (lo, hi) in [self.gamma_box, self.beta_box] {
            if lo >= hi || !lo.is_finite() || !hi.is_finite() {
                return domain(format!("invalid initial interval [{lo}, {hi})"));
            }
        }
        Ok(())
    }

    fn dims(&self) -> usize {
        2 * self.p
    }

    fn bounds(&self, i: usize) -> (f64, f64) {
        if i < self.p {
            self.gamma_box
        } else {
            self.beta_box
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// `[gamma_1..gamma_p, beta_1..beta_p]`.
    pub params: Vec<f64>,
    pub expectation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub evaluations: Vec<Evaluation>,
    pub best: Evaluation,
    /// Set when a restart ran out of budget before its simplex converged.
    pub truncated: bool,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    eval_index: usize,
    params: &'a [f64],
    expectation: f64,
}

impl OptimizationTrace {
    /// One `{eval_index, params, expectation}` object per line.
    pub fn to_jsonl(&self) -> String {
        self.evaluations
            .iter()
            .enumerate()
            .map(|(eval_index, e)| {
                let line = TraceLine { eval_index, params: &e.params, expectation: e.expectation };
                serde_json::to_string(&line).expect("trace line serializes") + "\n"
            })
            .collect()
    }

    /// Running minimum of the expectation after each evaluation.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.evaluations
            .iter()
            .scan(f64::INFINITY, |m, e| {
                *m = m.min(e.expectation);
                Some(*m)
            })
            .collect()
    }
}

struct Budget<'a, F> {
    f: &'a mut F,
    left: usize,
    log: Vec<Evaluation>,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Budget<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.left == 0 {
            return Ok(None);
        }
        self.left -= 1;
        let v = (self.f)(x)?;
        // NaN never wins a comparison; store it as +inf so the simplex stays ordered
        let v = if v.is_nan() { f64::INFINITY } else { v };
        self.log.push(Evaluation { params: x.to_vec(), expectation: v });
        Ok(Some(v))
    }
}

const F_TOL: f64 = 1e-10;
const X_TOL: f64 = 1e-8;

/// Returns true if the simplex converged before the budget ran out.
fn nelder_mead<F: FnMut(&[f64]) -> Result<f64>>(budget: &mut Budget<F>, start: Vec<f64>, steps: &[f64]) -> Result<bool> {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let Some(f0) = budget.eval(&start)? else { return Ok(false) };
    simplex.push((start.clone(), f0));
    for i in 0..n {
        let mut x = start.clone();
        x[i] += steps[i];
        let Some(f) = budget.eval(&x)? else { return Ok(false) };
        simplex.push((x, f));
    }
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[n].1);
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (worst - best).abs() <= F_TOL && diameter <= X_TOL {
            return Ok(true);
        }
        let centroid: Vec<f64> =
            (0..n).map(|i| simplex[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(1.0);
        let Some(fr) = budget.eval(&xr)? else { return Ok(false) };
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let Some(fe) = budget.eval(&xe)? else { return Ok(false) };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, t) = if fr < worst { (along(0.5), fr) } else { (along(-0.5), worst) };
        let Some(fc) = budget.eval(&xc)? else { return Ok(false) };
        if fc < t {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink towards the best vertex
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = vertex.0.iter().zip(&anchor).map(|(v, a)| a + 0.5 * (v - a)).collect();
            let Some(f) = budget.eval(&x)? else { return Ok(false) };
            *vertex = (x, f);
        }
    }
}

/// Minimizes `f` over `2p` angles with seeded multi-start Nelder-Mead.
pub fn minimize<F: FnMut(&[f64]) -> Result<f64>>(mut f: F, ocfg: &OptimizerConfig) -> Result<OptimizationTrace> {
    ocfg.validate()?;
    let dims = ocfg.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(ocfg.seed);
    let starts: Vec<Vec<f64>> = (0..ocfg.restarts)
        .map(|_| {
            (0..dims)
                .map(|i| {
                    let (lo, hi) = ocfg.bounds(i);
                    rng.gen_range(lo..hi)
                })
                .collect()
        })
        .collect();
    let steps: Vec<f64> = (0..dims)
        .map(|i| {
            let (lo, hi) = ocfg.bounds(i);
            0.1 * (hi - lo)
        })
        .collect();

    let mut budget = Budget { f: &mut f, left: 0, log: Vec::new() };
    let mut truncated = false;
    let share = ocfg.max_evals / ocfg.restarts;
    let extra = ocfg.max_evals % ocfg.restarts;
    for (k, start) in starts.into_iter().enumerate() {
        budget.left = share + usize::from(k < extra);
        if !nelder_mead(&mut budget, start, &steps)? {
            truncated = true;
        }
    }
    let log = budget.log;
    let mut best = log[0].clone();
    for e in &log[1..] {
        if e.expectation < best.expectation {
            best = e.clone();
        }
    }
    Ok(OptimizationTrace { evaluations: log, best, truncated })
}

/// Tunes the QAOA angles of `sim` to minimize its cost expectation.
pub fn optimize_simulator<T: Real>(sim: &QaoaSimulator<T>, ocfg: &OptimizerConfig) -> Result<OptimizationTrace> {
    minimize(
        |x| {
            let params = QaoaParams::from_flat(&x.iter().map(|&v| T::from_f64_lossy(v)).collect::<Vec<_>>())?;
            Ok(sim.expectation(&params)?.to_f64_lossy())
        },
        ocfg,
    )
}

/// Builds the simulator for `kind` and tunes its angles.
pub fn optimize<T: Real>(
    problem: &McoProblem,
    kind: MixerKind,
    cfg: &PenaltyConfig<T>,
    ocfg: &OptimizerConfig,
) -> Result<OptimizationTrace> {
    optimize_simulator(&QaoaSimulator::new(problem, kind, cfg)?, ocfg)
}
