//! Random instance generator.
//!
//! The mission count (unallocated mission included) is uniform over the
//! values in 2..=4 that fit the budget, then the resource count is uniform
//! over what remains. Total demand is drawn uniformly from 1 up to the
//! number of resources able to serve it (primaries in scenario 1, `R1` in
//! scenario 2), and each unit goes to a uniformly chosen real mission, so
//! every instance has a feasible zero-mission-cost allocation.

use mco_core::{McoError, McoProblem, Result, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spread(rng: &mut ChaCha8Rng, total: u32, missions: usize) -> Vec<u32> {
    let mut reqs = vec![0; missions];
    for _ in 0..total {
        reqs[rng.gen_range(0..missions)] += 1;
    }
    reqs
}

/// Draws a random instance with at most `qubit_budget` assignment variables.
pub fn generate_instance(scenario: Scenario, qubit_budget: usize, seed: u64) -> Result<McoProblem> {
    if qubit_budget < 4 {
        return Err(McoError::Domain(format!("qubit budget {qubit_budget} is below the minimum of 4")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // resources per mission row that still fit, per candidate mission count
    let per_row = |m: usize| match scenario {
        Scenario::S1 => qubit_budget / m,
        Scenario::S2 => qubit_budget / (2 * m),
    };
    let shapes: Vec<usize> = (2..=4).filter(|&m| per_row(m) >= 1).collect();
    let n_m = shapes[rng.gen_range(0..shapes.len())];
    let room = per_row(n_m);
    match scenario {
        Scenario::S1 => {
            let n_r = rng.gen_range(1..=room);
            let mut caps: Vec<u32> = (0..n_r).map(|_| if rng.gen_bool(0.5) { 2 } else { 1 }).collect();
            if !caps.contains(&2) {
                let r = rng.gen_range(0..n_r);
                caps[r] = 2;
            }
            let primaries = caps.iter().filter(|&&c| c == 2).count() as u32;
            let demand = rng.gen_range(1..=primaries);
            McoProblem::scenario1(&spread(&mut rng, demand, n_m - 1), &caps)
        }
        Scenario::S2 => {
            let per_set = rng.gen_range(1..=room);
            let demand = rng.gen_range(1..=per_set as u32);
            McoProblem::scenario2(&spread(&mut rng, demand, n_m - 1), per_set)
        }
    }
}
