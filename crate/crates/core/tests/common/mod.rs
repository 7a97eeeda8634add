#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ralloc::ledger::objective_value;
use ralloc::{brute_force_solve, Allocation, Caps, EvaluationLedger, Family, GenSpec, Instance, SubSolution};

/// Lattice ceiling for generated test instances.
pub const LATTICE_LIMIT: u128 = 100_000;

/// The full cost table, read through a throwaway ledger.
pub fn full_rows(inst: &Instance) -> Vec<Vec<f64>> {
    let mut ledger = EvaluationLedger::new(inst);
    (0..inst.n()).map(|i| (0..=inst.cap(i)).map(|k| ledger.evaluate(inst, i, k).unwrap()).collect()).collect()
}

pub fn optimum(inst: &Instance) -> SubSolution {
    brute_force_solve(inst, u128::MAX).unwrap()
}

pub fn true_objective(rows: &[Vec<f64>], x: &Allocation) -> f64 {
    objective_value(x, |i, k| rows.get(i).and_then(|r| r.get(k)).copied()).unwrap()
}

fn widest_cap(n: usize) -> usize {
    (1..=12).rev().find(|&b| ((b + 1) as u128).pow(n as u32) <= LATTICE_LIMIT).unwrap_or(1)
}

/// Random spec with `n <= 8`, `b_i <= 12`, at most `LATTICE_LIMIT` lattice
/// points, and `B` in the additive (`2B <= b^T e`) or removal regime.
pub fn random_spec(rng: &mut ChaCha8Rng, family: Family, additive: bool) -> GenSpec {
    loop {
        let n = rng.gen_range(2..=8);
        let top = widest_cap(n);
        let caps: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=top)).collect();
        let total: usize = caps.iter().sum();
        let widest = *caps.iter().max().unwrap();
        let (lo, hi) = if additive { (widest, total / 2) } else { (widest.max(total / 2 + 1), total - 1) };
        if lo > hi {
            continue;
        }
        return GenSpec {
            family,
            n,
            b: Caps::PerPlayer(caps),
            budget: rng.gen_range(lo..=hi),
            max_cost: 100.0,
            seed: rng.gen(),
            perturbation: if family == Family::NearConvex { 0.3 } else { 0.0 },
        };
    }
}
