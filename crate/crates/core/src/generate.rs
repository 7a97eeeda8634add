//! Seeded random instance families.
//!
//! Every value is a multiple of 2^-10, so sums of costs are exact in `f64`
//! and methods can be compared against brute force with zero tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

const GRID: f64 = 1024.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Non-increasing rows with non-decreasing differences.
    #[value(name = "convex")]
    Convex,
    /// Non-increasing rows with no curvature structure.
    #[value(name = "monotone")]
    Monotone,
    /// Convex rows with multiplicatively perturbed interior drops.
    #[value(name = "near_convex", alias = "near-convex")]
    NearConvex,
}

/// Individual budgets, either shared or given per player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Caps {
    Uniform(usize),
    PerPlayer(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub b: Caps,
    #[serde(rename = "B")]
    pub budget: usize,
    #[serde(rename = "M")]
    pub max_cost: f64,
    #[serde(default)]
    pub seed: u64,
    /// Relative perturbation in `[0, 1]`; used by `near_convex` only.
    #[serde(default)]
    pub perturbation: f64,
}

impl GenSpec {
    fn caps(&self) -> Result<Vec<usize>> {
        let caps = match &self.b {
            Caps::Uniform(b) => vec![*b; self.n],
            Caps::PerPlayer(v) if v.len() == self.n => v.clone(),
            Caps::PerPlayer(v) => {
                return Err(Error::SpecInvalid(format!("b has {} entries, n is {}", v.len(), self.n)))
            }
        };
        if self.n == 0 {
            return Err(Error::SpecInvalid("n must be positive".into()));
        }
        if caps.contains(&0) {
            return Err(Error::SpecInvalid("every b_i must be positive".into()));
        }
        let total: usize = caps.iter().sum();
        let widest = caps.iter().copied().max().unwrap_or(0);
        if self.budget >= total || self.budget < widest {
            return Err(Error::SpecInvalid(format!(
                "B = {} must satisfy max b_i <= B < sum b_i = {total}",
                self.budget
            )));
        }
        if !(self.max_cost.is_finite() && self.max_cost > 0.0) {
            return Err(Error::SpecInvalid("M must be positive and finite".into()));
        }
        if !(0.0..=1.0).contains(&self.perturbation) {
            return Err(Error::SpecInvalid("perturbation must lie in [0, 1]".into()));
        }
        Ok(caps)
    }
}

fn snap(x: f64) -> f64 {
    (x * GRID).floor() / GRID
}

/// Positive marginal drops for one row, snapped to the grid.
fn drops(rng: &mut ChaCha8Rng, len: usize, start: f64, family: Family) -> Vec<f64> {
    let scale = 2.0 * start / len as f64;
    let mut d: Vec<f64> = (0..len)
        .map(|_| {
            let u: f64 = rng.gen_range(f64::EPSILON..=1.0);
            let u = if family == Family::Monotone { u * u * 2.0 } else { u };
            snap(u * scale).max(1.0 / GRID)
        })
        .collect();
    if family != Family::Monotone {
        d.sort_by(|a, b| b.total_cmp(a));
    }
    d
}

fn accumulate(start: f64, drops: &[f64]) -> Vec<f64> {
    let mut row = Vec::with_capacity(drops.len() + 1);
    row.push(start);
    for d in drops {
        let prev = *row.last().expect("non-empty");
        row.push((prev - d).max(0.0));
    }
    row
}

/// Draws an instance from `spec`. The same spec always yields the same instance.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    let caps = spec.caps()?;
    let m = spec.max_cost;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut costs = Vec::with_capacity(spec.n);
    for &b in &caps {
        let start = snap(rng.gen_range(0.5 * m..=m)).max(snap(0.5 * m) + 1.0 / GRID).min(m);
        let mut d = drops(&mut rng, b, start, spec.family);
        if spec.family == Family::NearConvex && b > 2 {
            let p = spec.perturbation;
            for di in &mut d[1..b - 1] {
                let factor: f64 = rng.gen_range(1.0 - p..=1.0 + p);
                *di = snap(*di * factor);
            }
        }
        costs.push(accumulate(start, &d));
    }
    let convex = spec.family == Family::Convex;
    Instance::new_relaxed(caps, spec.budget, m, costs, convex)
}
