//! Problem instances and allocations.
//!
//! An [`Instance`] carries the player budgets `b`, the allocation budget `B`,
//! the cost ceiling `M` and a sealed cost table. Solution methods never read
//! the table directly; they go through [`EvaluationLedger`](crate::EvaluationLedger),
//! which counts every distinct point it reveals.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// A validated resource allocation instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct Instance {
    caps: Vec<usize>,
    budget: usize,
    max_cost: f64,
    costs: Vec<Vec<f64>>,
    convex: bool,
}

/// On-disk JSON layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    #[serde(rename = "B")]
    budget: usize,
    #[serde(rename = "M")]
    max_cost: f64,
    b: Vec<usize>,
    costs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    convex: bool,
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if file.n != file.b.len() {
            return Err(Error::AssumptionViolation(Violation::Shape(format!(
                "n = {} but b has {} entries",
                file.n,
                file.b.len()
            ))));
        }
        Instance::build(file.b, file.budget, file.max_cost, file.costs, file.convex, true)
    }
}

impl From<Instance> for InstanceFile {
    fn from(inst: Instance) -> Self {
        InstanceFile {
            n: inst.caps.len(),
            budget: inst.budget,
            max_cost: inst.max_cost,
            b: inst.caps,
            costs: inst.costs,
            convex: inst.convex,
        }
    }
}

impl Instance {
    /// Validates and builds an instance whose rows are only known to be
    /// non-increasing.
    pub fn new(caps: Vec<usize>, budget: usize, max_cost: f64, costs: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(caps, budget, max_cost, costs, false, true)
    }

    /// Like [`Instance::new`] but additionally flags (and checks) every row as
    /// discretely convex.
    pub fn new_convex(caps: Vec<usize>, budget: usize, max_cost: f64, costs: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(caps, budget, max_cost, costs, true, true)
    }

    /// Skips the `B >= b_i` check. Every method still works on such
    /// instances; single-player toy problems need it.
    pub fn new_relaxed(
        caps: Vec<usize>,
        budget: usize,
        max_cost: f64,
        costs: Vec<Vec<f64>>,
        convex: bool,
    ) -> Result<Self> {
        Self::build(caps, budget, max_cost, costs, convex, false)
    }

    fn build(
        caps: Vec<usize>,
        budget: usize,
        max_cost: f64,
        costs: Vec<Vec<f64>>,
        convex: bool,
        check_individual: bool,
    ) -> Result<Self> {
        let violation = |v| Err(Error::AssumptionViolation(v));
        if caps.is_empty() {
            return violation(Violation::Shape("at least one player is required".into()));
        }
        if caps.len() != costs.len() {
            return violation(Violation::Shape(format!("{} budgets but {} cost rows", caps.len(), costs.len())));
        }
        if budget == 0 {
            return violation(Violation::Shape("B must be positive".into()));
        }
        if !(max_cost.is_finite() && max_cost >= 0.0) {
            return violation(Violation::Shape(format!("M = {max_cost} must be finite and non-negative")));
        }
        for (i, (&cap, row)) in caps.iter().zip(&costs).enumerate() {
            if cap == 0 {
                return violation(Violation::Shape(format!("b[{i}] must be positive")));
            }
            if row.len() != cap + 1 {
                return violation(Violation::Shape(format!(
                    "row {i} has {} entries, expected b[{i}] + 1 = {}",
                    row.len(),
                    cap + 1
                )));
            }
        }
        let total: usize = caps.iter().sum();
        if total <= budget {
            return violation(Violation::BudgetNotRestrictive { total, budget });
        }
        if check_individual {
            if let Some((player, &cap)) = caps.iter().enumerate().find(|(_, &c)| c > budget) {
                return violation(Violation::IndividualExceedsTotal { player, cap, budget });
            }
        }
        for (player, row) in costs.iter().enumerate() {
            for (k, &value) in row.iter().enumerate() {
                if !(value.is_finite() && (0.0..=max_cost).contains(&value)) {
                    return violation(Violation::ValueOutOfRange { player, k, value, max: max_cost });
                }
            }
            if let Some(k) = row.windows(2).position(|w| w[1] > w[0]) {
                return violation(Violation::NonMonotone { player, k });
            }
            if convex {
                if let Some(k) = first_convexity_break(row) {
                    return violation(Violation::NotConvex { player, k });
                }
            }
        }
        Ok(Instance { caps, budget, max_cost, costs, convex })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Number of players `n`.
    pub fn n(&self) -> usize {
        self.caps.len()
    }

    /// Individual budgets `b`.
    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn cap(&self, player: usize) -> usize {
        self.caps[player]
    }

    /// Allocation budget `B`.
    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Cost ceiling `M`.
    pub fn max_cost(&self) -> f64 {
        self.max_cost
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// `b^T e`.
    pub fn total_cap(&self) -> usize {
        self.caps.iter().sum()
    }

    /// Number of evaluable points, `n + b^T e`.
    pub fn point_count(&self) -> usize {
        self.n() + self.total_cap()
    }

    /// Whether the greedy benchmarks should start from the empty allocation.
    pub fn prefers_additive(&self) -> bool {
        2 * self.budget <= self.total_cap()
    }

    pub(crate) fn cost(&self, player: usize, k: usize) -> f64 {
        self.costs[player][k]
    }

    pub(crate) fn check_point(&self, player: usize, k: usize) -> Result<()> {
        match self.caps.get(player) {
            Some(&cap) if k <= cap => Ok(()),
            Some(&cap) => Err(Error::IndexOutOfRange { player, k, cap }),
            None => Err(Error::IndexOutOfRange { player, k, cap: 0 }),
        }
    }
}

/// Index `k` such that the drop from `k + 1` to `k + 2` is steeper than the
/// drop from `k` to `k + 1`, if any.
pub fn first_convexity_break(row: &[f64]) -> Option<usize> {
    row.windows(3).position(|w| w[2] - w[1] < w[1] - w[0])
}

pub fn is_convex_row(row: &[f64]) -> bool {
    first_convexity_break(row).is_none()
}

/// Items per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(pub Vec<usize>);

impl Allocation {
    pub fn zeros(n: usize) -> Self {
        Allocation(vec![0; n])
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn within_caps(&self, instance: &Instance) -> bool {
        self.0.len() == instance.n() && self.0.iter().zip(instance.caps()).all(|(x, b)| x <= b)
    }

    /// Respects every individual budget and uses exactly `B` items.
    pub fn is_feasible(&self, instance: &Instance) -> bool {
        self.within_caps(instance) && self.total() == instance.budget()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl std::ops::Index<usize> for Allocation {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Allocation {
    fn index_mut(&mut self, i: usize) -> &mut usize {
        &mut self.0[i]
    }
}

impl From<Vec<usize>> for Allocation {
    fn from(v: Vec<usize>) -> Self {
        Allocation(v)
    }
}
