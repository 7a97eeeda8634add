use serde::{Deserialize, Serialize};

use crate::bounds::BoundModel;
use crate::instance::Allocation;
use crate::method::Method;

/// Outcome of one method run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    /// `additive` or `removal` for the greedy benchmarks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub allocation: Allocation,
    /// False only for greedy runs cut short before every item was placed.
    pub feasible: bool,
    /// Interval known to contain `z(allocation, f)`.
    pub objective_lower: f64,
    pub objective_upper: f64,
    /// Present when every point of the allocation has been evaluated.
    pub true_objective: Option<f64>,
    pub evals: usize,
    pub iterations: usize,
    pub terminated_early: bool,
    /// Convex bounds were assumed for rows not known to be convex.
    #[serde(default)]
    pub bounds_heuristic: bool,
    /// State after initialization, before the first iteration.
    pub initial: TraceEntry,
    pub trace: Vec<TraceEntry>,
}

/// Snapshot taken at the end of an iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub allocation: Allocation,
    pub lower: f64,
    pub upper: f64,
    /// Cumulative distinct evaluations.
    pub evals: usize,
    /// Points first evaluated during this iteration.
    #[serde(default)]
    pub evaluated: Vec<(usize, usize)>,
    /// Greedy: gain (or loss, when removing) of the chosen player.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    /// 1-Opt: best-case swap margin; absent when no swap pair exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Sandwich: `u(x_l) - l(x_l)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    /// Sandwich: optimal value of the upper-bound problem (rule R only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_model_optimum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSnapshot {
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
}

impl From<&BoundModel> for BoundSnapshot {
    fn from(model: &BoundModel) -> Self {
        BoundSnapshot { lower: model.lower.clone(), upper: model.upper.clone() }
    }
}

impl TraceEntry {
    pub fn new(iteration: usize, allocation: Allocation, lower: f64, upper: f64, evals: usize) -> Self {
        TraceEntry {
            iteration,
            allocation,
            lower,
            upper,
            evals,
            evaluated: Vec::new(),
            score: None,
            d: None,
            gap: None,
            upper_model_optimum: None,
            bounds: None,
        }
    }
}

impl SolveReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The exact objective if known, otherwise the upper end of the interval.
    pub fn objective(&self) -> f64 {
        self.true_objective.unwrap_or(self.objective_upper)
    }
}
