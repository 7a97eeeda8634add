//! Method identifiers, shared options, and dispatch.

use serde::{Deserialize, Serialize};

use crate::bounds::BoundMode;
use crate::error::Result;
use crate::greedy::{run_myopic, run_prescient};
use crate::instance::Instance;
use crate::ledger::EvaluationLedger;
use crate::one_opt::{run_one_opt, OneOptOptions};
use crate::report::SolveReport;
use crate::sandwich::{run_sandwich, DecisionRule, SandwichOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum Method {
    #[serde(rename = "myopic")]
    #[value(name = "myopic")]
    Myopic,
    #[serde(rename = "prescient")]
    #[value(name = "prescient")]
    Prescient,
    #[serde(rename = "one-opt")]
    #[value(name = "one-opt")]
    OneOpt,
    #[serde(rename = "sw-rnd")]
    #[value(name = "sw-rnd")]
    SwRnd,
    #[serde(rename = "sw-a")]
    #[value(name = "sw-a")]
    SwA,
    #[serde(rename = "sw-r")]
    #[value(name = "sw-r")]
    SwR,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::Myopic, Method::Prescient, Method::OneOpt, Method::SwRnd, Method::SwA, Method::SwR];

    pub fn id(self) -> &'static str {
        match self {
            Method::Myopic => "myopic",
            Method::Prescient => "prescient",
            Method::OneOpt => "one-opt",
            Method::SwRnd => "sw-rnd",
            Method::SwA => "sw-a",
            Method::SwR => "sw-r",
        }
    }

    pub fn decision_rule(self) -> Option<DecisionRule> {
        match self {
            Method::SwRnd => Some(DecisionRule::Random),
            Method::SwA => Some(DecisionRule::AllPoints),
            Method::SwR => Some(DecisionRule::Restricted),
            _ => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL.into_iter().find(|m| m.id() == s).ok_or_else(|| {
            let ids: Vec<&str> = Method::ALL.iter().map(|m| m.id()).collect();
            format!("unknown method `{s}`; expected one of {}", ids.join(", "))
        })
    }
}

/// Options understood by [`solve`]. Fields a method has no use for are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodOptions {
    /// Sandwich stopping tolerance.
    pub epsilon: f64,
    /// Seed for the random decision rule.
    pub seed: u64,
    /// Use convexity-exploiting bounds (1-Opt, sandwich, prescient).
    pub convex_bounds: bool,
    /// Allow convex bounds on instances not flagged convex.
    pub force_convex: bool,
    pub max_iters: Option<usize>,
    /// Attach bound matrices to every trace entry.
    pub verbose: bool,
}

impl Default for MethodOptions {
    fn default() -> Self {
        MethodOptions {
            epsilon: 0.0,
            seed: 0,
            convex_bounds: false,
            force_convex: false,
            max_iters: None,
            verbose: false,
        }
    }
}

impl MethodOptions {
    pub fn bound_mode(&self) -> BoundMode {
        if self.convex_bounds {
            BoundMode::Convex
        } else {
            BoundMode::Monotone
        }
    }
}

/// Runs `method` on `instance`, recording every evaluation in `ledger`.
pub fn solve(
    instance: &Instance,
    ledger: &mut EvaluationLedger,
    method: Method,
    options: &MethodOptions,
) -> Result<SolveReport> {
    match method {
        Method::Myopic => run_myopic(instance, ledger, options.max_iters),
        Method::Prescient => {
            run_prescient(instance, ledger, options.bound_mode(), options.force_convex, options.max_iters)
        }
        Method::OneOpt => run_one_opt(
            instance,
            ledger,
            &OneOptOptions {
                bound_mode: options.bound_mode(),
                force_convex: options.force_convex,
                max_iters: options.max_iters,
                verbose: options.verbose,
            },
        ),
        Method::SwRnd | Method::SwA | Method::SwR => run_sandwich(
            instance,
            ledger,
            &SandwichOptions {
                rule: method.decision_rule().expect("sandwich method"),
                epsilon: options.epsilon,
                seed: options.seed,
                bound_mode: options.bound_mode(),
                force_convex: options.force_convex,
                max_iters: options.max_iters,
                verbose: options.verbose,
            },
        ),
    }
}
