//! Solvers for separable integer resource allocation where each cost value
//! is expensive to obtain.
//!
//! `n` players share `B` identical items; player `i` may receive at most
//! `b_i` and incurs a non-increasing cost `f_i(x_i)`. The methods here look
//! for a minimizer of `sum_i f_i(x_i)` while revealing as few values
//! `f_i(k)` as possible. Every revealed value passes through an
//! [`EvaluationLedger`], which is the measure of effort.

pub mod bounds;
pub mod error;
pub mod generate;
pub mod greedy;
pub mod harness;
pub mod instance;
pub mod ledger;
pub mod method;
pub mod one_opt;
pub mod report;
pub mod sandwich;
pub mod subsolver;

pub use bounds::{BoundMode, BoundModel, Side};
pub use error::{Error, Result, Violation};
pub use generate::{generate, Caps, Family, GenSpec};
pub use instance::{Allocation, Instance};
pub use ledger::EvaluationLedger;
pub use method::{solve, Method, MethodOptions};
pub use report::{SolveReport, TraceEntry};
pub use sandwich::DecisionRule;
pub use subsolver::{brute_force_solve, export_ilp, solve_menu, PointMenu, SubSolution};
