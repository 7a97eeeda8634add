//! 1-Opt local search over evaluated points.
//!
//! The current allocation is always optimal over the evaluated points. Each
//! iteration evaluates one point adjacent to the allocation whose value could
//! make a single-item move strictly improving, and the search stops once the
//! best-case margin `d` of every move is non-positive.

use crate::bounds::{BoundMode, BoundModel};
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::ledger::EvaluationLedger;
use crate::method::Method;
use crate::report::{BoundSnapshot, SolveReport, TraceEntry};
use crate::subsolver::{solve_menu, PointMenu};

#[derive(Debug, Clone, PartialEq)]
pub struct OneOptOptions {
    pub bound_mode: BoundMode,
    pub force_convex: bool,
    pub max_iters: Option<usize>,
    pub verbose: bool,
}

impl Default for OneOptOptions {
    fn default() -> Self {
        OneOptOptions { bound_mode: BoundMode::Monotone, force_convex: false, max_iters: None, verbose: false }
    }
}

/// Snapshot of the search at the start of an iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct OneOptState {
    pub x: Allocation,
    pub bounds: BoundModel,
    /// `theta_i = l_i(x_i - 1) - f_i(x_i)`, for players that can give an item.
    pub theta: Vec<Option<f64>>,
    /// `eta_i = f_i(x_i) - l_i(x_i + 1)`, for players that can take an item.
    pub eta: Vec<Option<f64>>,
    /// `max eta_j - theta_i` over `i != j`; `-inf` when no pair exists.
    pub d: f64,
}

impl OneOptState {
    /// Re-solves the restricted problem and recomputes every derived quantity.
    pub fn compute(instance: &Instance, ledger: &EvaluationLedger, mode: BoundMode, force: bool) -> Result<Self> {
        let sol = solve_menu(&PointMenu::from_ledger(ledger), instance.budget());
        if !sol.feasible {
            return Err(Error::Config("evaluated points admit no feasible allocation".into()));
        }
        let x = sol.allocation;
        let bounds = BoundModel::build(instance, ledger, mode, force)?;
        let n = instance.n();
        let mut theta = vec![None; n];
        let mut eta = vec![None; n];
        for i in 0..n {
            let fx = ledger.known(i, x[i])?;
            if x[i] > 0 {
                theta[i] = Some(bounds.lower(i, x[i] - 1) - fx);
            }
            if x[i] < instance.cap(i) {
                eta[i] = Some(fx - bounds.lower(i, x[i] + 1));
            }
        }
        let mut d = f64::NEG_INFINITY;
        for (i, th) in theta.iter().enumerate() {
            for (j, et) in eta.iter().enumerate() {
                if let (Some(th), Some(et), true) = (th, et, i != j) {
                    d = d.max(et - th);
                }
            }
        }
        Ok(OneOptState { x, bounds, theta, eta, d })
    }

    pub fn can_give(&self, i: usize) -> bool {
        self.theta[i].is_some()
    }

    pub fn can_take(&self, i: usize) -> bool {
        self.eta[i].is_some()
    }
}

/// Evaluates the two adjacent starting points per player, then widens the
/// evaluated blocks to the right until they admit a feasible allocation.
pub fn init_one_opt(
    instance: &Instance,
    ledger: &mut EvaluationLedger,
    options: &OneOptOptions,
) -> Result<OneOptState> {
    let n = instance.n();
    let share = instance.budget() / n;
    let mut top = Vec::with_capacity(n);
    for i in 0..n {
        let q = share.min(instance.cap(i) - 1);
        ledger.evaluate(instance, i, q)?;
        ledger.evaluate(instance, i, q + 1)?;
        top.push(q + 1);
    }
    while top.iter().sum::<usize>() < instance.budget() {
        let i = (0..n).find(|&i| top[i] < instance.cap(i)).expect("b^T e > B");
        top[i] += 1;
        ledger.evaluate(instance, i, top[i])?;
    }
    OneOptState::compute(instance, ledger, options.bound_mode, options.force_convex)
}

/// Best-case improvements `(delta_plus, delta_minus)` per player, `-inf` where
/// undefined.
pub fn best_case_gains(state: &OneOptState, ledger: &EvaluationLedger) -> (Vec<f64>, Vec<f64>) {
    let n = state.x.len();
    let x = &state.x;
    let mut plus = vec![f64::NEG_INFINITY; n];
    let mut minus = vec![f64::NEG_INFINITY; n];
    for i in 0..n {
        if let Some(eta) = state.eta[i] {
            if !ledger.is_evaluated(i, x[i] + 1) {
                let cheapest_give = (0..n)
                    .filter(|&j| j != i && state.can_give(j) && ledger.is_evaluated(j, x[j] - 1))
                    .filter_map(|j| state.theta[j])
                    .fold(f64::INFINITY, f64::min);
                if cheapest_give.is_finite() {
                    plus[i] = eta - cheapest_give;
                }
            }
        }
        if let Some(theta) = state.theta[i] {
            if !ledger.is_evaluated(i, x[i] - 1) {
                let best_take = (0..n)
                    .filter(|&j| j != i && state.can_take(j) && ledger.is_evaluated(j, x[j] + 1))
                    .filter_map(|j| state.eta[j])
                    .fold(f64::NEG_INFINITY, f64::max);
                if best_take.is_finite() {
                    minus[i] = best_take - theta;
                }
            }
        }
    }
    (plus, minus)
}

/// Next point to evaluate, or `None` if no move can improve.
fn next_point(state: &OneOptState, ledger: &EvaluationLedger) -> Option<(usize, usize)> {
    let (plus, minus) = best_case_gains(state, ledger);
    let mut chosen: Option<(usize, f64)> = None;
    for i in 0..plus.len() {
        let v = plus[i].max(minus[i]);
        if v > f64::NEG_INFINITY && chosen.is_none_or(|(_, best)| v > best) {
            chosen = Some((i, v));
        }
    }
    if let Some((i, _)) = chosen {
        let x = state.x[i];
        return Some(if minus[i] < plus[i] { (i, x + 1) } else { (i, x - 1) });
    }
    // Every delta is undefined while d > 0: neither side of any promising
    // swap has a known counterpart. Probe the swaps in order of margin.
    let x = &state.x;
    let mut pairs = Vec::new();
    for (i, th) in state.theta.iter().enumerate() {
        for (j, et) in state.eta.iter().enumerate() {
            if let (Some(th), Some(et), true) = (th, et, i != j) {
                if et - th > 0.0 {
                    pairs.push((et - th, i, j));
                }
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    pairs.into_iter().find_map(|(_, i, j)| {
        if !ledger.is_evaluated(j, x[j] + 1) {
            Some((j, x[j] + 1))
        } else if !ledger.is_evaluated(i, x[i] - 1) {
            Some((i, x[i] - 1))
        } else {
            None
        }
    })
}

fn entry(t: usize, state: &OneOptState, ledger: &EvaluationLedger, verbose: bool) -> Result<TraceEntry> {
    let z = ledger.objective(&state.x)?;
    let mut e = TraceEntry::new(t, state.x.clone(), z, z, ledger.eval_count());
    e.d = state.d.is_finite().then_some(state.d);
    if verbose {
        e.bounds = Some(BoundSnapshot::from(&state.bounds));
    }
    Ok(e)
}

pub fn run_one_opt(instance: &Instance, ledger: &mut EvaluationLedger, options: &OneOptOptions) -> Result<SolveReport> {
    let mut state = init_one_opt(instance, ledger, options)?;
    let initial = entry(0, &state, ledger, options.verbose)?;
    let mut trace = Vec::new();
    let mut terminated_early = false;
    let mut t = 0;
    while state.d > 0.0 {
        if options.max_iters.is_some_and(|m| t >= m) {
            terminated_early = true;
            break;
        }
        let Some((i, k)) = next_point(&state, ledger) else {
            break;
        };
        let mut fresh = Vec::new();
        ledger.evaluate_noting(instance, i, k, &mut fresh)?;
        state = OneOptState::compute(instance, ledger, options.bound_mode, options.force_convex)?;
        t += 1;
        let mut e = entry(t, &state, ledger, options.verbose)?;
        e.evaluated = fresh;
        trace.push(e);
    }
    let z = ledger.objective(&state.x)?;
    Ok(SolveReport {
        method: Method::OneOpt,
        variant: None,
        feasible: state.x.is_feasible(instance),
        allocation: state.x,
        objective_lower: z,
        objective_upper: z,
        true_objective: Some(z),
        evals: ledger.eval_count(),
        iterations: trace.len(),
        terminated_early,
        bounds_heuristic: state.bounds.heuristic,
        initial,
        trace,
    })
}
