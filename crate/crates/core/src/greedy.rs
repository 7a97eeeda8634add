//! Myopic and prescient constructive benchmarks.
//!
//! Both place one item per iteration. When `2B <= b^T e` they start from the
//! empty allocation and add items; otherwise they start from `x = b` and
//! remove items until `B` remain. Ties go to the lowest player index.

use crate::bounds::{BoundMode, BoundModel};
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::ledger::EvaluationLedger;
use crate::method::Method;
use crate::report::{SolveReport, TraceEntry};

/// `G_i(k) = f_i(k) - f_i(k + 1)`, from cached values.
pub fn immediate_gain(ledger: &EvaluationLedger, player: usize, k: usize) -> Result<f64> {
    let cap = ledger.row_len(player) - 1;
    if k >= cap {
        return Err(Error::IndexOutOfRange { player, k: k + 1, cap });
    }
    Ok(ledger.known(player, k)? - ledger.known(player, k + 1)?)
}

/// Loss of removing the last item: `f_i(k - 1) - f_i(k)`.
pub fn removal_loss(ledger: &EvaluationLedger, player: usize, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::IndexOutOfRange { player, k: 0, cap: ledger.row_len(player) - 1 });
    }
    Ok(ledger.known(player, k - 1)? - ledger.known(player, k)?)
}

/// Prescient score `s_i(k) = max{G_i(k), A_i(k)}` at iteration `t`, where
/// `A_i(k)` is the average gain up to the horizon `beta = min{b_i, k + B - t}`
/// measured against the upper bound `u_i(beta)`.
pub fn prescient_score(
    instance: &Instance,
    ledger: &EvaluationLedger,
    bounds: &BoundModel,
    player: usize,
    k: usize,
    t: usize,
) -> Result<f64> {
    let gain = immediate_gain(ledger, player, k)?;
    let horizon = instance.cap(player).min(k + instance.budget().saturating_sub(t));
    if horizon <= k {
        return Ok(gain);
    }
    let average = (ledger.known(player, k)? - bounds.upper(player, horizon)) / (horizon - k) as f64;
    Ok(gain.max(average))
}

/// Removal-side counterpart of [`prescient_score`]: `min{L_i(k), avg}` where
/// `avg` is the average loss down to `gamma = max{0, k - R}` with `R` removals
/// left, measured against the upper bound `u_i(gamma)`.
pub fn prescient_removal_score(
    ledger: &EvaluationLedger,
    bounds: &BoundModel,
    player: usize,
    k: usize,
    removals_left: usize,
) -> Result<f64> {
    let loss = removal_loss(ledger, player, k)?;
    let floor = k.saturating_sub(removals_left);
    if floor >= k {
        return Ok(loss);
    }
    let average = (bounds.upper(player, floor) - ledger.known(player, k)?) / (k - floor) as f64;
    Ok(loss.min(average))
}

#[derive(Clone, Copy, PartialEq)]
enum Scoring {
    Myopic,
    Prescient { mode: BoundMode, force: bool },
}

pub fn run_myopic(instance: &Instance, ledger: &mut EvaluationLedger, max_iters: Option<usize>) -> Result<SolveReport> {
    run_greedy(instance, ledger, Scoring::Myopic, max_iters)
}

pub fn run_prescient(
    instance: &Instance,
    ledger: &mut EvaluationLedger,
    mode: BoundMode,
    force_convex: bool,
    max_iters: Option<usize>,
) -> Result<SolveReport> {
    run_greedy(instance, ledger, Scoring::Prescient { mode, force: force_convex }, max_iters)
}

fn run_greedy(
    instance: &Instance,
    ledger: &mut EvaluationLedger,
    scoring: Scoring,
    max_iters: Option<usize>,
) -> Result<SolveReport> {
    if instance.prefers_additive() {
        additive(instance, ledger, scoring, max_iters)
    } else {
        removal(instance, ledger, scoring, max_iters)
    }
}

fn bounds_for(instance: &Instance, ledger: &EvaluationLedger, scoring: Scoring) -> Result<Option<BoundModel>> {
    match scoring {
        Scoring::Myopic => Ok(None),
        Scoring::Prescient { mode, force } => BoundModel::build(instance, ledger, mode, force).map(Some),
    }
}

/// First index attaining the extreme score; `better(a, b)` is strict.
fn pick(scores: &[(usize, f64)], better: impl Fn(f64, f64) -> bool) -> Option<(usize, f64)> {
    scores.iter().copied().fold(None, |best, (i, s)| match best {
        Some((_, b)) if !better(s, b) => best,
        _ => Some((i, s)),
    })
}

fn snapshot(ledger: &EvaluationLedger, t: usize, x: &Allocation) -> Result<TraceEntry> {
    let z = ledger.objective(x)?;
    Ok(TraceEntry::new(t, x.clone(), z, z, ledger.eval_count()))
}

fn additive(
    instance: &Instance,
    ledger: &mut EvaluationLedger,
    scoring: Scoring,
    max_iters: Option<usize>,
) -> Result<SolveReport> {
    let n = instance.n();
    let budget = instance.budget();
    let mut x = Allocation::zeros(n);
    let mut active = vec![true; n];
    for i in 0..n {
        ledger.evaluate(instance, i, 0)?;
        ledger.evaluate(instance, i, 1)?;
        if matches!(scoring, Scoring::Prescient { .. }) {
            ledger.evaluate(instance, i, instance.cap(i))?;
        }
    }
    let initial = snapshot(ledger, 0, &x)?;
    let mut trace = Vec::new();
    let mut terminated_early = false;
    let mut t = 0;
    while t < budget {
        if max_iters.is_some_and(|m| t >= m) {
            terminated_early = true;
            break;
        }
        let bounds = bounds_for(instance, ledger, scoring)?;
        let scores = (0..n)
            .filter(|&i| active[i])
            .map(|i| {
                let s = match &bounds {
                    None => immediate_gain(ledger, i, x[i])?,
                    Some(b) => prescient_score(instance, ledger, b, i, x[i], t)?,
                };
                Ok((i, s))
            })
            .collect::<Result<Vec<_>>>()?;
        let (j, score) = pick(&scores, |a, b| a > b).expect("an eligible player remains while t < B");
        let old = x[j];
        x[j] += 1;
        let mut fresh = Vec::new();
        if old + 1 < instance.cap(j) && t + 1 < budget {
            ledger.evaluate_noting(instance, j, old + 2, &mut fresh)?;
        } else if scoring == Scoring::Myopic || old + 1 == instance.cap(j) {
            active[j] = false;
        }
        t += 1;
        let mut entry = snapshot(ledger, t, &x)?;
        entry.evaluated = fresh;
        entry.score = Some(score);
        trace.push(entry);
    }
    finish(instance, ledger, scoring, "additive", x, initial, trace, terminated_early)
}

fn removal(
    instance: &Instance,
    ledger: &mut EvaluationLedger,
    scoring: Scoring,
    max_iters: Option<usize>,
) -> Result<SolveReport> {
    let n = instance.n();
    let excess = instance.total_cap() - instance.budget();
    let mut x = Allocation(instance.caps().to_vec());
    let mut active = vec![true; n];
    for i in 0..n {
        let b = instance.cap(i);
        ledger.evaluate(instance, i, b)?;
        ledger.evaluate(instance, i, b - 1)?;
        if matches!(scoring, Scoring::Prescient { .. }) {
            ledger.evaluate(instance, i, 0)?;
        }
    }
    let initial = snapshot(ledger, 0, &x)?;
    let mut trace = Vec::new();
    let mut terminated_early = false;
    let mut t = 0;
    while t < excess {
        if max_iters.is_some_and(|m| t >= m) {
            terminated_early = true;
            break;
        }
        let bounds = bounds_for(instance, ledger, scoring)?;
        let scores = (0..n)
            .filter(|&i| active[i])
            .map(|i| {
                let s = match &bounds {
                    None => removal_loss(ledger, i, x[i])?,
                    Some(b) => prescient_removal_score(ledger, b, i, x[i], excess - t)?,
                };
                Ok((i, s))
            })
            .collect::<Result<Vec<_>>>()?;
        let (j, score) = pick(&scores, |a, b| a < b).expect("a player with items remains while removing");
        x[j] -= 1;
        let mut fresh = Vec::new();
        if x[j] > 0 && t + 1 < excess {
            ledger.evaluate_noting(instance, j, x[j] - 1, &mut fresh)?;
        } else if x[j] == 0 {
            active[j] = false;
        }
        t += 1;
        let mut entry = snapshot(ledger, t, &x)?;
        entry.evaluated = fresh;
        entry.score = Some(score);
        trace.push(entry);
    }
    finish(instance, ledger, scoring, "removal", x, initial, trace, terminated_early)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    instance: &Instance,
    ledger: &EvaluationLedger,
    scoring: Scoring,
    variant: &str,
    x: Allocation,
    initial: TraceEntry,
    trace: Vec<TraceEntry>,
    terminated_early: bool,
) -> Result<SolveReport> {
    let z = ledger.objective(&x)?;
    let (method, heuristic) = match scoring {
        Scoring::Myopic => (Method::Myopic, false),
        Scoring::Prescient { mode, .. } => (Method::Prescient, mode == BoundMode::Convex && !instance.is_convex()),
    };
    Ok(SolveReport {
        method,
        variant: Some(variant.to_string()),
        feasible: x.is_feasible(instance),
        allocation: x,
        objective_lower: z,
        objective_upper: z,
        true_objective: Some(z),
        evals: ledger.eval_count(),
        iterations: trace.len(),
        terminated_early,
        bounds_heuristic: heuristic,
        initial,
        trace,
    })
}
