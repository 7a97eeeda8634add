//! Sandwich search: optimize the lower-bound model, evaluate where the
//! bounds are loose, repeat until the enclosing interval is tight enough.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundMode, BoundModel, Side};
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::ledger::EvaluationLedger;
use crate::method::Method;
use crate::report::{BoundSnapshot, SolveReport, TraceEntry};
use crate::subsolver::solve_menu;

/// How the next point to evaluate is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionRule {
    /// Uniform over unevaluated points.
    Random,
    /// Largest gap over all unevaluated points.
    AllPoints,
    /// Largest gap over the points used by the lower- and upper-model optima.
    Restricted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichOptions {
    pub rule: DecisionRule,
    pub epsilon: f64,
    pub seed: u64,
    pub bound_mode: BoundMode,
    pub force_convex: bool,
    pub max_iters: Option<usize>,
    pub verbose: bool,
}

impl SandwichOptions {
    pub fn new(rule: DecisionRule) -> Self {
        SandwichOptions {
            rule,
            epsilon: 0.0,
            seed: 0,
            bound_mode: BoundMode::Monotone,
            force_convex: false,
            max_iters: None,
            verbose: false,
        }
    }
}

/// Spreads the budget as evenly as the caps allow, lower indices first.
pub fn even_split(instance: &Instance) -> Allocation {
    let n = instance.n();
    let budget = instance.budget();
    let (q, r) = (budget / n, budget % n);
    let mut x: Vec<usize> = (0..n).map(|i| q + usize::from(i < r)).collect();
    let mut overflow = 0;
    for _pass in 0..2 {
        for (i, xi) in x.iter_mut().enumerate() {
            let want = *xi + overflow;
            *xi = want.min(instance.cap(i));
            overflow = want - *xi;
        }
        if overflow == 0 {
            break;
        }
    }
    debug_assert_eq!(overflow, 0);
    Allocation(x)
}

/// `u(x) - l(x)`.
pub fn objective_gap(bounds: &BoundModel, x: &Allocation) -> f64 {
    bounds.objective(x, Side::Upper) - bounds.objective(x, Side::Lower)
}

fn widest(bounds: &BoundModel, candidates: impl IntoIterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), f64)> = None;
    for (i, k) in candidates {
        let g = bounds.gap(i, k);
        if best.is_none_or(|(p, bg)| g > bg || (g == bg && (i, k) < p)) {
            best = Some(((i, k), g));
        }
    }
    best.map(|(p, _)| p)
}

/// Picks the next point under `rule`. `x_upper` is the upper-model optimum,
/// required only by [`DecisionRule::Restricted`].
pub fn select_point(
    rule: DecisionRule,
    ledger: &EvaluationLedger,
    bounds: &BoundModel,
    x_lower: &Allocation,
    x_upper: Option<&Allocation>,
    rng: &mut ChaCha8Rng,
) -> Result<(usize, usize)> {
    if ledger.all_evaluated() {
        return Err(Error::AllEvaluated);
    }
    let chosen = match rule {
        DecisionRule::Random => {
            let open: Vec<_> = ledger.unevaluated().collect();
            Some(open[rng.gen_range(0..open.len())])
        }
        DecisionRule::AllPoints => widest(bounds, ledger.unevaluated()),
        DecisionRule::Restricted => {
            let on_path = |x: &Allocation| {
                x.0.iter()
                    .enumerate()
                    .map(|(i, &k)| (i, k))
                    .filter(|&(i, k)| !ledger.is_evaluated(i, k))
                    .collect::<Vec<_>>()
            };
            let mut cands = on_path(x_lower);
            if let Some(xu) = x_upper {
                cands.extend(on_path(xu));
            }
            widest(bounds, cands).or_else(|| widest(bounds, ledger.unevaluated()))
        }
    };
    Ok(chosen.expect("some point is unevaluated"))
}

struct Step {
    bounds: BoundModel,
    x_lower: Allocation,
    x_upper: Option<Allocation>,
    upper_optimum: Option<f64>,
}

fn step(instance: &Instance, ledger: &EvaluationLedger, options: &SandwichOptions) -> Result<Step> {
    let bounds = BoundModel::build(instance, ledger, options.bound_mode, options.force_convex)?;
    let x_lower = solve_menu(&bounds.menu(Side::Lower), instance.budget()).allocation;
    let (x_upper, upper_optimum) = if options.rule == DecisionRule::Restricted {
        let sol = solve_menu(&bounds.menu(Side::Upper), instance.budget());
        (Some(sol.allocation), Some(sol.value))
    } else {
        (None, None)
    };
    Ok(Step { bounds, x_lower, x_upper, upper_optimum })
}

fn entry(t: usize, s: &Step, ledger: &EvaluationLedger, verbose: bool) -> TraceEntry {
    let lo = s.bounds.objective(&s.x_lower, Side::Lower);
    let hi = s.bounds.objective(&s.x_lower, Side::Upper);
    let mut e = TraceEntry::new(t, s.x_lower.clone(), lo, hi, ledger.eval_count());
    e.gap = Some(hi - lo);
    e.upper_model_optimum = s.upper_optimum;
    if verbose {
        e.bounds = Some(BoundSnapshot::from(&s.bounds));
    }
    e
}

pub fn run_sandwich(
    instance: &Instance,
    ledger: &mut EvaluationLedger,
    options: &SandwichOptions,
) -> Result<SolveReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let start = even_split(instance);
    let mut fresh = Vec::new();
    for (i, &k) in start.0.iter().enumerate() {
        ledger.evaluate_noting(instance, i, k, &mut fresh)?;
    }
    let mut s = step(instance, ledger, options)?;
    let mut initial = entry(0, &s, ledger, options.verbose);
    initial.evaluated = fresh;
    let mut trace = Vec::new();
    let mut gap = objective_gap(&s.bounds, &s.x_lower);
    let mut terminated_early = false;
    while gap > options.epsilon {
        if options.max_iters.is_some_and(|m| trace.len() >= m) {
            terminated_early = true;
            break;
        }
        let (i, k) = select_point(options.rule, ledger, &s.bounds, &s.x_lower, s.x_upper.as_ref(), &mut rng)?;
        let mut fresh = Vec::new();
        ledger.evaluate_noting(instance, i, k, &mut fresh)?;
        s = step(instance, ledger, options)?;
        gap = objective_gap(&s.bounds, &s.x_lower);
        let mut e = entry(trace.len() + 1, &s, ledger, options.verbose);
        e.evaluated = fresh;
        trace.push(e);
    }
    let lower = s.bounds.objective(&s.x_lower, Side::Lower);
    let upper = s.bounds.objective(&s.x_lower, Side::Upper);
    let method = match options.rule {
        DecisionRule::Random => Method::SwRnd,
        DecisionRule::AllPoints => Method::SwA,
        DecisionRule::Restricted => Method::SwR,
    };
    let true_objective = if ledger.covers(&s.x_lower) { Some(ledger.objective(&s.x_lower)?) } else { None };
    Ok(SolveReport {
        method,
        variant: None,
        feasible: s.x_lower.is_feasible(instance),
        allocation: s.x_lower,
        objective_lower: lower,
        objective_upper: upper,
        true_objective,
        evals: ledger.eval_count(),
        iterations: trace.len(),
        terminated_early,
        bounds_heuristic: s.bounds.heuristic,
        initial,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Instance {
        Instance::new(vec![3, 3], 3, 100.0, vec![vec![10.0, 6.0, 3.0, 1.0], vec![8.0, 7.0, 2.0, 2.0]]).unwrap()
    }

    fn started(inst: &Instance, rule: DecisionRule) -> (EvaluationLedger, Step) {
        let mut ledger = EvaluationLedger::new(inst);
        for (i, &k) in even_split(inst).0.iter().enumerate() {
            ledger.evaluate(inst, i, k).unwrap();
        }
        let s = step(inst, &ledger, &SandwichOptions::new(rule)).unwrap();
        (ledger, s)
    }

    #[test]
    fn even_split_respects_caps() {
        assert_eq!(even_split(&e1()).0, vec![2, 1]);
        let inst = Instance::new(
            vec![1, 5, 2],
            6,
            10.0,
            vec![vec![2.0, 1.0], vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0], vec![3.0, 2.0, 1.0]],
        )
        .unwrap();
        let x = even_split(&inst);
        assert_eq!(x.0, vec![1, 3, 2]);
        assert!(x.is_feasible(&inst));
    }

    #[test]
    fn even_split_wraps_overflow() {
        let inst = Instance::new(
            vec![5, 1, 1],
            6,
            10.0,
            vec![vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0], vec![2.0, 1.0], vec![2.0, 1.0]],
        )
        .unwrap();
        assert_eq!(even_split(&inst).0, vec![4, 1, 1]);
    }

    #[test]
    fn e1_first_iteration() {
        let inst = e1();
        let (ledger, s) = started(&inst, DecisionRule::AllPoints);
        assert_eq!(ledger.eval_count(), 2);
        assert_eq!(s.x_lower.0, vec![0, 3]);
        assert_eq!(objective_gap(&s.bounds, &s.x_lower), 104.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = select_point(DecisionRule::AllPoints, &ledger, &s.bounds, &s.x_lower, None, &mut rng).unwrap();
        assert_eq!(p, (0, 0));
        assert_eq!(s.bounds.gap(0, 0), 97.0);
    }

    #[test]
    fn e1_restricted_rule() {
        let inst = e1();
        let (ledger, s) = started(&inst, DecisionRule::Restricted);
        assert_eq!(s.x_upper.as_ref().unwrap().0, vec![2, 1]);
        assert_eq!(s.upper_optimum, Some(10.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = select_point(DecisionRule::Restricted, &ledger, &s.bounds, &s.x_lower, s.x_upper.as_ref(), &mut rng)
            .unwrap();
        assert_eq!(p, (0, 0));
    }

    #[test]
    fn exact_run_reaches_optimum() {
        let inst = e1();
        for rule in [DecisionRule::Random, DecisionRule::AllPoints, DecisionRule::Restricted] {
            let report = run_sandwich(&inst, &mut EvaluationLedger::new(&inst), &SandwichOptions::new(rule)).unwrap();
            assert_eq!(report.true_objective, Some(8.0), "{rule:?}");
            assert_eq!(report.objective_lower, 8.0);
            assert_eq!(report.objective_upper, 8.0);
            assert_eq!(report.allocation.0, vec![1, 2]);
        }
    }

    #[test]
    fn all_evaluated_is_an_error() {
        let inst = e1();
        let mut ledger = EvaluationLedger::new(&inst);
        for (i, k) in [(0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (1, 1), (1, 2), (1, 3)] {
            ledger.evaluate(&inst, i, k).unwrap();
        }
        let s = step(&inst, &ledger, &SandwichOptions::new(DecisionRule::AllPoints)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            select_point(DecisionRule::AllPoints, &ledger, &s.bounds, &s.x_lower, None, &mut rng),
            Err(Error::AllEvaluated)
        ));
    }

    #[test]
    fn max_iters_truncates() {
        let inst = e1();
        let mut opts = SandwichOptions::new(DecisionRule::AllPoints);
        opts.max_iters = Some(1);
        let report = run_sandwich(&inst, &mut EvaluationLedger::new(&inst), &opts).unwrap();
        assert!(report.terminated_early);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.evals, 3);
        assert!(report.objective_lower <= 8.0);
    }

    #[test]
    fn random_rule_is_seeded() {
        let inst = e1();
        let run = |seed| {
            let mut opts = SandwichOptions::new(DecisionRule::Random);
            opts.seed = seed;
            run_sandwich(&inst, &mut EvaluationLedger::new(&inst), &opts).unwrap()
        };
        assert_eq!(run(7), run(7));
    }
}
