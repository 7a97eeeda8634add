//! Exact solver for separable allocation problems over finite point menus.
//!
//! The restricted problems solved by every method (over evaluated points,
//! over a lower-bound model, over an upper-bound model) are instances of the
//! binary program
//!
//! ```text
//! min  sum_{i,k} F_ik y_ik
//! s.t. sum_{i,k} k y_ik = B
//!      sum_k y_ik = 1          for every player i
//!      y_ik in {0, 1}
//! ```
//!
//! which [`solve_menu`] solves exactly with a dynamic program over the
//! budget, and [`export_ilp`] writes out in CPLEX LP format.

use std::fmt::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::ledger::{objective_value, EvaluationLedger};

/// Default cap on `prod_i (b_i + 1)` for [`brute_force_solve`].
pub const DEFAULT_BRUTE_FORCE_CAP: u128 = 10_000_000;

/// Admissible `(k, value)` pairs per player, sorted by `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointMenu {
    rows: Vec<Vec<(usize, f64)>>,
}

impl PointMenu {
    pub fn new(mut rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(k, _)| k);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Config(format!("menu row {i} repeats a point")));
            }
            if let Some(&(k, v)) = row.iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::Config(format!("menu value at ({i}, {k}) is {v}")));
            }
        }
        Ok(PointMenu { rows })
    }

    /// Every `k` in `0..row.len()` is admissible at the given value.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        PointMenu { rows: rows.iter().map(|row| row.iter().copied().enumerate().collect()).collect() }
    }

    /// Only evaluated points are admissible.
    pub fn from_ledger(ledger: &EvaluationLedger) -> Self {
        PointMenu { rows: (0..ledger.n()).map(|i| ledger.evaluated_points(i).collect()).collect() }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, player: usize) -> &[(usize, f64)] {
        &self.rows[player]
    }

    pub fn value(&self, player: usize, k: usize) -> Option<f64> {
        self.rows.get(player)?.iter().find(|(p, _)| *p == k).map(|&(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubSolution {
    pub allocation: Allocation,
    /// `+inf` when infeasible.
    pub value: f64,
    pub feasible: bool,
}

impl SubSolution {
    fn infeasible(n: usize) -> Self {
        SubSolution { allocation: Allocation::zeros(n), value: f64::INFINITY, feasible: false }
    }
}

/// Minimizes `sum_i F(i, x_i)` subject to `sum_i x_i = budget` over the menu.
///
/// Ties between optimal allocations go to the lexicographically smallest
/// vector. Totals are accumulated from the last player to the first, the
/// same order as [`objective_value`], so values match brute force bit for bit.
pub fn solve_menu(menu: &PointMenu, budget: usize) -> SubSolution {
    let n = menu.n();
    if n == 0 {
        return SubSolution::infeasible(0);
    }
    // best[i][s]: cheapest way for players i.. to use exactly s items.
    let mut best = vec![vec![f64::INFINITY; budget + 1]; n + 1];
    best[n][0] = 0.0;
    for i in (0..n).rev() {
        let (head, tail) = best.split_at_mut(i + 1);
        let (cur, next) = (&mut head[i], &tail[0]);
        for s in 0..=budget {
            for &(k, v) in menu.row(i) {
                if k > s {
                    break;
                }
                let rest = next[s - k];
                if rest.is_finite() {
                    let total = v + rest;
                    if total < cur[s] {
                        cur[s] = total;
                    }
                }
            }
        }
    }
    if !best[0][budget].is_finite() {
        return SubSolution::infeasible(n);
    }
    let mut x = Allocation::zeros(n);
    let mut remaining = budget;
    for i in 0..n {
        let target = best[i][remaining];
        let &(k, _) = menu
            .row(i)
            .iter()
            .find(|&&(k, v)| k <= remaining && v + best[i + 1][remaining - k] == target)
            .expect("dp table admits a reconstruction");
        x[i] = k;
        remaining -= k;
    }
    SubSolution { allocation: x, value: best[0][budget], feasible: true }
}

/// Size of the allocation lattice, `prod_i (b_i + 1)`.
pub fn lattice_size(instance: &Instance) -> u128 {
    instance.caps().iter().fold(1u128, |acc, &b| acc.saturating_mul(b as u128 + 1))
}

/// Exhaustive enumeration of every feasible allocation, straight from the
/// cost table. Test and benchmark oracle only: it bypasses the ledger.
pub fn brute_force_solve(instance: &Instance, cap: u128) -> Result<SubSolution> {
    let points = lattice_size(instance);
    if points > cap {
        return Err(Error::CapExceeded { points, cap });
    }
    let n = instance.n();
    let caps = instance.caps();
    let mut suffix_cap = vec![0usize; n + 1];
    for i in (0..n).rev() {
        suffix_cap[i] = suffix_cap[i + 1] + caps[i];
    }

    struct Search<'a> {
        instance: &'a Instance,
        suffix_cap: Vec<usize>,
        x: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
    }

    impl Search<'_> {
        // Leaves are visited in lexicographic order, so keeping only strict
        // improvements yields the lexicographically smallest optimum.
        fn visit(&mut self, i: usize, remaining: usize) {
            let n = self.x.len();
            if i == n {
                if remaining == 0 {
                    let alloc = Allocation(self.x.clone());
                    let value = objective_value(&alloc, |p, k| Some(self.instance.cost(p, k))).unwrap();
                    if self.best.as_ref().is_none_or(|(b, _)| value < *b) {
                        self.best = Some((value, alloc.0));
                    }
                }
                return;
            }
            let top = self.instance.cap(i).min(remaining);
            for k in 0..=top {
                if remaining - k > self.suffix_cap[i + 1] {
                    continue;
                }
                self.x[i] = k;
                self.visit(i + 1, remaining - k);
            }
            self.x[i] = 0;
        }
    }

    let mut search = Search { instance, suffix_cap, x: vec![0; n], best: None };
    search.visit(0, instance.budget());
    Ok(match search.best {
        Some((value, x)) => SubSolution { allocation: Allocation(x), value, feasible: true },
        None => SubSolution::infeasible(n),
    })
}

/// CPLEX LP text for the binary program over `menu`. Variables are named
/// `y_<player>_<k>` with zero-based indices.
pub fn export_ilp(menu: &PointMenu, budget: usize) -> String {
    let mut out = String::new();
    let var = |i: usize, k: usize| format!("y_{i}_{k}");
    let join = |terms: Vec<String>| if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };

    writeln!(out, "\\ Separable resource allocation, binary point-selection form").unwrap();
    writeln!(out, "Minimize").unwrap();
    let objective: Vec<String> =
        (0..menu.n()).flat_map(|i| menu.row(i).iter().map(move |&(k, v)| format!("{v} {}", var(i, k)))).collect();
    writeln!(out, " obj: {}", join(objective)).unwrap();

    writeln!(out, "Subject To").unwrap();
    let budget_terms: Vec<String> = (0..menu.n())
        .flat_map(|i| menu.row(i).iter().filter(|(k, _)| *k > 0).map(move |&(k, _)| format!("{k} {}", var(i, k))))
        .collect();
    writeln!(out, " budget: {} = {budget}", join(budget_terms)).unwrap();
    for i in 0..menu.n() {
        let terms: Vec<String> = menu.row(i).iter().map(|&(k, _)| var(i, k)).collect();
        writeln!(out, " choose_{i}: {} = 1", join(terms)).unwrap();
    }

    writeln!(out, "Binary").unwrap();
    for i in 0..menu.n() {
        for &(k, _) in menu.row(i) {
            writeln!(out, " {}", var(i, k)).unwrap();
        }
    }
    writeln!(out, "End").unwrap();
    out
}
