//! Lower and upper bound curves on the cost functions.
//!
//! Bounds are rebuilt from the ledger on demand. In [`BoundMode::Monotone`]
//! only the ordering of evaluated values is used; [`BoundMode::Convex`]
//! additionally uses secant lines through pairs of evaluated points and a
//! secant anchored at `(0, M)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::ledger::{objective_value, EvaluationLedger};
use crate::subsolver::PointMenu;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    #[default]
    Monotone,
    Convex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

/// Per-player bound curves `l_i`, `u_i` over `{0..b_i}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundModel {
    pub mode: BoundMode,
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
    /// Set when convex bounds were forced on rows not known to be convex;
    /// the curves are then not guaranteed to enclose the true costs.
    pub heuristic: bool,
}

impl BoundModel {
    /// Builds bounds of the requested mode. Convex mode requires a convex
    /// instance unless `force` is set, in which case the model is marked
    /// heuristic.
    pub fn build(instance: &Instance, ledger: &EvaluationLedger, mode: BoundMode, force: bool) -> Result<Self> {
        match mode {
            BoundMode::Monotone => Ok(monotone_bounds(instance, ledger)),
            BoundMode::Convex if instance.is_convex() => Ok(convex_rows(instance, ledger, false)),
            BoundMode::Convex if force => Ok(convex_rows(instance, ledger, true)),
            BoundMode::Convex => Err(Error::NotConvexFlagged),
        }
    }

    pub fn lower(&self, player: usize, k: usize) -> f64 {
        self.lower[player][k]
    }

    pub fn upper(&self, player: usize, k: usize) -> f64 {
        self.upper[player][k]
    }

    pub fn gap(&self, player: usize, k: usize) -> f64 {
        self.upper[player][k] - self.lower[player][k]
    }

    pub fn side(&self, side: Side) -> &[Vec<f64>] {
        match side {
            Side::Lower => &self.lower,
            Side::Upper => &self.upper,
        }
    }

    /// `l(x)` or `u(x)`.
    pub fn objective(&self, allocation: &Allocation, side: Side) -> f64 {
        let rows = self.side(side);
        objective_value(allocation, |i, k| rows.get(i).and_then(|r| r.get(k)).copied())
            .expect("allocation within individual budgets")
    }

    /// Full menu over `{0..b_i}` valued by one side of the model.
    pub fn menu(&self, side: Side) -> PointMenu {
        PointMenu::from_rows(self.side(side))
    }
}

/// `l_i(k) = max{0, max_{p >= k} f_i(p) v_ip}`, `u_i(k) = min{M, min_{q <= k} f_i(q) v_iq}`.
pub fn monotone_bounds(instance: &Instance, ledger: &EvaluationLedger) -> BoundModel {
    let m = instance.max_cost();
    let mut lower = Vec::with_capacity(instance.n());
    let mut upper = Vec::with_capacity(instance.n());
    for i in 0..instance.n() {
        let row = ledger.row(i);
        let mut lo = vec![0.0; row.len()];
        let mut up = vec![m; row.len()];
        // Lower bound comes from the nearest evaluated point at or right of k.
        let mut floor = 0.0;
        for k in (0..row.len()).rev() {
            if let Some(v) = row[k] {
                floor = v;
            }
            lo[k] = floor;
        }
        let mut ceiling = m;
        for k in 0..row.len() {
            if let Some(v) = row[k] {
                ceiling = v;
            }
            up[k] = ceiling;
        }
        lower.push(lo);
        upper.push(up);
    }
    BoundModel { mode: BoundMode::Monotone, lower, upper, heuristic: false }
}

/// Convexity-exploiting bounds; fails with [`Error::NotConvexFlagged`] on
/// instances not flagged convex.
pub fn convex_bounds(instance: &Instance, ledger: &EvaluationLedger) -> Result<BoundModel> {
    BoundModel::build(instance, ledger, BoundMode::Convex, false)
}

fn convex_rows(instance: &Instance, ledger: &EvaluationLedger, heuristic: bool) -> BoundModel {
    let m = instance.max_cost();
    let (lower, upper) = (0..instance.n())
        .map(|i| {
            let points: Vec<(usize, f64)> = ledger.evaluated_points(i).collect();
            convex_row(ledger.row(i), &points, m)
        })
        .unzip();
    BoundModel { mode: BoundMode::Convex, lower, upper, heuristic }
}

/// Value at `k` of the line through `(p, fp)` and `(q, fq)`, `p < q`.
fn secant(p: usize, fp: f64, q: usize, fq: f64, k: usize) -> f64 {
    let (p, q, k) = (p as f64, q as f64, k as f64);
    fp * (q - k) / (q - p) + fq * (k - p) / (q - p)
}

fn convex_row(row: &[Option<f64>], points: &[(usize, f64)], m: f64) -> (Vec<f64>, Vec<f64>) {
    let len = row.len();
    let mut lo = vec![0.0; len];
    let mut up = vec![m; len];
    for k in 0..len {
        if let Some(v) = row[k] {
            lo[k] = v;
            up[k] = v;
            continue;
        }
        let mut u = m;
        let mut l: f64 = 0.0;
        for &(q, fq) in points {
            if q > k {
                // Secant through (0, M) and (q, f(q)).
                u = u.min(m * (q - k) as f64 / q as f64 + fq * k as f64 / q as f64);
                l = l.max(fq);
            } else {
                u = u.min(fq);
            }
        }
        for (a, &(p, fp)) in points.iter().enumerate() {
            for &(q, fq) in &points[a + 1..] {
                let line = secant(p, fp, q, fq, k);
                if p < k && k < q {
                    u = u.min(line);
                } else {
                    l = l.max(line);
                }
            }
        }
        lo[k] = l.clamp(0.0, m);
        up[k] = u.clamp(0.0, m);
    }
    // Rows are non-increasing, so u carries to the right and l to the left.
    for k in 1..len {
        up[k] = up[k].min(up[k - 1]);
    }
    for k in (0..len.saturating_sub(1)).rev() {
        lo[k] = lo[k].max(lo[k + 1]);
    }
    for k in 0..len {
        match row[k] {
            Some(v) => {
                lo[k] = v;
                up[k] = v;
            }
            // Only reachable when convexity is assumed for rows that lack it.
            None if lo[k] > up[k] => lo[k] = up[k],
            None => {}
        }
    }
    (lo, up)
}
