//! The counting oracle.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};

/// Record of which points `f_i(k)` have been revealed, and their values.
///
/// Counting is per distinct point: asking for a cached point again is free.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationLedger {
    values: Vec<Vec<Option<f64>>>,
    eval_count: usize,
    per_player: Vec<usize>,
}

impl EvaluationLedger {
    pub fn new(instance: &Instance) -> Self {
        EvaluationLedger {
            values: instance.caps().iter().map(|&b| vec![None; b + 1]).collect(),
            eval_count: 0,
            per_player: vec![0; instance.n()],
        }
    }

    /// Returns `f_i(k)`, revealing and counting the point on first access.
    pub fn evaluate(&mut self, instance: &Instance, player: usize, k: usize) -> Result<f64> {
        instance.check_point(player, k)?;
        let slot = &mut self.values[player][k];
        if let Some(v) = *slot {
            return Ok(v);
        }
        let v = instance.cost(player, k);
        *slot = Some(v);
        self.eval_count += 1;
        self.per_player[player] += 1;
        Ok(v)
    }

    /// [`evaluate`](Self::evaluate), appending the point to `fresh` if it was
    /// not known before.
    pub fn evaluate_noting(
        &mut self,
        instance: &Instance,
        player: usize,
        k: usize,
        fresh: &mut Vec<(usize, usize)>,
    ) -> Result<f64> {
        let was_known = self.is_evaluated(player, k);
        let v = self.evaluate(instance, player, k)?;
        if !was_known {
            fresh.push((player, k));
        }
        Ok(v)
    }

    pub fn is_evaluated(&self, player: usize, k: usize) -> bool {
        self.cached(player, k).is_some()
    }

    /// Cached value without touching the oracle.
    pub fn cached(&self, player: usize, k: usize) -> Option<f64> {
        self.values.get(player).and_then(|row| row.get(k)).copied().flatten()
    }

    /// Cached value or [`Error::MissingValue`].
    pub fn known(&self, player: usize, k: usize) -> Result<f64> {
        self.cached(player, k).ok_or(Error::MissingValue { player, k })
    }

    pub fn eval_count(&self) -> usize {
        self.eval_count
    }

    pub fn per_player_count(&self) -> &[usize] {
        &self.per_player
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `b_i + 1`.
    pub fn row_len(&self, player: usize) -> usize {
        self.values[player].len()
    }

    pub fn row(&self, player: usize) -> &[Option<f64>] {
        &self.values[player]
    }

    /// Evaluated `(k, f_i(k))` pairs of one player, in increasing `k`.
    pub fn evaluated_points(&self, player: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values[player].iter().enumerate().filter_map(|(k, v)| v.map(|v| (k, v)))
    }

    /// The indicator matrix `V`.
    pub fn indicator(&self) -> Vec<Vec<bool>> {
        self.values.iter().map(|row| row.iter().map(Option::is_some).collect()).collect()
    }

    /// Unevaluated points in lexicographic `(i, k)` order.
    pub fn unevaluated(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.values
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, v)| v.is_none()).map(move |(k, _)| (i, k)))
    }

    pub fn all_evaluated(&self) -> bool {
        self.eval_count == self.values.iter().map(Vec::len).sum::<usize>()
    }

    /// Whether every point of the allocation has been revealed.
    pub fn covers(&self, allocation: &Allocation) -> bool {
        allocation.0.iter().enumerate().all(|(i, &k)| self.is_evaluated(i, k))
    }

    /// `z(x, f)` from cached values only.
    pub fn objective(&self, allocation: &Allocation) -> Result<f64> {
        objective_value(allocation, |i, k| self.cached(i, k))
    }
}

/// `sum_i value(i, x_i)`, or [`Error::MissingValue`] at the first undefined point.
///
/// Summation runs from the last player to the first so that totals are
/// bit-identical to the dynamic program in [`crate::subsolver`].
pub fn objective_value<F>(allocation: &Allocation, value: F) -> Result<f64>
where
    F: Fn(usize, usize) -> Option<f64>,
{
    let mut total = 0.0;
    for (i, &k) in allocation.0.iter().enumerate().rev() {
        total += value(i, k).ok_or(Error::MissingValue { player: i, k })?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Instance {
        Instance::new(vec![3, 3], 3, 100.0, vec![vec![10.0, 6.0, 3.0, 1.0], vec![8.0, 7.0, 2.0, 2.0]]).unwrap()
    }

    #[test]
    fn evaluation_is_counted_once() {
        let inst = e1();
        let mut ledger = EvaluationLedger::new(&inst);
        assert_eq!(ledger.eval_count(), 0);
        assert_eq!(ledger.evaluate(&inst, 0, 2).unwrap(), 3.0);
        assert_eq!(ledger.eval_count(), 1);
        assert_eq!(ledger.evaluate(&inst, 0, 2).unwrap(), 3.0);
        assert_eq!(ledger.eval_count(), 1);
        assert_eq!(ledger.per_player_count(), &[1, 0]);
        assert!(ledger.is_evaluated(0, 2));
        assert!(!ledger.is_evaluated(0, 1));
    }

    #[test]
    fn out_of_range_point() {
        let inst = e1();
        let mut ledger = EvaluationLedger::new(&inst);
        assert!(matches!(ledger.evaluate(&inst, 0, 4), Err(Error::IndexOutOfRange { player: 0, k: 4, cap: 3 })));
        assert!(matches!(ledger.evaluate(&inst, 2, 0), Err(Error::IndexOutOfRange { .. })));
        assert_eq!(ledger.eval_count(), 0);
    }

    #[test]
    fn objective_against_table() {
        let rows = [[10.0, 6.0, 3.0, 1.0], [8.0, 7.0, 2.0, 2.0]];
        let f = |i: usize, k: usize| Some(rows[i][k]);
        assert_eq!(objective_value(&Allocation(vec![1, 2]), f).unwrap(), 8.0);
        assert_eq!(objective_value(&Allocation(vec![0, 0]), f).unwrap(), 18.0);
    }

    #[test]
    fn objective_against_partial_ledger() {
        let inst = e1();
        let mut ledger = EvaluationLedger::new(&inst);
        ledger.evaluate(&inst, 0, 2).unwrap();
        assert!(matches!(ledger.objective(&Allocation(vec![2, 1])), Err(Error::MissingValue { player: 1, k: 1 })));
        ledger.evaluate(&inst, 1, 1).unwrap();
        assert_eq!(ledger.objective(&Allocation(vec![2, 1])).unwrap(), 10.0);
    }

    #[test]
    fn unevaluated_in_lexicographic_order() {
        let inst = e1();
        let mut ledger = EvaluationLedger::new(&inst);
        for k in 0..4 {
            ledger.evaluate(&inst, 0, k).unwrap();
        }
        ledger.evaluate(&inst, 1, 1).unwrap();
        let rest: Vec<_> = ledger.unevaluated().collect();
        assert_eq!(rest, vec![(1, 0), (1, 2), (1, 3)]);
        assert_eq!(ledger.indicator()[1], vec![false, true, false, false]);
    }
}
