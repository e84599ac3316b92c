//! Time-to-solution bookkeeping shared by every solver.

use serde::{Deserialize, Serialize};

use crate::labs::BinarySequence;

/// Reference energies whose first crossing is recorded.
///
/// `first` and `second` are the second- and third-lowest achievable energies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyLevels {
    pub exact: i64,
    pub first: Option<i64>,
    pub second: Option<i64>,
}

impl EnergyLevels {
    pub fn exact_only(exact: i64) -> Self {
        Self { exact, first: None, second: None }
    }

    /// From an ascending list of distinct energies.
    pub fn from_levels(levels: &[i64]) -> Option<Self> {
        Some(Self { exact: *levels.first()?, first: levels.get(1).copied(), second: levels.get(2).copied() })
    }
}

/// Outcome of one solver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub best_sequence: BinarySequence,
    pub best_energy: i64,
    pub evals_to_exact: Option<u64>,
    pub evals_to_first: Option<u64>,
    pub evals_to_second: Option<u64>,
    pub total_evals: u64,
    pub restarts_used: u64,
    pub seed: u64,
}

/// Running evaluation counter with best-so-far and first-crossing indices.
#[derive(Clone, Debug)]
pub(crate) struct TtsTracker {
    levels: Option<EnergyLevels>,
    evals: u64,
    best: Option<(i64, Vec<i8>)>,
    to_exact: Option<u64>,
    to_first: Option<u64>,
    to_second: Option<u64>,
    max_evals: Option<u64>,
}

impl TtsTracker {
    pub fn new(levels: Option<EnergyLevels>, max_evals: Option<u64>) -> Self {
        Self { levels, evals: 0, best: None, to_exact: None, to_first: None, to_second: None, max_evals }
    }

    /// Counts one evaluation that produced `energy` for `spins`.
    ///
    /// A crossing of a lower level also counts as crossing every higher one,
    /// which keeps `second <= first <= exact`.
    pub fn record(&mut self, energy: i64, spins: &[i8]) {
        self.evals += 1;
        let improved = self.best.as_ref().is_none_or(|(e, _)| energy < *e);
        if improved {
            self.best = Some((energy, spins.to_vec()));
        }
        if let Some(levels) = self.levels {
            let hit = |slot: &mut Option<u64>, level: Option<i64>, evals: u64| {
                if slot.is_none() && level.is_some_and(|l| energy <= l) {
                    *slot = Some(evals);
                }
            };
            hit(&mut self.to_second, levels.second, self.evals);
            hit(&mut self.to_first, levels.first, self.evals);
            hit(&mut self.to_exact, Some(levels.exact), self.evals);
        }
    }

    /// Counts evaluations that are not scored (e.g. shifted circuits).
    pub fn charge(&mut self, count: u64) {
        self.evals += count;
    }

    pub fn exact_found(&self) -> bool {
        self.to_exact.is_some()
    }

    pub fn budget_exhausted(&self) -> bool {
        self.max_evals.is_some_and(|m| self.evals >= m)
    }

    /// True when the run should stop: target reached or budget spent.
    pub fn done(&self) -> bool {
        self.exact_found() || self.budget_exhausted()
    }

    pub fn finish(self, restarts_used: u64, seed: u64) -> Option<SolveResult> {
        let (best_energy, spins) = self.best?;
        Some(SolveResult {
            best_sequence: BinarySequence::new(spins).expect("tracked spins are valid"),
            best_energy,
            evals_to_exact: self.to_exact,
            evals_to_first: self.to_first,
            evals_to_second: self.to_second,
            total_evals: self.evals,
            restarts_used,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossings_are_ordered() {
        let levels = EnergyLevels { exact: 6, first: Some(10), second: Some(12) };
        let mut t = TtsTracker::new(Some(levels), None);
        t.record(20, &[1, 1, 1]);
        t.record(10, &[1, 1, 1]);
        t.record(30, &[1, 1, 1]);
        t.record(6, &[1, 1, 1]);
        let r = t.finish(1, 0).unwrap();
        assert_eq!(r.evals_to_second, Some(2));
        assert_eq!(r.evals_to_first, Some(2));
        assert_eq!(r.evals_to_exact, Some(4));
        assert_eq!(r.best_energy, 6);
        assert_eq!(r.total_evals, 4);
    }

    #[test]
    fn jumping_straight_to_exact_sets_all() {
        let levels = EnergyLevels::from_levels(&[1, 5]).unwrap();
        let mut t = TtsTracker::new(Some(levels), Some(3));
        t.record(1, &[1, 1, -1]);
        assert!(t.done());
        let r = t.finish(0, 0).unwrap();
        assert_eq!((r.evals_to_exact, r.evals_to_first, r.evals_to_second), (Some(1), Some(1), None));
    }
}
