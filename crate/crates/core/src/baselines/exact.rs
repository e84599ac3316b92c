//! Exhaustive solvers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labs::{canonicalize, expand_skew_symmetric, merit_from_energy, BinarySequence, FlipEvaluator, MIN_LENGTH};
use crate::tts::EnergyLevels;

/// Largest `N` the unconstrained enumeration accepts.
pub const MAX_EXACT_N: usize = 32;
/// Largest odd `N` the skew-symmetric enumeration accepts.
pub const MAX_SKEW_N: usize = 61;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub n: usize,
    pub optimal_energy: i64,
    pub optimal_merit: f64,
    /// Canonical representatives of every optimum, sorted.
    pub canonical_optima: Vec<BinarySequence>,
    /// The smallest distinct achievable energies, ascending.
    pub level_energies: Vec<i64>,
}

impl ExactResult {
    pub fn levels(&self) -> EnergyLevels {
        EnergyLevels::from_levels(&self.level_energies).expect("at least one level")
    }
}

/// The `k` smallest distinct values seen so far.
struct LowestLevels {
    k: usize,
    values: Vec<i64>,
}

impl LowestLevels {
    fn new(k: usize) -> Self {
        Self { k, values: Vec::with_capacity(k + 1) }
    }

    #[inline]
    fn offer(&mut self, e: i64) {
        if self.values.len() == self.k && e >= *self.values.last().expect("k >= 1") {
            return;
        }
        if let Err(pos) = self.values.binary_search(&e) {
            self.values.insert(pos, e);
            self.values.truncate(self.k);
        }
    }
}

/// Enumerates every sequence with `x_0 = +1` in Gray-code order.
///
/// Negation symmetry makes the fixed first spin lossless. Optima are
/// reported by canonical representative.
pub fn exact_solve(n: usize, k_levels: usize) -> Result<ExactResult> {
    if n < MIN_LENGTH {
        return Err(Error::invalid(format!("instance size {n} is below {MIN_LENGTH}")));
    }
    if n > MAX_EXACT_N {
        return Err(Error::Refused(format!("exhaustive search is capped at N = {MAX_EXACT_N}, got {n}")));
    }
    let k = k_levels.max(1);
    let mut eval = FlipEvaluator::from_spins(vec![1; n]);
    let mut levels = LowestLevels::new(k);
    let mut best = eval.energy();
    let mut optima: Vec<Vec<i8>> = vec![eval.spins().to_vec()];
    levels.offer(best);

    let total: u64 = 1 << (n - 1);
    for step in 1..total {
        // Gray code: flip the spin one above the lowest set bit of `step`
        let i = step.trailing_zeros() as usize + 1;
        eval.commit_unchecked(i);
        let e = eval.energy();
        levels.offer(e);
        if e < best {
            best = e;
            optima.clear();
            optima.push(eval.spins().to_vec());
        } else if e == best {
            optima.push(eval.spins().to_vec());
        }
    }

    let canonical: BTreeSet<BinarySequence> = optima
        .into_iter()
        .map(|s| canonicalize(&BinarySequence::new(s).expect("enumerated spins are valid")))
        .collect();
    Ok(ExactResult {
        n,
        optimal_energy: best,
        optimal_merit: merit_from_energy(n, best)?,
        canonical_optima: canonical.into_iter().collect(),
        level_energies: levels.values,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewResult {
    pub n: usize,
    pub best_energy: i64,
    pub best_merit: f64,
    pub best_sequence: BinarySequence,
}

/// Best skew-symmetric sequence of odd length `n`.
///
/// Walks the free half in Gray-code order; flipping half-spin `j` below the
/// centre flips its mirror as well, so each step costs two incremental flips.
pub fn skew_symmetric_search(n: usize) -> Result<SkewResult> {
    if n % 2 == 0 {
        return Err(Error::invalid(format!("skew-symmetric search needs odd N, got {n}")));
    }
    if n < MIN_LENGTH {
        return Err(Error::invalid(format!("instance size {n} is below {MIN_LENGTH}")));
    }
    if n > MAX_SKEW_N {
        return Err(Error::Refused(format!("skew-symmetric search is capped at N = {MAX_SKEW_N}, got {n}")));
    }
    let m = (n + 1) / 2;
    let start = expand_skew_symmetric(&vec![1; m], n)?;
    let mut eval = FlipEvaluator::new(&start);
    let mut best = eval.energy();
    let mut best_spins = eval.spins().to_vec();
    // half index 0 stays +1 (negation symmetry); indices 1..m vary
    let total: u64 = 1 << (m - 1);
    for step in 1..total {
        let j = step.trailing_zeros() as usize + 1;
        eval.commit_unchecked(j);
        if j != m - 1 {
            eval.commit_unchecked(n - 1 - j);
        }
        if eval.energy() < best {
            best = eval.energy();
            best_spins.copy_from_slice(eval.spins());
        }
    }
    Ok(SkewResult {
        n,
        best_energy: best,
        best_merit: merit_from_energy(n, best)?,
        best_sequence: BinarySequence::new(best_spins)?,
    })
}
