//! Instance size where an overhead-adjusted quantum scaling undercuts a classical one.

use serde::{Deserialize, Serialize};

use crate::bench::fit::ScalingLaw;
use crate::error::{Error, Result};
use crate::SCHEMA_VERSION;

/// Multiplicative cost `k · N^p` applied to the quantum law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overhead {
    pub k: f64,
    pub p: f64,
}

impl Default for Overhead {
    fn default() -> Self {
        Self { k: 1.0, p: 0.0 }
    }
}

pub const SEARCH_MIN: u64 = 3;
pub const SEARCH_MAX: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub schema_version: u32,
    /// `None` when no crossing exists in the search range.
    pub n_star: Option<u64>,
    pub range: [u64; 2],
}

fn log_gap(q: &ScalingLaw, c: &ScalingLaw, o: &Overhead, n: f64) -> f64 {
    q.c.ln() + n * q.b.ln() + o.k.ln() + o.p * n.ln() - c.c.ln() - n * c.b.ln()
}

/// Smallest integer `N` in `[3, 10^5]` with `c_q b_q^N k N^p ≤ c_c b_c^N`,
/// scanned in log space.
pub fn crossover(quantum: &ScalingLaw, classical: &ScalingLaw, overhead: &Overhead) -> Result<Crossover> {
    for (name, v) in [("c_q", quantum.c), ("b_q", quantum.b), ("c_c", classical.c), ("b_c", classical.b), ("k", overhead.k)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
        }
    }
    if !overhead.p.is_finite() {
        return Err(Error::invalid("overhead power must be finite"));
    }
    let n_star = (SEARCH_MIN..=SEARCH_MAX).find(|&n| log_gap(quantum, classical, overhead, n as f64) <= 0.0);
    Ok(Crossover { schema_version: SCHEMA_VERSION, n_star, range: [SEARCH_MIN, SEARCH_MAX] })
}
