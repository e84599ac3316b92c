//! PCE-seeded memetic tabu search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::tabu::{memetic_tabu, MemeticConfig, DEFAULT_POPULATION};
use crate::error::{Error, Result};
use crate::pce::{self, PceConfig};
use crate::seed::derive_seed;
use crate::tts::{EnergyLevels, SolveResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WarmStartConfig {
    /// Template for every PCE run; each run gets a derived seed.
    pub pce: PceConfig,
    pub memetic: MemeticConfig,
    pub pce_runs: usize,
    /// Copies of the best PCE sequence in the initial population.
    pub copies: usize,
}

impl Default for WarmStartConfig {
    fn default() -> Self {
        let pce = PceConfig { max_restarts: 1, ..PceConfig::for_qubits(4) };
        Self { pce, memetic: MemeticConfig::default(), pce_runs: 150, copies: DEFAULT_POPULATION }
    }
}

/// Counter of the combined run: the earliest crossing in run order, offset
/// by every evaluation spent before that run.
fn merge_counter(slot: &mut Option<u64>, offset: u64, counter: Option<u64>) {
    if slot.is_none() {
        *slot = counter.map(|c| offset + c);
    }
}

/// Runs `pce_runs` independent PCE solves, then memetic tabu from `copies`
/// copies of the best decoded sequence.
///
/// Evaluation counters are laid out as if the PCE runs executed one after
/// another in index order followed by the memetic phase, so
/// `total_evals` is the sum over all phases.
pub fn pce_warm_start(n: usize, config: &WarmStartConfig, levels: Option<EnergyLevels>) -> Result<SolveResult> {
    if config.pce_runs == 0 {
        return Err(Error::invalid("warm start needs at least one PCE run"));
    }
    if config.copies < 2 {
        return Err(Error::invalid("warm start population needs at least two copies"));
    }
    let base = config.pce.seed;
    let runs: Vec<SolveResult> = (0..config.pce_runs)
        .into_par_iter()
        .map(|i| {
            let cfg = PceConfig { seed: derive_seed(base, &[i as u64]), ..config.pce.clone() };
            pce::solve(n, &cfg, levels)
        })
        .collect::<Result<_>>()?;

    let mut exact = None;
    let mut first = None;
    let mut second = None;
    let mut offset = 0u64;
    let mut restarts = 0u64;
    let mut best = &runs[0];
    for r in &runs {
        merge_counter(&mut exact, offset, r.evals_to_exact);
        merge_counter(&mut first, offset, r.evals_to_first);
        merge_counter(&mut second, offset, r.evals_to_second);
        offset += r.total_evals;
        restarts += r.restarts_used;
        if r.best_energy < best.best_energy {
            best = r;
        }
    }

    let population = vec![best.best_sequence.clone(); config.copies];
    let memetic = memetic_tabu(&population, &config.memetic, levels)?;
    merge_counter(&mut exact, offset, memetic.evals_to_exact);
    merge_counter(&mut first, offset, memetic.evals_to_first);
    merge_counter(&mut second, offset, memetic.evals_to_second);
    let (best_sequence, best_energy) = if memetic.best_energy < best.best_energy {
        (memetic.best_sequence.clone(), memetic.best_energy)
    } else {
        (best.best_sequence.clone(), best.best_energy)
    };
    Ok(SolveResult {
        best_sequence,
        best_energy,
        evals_to_exact: exact,
        evals_to_first: first,
        evals_to_second: second,
        total_evals: offset + memetic.total_evals,
        restarts_used: restarts + memetic.restarts_used,
        seed: base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(seed: u64) -> WarmStartConfig {
        let pce = PceConfig { layers: 4, iterations: 40, max_restarts: 1, seed, ..PceConfig::for_qubits(3) };
        WarmStartConfig { pce, pce_runs: 6, copies: 10, ..WarmStartConfig::default() }
    }

    #[test]
    fn accounting_identity() {
        let cfg = small_config(3);
        let levels = Some(EnergyLevels::from_levels(&[6, 10, 14]).unwrap());
        let r = pce_warm_start(13, &cfg, levels).unwrap();
        assert_eq!(r.best_energy, 6);
        let pce_total: u64 = (0..cfg.pce_runs)
            .map(|i| {
                let c = PceConfig { seed: derive_seed(3, &[i as u64]), ..cfg.pce.clone() };
                pce::solve(13, &c, levels).unwrap().total_evals
            })
            .sum();
        assert!(r.total_evals > pce_total);
        let exact = r.evals_to_exact.unwrap();
        assert!(r.evals_to_second.unwrap() <= r.evals_to_first.unwrap());
        assert!(r.evals_to_first.unwrap() <= exact);
        assert!(exact <= r.total_evals);
    }

    #[test]
    fn pce_hit_sets_the_counter_at_its_global_index() {
        // N = 3 is solved by any one of its optimal sequences, so some PCE run hits it
        let cfg = small_config(1);
        let levels = Some(EnergyLevels::from_levels(&[1, 5]).unwrap());
        let r = pce_warm_start(3, &cfg, levels).unwrap();
        let mut offset = 0;
        let mut expected = None;
        for i in 0..cfg.pce_runs {
            let c = PceConfig { seed: derive_seed(1, &[i as u64]), ..cfg.pce.clone() };
            let run = pce::solve(3, &c, levels).unwrap();
            if expected.is_none() {
                expected = run.evals_to_exact.map(|k| offset + k);
            }
            offset += run.total_evals;
        }
        assert!(expected.is_some());
        assert_eq!(r.evals_to_exact, expected);
        // memetic phase is seeded with the optimum and stops at its first evaluation
        assert_eq!(r.total_evals, offset + 1);
    }

    #[test]
    fn deterministic_and_guarded() {
        let cfg = small_config(9);
        let levels = Some(EnergyLevels::exact_only(6));
        assert_eq!(pce_warm_start(13, &cfg, levels).unwrap(), pce_warm_start(13, &cfg, levels).unwrap());
        assert!(pce_warm_start(13, &WarmStartConfig { pce_runs: 0, ..cfg.clone() }, levels).is_err());
        assert!(pce_warm_start(13, &WarmStartConfig { copies: 1, ..cfg }, levels).is_err());
    }
}
