//! Seeded, parallel campaigns over instance sizes.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    exact_solve, memetic_tabu, pce_warm_start, random_population, tabu_search, MemeticConfig, TabuConfig,
    WarmStartConfig, DEFAULT_POPULATION, MAX_EXACT_N,
};
use crate::bench::records::{RunRecord, SolverTag};
use crate::error::{Error, Result};
use crate::pce::{self, PceConfig};
use crate::seed::derive_seed;
use crate::tts::{EnergyLevels, SolveResult};
use crate::{BinarySequence, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MemeticCampaign {
    pub config: MemeticConfig,
    pub population: usize,
}

impl Default for MemeticCampaign {
    fn default() -> Self {
        Self { config: MemeticConfig::default(), population: DEFAULT_POPULATION }
    }
}

/// Solver and its settings; per-run seeds overwrite the configured ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", content = "config")]
pub enum SolverSpec {
    #[serde(rename = "tabu")]
    Tabu(TabuConfig),
    #[serde(rename = "memetic")]
    Memetic(MemeticCampaign),
    #[serde(rename = "pce")]
    Pce(PceConfig),
    #[serde(rename = "pce+tabu")]
    PceTabu(WarmStartConfig),
    #[serde(rename = "exact")]
    Exact,
}

impl SolverSpec {
    pub fn tag(&self) -> SolverTag {
        match self {
            SolverSpec::Tabu(_) => SolverTag::Tabu,
            SolverSpec::Memetic(_) => SolverTag::Memetic,
            SolverSpec::Pce(_) => SolverTag::Pce,
            SolverSpec::PceTabu(_) => SolverTag::PceTabu,
            SolverSpec::Exact => SolverTag::Exact,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSpec {
    #[serde(flatten)]
    pub solver: SolverSpec,
    pub sizes: Vec<usize>,
    pub runs_per_size: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Per-run evaluation cap; overrides the solver's own cap when set.
    #[serde(default)]
    pub budget: Option<u64>,
    /// Ascending reference energies per `N`; sizes missing here are solved
    /// exhaustively when `N` allows it.
    #[serde(default)]
    pub references: BTreeMap<usize, Vec<i64>>,
    #[serde(default)]
    pub record_wall_time: bool,
}

/// Number of reference levels computed when a size is solved exhaustively.
const REFERENCE_LEVELS: usize = 3;

/// Reference levels for every requested size, or a refusal naming the first
/// size that has none.
pub fn reference_levels(spec: &CampaignSpec) -> Result<BTreeMap<usize, EnergyLevels>> {
    let mut missing = Vec::new();
    for &n in &spec.sizes {
        if !spec.references.contains_key(&n) && n > MAX_EXACT_N {
            missing.push(n);
        }
    }
    if !missing.is_empty() {
        return Err(Error::Refused(format!(
            "no reference energies for N = {missing:?}; supply them under \"references\""
        )));
    }
    let mut sizes = spec.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .par_iter()
        .map(|&n| {
            let levels = match spec.references.get(&n) {
                Some(table) => {
                    if table.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Error::invalid(format!("reference energies for N = {n} are not strictly ascending")));
                    }
                    EnergyLevels::from_levels(table)
                        .ok_or_else(|| Error::invalid(format!("empty reference list for N = {n}")))?
                }
                None => exact_solve(n, REFERENCE_LEVELS)?.levels(),
            };
            Ok((n, levels))
        })
        .collect()
}

fn run_one(solver: &SolverSpec, n: usize, seed: u64, budget: Option<u64>, levels: EnergyLevels) -> Result<(SolveResult, serde_json::Value)> {
    match solver {
        SolverSpec::Tabu(cfg) => {
            let mut cfg = TabuConfig { seed, ..cfg.clone() };
            if let Some(b) = budget {
                cfg.max_evals = b;
            }
            Ok((tabu_search(n, &cfg, Some(levels))?, echo(&cfg)))
        }
        SolverSpec::Memetic(mc) => {
            let mut cfg = MemeticConfig { seed, ..mc.config.clone() };
            if let Some(b) = budget {
                cfg.max_evals = b;
            }
            let population = random_population(n, mc.population, derive_seed(seed, &[0]))?;
            let echo_value = echo(&MemeticCampaign { config: cfg.clone(), population: mc.population });
            Ok((memetic_tabu(&population, &cfg, Some(levels))?, echo_value))
        }
        SolverSpec::Pce(cfg) => {
            let mut cfg = PceConfig { seed, ..cfg.clone() };
            if budget.is_some() {
                cfg.max_evals = budget;
            }
            Ok((pce::solve(n, &cfg, Some(levels))?, echo(&cfg)))
        }
        SolverSpec::PceTabu(ws) => {
            let mut cfg = ws.clone();
            cfg.pce.seed = seed;
            cfg.memetic.seed = derive_seed(seed, &[1]);
            if let Some(b) = budget {
                cfg.memetic.max_evals = b;
            }
            Ok((pce_warm_start(n, &cfg, Some(levels))?, echo(&cfg)))
        }
        SolverSpec::Exact => {
            let r = exact_solve(n, 1)?;
            let x: BinarySequence = r.canonical_optima[0].clone();
            let total = 1u64 << (n - 1);
            let result = SolveResult {
                best_sequence: x,
                best_energy: r.optimal_energy,
                evals_to_exact: (r.optimal_energy <= levels.exact).then_some(total),
                evals_to_first: levels.first.map(|_| total),
                evals_to_second: levels.second.map(|_| total),
                total_evals: total,
                restarts_used: 0,
                seed,
            };
            Ok((result, serde_json::Value::Null))
        }
    }
}

fn echo<T: Serialize>(config: &T) -> serde_json::Value {
    serde_json::to_value(config).expect("configs serialize")
}

/// Runs every `(N, run_index)` job on a pool of `workers` threads
/// (`None` uses rayon's default) and returns records ordered by
/// `(N, run_index)` in the order sizes were listed.
pub fn run_campaign(spec: &CampaignSpec, workers: Option<usize>) -> Result<Vec<RunRecord>> {
    if spec.sizes.is_empty() {
        return Err(Error::invalid("campaign lists no sizes"));
    }
    if spec.runs_per_size == 0 {
        return Err(Error::invalid("runs_per_size must be positive"));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::invalid("worker count must be positive"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::Runtime(e.to_string()))?;
    pool.install(|| {
        let levels = reference_levels(spec)?;
        let jobs: Vec<(usize, usize)> =
            spec.sizes.iter().flat_map(|&n| (0..spec.runs_per_size).map(move |i| (n, i))).collect();
        jobs.par_iter()
            .map(|&(n, run_index)| {
                let seed = derive_seed(spec.base_seed, &[n as u64, run_index as u64]);
                let start = Instant::now();
                let (result, config) = run_one(&spec.solver, n, seed, spec.budget, levels[&n])?;
                let mut record = RunRecord::from_result(spec.solver.tag(), n, run_index, &result, config);
                debug_assert_eq!(record.schema_version, SCHEMA_VERSION);
                if spec.record_wall_time {
                    record.wall_time = Some(start.elapsed().as_secs_f64());
                }
                Ok(record)
            })
            .collect()
    })
}
