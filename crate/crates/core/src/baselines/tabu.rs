//! Tabu search and the memetic wrapper around it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labs::{BinarySequence, FlipEvaluator, MIN_LENGTH};
use crate::tts::{EnergyLevels, SolveResult, TtsTracker};

/// Tabu search settings.
///
/// Tenure bounds of `None` resolve per instance to `⌈N/10⌉` and `⌈N/2⌉`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TabuConfig {
    pub tenure_min: Option<usize>,
    pub tenure_max: Option<usize>,
    /// Counted evaluations before giving up.
    pub max_evals: u64,
    /// Restart from a random sequence after `stagnation_factor * N` moves without a new best.
    pub stagnation_factor: usize,
    pub seed: u64,
}

impl Default for TabuConfig {
    fn default() -> Self {
        Self { tenure_min: None, tenure_max: None, max_evals: 100_000_000, stagnation_factor: 10, seed: 0 }
    }
}

impl TabuConfig {
    /// Resolved `[t_min, t_max]` for length `n`.
    pub fn tenure_range(&self, n: usize) -> Result<(usize, usize)> {
        let lo = self.tenure_min.unwrap_or_else(|| n.div_ceil(10));
        let hi = self.tenure_max.unwrap_or_else(|| n.div_ceil(2));
        if lo < 1 || lo > hi || hi >= n {
            return Err(Error::invalid(format!("tenure range [{lo}, {hi}] invalid for N = {n}")));
        }
        Ok((lo, hi))
    }
}

fn random_spins<R: Rng>(n: usize, rng: &mut R) -> Vec<i8> {
    (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

/// One tabu walk over the single-flip neighbourhood.
///
/// Every neighbour priced counts as one evaluation.
struct Walk<'a, R: Rng> {
    n: usize,
    tenure: (usize, usize),
    rng: &'a mut R,
    tracker: &'a mut TtsTracker,
}

impl<R: Rng> Walk<'_, R> {
    /// Walks from `start` for at most `max_moves` moves, or until `stagnation`
    /// moves pass without a new walk best. Returns the walk's best energy and sequence.
    fn run(&mut self, start: Vec<i8>, max_moves: Option<usize>, stagnation: Option<usize>) -> (i64, Vec<i8>) {
        let n = self.n;
        let mut eval = FlipEvaluator::from_spins(start);
        self.tracker.record(eval.energy(), eval.spins());
        let mut best_energy = eval.energy();
        let mut best_spins = eval.spins().to_vec();
        let mut tabu_until = vec![0usize; n];
        let mut since_best = 0usize;
        let mut probe = vec![0i8; n];

        let mut iteration = 0usize;
        while !self.tracker.done() && max_moves.is_none_or(|m| iteration < m) {
            iteration += 1;
            let current = eval.energy();
            let mut chosen: Option<(usize, i64)> = None;
            for i in 0..n {
                let candidate = current + eval.delta_unchecked(i);
                probe.copy_from_slice(eval.spins());
                probe[i] = -probe[i];
                self.tracker.record(candidate, &probe);
                let allowed = tabu_until[i] < iteration || candidate < best_energy;
                if allowed && chosen.is_none_or(|(_, e)| candidate < e) {
                    chosen = Some((i, candidate));
                }
                if self.tracker.done() {
                    break;
                }
            }
            if self.tracker.done() {
                break;
            }
            let Some((i, energy)) = chosen else {
                // every move tabu and none aspirates: wait out the shortest tenure
                continue;
            };
            eval.commit_unchecked(i);
            debug_assert_eq!(eval.energy(), energy);
            tabu_until[i] = iteration + self.rng.gen_range(self.tenure.0..=self.tenure.1);
            if energy < best_energy {
                best_energy = energy;
                best_spins.copy_from_slice(eval.spins());
                since_best = 0;
            } else {
                since_best += 1;
                if stagnation.is_some_and(|s| since_best >= s) {
                    break;
                }
            }
        }
        (best_energy, best_spins)
    }
}

/// Single-flip tabu search with aspiration and random restarts.
pub fn tabu_search(n: usize, config: &TabuConfig, levels: Option<EnergyLevels>) -> Result<SolveResult> {
    if n < MIN_LENGTH {
        return Err(Error::invalid(format!("instance size {n} is below {MIN_LENGTH}")));
    }
    let tenure = config.tenure_range(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tracker = TtsTracker::new(levels, Some(config.max_evals));
    let stagnation = (config.stagnation_factor * n).max(1);
    let mut restarts = 0;
    while !tracker.done() {
        restarts += 1;
        let start = random_spins(n, &mut rng);
        Walk { n, tenure, rng: &mut rng, tracker: &mut tracker }.run(start, None, Some(stagnation));
    }
    tracker.finish(restarts, config.seed).ok_or_else(|| Error::Runtime("no evaluations performed".into()))
}

/// Memetic tabu settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MemeticConfig {
    pub tournament_size: usize,
    pub crossover_rate: f64,
    /// Per-bit mutation probability; `None` means `1/N`.
    pub mutation_rate: Option<f64>,
    /// Tabu moves per offspring are drawn from `[N/2, 3N/2]` when `None`.
    pub local_moves: Option<(usize, usize)>,
    pub tabu: TabuConfig,
    pub max_evals: u64,
    pub seed: u64,
}

impl Default for MemeticConfig {
    fn default() -> Self {
        Self {
            tournament_size: 3,
            crossover_rate: 0.9,
            mutation_rate: None,
            local_moves: None,
            tabu: TabuConfig::default(),
            max_evals: 100_000_000,
            seed: 0,
        }
    }
}

/// Default memetic population size.
pub const DEFAULT_POPULATION: usize = 50;

/// Random population of `size` sequences.
pub fn random_population(n: usize, size: usize, seed: u64) -> Result<Vec<BinarySequence>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size).map(|_| BinarySequence::new(random_spins(n, &mut rng))).collect()
}

/// Memetic tabu search from `population`.
///
/// Each generation produces one child by tournament selection and uniform
/// crossover, mutates it, improves it with a short tabu walk and lets it
/// replace a random worse member. All scoring shares one counter.
pub fn memetic_tabu(
    population: &[BinarySequence],
    config: &MemeticConfig,
    levels: Option<EnergyLevels>,
) -> Result<SolveResult> {
    if population.is_empty() {
        return Err(Error::invalid("memetic search needs a non-empty population"));
    }
    if population.len() < 2 {
        return Err(Error::invalid("memetic search needs at least two individuals"));
    }
    let n = population[0].len();
    if population.iter().any(|x| x.len() != n) {
        return Err(Error::invalid("population members have different lengths"));
    }
    if config.tournament_size == 0 {
        return Err(Error::invalid("tournament size must be positive"));
    }
    let tenure = config.tabu.tenure_range(n)?;
    let mutation = config.mutation_rate.unwrap_or(1.0 / n as f64);
    let (moves_lo, moves_hi) = config.local_moves.unwrap_or((n / 2, 3 * n / 2));
    if moves_lo > moves_hi {
        return Err(Error::invalid("local move range is empty"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tracker = TtsTracker::new(levels, Some(config.max_evals));

    let mut members: Vec<(i64, Vec<i8>)> = Vec::with_capacity(population.len());
    for x in population {
        let e = crate::labs::sidelobe_energy(x);
        tracker.record(e, x.spins());
        members.push((e, x.spins().to_vec()));
        if tracker.done() {
            break;
        }
    }

    let mut generations = 0u64;
    while !tracker.done() {
        generations += 1;
        let mut child = if rng.gen::<f64>() < config.crossover_rate {
            let a = tournament(&members, config.tournament_size, &mut rng);
            let b = tournament(&members, config.tournament_size, &mut rng);
            (0..n).map(|i| if rng.gen::<bool>() { members[a].1[i] } else { members[b].1[i] }).collect::<Vec<i8>>()
        } else {
            members[tournament(&members, config.tournament_size, &mut rng)].1.clone()
        };
        for s in child.iter_mut() {
            if rng.gen::<f64>() < mutation {
                *s = -*s;
            }
        }
        let moves = rng.gen_range(moves_lo..=moves_hi);
        let (energy, spins) = Walk { n, tenure, rng: &mut rng, tracker: &mut tracker }.run(child, Some(moves), None);
        let victim = rng.gen_range(0..members.len());
        if energy < members[victim].0 {
            members[victim] = (energy, spins);
        }
    }
    tracker.finish(generations, config.seed).ok_or_else(|| Error::Runtime("no evaluations performed".into()))
}

fn tournament<R: Rng>(members: &[(i64, Vec<i8>)], size: usize, rng: &mut R) -> usize {
    let indices: Vec<usize> = (0..members.len()).collect();
    indices
        .choose_multiple(rng, size.min(members.len()))
        .copied()
        .min_by_key(|&i| members[i].0)
        .expect("non-empty population")
}
