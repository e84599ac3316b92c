//! Exact LABS objective arithmetic.
//!
//! Sequences are stored as `±1` spins so autocorrelations are plain integer
//! multiply-adds and energies stay exact. Indices are zero-based throughout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest sequence length accepted anywhere in the crate.
pub const MIN_LENGTH: usize = 3;

/// A `±1` sequence of length `N >= 3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinarySequence {
    spins: Vec<i8>,
}

impl BinarySequence {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.len() < MIN_LENGTH {
            return Err(Error::invalid(format!(
                "sequence length {} is below the minimum of {MIN_LENGTH}",
                spins.len()
            )));
        }
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::invalid(format!("spin value {bad} is not +1 or -1")));
        }
        Ok(Self { spins })
    }

    /// All-`+1` sequence of length `n`.
    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// Builds a sequence from the low `n` bits of `bits`; bit `i` set means `x_i = -1`.
    pub fn from_bits(bits: u64, n: usize) -> Result<Self> {
        if n > 64 {
            return Err(Error::invalid("from_bits supports at most 64 spins"));
        }
        Self::new((0..n).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn into_spins(self) -> Vec<i8> {
        self.spins
    }

    pub fn negated(&self) -> Self {
        Self { spins: self.spins.iter().map(|s| -s).collect() }
    }

    pub fn reversed(&self) -> Self {
        Self { spins: self.spins.iter().rev().copied().collect() }
    }

    /// `x_i -> (-1)^i x_i` with zero-based `i`.
    pub fn alternated(&self) -> Self {
        Self {
            spins: self
                .spins
                .iter()
                .enumerate()
                .map(|(i, &s)| if i % 2 == 1 { -s } else { s })
                .collect(),
        }
    }

    pub fn flipped(&self, i: usize) -> Result<Self> {
        check_index(i, self.len())?;
        let mut spins = self.spins.clone();
        spins[i] = -spins[i];
        Ok(Self { spins })
    }

    /// All images under the group generated by negation, reversal and alternation.
    pub fn symmetry_images(&self) -> [BinarySequence; 8] {
        let r = self.reversed();
        let a = self.alternated();
        let ra = r.alternated();
        [
            self.negated(),
            r.negated(),
            a.negated(),
            ra.negated(),
            self.clone(),
            r,
            a,
            ra,
        ]
    }
}

impl fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.spins {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Accepts `+`/`-` or `1`/`0` (with `0` meaning `-1`). Whitespace is ignored.
impl FromStr for BinarySequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spins = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '+' | '1' => Ok(1),
                '-' | '0' => Ok(-1),
                other => Err(Error::invalid(format!("unexpected character {other:?} in sequence"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(spins)
    }
}

impl Serialize for BinarySequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinarySequence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn check_index(i: usize, len: usize) -> Result<()> {
    if i >= len {
        Err(Error::IndexOutOfRange { index: i, len })
    } else {
        Ok(())
    }
}

/// Aperiodic autocorrelations `C_1..C_{N-1}`; `values()[k]` holds `C_{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AutocorrVector {
    values: Vec<i64>,
}

impl AutocorrVector {
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `C_lag` for `1 <= lag <= N-1`.
    pub fn at(&self, lag: usize) -> i64 {
        self.values[lag - 1]
    }

    pub fn energy(&self) -> i64 {
        self.values.iter().map(|c| c * c).sum()
    }
}

pub fn autocorrelations(x: &BinarySequence) -> AutocorrVector {
    AutocorrVector { values: autocorrelations_of(x.spins()) }
}

fn autocorrelations_of(s: &[i8]) -> Vec<i64> {
    let n = s.len();
    (1..n)
        .map(|lag| (0..n - lag).map(|i| i64::from(s[i] * s[i + lag])).sum())
        .collect()
}

/// `E(x) = sum_l C_l(x)^2`.
pub fn sidelobe_energy(x: &BinarySequence) -> i64 {
    sidelobe_energy_of(x.spins())
}

/// Energy of a raw spin slice. The caller guarantees every entry is `±1`.
pub(crate) fn sidelobe_energy_of(s: &[i8]) -> i64 {
    let n = s.len();
    (1..n)
        .map(|lag| {
            let c: i64 = (0..n - lag).map(|i| i64::from(s[i] * s[i + lag])).sum();
            c * c
        })
        .sum()
}

/// Number of lags with odd `N - l`; no sequence can go below it.
pub fn parity_lower_bound(n: usize) -> i64 {
    (1..n).filter(|lag| (n - lag) % 2 == 1).count() as i64
}

/// `N^2 / (2E)`.
pub fn merit_factor(x: &BinarySequence) -> Result<f64> {
    merit_from_energy(x.len(), sidelobe_energy(x))
}

pub fn merit_from_energy(n: usize, energy: i64) -> Result<f64> {
    if energy <= 0 {
        return Err(Error::invalid("merit factor undefined for zero sidelobe energy"));
    }
    Ok((n * n) as f64 / (2.0 * energy as f64))
}

/// JSON-facing summary of one sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub n: usize,
    pub energy: i64,
    pub merit_factor: f64,
    pub autocorrelations: Vec<i64>,
}

impl EnergyReport {
    pub fn of(x: &BinarySequence) -> Self {
        let autocorr = autocorrelations(x);
        let energy = autocorr.energy();
        // parity forces E >= 1 for N >= 3
        let merit_factor = merit_from_energy(x.len(), energy).expect("valid sequences have E > 0");
        Self { n: x.len(), energy, merit_factor, autocorrelations: autocorr.values }
    }
}

/// Incremental single-flip evaluator.
///
/// Owns a sequence and its autocorrelation cache. [`propose`](Self::propose)
/// prices a flip in `O(N)` without mutating anything; [`commit`](Self::commit)
/// applies it and updates the cache in `O(N)`.
#[derive(Clone, Debug)]
pub struct FlipEvaluator {
    spins: Vec<i8>,
    corr: Vec<i64>,
    energy: i64,
}

impl FlipEvaluator {
    pub fn new(x: &BinarySequence) -> Self {
        Self::from_spins(x.spins().to_vec())
    }

    pub(crate) fn from_spins(spins: Vec<i8>) -> Self {
        let corr = autocorrelations_of(&spins);
        let energy = corr.iter().map(|c| c * c).sum();
        Self { spins, corr, energy }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn energy(&self) -> i64 {
        self.energy
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn autocorrelations(&self) -> &[i64] {
        &self.corr
    }

    pub fn sequence(&self) -> BinarySequence {
        BinarySequence { spins: self.spins.clone() }
    }

    /// Energy change from flipping spin `i`.
    pub fn propose(&self, i: usize) -> Result<i64> {
        check_index(i, self.spins.len())?;
        Ok(self.delta_unchecked(i))
    }

    #[inline]
    pub(crate) fn delta_unchecked(&self, i: usize) -> i64 {
        let n = self.spins.len();
        let s = &self.spins;
        let xi = i64::from(s[i]);
        let mut delta = 0;
        for lag in 1..n {
            let mut neighbours = 0i64;
            if i + lag < n {
                neighbours += i64::from(s[i + lag]);
            }
            if i >= lag {
                neighbours += i64::from(s[i - lag]);
            }
            if neighbours != 0 {
                let c = self.corr[lag - 1];
                let d = -2 * xi * neighbours;
                delta += d * (2 * c + d);
            }
        }
        delta
    }

    /// Flips spin `i`, updates the cache and returns the energy change.
    pub fn commit(&mut self, i: usize) -> Result<i64> {
        check_index(i, self.spins.len())?;
        Ok(self.commit_unchecked(i))
    }

    #[inline]
    pub(crate) fn commit_unchecked(&mut self, i: usize) -> i64 {
        let n = self.spins.len();
        let xi = i64::from(self.spins[i]);
        let before = self.energy;
        let mut energy = before;
        for lag in 1..n {
            let mut neighbours = 0i64;
            if i + lag < n {
                neighbours += i64::from(self.spins[i + lag]);
            }
            if i >= lag {
                neighbours += i64::from(self.spins[i - lag]);
            }
            if neighbours != 0 {
                let c = self.corr[lag - 1];
                let updated = c - 2 * xi * neighbours;
                energy += updated * updated - c * c;
                self.corr[lag - 1] = updated;
            }
        }
        self.spins[i] = -self.spins[i];
        self.energy = energy;
        energy - before
    }
}

/// `E(x with spin i flipped) - E(x)` given a cache for `x`.
pub fn flip_delta(x: &BinarySequence, cache: &AutocorrVector, i: usize) -> Result<i64> {
    if cache.values.len() + 1 != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len() - 1, actual: cache.values.len() });
    }
    let eval = FlipEvaluator {
        spins: x.spins.clone(),
        corr: cache.values.clone(),
        energy: cache.energy(),
    };
    eval.propose(i)
}

/// Lexicographically smallest symmetry image, ordering `+1` before `-1`.
pub fn canonicalize(x: &BinarySequence) -> BinarySequence {
    // Ord on i8 puts -1 first, so compare on negated keys to make +1 the smaller spin.
    x.symmetry_images()
        .into_iter()
        .min_by(|a, b| {
            let ka = a.spins.iter().map(|s| -s);
            let kb = b.spins.iter().map(|s| -s);
            ka.cmp(kb)
        })
        .expect("eight images")
}

pub fn is_canonical(x: &BinarySequence) -> bool {
    canonicalize(x) == *x
}

/// Builds the odd-length skew-symmetric sequence whose first `(n+1)/2` spins are `half`.
pub fn expand_skew_symmetric(half: &[i8], n: usize) -> Result<BinarySequence> {
    if n % 2 == 0 {
        return Err(Error::invalid(format!("skew-symmetric length must be odd, got {n}")));
    }
    if n < MIN_LENGTH {
        return Err(Error::invalid(format!("sequence length {n} is below the minimum of {MIN_LENGTH}")));
    }
    let m = (n + 1) / 2;
    if half.len() != m {
        return Err(Error::DimensionMismatch { expected: m, actual: half.len() });
    }
    let centre = m - 1;
    let mut spins = half.to_vec();
    spins.resize(n, 0);
    for lag in 1..m {
        let mirrored = spins[centre - lag];
        spins[centre + lag] = if lag % 2 == 0 { mirrored } else { -mirrored };
    }
    BinarySequence::new(spins)
}

pub fn is_skew_symmetric(x: &BinarySequence) -> bool {
    let n = x.len();
    if n % 2 == 0 {
        return false;
    }
    let c = (n - 1) / 2;
    let s = x.spins();
    (1..=c).all(|lag| {
        let sign = if lag % 2 == 0 { 1 } else { -1 };
        s[c + lag] == sign * s[c - lag]
    })
}
