//! Phase-free n-qubit Pauli strings and the randomized correlator sets.
//!
//! A string is stored as an `(x_mask, z_mask)` pair; bit `q` of each mask
//! refers to qubit `q`, and character `q` of the text form names the factor
//! on qubit `q` (so `"XIZ"` has `X` on qubit 0 and `Z` on qubit 2). `Y`
//! sets both bits and carries the standard `+1` phase, `Y = iXZ`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest qubit count the partition and samplers accept.
pub const MAX_QUBITS: usize = 12;

/// Rejection attempts allowed per accepted member.
pub const MAX_ATTEMPTS_PER_MEMBER: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    /// Identity (both masks zero) is rejected.
    pub fn new(n: usize, x_mask: u64, z_mask: u64) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::invalid(format!("qubit count {n} out of range")));
        }
        let full = (1u64 << n) - 1;
        if x_mask & !full != 0 || z_mask & !full != 0 {
            return Err(Error::invalid("mask has bits outside the qubit range"));
        }
        if x_mask == 0 && z_mask == 0 {
            return Err(Error::invalid("identity is not a traceless Pauli string"));
        }
        Ok(Self { n, x: x_mask, z: z_mask })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// True when diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: other.n });
        }
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    fn commutes_unchecked(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    fn letter(&self, q: usize) -> char {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }
}

/// Symplectic commutation test.
pub fn commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.commutes_with(q)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (0..self.n).try_for_each(|q| write!(f, "{}", self.letter(q)))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        let mut n = 0;
        for (q, c) in s.trim().chars().enumerate() {
            if q >= 63 {
                return Err(Error::invalid("Pauli string too long"));
            }
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                'Z' => z |= 1 << q,
                other => return Err(Error::invalid(format!("unexpected Pauli letter {other:?}"))),
            }
            n = q + 1;
        }
        PauliString::new(n, x, z)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliMode {
    Commuting,
    Anticommuting,
}

impl FromStr for PauliMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "commuting" | "c" => Ok(PauliMode::Commuting),
            "anticommuting" | "nc" => Ok(PauliMode::Anticommuting),
            other => Err(Error::invalid(format!("unknown Pauli mode {other:?}"))),
        }
    }
}

/// Ordered list of distinct strings on a common qubit count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliSet {
    pub mode: PauliMode,
    pub members: Vec<PauliString>,
}

impl PauliSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn num_qubits(&self) -> Option<usize> {
        self.members.first().map(PauliString::num_qubits)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PauliString> {
        self.members.iter()
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Refused(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
    }
    Ok(())
}

/// Irreducible polynomials over GF(2) for degrees 1..=12, with the leading bit.
const FIELD_POLYNOMIALS: [u32; MAX_QUBITS + 1] = [
    0, 0b11, 0b111, 0b1011, 0x13, 0x25, 0x43, 0x83, 0x11d, 0x211, 0x409, 0x805, 0x1053,
];

/// Arithmetic in GF(2^n) with the polynomial basis.
#[derive(Clone, Copy, Debug)]
struct BinaryField {
    degree: usize,
    modulus: u32,
}

impl BinaryField {
    fn new(degree: usize) -> Self {
        Self { degree, modulus: FIELD_POLYNOMIALS[degree] }
    }

    fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let top = 1u32 << self.degree;
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }

    /// Absolute trace `v + v^2 + ... + v^(2^(n-1))`, which lies in GF(2).
    fn trace(&self, v: u32) -> u32 {
        let mut t = 0;
        let mut power = v;
        for _ in 0..self.degree {
            t ^= power;
            power = self.mul(power, power);
        }
        debug_assert!(t <= 1);
        t
    }
}

/// Splits the `4^n - 1` traceless strings into `2^n + 1` commuting classes of `2^n - 1`.
///
/// Class `a` (for each field element `a`) holds `(x, A_a x)` over non-zero `x`,
/// where `A_a[i][j] = Tr(a e_i e_j)` is the symmetric trace form. Symmetry
/// makes each class commute; non-degeneracy of the trace form makes
/// `A_a - A_b` invertible, so classes are disjoint. The last class is the
/// all-`Z` one.
pub fn mub_partition(n: usize) -> Result<Vec<PauliSet>> {
    check_qubits(n)?;
    let field = BinaryField::new(n);
    let size = 1u32 << n;
    let mut classes = Vec::with_capacity(size as usize + 1);
    for a in 0..size {
        // rows of A_a as bitmasks
        let rows: Vec<u64> = (0..n)
            .map(|i| {
                (0..n).fold(0u64, |row, j| {
                    let entry = field.trace(field.mul(a, field.mul(1 << i, 1 << j)));
                    row | u64::from(entry) << j
                })
            })
            .collect();
        let members = (1..u64::from(size))
            .map(|x| {
                let z = rows
                    .iter()
                    .enumerate()
                    .fold(0u64, |z, (i, row)| z | u64::from((row & x).count_ones() & 1) << i);
                PauliString { n, x, z }
            })
            .collect();
        classes.push(PauliSet { mode: PauliMode::Commuting, members });
    }
    classes.push(PauliSet {
        mode: PauliMode::Commuting,
        members: (1..u64::from(size)).map(|z| PauliString { n, x: 0, z }).collect(),
    });
    Ok(classes)
}

/// Draws one string by picking a uniform class and a uniform member within it.
fn draw<R: Rng + ?Sized>(classes: &[PauliSet], rng: &mut R) -> PauliString {
    let class = &classes[rng.gen_range(0..classes.len())];
    class.members[rng.gen_range(0..class.members.len())]
}

fn check_target(n: usize, target: usize) -> Result<()> {
    if target == 0 {
        return Err(Error::invalid("target set size must be at least 1"));
    }
    let available = (1usize << (2 * n)) - 1;
    if target > available {
        return Err(Error::invalid(format!(
            "{target} strings requested but only {available} traceless {n}-qubit Paulis exist"
        )));
    }
    Ok(())
}

/// Rejection loop: keep drawing until `accept` holds for an unselected string.
fn draw_until<R, F>(classes: &[PauliSet], chosen: &[PauliString], rng: &mut R, accept: F) -> Result<PauliString>
where
    R: Rng + ?Sized,
    F: Fn(&PauliString) -> bool,
{
    for _ in 0..MAX_ATTEMPTS_PER_MEMBER {
        let p = draw(classes, rng);
        if !chosen.contains(&p) && accept(&p) {
            return Ok(p);
        }
    }
    Err(Error::SamplingExhausted(MAX_ATTEMPTS_PER_MEMBER))
}

fn all_strings(classes: &[PauliSet]) -> impl Iterator<Item = &PauliString> {
    classes.iter().flat_map(|c| c.members.iter())
}

/// Accepts candidates whose count of `relation` hits with `chosen` is the
/// largest achievable among unselected strings.
fn draw_maximizing<R, F>(classes: &[PauliSet], chosen: &[PauliString], rng: &mut R, relation: F) -> Result<PauliString>
where
    R: Rng + ?Sized,
    F: Fn(&PauliString, &PauliString) -> bool,
{
    let score = |p: &PauliString| chosen.iter().filter(|q| relation(p, q)).count();
    let best = all_strings(classes)
        .filter(|p| !chosen.contains(p))
        .map(score)
        .max()
        .ok_or_else(|| Error::Runtime("no unselected Pauli strings remain".into()))?;
    draw_until(classes, chosen, rng, |p| score(p) == best)
}

/// Randomized mutually commuting set.
///
/// Strict commutation is enforced while it is achievable (any commuting set
/// extends to `2^n - 1` members). Past that, each new member commutes with
/// the largest achievable number of those already chosen.
pub fn sample_commuting_set<R: Rng + ?Sized>(n: usize, target: usize, rng: &mut R) -> Result<PauliSet> {
    check_qubits(n)?;
    check_target(n, target)?;
    let classes = mub_partition(n)?;
    let strict_cap = (1usize << n) - 1;
    let mut chosen: Vec<PauliString> = Vec::with_capacity(target);
    while chosen.len() < target {
        let p = if chosen.len() < strict_cap {
            draw_until(&classes, &chosen, rng, |p| chosen.iter().all(|q| p.commutes_unchecked(q)))?
        } else {
            draw_maximizing(&classes, &chosen, rng, |p, q| p.commutes_unchecked(q))?
        };
        chosen.push(p);
    }
    Ok(PauliSet { mode: PauliMode::Commuting, members: chosen })
}

/// Randomized maximally anticommuting set.
///
/// The first `min(target, 2n + 1)` members pairwise anticommute. A greedy
/// chain can stall below `2n + 1` (e.g. `XI, YI, ZI` on two qubits admits no
/// fourth member); the chain is then discarded and redrawn. Later members
/// maximize their number of anticommutation relations with the accepted set.
pub fn sample_anticommuting_set<R: Rng + ?Sized>(n: usize, target: usize, rng: &mut R) -> Result<PauliSet> {
    check_qubits(n)?;
    check_target(n, target)?;
    let classes = mub_partition(n)?;
    let clique = target.min(2 * n + 1);
    let anticommutes = |p: &PauliString, q: &PauliString| !p.commutes_unchecked(q);

    let mut chosen: Vec<PauliString> = Vec::with_capacity(target);
    let mut restarts = 0;
    while chosen.len() < clique {
        let extendable = all_strings(&classes)
            .any(|p| !chosen.contains(p) && chosen.iter().all(|q| anticommutes(p, q)));
        if !extendable {
            restarts += 1;
            if restarts > MAX_ATTEMPTS_PER_MEMBER {
                return Err(Error::SamplingExhausted(MAX_ATTEMPTS_PER_MEMBER));
            }
            chosen.clear();
            continue;
        }
        let p = draw_until(&classes, &chosen, rng, |p| chosen.iter().all(|q| anticommutes(p, q)))?;
        chosen.push(p);
    }
    while chosen.len() < target {
        let p = draw_maximizing(&classes, &chosen, rng, anticommutes)?;
        chosen.push(p);
    }
    Ok(PauliSet { mode: PauliMode::Anticommuting, members: chosen })
}

pub fn sample_set<R: Rng + ?Sized>(mode: PauliMode, n: usize, target: usize, rng: &mut R) -> Result<PauliSet> {
    match mode {
        PauliMode::Commuting => sample_commuting_set(n, target, rng),
        PauliMode::Anticommuting => sample_anticommuting_set(n, target, rng),
    }
}

/// [`sample_set`] driven by a ChaCha8 stream seeded with `seed`.
pub fn sample_set_seeded(mode: PauliMode, n: usize, target: usize, seed: u64) -> Result<PauliSet> {
    sample_set(mode, n, target, &mut ChaCha8Rng::seed_from_u64(seed))
}
