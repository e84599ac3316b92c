//! Shot count sufficient for a target loss precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotBudgetQuery {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Loss precision, in `(0, 1]`.
    pub epsilon: f64,
    /// Failure probability, in `(0, 1]`.
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotBound {
    pub schema_version: u32,
    pub query: ShotBudgetQuery,
    /// Shots per correlator.
    pub shots: u64,
    /// Per-correlator precision `ε / (2α[N(N−1)+β])`.
    pub eta: f64,
}

impl ShotBudgetQuery {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("N must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be non-negative, got {}", self.beta)));
        }
        for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }

}

/// Fractional bits of the fixed-point logarithm.
const FIXED_BITS: u64 = 256;

/// `atanh(num / den)` scaled by `2^FIXED_BITS`, for `0 ≤ num/den ≤ 1/3`.
fn atanh_fixed(num: &BigInt, den: &BigInt) -> BigInt {
    let mut power = (num << FIXED_BITS) / den;
    let (num2, den2) = (num * num, den * den);
    let mut sum = BigInt::zero();
    let mut j = 1u32;
    while !power.is_zero() {
        sum += &power / j;
        power = power * &num2 / &den2;
        j += 2;
    }
    sum
}

/// `ln(p / q)` scaled by `2^FIXED_BITS`, for `p / q ≥ 1`.
fn ln_fixed(p: &BigInt, q: &BigInt) -> BigInt {
    // p/q = 2^k m with m in [1, 2), so ln = k ln 2 + 2 atanh((m-1)/(m+1))
    let mut k = p.bits().saturating_sub(q.bits());
    if p < &(q << k) {
        k -= 1;
    }
    let scaled = q << k;
    let ln2 = atanh_fixed(&BigInt::one(), &BigInt::from(3)) * 2;
    ln2 * k + atanh_fixed(&(p - &scaled), &(p + &scaled)) * 2
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("validated inputs are finite")
}

/// `S = ⌈8 α² N² [N(N−1)+β]² ln(2N/δ) / ε²⌉`.
///
/// The prefactor is exact in rationals and the logarithm carries 256
/// fractional bits. A product within `1e-9` above an integer is taken to be
/// that integer, so inputs like `δ = 2/e` that can only be represented
/// approximately still give the clean answer.
pub fn shot_bound(q: &ShotBudgetQuery) -> Result<ShotBound> {
    q.validate()?;
    let n = BigRational::from_integer(BigInt::from(q.n));
    let k = &n * (&n - BigRational::one()) + exact(q.beta);
    let (alpha, eps) = (exact(q.alpha), exact(q.epsilon));
    let prefactor = BigRational::from_integer(BigInt::from(8)) * &alpha * &alpha * &n * &n * &k * &k / (&eps * &eps);
    let ratio = BigRational::from_integer(BigInt::from(2)) * &n / exact(q.delta);
    let log = ln_fixed(&ratio.numer().clone(), &ratio.denom().clone());
    let value = log * prefactor.numer() / prefactor.denom();
    let integer = &value >> FIXED_BITS;
    let fraction = &value - (&integer << FIXED_BITS);
    let tolerance = (BigInt::one() << FIXED_BITS) / 1_000_000_000u64;
    let ceiling = if fraction <= tolerance { integer } else { integer + 1 };
    let shots = ceiling
        .to_u64()
        .ok_or_else(|| Error::invalid("shot bound does not fit in 64 bits"))?
        .max(1);
    let nf = q.n as f64;
    Ok(ShotBound {
        schema_version: SCHEMA_VERSION,
        query: *q,
        shots,
        eta: q.epsilon / (2.0 * q.alpha * (nf * (nf - 1.0) + q.beta)),
    })
}
