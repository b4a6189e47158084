use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{q_to_f64, Q};

/// The recurrence constant κ of a window.
///
/// Either a user-supplied rational or `ln(q)/2` for a declared growth base
/// `q > 1`. The logarithm is never rounded: comparisons refine certified
/// rational enclosures until they separate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Kappa {
    Rational {
        #[serde(with = "super::qser")]
        value: Q,
    },
    HalfLn {
        #[serde(with = "super::qser")]
        base: Q,
    },
}

/// Certified enclosure `lo ≤ ln(x) ≤ hi` for rational `x ≥ 1`.
///
/// Reduces `x = 2^e·y` with `y ∈ [1, 2)` and sums the series
/// `ln y = 2·Σ t^(2k+1)/(2k+1)` with `t = (y-1)/(y+1) ≤ 1/3`.
pub fn ln_bounds(x: &Q, terms: usize) -> (Q, Q) {
    assert!(*x >= Q::one(), "ln_bounds needs x >= 1");
    let two = Q::from_integer(BigInt::from(2));
    let mut e = 0i64;
    let mut y = x.clone();
    while y >= two {
        y /= &two;
        e += 1;
    }
    let (l2_lo, l2_hi) = atanh_bounds(&Q::new(BigInt::one(), BigInt::from(3)), terms);
    let t = (&y - Q::one()) / (&y + Q::one());
    let (ly_lo, ly_hi) = atanh_bounds(&t, terms);
    let ef = Q::from_integer(BigInt::from(e));
    (&ef * &l2_lo * &two + ly_lo * &two, &ef * &l2_hi * &two + ly_hi * &two)
}

/// Enclosure of `2·log_q|k| + 2q/(q-1)` for `q > 1`, `k ≠ 0`.
pub fn log_growth_bound(k: i64, q: &Q, terms: usize) -> (Q, Q) {
    assert!(*q > Q::one() && k != 0, "log_growth_bound needs q > 1 and k != 0");
    let two = Q::from_integer(BigInt::from(2));
    let (lk_lo, lk_hi) = ln_bounds(&Q::from_integer(BigInt::from(k.unsigned_abs())), terms);
    let (lq_lo, lq_hi) = ln_bounds(q, terms);
    let c = &two * q / (q - Q::one());
    (&two * lk_lo / lq_hi + &c, two * lk_hi / lq_lo + c)
}

/// Enclosure of `atanh(t)` for `0 ≤ t ≤ 1/3`.
fn atanh_bounds(t: &Q, terms: usize) -> (Q, Q) {
    if t.is_zero() {
        return (Q::zero(), Q::zero());
    }
    let t2 = t * t;
    let mut pow = t.clone();
    let mut sum = Q::zero();
    for k in 0..terms {
        sum += &pow / Q::from_integer(BigInt::from(2 * k + 1));
        pow *= &t2;
    }
    // Remaining terms are at most pow/(2·terms+1)·1/(1-t²).
    let tail = &pow / Q::from_integer(BigInt::from(2 * terms + 1)) / (Q::one() - &t2);
    let hi = &sum + tail;
    (sum, hi)
}

impl Kappa {
    pub fn half_ln(base: Q) -> Self {
        Kappa::HalfLn { base }
    }

    /// Enclosure of κ with `terms` series terms per logarithm.
    pub fn bounds(&self, terms: usize) -> (Q, Q) {
        match self {
            Kappa::Rational { value } => (value.clone(), value.clone()),
            Kappa::HalfLn { base } => {
                let (lo, hi) = ln_bounds(base, terms);
                let two = Q::from_integer(BigInt::from(2));
                (lo / &two, hi / two)
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Kappa::Rational { value } => value.is_positive(),
            Kappa::HalfLn { base } => *base > Q::one(),
        }
    }

    /// Exact comparison of κ against a rational.
    ///
    /// For `HalfLn` the value is irrational whenever the base is a rational
    /// other than 1, so the loop terminates; a hard cap guards against
    /// pathological inputs and reports `None`.
    pub fn cmp_rational(&self, x: &Q) -> Option<Ordering> {
        if let Kappa::Rational { value } = self {
            return Some(value.cmp(x));
        }
        if let Kappa::HalfLn { base } = self {
            if base.is_one() {
                return Some(Q::zero().cmp(x));
            }
        }
        let mut terms = 8;
        while terms <= 4096 {
            let (lo, hi) = self.bounds(terms);
            if lo > *x {
                return Some(Ordering::Greater);
            }
            if hi < *x {
                return Some(Ordering::Less);
            }
            terms *= 2;
        }
        None
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Kappa::Rational { value } => q_to_f64(value),
            Kappa::HalfLn { base } => q_to_f64(base).ln() / 2.0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Kappa::Rational { value } => super::q_to_string(value),
            Kappa::HalfLn { base } => format!("ln({})/2", super::q_to_string(base)),
        }
    }
}
