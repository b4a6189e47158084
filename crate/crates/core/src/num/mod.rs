//! Exact scalars: big rationals, multiquadratic surds and certified logarithms.

mod kappa;
mod qsqrt;

pub use kappa::{ln_bounds, log_growth_bound, Kappa};
pub use qsqrt::QSqrt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational used for every cardinality ratio.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Ratio of two cardinalities.
pub fn ratio(num: usize, den: usize) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Rational harmonic number H(m).
pub fn harmonic(m: u64) -> Q {
    sum_tree((1..=m).map(|k| Q::new(BigInt::one(), BigInt::from(k))).collect())
}

/// Exact sum by pairwise splitting; fractions stay unreduced until the end,
/// which keeps long sums near-linear instead of quadratic.
pub fn sum_tree(terms: Vec<Q>) -> Q {
    fn go(t: &[Q]) -> (BigInt, BigInt) {
        match t {
            [] => (BigInt::zero(), BigInt::one()),
            [x] => (x.numer().clone(), x.denom().clone()),
            _ => {
                let (l, r) = t.split_at(t.len() / 2);
                let ((a, b), (c, d)) = (go(l), go(r));
                if b == d {
                    (a + c, b)
                } else {
                    (a * &d + c * &b, b * d)
                }
            }
        }
    }
    let (n, d) = go(&terms);
    Q::new(n, d)
}

pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // Ratios of huge integers: shift both down before dividing.
        let n = x.numer();
        let d = x.denom();
        let shift = n.bits().max(d.bits()).saturating_sub(900);
        let n = (n.abs() >> shift).to_f64().unwrap_or(f64::MAX);
        let d = (d >> shift).to_f64().unwrap_or(f64::MAX);
        if x.is_negative() {
            -n / d
        } else {
            n / d
        }
    })
}

/// Render a rational as `p/q` (or `p` when integral).
pub fn q_to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_from_str(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|e| format!("bad rational {s:?}: {e}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(format!("bad rational {s:?}: zero denominator"));
            }
            Ok(Q::new(parse(n)?, d))
        }
        None => Ok(Q::from_integer(parse(s)?)),
    }
}

/// Serde adapter storing rationals as `"p/q"` strings.
pub mod qser {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q_to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => q_from_str(&s).map_err(D::Error::custom),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(qi(i)),
                None => Err(D::Error::custom("rational must be an integer or a \"p/q\" string")),
            },
            _ => Err(D::Error::custom("rational must be an integer or a \"p/q\" string")),
        }
    }
}

/// Serde adapter for `Vec<Q>`.
pub mod qvec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "super::qser")] Q);

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = xs.iter().map(q_to_string).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<W>::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}

/// Serde adapter for `Option<Q>`.
pub mod qopt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "super::qser")] Q);

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        x.as_ref().map(q_to_string).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

/// Certified enclosure of `√x` for rational `x ≥ 0`, of width at most
/// `2^{-bits}`.
pub fn sqrt_bounds(x: &Q, bits: u64) -> (Q, Q) {
    assert!(!x.is_negative(), "sqrt_bounds of a negative number");
    if x.is_zero() {
        return (Q::zero(), Q::zero());
    }
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let radicand = (n * d) << (2 * bits);
    let s = radicand.sqrt();
    let exact = &s * &s == radicand;
    let den = BigInt::from(d.clone()) << bits;
    let lo = Q::new(BigInt::from(s.clone()), den.clone());
    let hi = if exact { lo.clone() } else { Q::new(BigInt::from(s + 1u32), den) };
    (lo, hi)
}

/// Largest `s` with `s*s <= n` for machine integers.
pub fn isqrt_u64(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s.checked_mul(s).is_none_or(|v| v > n) {
        s -= 1;
    }
    while (s + 1).checked_mul(s + 1).is_some_and(|v| v <= n) {
        s += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings_round_trip() {
        for s in ["7/6", "-3/4", "5", "0"] {
            assert_eq!(q_to_string(&q_from_str(s).unwrap()), s);
        }
        assert_eq!(q_to_string(&q_from_str("14/12").unwrap()), "7/6");
        assert!(q_from_str("1/0").is_err());
    }

    #[test]
    fn tree_sum_matches_fold() {
        let terms: Vec<Q> = (1..=40).map(|k| q(if k % 3 == 0 { -k } else { k }, k * k + 1)).collect();
        let fold = terms.iter().fold(Q::zero(), |a, b| a + b);
        assert_eq!(sum_tree(terms), fold);
        assert_eq!(sum_tree(Vec::new()), qi(0));
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic(3), q(11, 6));
        assert_eq!(harmonic(0), qi(0));
    }

    #[test]
    fn isqrt_edges() {
        for n in [0u64, 1, 2, 3, 4, 15, 16, 17, u64::MAX] {
            let s = isqrt_u64(n);
            assert!(s as u128 * s as u128 <= n as u128);
            assert!((s as u128 + 1) * (s as u128 + 1) > n as u128);
        }
    }
}
