use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{sum_tree, Q};

/// An element of the multiquadratic field `Q(√2, √3, √5, …)`.
///
/// Stored as `Σ c_f·√f` over squarefree radicands `f ≥ 1`. Distinct square
/// roots of squarefree integers are linearly independent over the rationals,
/// so this representation is canonical and `==` is exact equality of reals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QSqrt {
    terms: BTreeMap<BigUint, Q>,
}

/// Split `n = s²·f` with `f` squarefree.
pub fn squarefree_split(n: &BigUint) -> (BigUint, BigUint) {
    assert!(!n.is_zero(), "squarefree_split(0)");
    if let Some(m) = n.to_u64() {
        let (s, f) = squarefree_split_u64(m);
        return (BigUint::from(s), BigUint::from(f));
    }
    // Large inputs only arise as products of already-squarefree parts, which
    // the multiplication path handles via gcds; fall back to trial division.
    let mut rest = n.clone();
    let mut s = BigUint::one();
    let mut f = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &p;
        }
        if e % 2 == 1 {
            f *= &p;
        }
        p += 1u32;
    }
    f *= rest;
    (s, f)
}

fn squarefree_split_u64(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut f = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            f *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (s, f * n)
}

impl QSqrt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(Q::one())
    }

    pub fn rational(c: Q) -> Self {
        let mut out = Self::zero();
        out.add_term(BigUint::one(), c);
        out
    }

    /// `√m` for a nonnegative integer `m`.
    pub fn sqrt(m: &BigUint) -> Self {
        if m.is_zero() {
            return Self::zero();
        }
        let (s, f) = squarefree_split(m);
        let mut out = Self::zero();
        out.add_term(f, Q::from_integer(BigInt::from(s)));
        out
    }

    pub fn sqrt_u64(m: u64) -> Self {
        Self::sqrt(&BigUint::from(m))
    }

    /// `1/√m`, which equals `√m/m`.
    pub fn inv_sqrt(m: u64) -> Self {
        assert!(m > 0, "inv_sqrt(0)");
        Self::sqrt_u64(m).scale(&Q::new(BigInt::one(), BigInt::from(m)))
    }

    fn add_term(&mut self, f: BigUint, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(f) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(f, v)| (f.clone(), v * c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a rational, when it has no irrational part.
    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    /// Number of distinct radicands, including the rational part.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Q)> {
        self.terms.iter()
    }

    /// Integer bounds `lo ≤ self·2^bits ≤ hi`.
    fn fixed_point_bounds(&self, bits: u64) -> (BigInt, BigInt) {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        let scale = BigUint::one() << (2 * bits);
        for (f, c) in &self.terms {
            let n = c.numer().magnitude();
            let d = c.denom().magnitude();
            // |c|·√f·2^bits = √(f·n²·4^bits)/d.
            let radicand = f * n * n * &scale;
            let s = radicand.sqrt();
            let exact = &s * &s == radicand;
            let t_lo = &s / d;
            let upper_num = if exact { s.clone() } else { &s + 1u32 };
            let (q_hi, r_hi) = upper_num.div_rem(d);
            let t_hi = if r_hi.is_zero() { q_hi } else { q_hi + 1u32 };
            let (t_lo, t_hi) = (BigInt::from(t_lo), BigInt::from(t_hi));
            if c.is_negative() {
                lo -= &t_hi;
                hi -= &t_lo;
            } else {
                lo += &t_lo;
                hi += &t_hi;
            }
        }
        (lo, hi)
    }

    /// Certified rational enclosure `lo ≤ self ≤ hi` of width at most
    /// `(#terms + 1)·2^{-bits}`.
    pub fn bounds(&self, bits: u64) -> (Q, Q) {
        let (lo, hi) = self.fixed_point_bounds(bits);
        let den = BigInt::one() << bits;
        (Q::new(lo, den.clone()), Q::new(hi, den))
    }

    /// Exact sign, decided by refining fixed-point enclosures.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if let Some(r) = self.as_rational() {
            return r.cmp(&Q::zero());
        }
        let mut bits = 64u64;
        loop {
            let (lo, hi) = self.fixed_point_bounds(bits);
            if lo.sign() == Sign::Plus {
                return Ordering::Greater;
            }
            if hi.sign() == Sign::Minus {
                return Ordering::Less;
            }
            // A nonzero element of the field is a nonzero real number, so
            // the enclosure eventually excludes zero.
            bits *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(f, c)| super::q_to_f64(c) * f.to_f64().unwrap_or(f64::MAX).sqrt())
            .sum()
    }

    pub fn cmp_rational(&self, r: &Q) -> Ordering {
        (self - &QSqrt::rational(r.clone())).signum()
    }
}

impl Ord for QSqrt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl PartialOrd for QSqrt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Q> for QSqrt {
    fn from(c: Q) -> Self {
        Self::rational(c)
    }
}

impl<'a> Add<&'a QSqrt> for &'a QSqrt {
    type Output = QSqrt;
    fn add(self, rhs: &QSqrt) -> QSqrt {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&QSqrt> for QSqrt {
    fn add_assign(&mut self, rhs: &QSqrt) {
        for (f, c) in &rhs.terms {
            self.add_term(f.clone(), c.clone());
        }
    }
}

/// Groups coefficients by radicand and sums each group with [`sum_tree`].
impl Sum for QSqrt {
    fn sum<I: Iterator<Item = QSqrt>>(iter: I) -> QSqrt {
        let mut groups: BTreeMap<BigUint, Vec<Q>> = BTreeMap::new();
        for x in iter {
            for (f, c) in x.terms {
                groups.entry(f).or_default().push(c);
            }
        }
        let mut out = QSqrt::zero();
        for (f, cs) in groups {
            out.add_term(f, sum_tree(cs));
        }
        out
    }
}

impl Add for QSqrt {
    type Output = QSqrt;
    fn add(mut self, rhs: QSqrt) -> QSqrt {
        self += &rhs;
        self
    }
}

impl Neg for &QSqrt {
    type Output = QSqrt;
    fn neg(self) -> QSqrt {
        QSqrt {
            terms: self.terms.iter().map(|(f, c)| (f.clone(), -c)).collect(),
        }
    }
}

impl Neg for QSqrt {
    type Output = QSqrt;
    fn neg(self) -> QSqrt {
        -&self
    }
}

impl<'a> Sub<&'a QSqrt> for &'a QSqrt {
    type Output = QSqrt;
    fn sub(self, rhs: &QSqrt) -> QSqrt {
        let mut out = self.clone();
        out += &(-rhs);
        out
    }
}

impl Sub for QSqrt {
    type Output = QSqrt;
    fn sub(self, rhs: QSqrt) -> QSqrt {
        &self - &rhs
    }
}

impl<'a> Mul<&'a QSqrt> for &'a QSqrt {
    type Output = QSqrt;
    fn mul(self, rhs: &QSqrt) -> QSqrt {
        let mut out = QSqrt::zero();
        for (f, c) in &self.terms {
            for (g, d) in &rhs.terms {
                // √f·√g = h·√(fg/h²) with h = gcd(f, g); fg/h² stays squarefree.
                let h = f.gcd(g);
                let rad = (f / &h) * (g / &h);
                out.add_term(rad, c * d * Q::from_integer(BigInt::from(h)));
            }
        }
        out
    }
}

impl Mul for QSqrt {
    type Output = QSqrt;
    fn mul(self, rhs: QSqrt) -> QSqrt {
        &self * &rhs
    }
}

impl fmt::Display for QSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (rad, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let cs = super::q_to_string(c);
            if rad.is_one() {
                write!(f, "{cs}")?;
            } else {
                write!(f, "{cs}*sqrt({rad})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSqrt({self})")
    }
}

impl serde::Serialize for QSqrt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
