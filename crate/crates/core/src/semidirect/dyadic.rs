use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::BaseGroup;
use crate::error::{Error, Result};
use crate::group::{FromStructure, Group};
use crate::num::Q;

/// `num · d^exp` in lowest terms: `d ∤ num`, and zero is `(0, 0)`.
///
/// The base `d` is not stored; elements only make sense together with their
/// [`Dyadic`] group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyElem {
    num: BigInt,
    exp: i64,
}

impl DyElem {
    pub fn zero() -> Self {
        Self { num: BigInt::zero(), exp: 0 }
    }

    /// An integer not divisible by `d`, or any integer after [`Dyadic::normalize`].
    pub fn int(n: i64) -> Self {
        Self { num: BigInt::from(n), exp: 0 }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl Serialize for DyElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        match self.num.to_i64() {
            Some(n) => t.serialize_element(&n)?,
            None => t.serialize_element(&self.num.to_string())?,
        }
        t.serialize_element(&self.exp)?;
        t.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumRepr {
    Int(i64),
    Text(String),
}

impl<'de> Deserialize<'de> for DyElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = DyElem;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a pair [numerator, exponent]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<DyElem, A::Error> {
                let num: NumRepr = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let exp: i64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let num = match num {
                    NumRepr::Int(n) => BigInt::from(n),
                    NumRepr::Text(s) => s.parse().map_err(de::Error::custom)?,
                };
                Ok(DyElem { num, exp })
            }
        }
        d.deserialize_tuple(2, V)
    }
}

/// The additive group `ℤ[1/d]` with `φ(h) = d·h`; `Dyadic ⋊ ℤ = BS(1, d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    d: u32,
}

impl Dyadic {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Validation(format!("BS(1,d) needs d >= 2, got {d}")));
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Lowest-terms form of `num · d^exp`.
    pub fn normalize(&self, mut num: BigInt, mut exp: i64) -> DyElem {
        if num.is_zero() {
            return DyElem::zero();
        }
        let d = BigInt::from(self.d);
        loop {
            let (q, r) = num.div_rem(&d);
            if !r.is_zero() {
                break;
            }
            num = q;
            exp += 1;
        }
        DyElem { num, exp }
    }

    /// Exact rational value.
    pub fn value(&self, h: &DyElem) -> Q {
        let p = BigInt::from(self.d).pow(h.exp.unsigned_abs() as u32);
        if h.exp >= 0 {
            Q::from_integer(&h.num * p)
        } else {
            Q::new(h.num.clone(), p)
        }
    }
}

impl Group for Dyadic {
    type Elem = DyElem;

    fn kind(&self) -> &'static str {
        "dyadic"
    }

    fn structure(&self) -> Value {
        json!({ "d": self.d })
    }

    fn identity(&self) -> DyElem {
        DyElem::zero()
    }

    fn mul(&self, g: &DyElem, h: &DyElem) -> DyElem {
        if g.is_zero() {
            return h.clone();
        }
        if h.is_zero() {
            return g.clone();
        }
        let e = g.exp.min(h.exp);
        let d = BigInt::from(self.d);
        let lift = |x: &DyElem| &x.num * d.pow((x.exp - e) as u32);
        self.normalize(lift(g) + lift(h), e)
    }

    fn inv(&self, g: &DyElem) -> DyElem {
        DyElem { num: -&g.num, exp: g.exp }
    }

    fn is_valid(&self, g: &DyElem) -> bool {
        if g.num.is_zero() {
            return g.exp == 0;
        }
        !(&g.num % BigInt::from(self.d)).is_zero()
    }

    fn is_fc(&self) -> bool {
        true
    }
}

impl BaseGroup for Dyadic {
    fn phi_pow(&self, h: &DyElem, m: i64) -> DyElem {
        if h.is_zero() {
            h.clone()
        } else {
            DyElem { num: h.num.clone(), exp: h.exp + m }
        }
    }

    fn semidirect_kind(&self) -> &'static str {
        "bs"
    }
}

impl FromStructure for Dyadic {
    fn from_structure(structure: &Value) -> Result<Self> {
        let d = structure
            .get("d")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Validation("missing d".into()))?;
        Self::new(u32::try_from(d).map_err(|_| Error::Validation("d too large".into()))?)
    }
}
