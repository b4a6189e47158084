//! `H ⋊_φ ℤ` with `s_o h s_o⁻¹ = φ(h)`, the tower construction of left
//! schemes, and the lamplighter and Baumslag–Solitar instances.

mod dyadic;
mod families;
mod lamps;
mod tower;

pub use dyadic::{DyElem, Dyadic};
pub use families::{
    bs_ctx, bs_rn, bs_schedule, bs_tower, profile_a, profile_q, wreath_ctx, wreath_k, wreath_rn, wreath_tower, Profile,
    SIZE_LIMIT,
};
pub use lamps::{LElem, Lamps};
pub use tower::{
    phi_power, phi_power_within_bound, tower_build, tower_check, tower_window, EpsFamily, TowerInput,
};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{FromStructure, Group, GroupCtx};

/// A group `H` with an automorphism `φ`.
pub trait BaseGroup: Group {
    /// `φ^m(h)` for any integer `m`.
    fn phi_pow(&self, h: &Self::Elem, m: i64) -> Self::Elem;

    /// Kind tag of `H ⋊_φ ℤ`.
    fn semidirect_kind(&self) -> &'static str;
}

/// `H ⋊_φ ℤ` with elements `(h, a)` standing for `h·s_o^a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semidirect<B> {
    base: B,
}

impl<B: BaseGroup> Semidirect<B> {
    pub fn new(base: B) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn embed(&self, h: B::Elem) -> (B::Elem, i64) {
        (h, 0)
    }

    pub fn s_o(&self) -> (B::Elem, i64) {
        (self.base.identity(), 1)
    }

    /// Context with `S = T ∪ T⁻¹ ∪ {s_o^±1}`.
    pub fn ctx(self, t: &[B::Elem]) -> Result<GroupCtx<Self>> {
        let mut gens = Vec::new();
        for h in t {
            if !self.base.is_valid(h) {
                return Err(Error::Validation(format!("{h:?} is not a base element")));
            }
            gens.push((h.clone(), 0));
            gens.push((self.base.inv(h), 0));
        }
        let s_o = self.s_o();
        gens.push(s_o.clone());
        gens.push(self.inv(&s_o));
        GroupCtx::new(self, gens, s_o)
    }
}

impl<B: BaseGroup> Group for Semidirect<B> {
    type Elem = (B::Elem, i64);

    fn kind(&self) -> &'static str {
        self.base.semidirect_kind()
    }

    fn structure(&self) -> Value {
        json!({ "base": self.base.structure() })
    }

    fn identity(&self) -> Self::Elem {
        (self.base.identity(), 0)
    }

    fn mul(&self, g: &Self::Elem, h: &Self::Elem) -> Self::Elem {
        let twisted = self.base.phi_pow(&h.0, g.1);
        (self.base.mul(&g.0, &twisted), g.1 + h.1)
    }

    fn inv(&self, g: &Self::Elem) -> Self::Elem {
        (self.base.phi_pow(&self.base.inv(&g.0), -g.1), -g.1)
    }

    fn is_valid(&self, g: &Self::Elem) -> bool {
        self.base.is_valid(&g.0)
    }

    fn level(&self, g: &Self::Elem) -> Option<i64> {
        Some(g.1)
    }
}

impl<B: BaseGroup + FromStructure> FromStructure for Semidirect<B> {
    fn from_structure(structure: &Value) -> Result<Self> {
        let base = structure.get("base").ok_or_else(|| Error::Validation("missing base".into()))?;
        Ok(Self::new(B::from_structure(base)?))
    }
}
