use serde_json::Value;

use super::{FromStructure, Group, GroupCtx};
use crate::error::Result;

/// Coordinates `(a, b, c)` of `x^a y^b z^c`.
pub type HElem = [i64; 3];

/// The integer Heisenberg group with `[y, x] = z`, in the normal form
/// `x^a y^b z^c`. Multiplication:
/// `(a,b,c)·(a',b',c') = (a+a', b+b', c+c'+b·a')`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Heisenberg;

impl Heisenberg {
    pub const X: HElem = [1, 0, 0];
    pub const Y: HElem = [0, 1, 0];
    pub const Z: HElem = [0, 0, 1];

    /// `S = {x^±1, y^±1}` with `s_o = x`.
    pub fn standard_ctx() -> GroupCtx<Heisenberg> {
        GroupCtx::new(Heisenberg, vec![[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]], Self::X)
            .expect("standard generators are valid")
    }
}

impl Group for Heisenberg {
    type Elem = HElem;

    fn kind(&self) -> &'static str {
        "heisenberg"
    }

    fn structure(&self) -> Value {
        Value::Null
    }

    fn identity(&self) -> HElem {
        [0, 0, 0]
    }

    fn mul(&self, g: &HElem, h: &HElem) -> HElem {
        [g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[1] * h[0]]
    }

    fn inv(&self, g: &HElem) -> HElem {
        [-g[0], -g[1], -g[2] + g[0] * g[1]]
    }

    fn is_valid(&self, _g: &HElem) -> bool {
        true
    }

    fn level(&self, g: &HElem) -> Option<i64> {
        Some(g[0])
    }
}

impl FromStructure for Heisenberg {
    fn from_structure(_structure: &Value) -> Result<Self> {
        Ok(Heisenberg)
    }
}
