use serde_json::Value;

use super::{FromStructure, Group, GroupCtx};
use crate::error::Result;

/// `r^m s^f` as `(m, f)` with `f ∈ {0, 1}`.
pub type DElem = (i64, u8);

/// The infinite dihedral group `⟨r, s | s² = e, srs = r⁻¹⟩`.
///
/// `r^m s^f · r^n s^g = r^(m + (-1)^f n) s^(f+g)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Dihedral;

impl Dihedral {
    pub const R: DElem = (1, 0);
    pub const S: DElem = (0, 1);

    /// `S = {r^±1, s}` with `s_o = r`.
    pub fn standard_ctx() -> GroupCtx<Dihedral> {
        GroupCtx::new(Dihedral, vec![(1, 0), (-1, 0), (0, 1)], Self::R).expect("standard generators are valid")
    }
}

impl Group for Dihedral {
    type Elem = DElem;

    fn kind(&self) -> &'static str {
        "dihedral"
    }

    fn structure(&self) -> Value {
        Value::Null
    }

    fn identity(&self) -> DElem {
        (0, 0)
    }

    fn mul(&self, g: &DElem, h: &DElem) -> DElem {
        let n = if g.1 == 1 { -h.0 } else { h.0 };
        (g.0 + n, g.1 ^ h.1)
    }

    fn inv(&self, g: &DElem) -> DElem {
        if g.1 == 1 {
            *g
        } else {
            (-g.0, 0)
        }
    }

    fn is_valid(&self, g: &DElem) -> bool {
        g.1 <= 1
    }
}

impl FromStructure for Dihedral {
    fn from_structure(_structure: &Value) -> Result<Self> {
        Ok(Dihedral)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Side;

    #[test]
    fn relations() {
        let d = Dihedral;
        let (r, s) = (Dihedral::R, Dihedral::S);
        assert_eq!(d.mul(&s, &s), d.identity());
        assert_eq!(d.mul(&d.mul(&s, &r), &s), d.inv(&r));
        assert_eq!(d.inv(&(1, 1)), (1, 1));
        assert_eq!(d.mul(&(1, 1), &(1, 1)), d.identity());
    }

    #[test]
    fn right_translate_by_s() {
        let c = Dihedral::standard_ctx();
        let e = c.set([(2, 0), (1, 1)]);
        let t = c.translate(Side::Right, &Dihedral::S, &e);
        assert_eq!(t, c.set([(2, 1), (1, 0)]));
    }
}
