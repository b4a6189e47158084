use serde_json::{json, Value};

use super::{FromStructure, Group};
use crate::error::{Error, Result};

/// Direct product `A × B` with componentwise multiplication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectProduct<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: Group, B: Group> DirectProduct<A, B> {
    pub fn new(left: A, right: B) -> Self {
        Self { left, right }
    }
}

impl<A: Group, B: Group> Group for DirectProduct<A, B> {
    type Elem = (A::Elem, B::Elem);

    fn kind(&self) -> &'static str {
        "direct_product"
    }

    fn structure(&self) -> Value {
        json!({ "left": self.left.descriptor(), "right": self.right.descriptor() })
    }

    fn identity(&self) -> Self::Elem {
        (self.left.identity(), self.right.identity())
    }

    fn mul(&self, g: &Self::Elem, h: &Self::Elem) -> Self::Elem {
        (self.left.mul(&g.0, &h.0), self.right.mul(&g.1, &h.1))
    }

    fn inv(&self, g: &Self::Elem) -> Self::Elem {
        (self.left.inv(&g.0), self.right.inv(&g.1))
    }

    fn is_valid(&self, g: &Self::Elem) -> bool {
        self.left.is_valid(&g.0) && self.right.is_valid(&g.1)
    }

    fn level(&self, g: &Self::Elem) -> Option<i64> {
        self.left.level(&g.0)
    }

    fn is_fc(&self) -> bool {
        self.left.is_fc() && self.right.is_fc()
    }
}

impl<A: FromStructure, B: FromStructure> FromStructure for DirectProduct<A, B> {
    fn from_structure(structure: &Value) -> Result<Self> {
        let part = |key: &str| -> Result<Value> {
            let d = structure.get(key).ok_or_else(|| Error::Validation(format!("direct_product missing {key}")))?;
            Ok(d.get("structure").cloned().unwrap_or(Value::Null))
        };
        Ok(Self::new(A::from_structure(&part("left")?)?, B::from_structure(&part("right")?)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Abelian, Dihedral, GroupCtx};

    #[test]
    fn dinf_times_z2() {
        let g = DirectProduct::new(Dihedral, Abelian::cyclic(2));
        let a = ((1, 1), vec![1]);
        assert_eq!(g.mul(&a, &a), g.identity());
        assert!(!g.is_fc());
        let ctx = GroupCtx::new(
            g.clone(),
            vec![((1, 0), vec![0]), ((-1, 0), vec![0]), ((0, 1), vec![0]), ((0, 0), vec![1])],
            ((1, 0), vec![0]),
        )
        .unwrap();
        let back = GroupCtx::<DirectProduct<Dihedral, Abelian>>::from_json(&ctx.to_json()).unwrap();
        assert_eq!(back.group(), &g);
    }
}
