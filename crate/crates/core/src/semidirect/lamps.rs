use serde_json::{json, Value};

use super::BaseGroup;
use crate::error::{Error, Result};
use crate::group::{Abelian, FromStructure, Group};

/// Finitely supported `η: ℤ → A`, as `(position, value)` pairs sorted by
/// position with nonzero values.
pub type LElem = Vec<(i64, Vec<i64>)>;

/// `⊕_ℤ A` with the shift `φ(η)(k) = η(k+1)`; `Lamps ⋊ ℤ = A ≀ ℤ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lamps {
    lamp: Abelian,
}

impl Lamps {
    pub fn new(lamp: Abelian) -> Self {
        Self { lamp }
    }

    pub fn lamp(&self) -> &Abelian {
        &self.lamp
    }

    /// `δ_p(v)`: value `v` at position `p`. `v` must already be reduced.
    pub fn delta(p: i64, v: Vec<i64>) -> LElem {
        if v.iter().all(|&c| c == 0) {
            Vec::new()
        } else {
            vec![(p, v)]
        }
    }

    /// Build from `(position, value)` pairs in any order.
    pub fn from_pairs(&self, pairs: impl IntoIterator<Item = (i64, Vec<i64>)>) -> LElem {
        let mut out = Vec::new();
        for (p, v) in pairs {
            out = self.mul(&out, &Self::delta(p, self.reduced(v)));
        }
        out
    }

    fn reduced(&self, mut v: Vec<i64>) -> Vec<i64> {
        self.lamp.reduce(&mut v);
        v
    }

    /// Value at position `p`.
    pub fn at(&self, eta: &LElem, p: i64) -> Vec<i64> {
        match eta.binary_search_by_key(&p, |(q, _)| *q) {
            Ok(i) => eta[i].1.clone(),
            Err(_) => self.lamp.identity(),
        }
    }
}

impl Group for Lamps {
    type Elem = LElem;

    fn kind(&self) -> &'static str {
        "lamps"
    }

    fn structure(&self) -> Value {
        json!({ "lamp": self.lamp.structure() })
    }

    fn identity(&self) -> LElem {
        Vec::new()
    }

    fn mul(&self, g: &LElem, h: &LElem) -> LElem {
        let mut out = Vec::with_capacity(g.len() + h.len());
        let (mut i, mut j) = (0, 0);
        while i < g.len() || j < h.len() {
            let pick = match (g.get(i), h.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    i += 1;
                    j += 1;
                    (a.0, self.lamp.mul(&a.1, &b.1))
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    i += 1;
                    a.clone()
                }
                (Some(a), None) => {
                    i += 1;
                    a.clone()
                }
                (_, Some(b)) => {
                    j += 1;
                    b.clone()
                }
                (None, None) => unreachable!(),
            };
            if pick.1.iter().any(|&c| c != 0) {
                out.push(pick);
            }
        }
        out
    }

    fn inv(&self, g: &LElem) -> LElem {
        g.iter().map(|(p, v)| (*p, self.lamp.inv(v))).collect()
    }

    fn is_valid(&self, g: &LElem) -> bool {
        g.windows(2).all(|w| w[0].0 < w[1].0)
            && g.iter().all(|(_, v)| self.lamp.is_valid(v) && v.iter().any(|&c| c != 0))
    }

    fn is_fc(&self) -> bool {
        true
    }
}

impl BaseGroup for Lamps {
    fn phi_pow(&self, h: &LElem, m: i64) -> LElem {
        h.iter().map(|(p, v)| (p - m, v.clone())).collect()
    }

    fn semidirect_kind(&self) -> &'static str {
        "wreath"
    }
}

impl FromStructure for Lamps {
    fn from_structure(structure: &Value) -> Result<Self> {
        let lamp = structure.get("lamp").ok_or_else(|| Error::Validation("missing lamp".into()))?;
        Ok(Self::new(Abelian::from_structure(lamp)?))
    }
}
