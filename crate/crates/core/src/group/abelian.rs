use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{FromStructure, Group, GroupCtx};
use crate::error::{Error, Result};

/// A finitely generated abelian group `ℤ/m₁ × … × ℤ/m_d`, where a modulus
/// of 0 denotes a copy of `ℤ`. Finite coordinates are kept in `[0, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abelian {
    moduli: Vec<u64>,
}

impl Abelian {
    pub fn new(moduli: Vec<u64>) -> Self {
        Self { moduli }
    }

    /// `ℤ^d`.
    pub fn lattice(d: usize) -> Self {
        Self::new(vec![0; d])
    }

    /// `ℤ/m`.
    pub fn cyclic(m: u64) -> Self {
        Self::new(vec![m])
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn is_finite(&self) -> bool {
        self.moduli.iter().all(|&m| m > 0)
    }

    /// Order of the group, for finite groups.
    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.moduli.iter().product())
    }

    pub fn reduce(&self, v: &mut [i64]) {
        for (x, &m) in v.iter_mut().zip(&self.moduli) {
            if m > 0 {
                *x = x.rem_euclid(m as i64);
            }
        }
    }

    /// Standard generators `±e_i` (deduplicated for `ℤ/2`).
    pub fn standard_gens(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = Vec::new();
        for i in 0..self.rank() {
            if self.moduli[i] == 1 {
                continue;
            }
            for sign in [1, -1] {
                let mut v = vec![0; self.rank()];
                v[i] = sign;
                self.reduce(&mut v);
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Context with the standard generators and `s_o = e_1`.
    pub fn standard_ctx(&self) -> Result<GroupCtx<Abelian>> {
        let mut s_o = vec![0; self.rank()];
        if s_o.is_empty() {
            return Err(Error::Validation("trivial group has no element of infinite order".into()));
        }
        s_o[0] = 1;
        GroupCtx::new(self.clone(), self.standard_gens(), s_o)
    }

    /// All elements, for finite groups.
    pub fn elements(&self) -> Option<Vec<Vec<i64>>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = vec![vec![]];
        for &m in &self.moduli {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..m as i64).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        Some(out)
    }

    /// Følner box: the whole group on finite coordinates, `[0, side)` on
    /// infinite ones.
    pub fn folner_box(&self, side: i64) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for &m in &self.moduli {
            let range = if m > 0 { 0..m as i64 } else { 0..side };
            out = out
                .into_iter()
                .flat_map(|v| {
                    range.clone().map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

impl Group for Abelian {
    type Elem = Vec<i64>;

    fn kind(&self) -> &'static str {
        "abelian"
    }

    fn structure(&self) -> Value {
        json!({ "moduli": self.moduli })
    }

    fn identity(&self) -> Vec<i64> {
        vec![0; self.rank()]
    }

    fn mul(&self, g: &Vec<i64>, h: &Vec<i64>) -> Vec<i64> {
        let mut v: Vec<i64> = g.iter().zip(h).map(|(a, b)| a + b).collect();
        self.reduce(&mut v);
        v
    }

    fn inv(&self, g: &Vec<i64>) -> Vec<i64> {
        let mut v: Vec<i64> = g.iter().map(|a| -a).collect();
        self.reduce(&mut v);
        v
    }

    fn is_valid(&self, g: &Vec<i64>) -> bool {
        g.len() == self.rank() && g.iter().zip(&self.moduli).all(|(&x, &m)| m == 0 || (0 <= x && x < m as i64))
    }

    fn level(&self, g: &Vec<i64>) -> Option<i64> {
        (self.moduli.first() == Some(&0)).then(|| g[0])
    }

    fn is_fc(&self) -> bool {
        true
    }
}

impl FromStructure for Abelian {
    fn from_structure(structure: &Value) -> Result<Self> {
        Ok(serde_json::from_value(structure.clone())?)
    }
}
