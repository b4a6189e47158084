use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::group::{FromStructure, Group, GroupCtx};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPresentation {
    r: usize,
    s: usize,
    comm: Vec<(usize, usize, Vec<i64>)>,
}

/// Malcev data of a torsion-free 2-step nilpotent group.
///
/// Basis: `r` non-central elements `u_0, …, u_{r-1}` followed by `s` central
/// ones. `comm(i, j)` is the central coordinate vector of `[u_i, u_j]` with
/// `[u, v] = u⁻¹v⁻¹uv`. Normal form: `u_0^{a_0}⋯u_{r-1}^{a_{r-1}}·z^{c}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPresentation", into = "RawPresentation")]
pub struct MalcevPresentation {
    r: usize,
    s: usize,
    omega: Vec<Vec<Vec<i64>>>,
}

impl From<MalcevPresentation> for RawPresentation {
    fn from(p: MalcevPresentation) -> Self {
        let mut comm = Vec::new();
        for i in 0..p.r {
            for j in 0..i {
                if p.omega[i][j].iter().any(|&c| c != 0) {
                    comm.push((i, j, p.omega[i][j].clone()));
                }
            }
        }
        RawPresentation { r: p.r, s: p.s, comm }
    }
}

impl TryFrom<RawPresentation> for MalcevPresentation {
    type Error = Error;

    fn try_from(raw: RawPresentation) -> Result<Self> {
        let (r, s) = (raw.r, raw.s);
        let mut omega: Vec<Vec<Option<Vec<i64>>>> = vec![vec![None; r]; r];
        for (i, j, v) in raw.comm {
            if i >= r || j >= r {
                return Err(Error::Validation(format!("comm entry ({i},{j}) refers to a central or missing basis element")));
            }
            if v.len() != s {
                return Err(Error::Validation(format!("comm entry ({i},{j}) has length {} but s = {s}", v.len())));
            }
            if i == j && v.iter().any(|&c| c != 0) {
                return Err(Error::Validation(format!("comm entry ({i},{i}) must vanish")));
            }
            let neg: Vec<i64> = v.iter().map(|c| -c).collect();
            for (a, b, w) in [(i, j, v), (j, i, neg)] {
                match &omega[a][b] {
                    Some(old) if *old != w => {
                        return Err(Error::Validation(format!("comm is not antisymmetric at ({a},{b})")));
                    }
                    _ => omega[a][b] = Some(w),
                }
            }
        }
        let omega = omega
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.unwrap_or_else(|| vec![0; s])).collect())
            .collect();
        Ok(Self { r, s, omega })
    }
}

impl MalcevPresentation {
    /// Build from a full antisymmetric table `omega[i][j]`.
    pub fn from_table(r: usize, s: usize, omega: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        let mut comm = Vec::new();
        if omega.len() != r || omega.iter().any(|row| row.len() != r) {
            return Err(Error::Validation("commutator table must be r×r".into()));
        }
        for (i, row) in omega.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                comm.push((i, j, v));
            }
        }
        RawPresentation { r, s, comm }.try_into()
    }

    pub fn from_entries(r: usize, s: usize, comm: Vec<(usize, usize, Vec<i64>)>) -> Result<Self> {
        RawPresentation { r, s, comm }.try_into()
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        Ok(serde_json::from_value(v.clone())?)
    }

    /// `H_3(ℤ)`: basis `x, y, z` with `[y, x] = z^mu`.
    pub fn heisenberg(mu: i64) -> Self {
        Self::from_entries(2, 1, vec![(1, 0, vec![mu])]).expect("valid")
    }

    /// `H_5(ℤ)`: basis `x1, y1, x2, y2, z` with `[y1,x1] = [y2,x2] = z`.
    pub fn heisenberg5() -> Self {
        Self::from_entries(4, 1, vec![(1, 0, vec![1]), (3, 2, vec![1])]).expect("valid")
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.r + self.s
    }

    /// Central coordinates of `[u_i, u_j]`.
    pub fn comm(&self, i: usize, j: usize) -> &[i64] {
        &self.omega[i][j]
    }

    pub fn is_abelian(&self) -> bool {
        self.omega.iter().flatten().flatten().all(|&c| c == 0)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// The group defined by a [`MalcevPresentation`], with elements as
/// coordinate vectors `(a_0..a_{r-1} | c_0..c_{s-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nil2Group {
    pres: MalcevPresentation,
}

impl Nil2Group {
    pub fn new(pres: MalcevPresentation) -> Self {
        Self { pres }
    }

    pub fn presentation(&self) -> &MalcevPresentation {
        &self.pres
    }

    /// Non-central basis element `u_i`.
    pub fn basis(&self, i: usize) -> Vec<i64> {
        let mut g = vec![0; self.pres.dim()];
        g[i] = 1;
        g
    }

    /// Central basis element `k`.
    pub fn central(&self, k: usize) -> Vec<i64> {
        self.basis(self.pres.r + k)
    }

    /// Every basis element and its inverse, with `s_o = u_0`.
    pub fn standard_ctx(self) -> Result<GroupCtx<Nil2Group>> {
        if self.pres.r == 0 {
            return Err(Error::Validation("need at least one non-central basis element".into()));
        }
        let mut gens = Vec::new();
        for i in 0..self.pres.dim() {
            let g = self.basis(i);
            gens.push(self.inv(&g));
            gens.push(g);
        }
        let s_o = self.basis(0);
        GroupCtx::new(self, gens, s_o)
    }

    /// `[g, h] = g⁻¹h⁻¹gh`.
    pub fn commutator(&self, g: &[i64], h: &[i64]) -> Vec<i64> {
        let (g, h) = (g.to_vec(), h.to_vec());
        let gi = self.inv(&g);
        let hi = self.inv(&h);
        self.mul(&self.mul(&gi, &hi), &self.mul(&g, &h))
    }

    fn add_cross(&self, out: &mut [i64], a: &[i64], b: &[i64], sign: i64) {
        let r = self.pres.r;
        for i in 0..r {
            if a[i] == 0 {
                continue;
            }
            for j in 0..i {
                let f = a[i] * b[j];
                if f != 0 {
                    for (k, w) in self.pres.omega[i][j].iter().enumerate() {
                        out[r + k] += sign * f * w;
                    }
                }
            }
        }
    }
}

impl Group for Nil2Group {
    type Elem = Vec<i64>;

    fn kind(&self) -> &'static str {
        "nil2"
    }

    fn structure(&self) -> Value {
        self.pres.to_json()
    }

    fn identity(&self) -> Vec<i64> {
        vec![0; self.pres.dim()]
    }

    /// Collect `h`'s non-central letters leftwards past `g`'s using
    /// `uv = vu[u, v]`.
    fn mul(&self, g: &Vec<i64>, h: &Vec<i64>) -> Vec<i64> {
        let mut out: Vec<i64> = g.iter().zip(h).map(|(a, b)| a + b).collect();
        self.add_cross(&mut out, g, h, 1);
        out
    }

    fn inv(&self, g: &Vec<i64>) -> Vec<i64> {
        let mut out: Vec<i64> = g.iter().map(|a| -a).collect();
        self.add_cross(&mut out, g, g, 1);
        out
    }

    fn is_valid(&self, g: &Vec<i64>) -> bool {
        g.len() == self.pres.dim()
    }

    fn level(&self, g: &Vec<i64>) -> Option<i64> {
        g.first().copied()
    }
}

impl FromStructure for Nil2Group {
    fn from_structure(structure: &Value) -> Result<Self> {
        Ok(Self::new(MalcevPresentation::from_json(structure)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Heisenberg;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_explicit_heisenberg() {
        let n = Nil2Group::new(MalcevPresentation::heisenberg(1));
        let h = Heisenberg;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let g: [i64; 3] = [rng.random_range(-50..50), rng.random_range(-50..50), rng.random_range(-50..50)];
            let k: [i64; 3] = [rng.random_range(-50..50), rng.random_range(-50..50), rng.random_range(-50..50)];
            assert_eq!(n.mul(&g.to_vec(), &k.to_vec()), h.mul(&g, &k).to_vec());
            assert_eq!(n.inv(&g.to_vec()), h.inv(&g).to_vec());
        }
    }

    #[test]
    fn commutators_follow_the_table() {
        let n = Nil2Group::new(MalcevPresentation::heisenberg5());
        let z = n.central(0);
        assert_eq!(n.commutator(&n.basis(1), &n.basis(0)), z);
        assert_eq!(n.commutator(&n.basis(3), &n.basis(2)), z);
        assert_eq!(n.commutator(&n.basis(0), &n.basis(1)), n.inv(&z));
        assert_eq!(n.commutator(&n.basis(2), &n.basis(1)), n.identity());
        let c = vec![0, 0, 0, 0, 5];
        let d = vec![0, 0, 0, 0, -2];
        assert_eq!(n.mul(&c, &d), vec![0, 0, 0, 0, 3]);
    }

    #[test]
    fn json_validation() {
        let p = MalcevPresentation::heisenberg(2);
        let back = MalcevPresentation::from_json(&p.to_json()).unwrap();
        assert_eq!(p, back);
        let bad = serde_json::json!({"r": 2, "s": 1, "comm": [[1, 0, [1]], [0, 1, [1]]]});
        assert!(MalcevPresentation::from_json(&bad).is_err());
        let bad = serde_json::json!({"r": 2, "s": 1, "comm": [[1, 1, [1]]]});
        assert!(MalcevPresentation::from_json(&bad).is_err());
        let bad = serde_json::json!({"r": 2, "s": 1, "comm": [[2, 0, [1]]]});
        assert!(MalcevPresentation::from_json(&bad).is_err());
        let bad = serde_json::json!({"r": 2, "s": 1, "comm": [[1, 0, [1, 0]]]});
        assert!(MalcevPresentation::from_json(&bad).is_err());
        let ok = serde_json::json!({"r": 2, "s": 1, "comm": [[1, 0, [1]], [0, 1, [-1]]]});
        assert!(MalcevPresentation::from_json(&ok).is_ok());
    }
}
