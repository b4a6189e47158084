use std::collections::{BTreeMap, BTreeSet};

use crate::group::{FinSet, Group, GroupCtx};
use crate::par;

/// Coordinates of a finite set along the orbits of `Γ = ⟨s_o⟩`.
///
/// When `level` is a homomorphism with `level(s_o) = 1`, every element is
/// uniquely `s_o^l·r` with `l = level(g)` and `r = s_o^{-l}·g` of level 0.
/// Left translation by `s_o^k` only moves `l`, so all `Γ`-questions about a
/// finite set reduce to the level sets `L_r` attached to each orbit
/// representative `r`.
#[derive(Clone, Debug)]
pub struct OrbitChart<E: Ord> {
    levels: BTreeMap<E, Vec<i64>>,
    signatures: BTreeMap<Vec<(i64, i64)>, usize>,
    size: usize,
}

fn runs(levels: &[i64]) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = Vec::new();
    for &l in levels {
        match out.last_mut() {
            Some((_, hi)) if *hi == l => *hi += 1,
            _ => out.push((l, l + 1)),
        }
    }
    out
}

impl<E: Ord + Clone + Send + Sync> OrbitChart<E> {
    /// `None` unless the context is charted.
    pub fn build<G: Group<Elem = E>>(ctx: &GroupCtx<G>, set: &FinSet<E>) -> Option<Self> {
        if !ctx.charted() {
            return None;
        }
        let elems: Vec<&E> = set.iter().collect();
        let pairs = par::map(&elems, |g| {
            let l = ctx.group().level(g).expect("charted groups have levels");
            (ctx.mul(&ctx.gamma(-l), g), l)
        });
        let mut levels: BTreeMap<E, Vec<i64>> = BTreeMap::new();
        for (r, l) in pairs {
            levels.entry(r).or_default().push(l);
        }
        let mut signatures = BTreeMap::new();
        for ls in levels.values_mut() {
            ls.sort_unstable();
            *signatures.entry(runs(ls)).or_insert(0) += 1;
        }
        Some(Self { levels, signatures, size: set.len() })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn reps(&self) -> impl Iterator<Item = &E> {
        self.levels.keys()
    }

    pub fn levels_of(&self, rep: &E) -> Option<&[i64]> {
        self.levels.get(rep).map(Vec::as_slice)
    }

    pub fn orbit_count(&self) -> usize {
        self.levels.len()
    }

    /// Some representative shared with `other`, the least one.
    pub fn shared_rep<'a>(&'a self, other: &Self) -> Option<&'a E> {
        self.levels.keys().find(|r| other.levels.contains_key(r))
    }

    /// `|s_o^k E ∩ E|`, exactly, for any `k`.
    pub fn gamma_overlap(&self, k: i64) -> usize {
        let mut total = 0usize;
        for (sig, mult) in &self.signatures {
            let mut per = 0i64;
            for &(a, b) in sig {
                for &(c, d) in sig {
                    let lo = (a + k).max(c);
                    let hi = (b + k).min(d);
                    per += (hi - lo).max(0);
                }
            }
            total += per as usize * mult;
        }
        total
    }

    /// `|s_o^k E △ E|`.
    pub fn gamma_sym_diff(&self, k: i64) -> usize {
        2 * (self.size - self.gamma_overlap(k))
    }

    /// Levels in `(L_r + [-bound, bound]) \ L_r`, i.e. the truncated
    /// `Γ_bound E △ E` on the orbit of `r`.
    pub fn truncated_halo(&self, rep: &E, bound: i64) -> BTreeSet<i64> {
        let Some(ls) = self.levels.get(rep) else {
            return BTreeSet::new();
        };
        let own: BTreeSet<i64> = ls.iter().copied().collect();
        let mut out = BTreeSet::new();
        for (a, b) in runs(ls) {
            for l in a - bound..b + bound {
                if !own.contains(&l) {
                    out.insert(l);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Heisenberg, Side};

    #[test]
    fn chart_matches_direct_counts() {
        let c = Heisenberg::standard_ctx();
        let e = c.set((0..4).flat_map(|a| (3..5).flat_map(move |b| (0..3).map(move |cc| [a, b, cc]))));
        let ch = OrbitChart::build(&c, &e).unwrap();
        assert_eq!(ch.orbit_count(), 6);
        for k in -6..=6 {
            let direct = c.overlap(Side::Left, &c.gamma(k), &e);
            assert_eq!(ch.gamma_overlap(k), direct, "k={k}");
        }
    }

    #[test]
    fn chart_with_gaps() {
        let c = Heisenberg::standard_ctx();
        let e = c.set([[0, 1, 0], [1, 1, 0], [5, 1, 0], [2, 0, 0]]);
        let ch = OrbitChart::build(&c, &e).unwrap();
        for k in -7..=7 {
            assert_eq!(ch.gamma_overlap(k), c.overlap(Side::Left, &c.gamma(k), &e), "k={k}");
        }
        let halo = ch.truncated_halo(&[0, 1, 0], 1);
        assert_eq!(halo.into_iter().collect::<Vec<_>>(), vec![-1, 2, 4, 6]);
    }
}
