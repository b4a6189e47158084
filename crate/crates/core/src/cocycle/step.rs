use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::group::{FinSet, Group, GroupCtx, Side};
use crate::num::{QSqrt, Q};
use crate::par;
use crate::scheme::{Rearranged, SchemeWindow};

/// One step of a [`StepVector`]: the value `scale·coef/√root` on `set`.
#[derive(Clone, Debug)]
pub struct Term<E: Ord> {
    pub set: FinSet<E>,
    pub coef: Q,
    pub root: u64,
}

/// `ξ = base + scale · Σ_n coef_n/√root_n · 1_{F_n}` with pairwise disjoint `F_n`.
#[derive(Clone, Debug)]
pub struct StepVector<G: Group> {
    ctx: GroupCtx<G>,
    base: Q,
    scale: Q,
    terms: Vec<Term<G::Elem>>,
    index: HashMap<G::Elem, usize>,
}

impl<G: Group> StepVector<G> {
    /// Fails if two sets overlap or a set belongs to another group.
    pub fn new(ctx: GroupCtx<G>, base: Q, scale: Q, terms: Vec<Term<G::Elem>>) -> Result<Self> {
        let mut index = HashMap::new();
        for (n, t) in terms.iter().enumerate() {
            if t.set.group_id() != ctx.id() {
                return Err(Error::Domain(format!("F_{} belongs to a different group", n + 1)));
            }
            if t.root == 0 {
                return Err(Error::Validation(format!("weight of F_{} divides by √0", n + 1)));
            }
            for h in t.set.iter() {
                if let Some(m) = index.insert(h.clone(), n) {
                    return Err(Error::Validation(format!("F_{} and F_{} overlap at {h:?}", m + 1, n + 1)));
                }
            }
        }
        Ok(Self { ctx, base, scale, terms, index })
    }

    /// `Σ 1/√|F_n| · 1_{F_n}` scaled by `scale` on top of `base`.
    pub fn normalized(ctx: GroupCtx<G>, base: Q, scale: Q, sets: Vec<FinSet<G::Elem>>) -> Result<Self> {
        let terms = sets
            .into_iter()
            .map(|set| {
                let root = set.len() as u64;
                Term { set, coef: Q::from_integer(1.into()), root }
            })
            .collect();
        Self::new(ctx, base, scale, terms)
    }

    pub fn ctx(&self) -> &GroupCtx<G> {
        &self.ctx
    }

    pub fn base(&self) -> &Q {
        &self.base
    }

    pub fn scale(&self) -> &Q {
        &self.scale
    }

    pub fn terms(&self) -> &[Term<G::Elem>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of the term containing `h`, among the first `n`.
    pub fn term_of(&self, h: &G::Elem, n: usize) -> Option<usize> {
        self.index.get(h).copied().filter(|&i| i < n)
    }

    /// `scale · coef_n / √root_n`.
    pub fn weight(&self, n: usize) -> QSqrt {
        let t = &self.terms[n];
        QSqrt::inv_sqrt(t.root).scale(&(&self.scale * &t.coef))
    }

    fn weight_opt(&self, n: Option<usize>) -> QSqrt {
        n.map_or_else(QSqrt::zero, |i| self.weight(i))
    }

    pub fn evaluate(&self, h: &G::Elem) -> QSqrt {
        &QSqrt::rational(self.base.clone()) + &self.weight_opt(self.term_of(h, self.terms.len()))
    }

    /// `ξ_N(h)` with only the first `n` terms.
    pub fn evaluate_truncated(&self, h: &G::Elem, n: usize) -> QSqrt {
        &QSqrt::rational(self.base.clone()) + &self.weight_opt(self.term_of(h, n))
    }

    /// Exact `‖π(g)ξ_N − ξ_N‖²` where `ξ_N` keeps the first `n` terms,
    /// `π = λ` (`λ(g)ξ(h) = ξ(g⁻¹h)`) or `π = ρ` (`ρ(g)ξ(h) = ξ(hg)`).
    pub fn diff_norm_sq(&self, side: Side, g: &G::Elem, n: usize) -> QSqrt {
        let n = n.min(self.terms.len());
        let ctx = &self.ctx;
        let ginv = ctx.inv(g);
        // support of the difference: F_k ∪ π(g)-preimages
        let cand: Vec<Vec<G::Elem>> = par::map(&self.terms[..n], |t| {
            let mut v: Vec<G::Elem> = t.set.iter().cloned().collect();
            v.extend(t.set.iter().map(|f| match side {
                Side::Left => ctx.mul(g, f),
                Side::Right => ctx.mul(f, &ginv),
            }));
            v
        });
        let support: HashSet<&G::Elem> = cand.iter().flatten().collect();
        let mut pairs: BTreeMap<(Option<usize>, Option<usize>), u64> = BTreeMap::new();
        for h in support {
            let moved = match side {
                Side::Left => ctx.mul(&ginv, h),
                Side::Right => ctx.mul(h, g),
            };
            let (a, b) = (self.term_of(&moved, n), self.term_of(h, n));
            if a != b {
                *pairs.entry((a, b)).or_insert(0) += 1;
            }
        }
        let mut total = QSqrt::zero();
        for ((a, b), count) in pairs {
            let d = &self.weight_opt(a) - &self.weight_opt(b);
            total += &(&d * &d).scale(&Q::from_integer(count.into()));
        }
        total
    }

    /// `Σ_{h ∈ F_1 ∪ … ∪ F_N} |π(g)ξ_N(h) − ξ_N(h)|²`, the part of
    /// [`diff_norm_sq`](Self::diff_norm_sq) carried by the support of `ξ_N`.
    pub fn support_diff_norm_sq(&self, side: Side, g: &G::Elem, n: usize) -> QSqrt {
        let n = n.min(self.terms.len());
        let ginv = self.ctx.inv(g);
        let mut total = QSqrt::zero();
        for (k, t) in self.terms[..n].iter().enumerate() {
            let mut pairs: BTreeMap<Option<usize>, u64> = BTreeMap::new();
            for h in t.set.iter() {
                let moved = match side {
                    Side::Left => self.ctx.mul(&ginv, h),
                    Side::Right => self.ctx.mul(h, g),
                };
                let a = self.term_of(&moved, n);
                if a != Some(k) {
                    *pairs.entry(a).or_insert(0) += 1;
                }
            }
            for (a, count) in pairs {
                let d = &self.weight_opt(a) - &self.weight(k);
                total += &(&d * &d).scale(&Q::from_integer(count.into()));
            }
        }
        total
    }

    /// `‖ξ_N − p‖²` restricted to `F_1 ∪ … ∪ F_N`.
    pub fn norm_sq_minus(&self, p: &QSqrt, n: usize) -> QSqrt {
        let base = QSqrt::rational(self.base.clone());
        let mut total = QSqrt::zero();
        for k in 0..n.min(self.terms.len()) {
            let d = &(&base + &self.weight(k)) - p;
            total += &(&d * &d).scale(&Q::from_integer(self.terms[k].set.len().into()));
        }
        total
    }
}

/// `ξ = Σ 1/√|F_n| · 1_{F_n}` on a rearranged window.
pub fn asym_cocycle<G: Group>(w: &Rearranged<G>) -> Result<StepVector<G>> {
    let win = w.window();
    StepVector::normalized(win.ctx.clone(), Q::from_integer(0.into()), Q::from_integer(1.into()), win.sets.clone())
}

/// Certify `w` as rearranged, then build the cocycle. Unverified windows are
/// refused.
pub fn asym_cocycle_checked<G: Group>(w: SchemeWindow<G>) -> Result<StepVector<G>> {
    let r = Rearranged::certify(w).map_err(|e| {
        Error::Unverified(format!("{e}; run rearrange and verify_scheme on the window first"))
    })?;
    asym_cocycle(&r)
}
