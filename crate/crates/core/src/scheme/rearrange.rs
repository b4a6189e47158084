use std::collections::HashSet;

use super::report::{CheckRow, VerifyReport};
use super::verify::{phi_partial, show};
use super::window::SchemeWindow;
use crate::error::{Error, Result};
use crate::group::{FinSet, Group, GroupCtx, Side};
use crate::num::q_to_string;
use crate::par;

/// Number of candidate translates tried per set before giving up.
pub const GAMMA_SEARCH_LIMIT: usize = 1 << 16;

/// Candidate exponents in the order `0, 1, -1, 2, -2, …`.
pub fn gamma_order() -> impl Iterator<Item = i64> {
    (0i64..).map(|i| if i % 2 == 1 { i / 2 + 1 } else { -(i / 2) })
}

struct Placed<E> {
    all: HashSet<E>,
    boundary: Vec<HashSet<E>>,
}

fn admissible<G: Group>(ctx: &GroupCtx<G>, e: &FinSet<G::Elem>, boundaries: &[Vec<G::Elem>], gamma: &G::Elem, placed: &Placed<G::Elem>) -> bool {
    let s_o = ctx.s_o();
    let shifted: Vec<G::Elem> = e.iter().map(|h| ctx.mul(h, gamma)).collect();
    let shifted_set: HashSet<&G::Elem> = shifted.iter().collect();
    // E_nγ ∩ F_m = ∅ and E_nγs_o ∩ F_m = ∅
    let clash = par::map(&shifted, |h| placed.all.contains(h) || placed.all.contains(&ctx.mul(h, s_o)));
    if clash.into_iter().any(|b| b) {
        return false;
    }
    // F_m s_o ∩ E_nγ = ∅
    if placed.all.iter().any(|f| shifted_set.contains(&ctx.mul(f, s_o))) {
        return false;
    }
    // (sE_n△E_n)γ ∩ (sF_m△F_m) = ∅
    boundaries.iter().zip(&placed.boundary).all(|(bd, fb)| bd.iter().all(|h| !fb.contains(&ctx.mul(h, gamma))))
}

/// Translate each `E_n` on the right by some `γ_n = s_o^k` so that the
/// translates are disjoint, `F_n s_o ∩ F_m = ∅`, and the `S`-boundaries are
/// disjoint across `n`. The chosen exponents go to `params.gammas`.
pub fn rearrange<G: Group>(w: &SchemeWindow<G>) -> Result<SchemeWindow<G>> {
    let ctx = &w.ctx;
    let mut placed = Placed { all: HashSet::new(), boundary: vec![HashSet::new(); ctx.gens().len()] };
    let mut out = Vec::with_capacity(w.len());
    let mut gammas = Vec::with_capacity(w.len());
    for (n, e) in w.sets.iter().enumerate() {
        let boundaries: Vec<Vec<G::Elem>> =
            ctx.gens().iter().map(|s| ctx.boundary_set(Side::Left, s, e).iter().cloned().collect()).collect();
        let k = gamma_order()
            .take(GAMMA_SEARCH_LIMIT)
            .find(|&k| admissible(ctx, e, &boundaries, &ctx.gamma(k), &placed))
            .ok_or_else(|| Error::Construction(format!("no admissible translate for E_{} within the search limit", n + 1)))?;
        let gamma = ctx.gamma(k);
        let f = ctx.translate(Side::Right, &gamma, e);
        for (i, bd) in boundaries.iter().enumerate() {
            placed.boundary[i].extend(bd.iter().map(|h| ctx.mul(h, &gamma)));
        }
        placed.all.extend(f.iter().cloned());
        out.push(f);
        gammas.push(k);
    }
    let mut params = w.params.clone();
    params.gammas = Some(gammas);
    params.provenance.push("rearranged".into());
    SchemeWindow::new(ctx.clone(), out, params, w.kappa.clone())
}

/// Check the conclusions of the rearrangement for `F` built from `E`,
/// testing boundary equalities on `tested`.
pub fn check_rearranged<G: Group>(e: &SchemeWindow<G>, f: &SchemeWindow<G>, tested: &[G::Elem]) -> VerifyReport {
    let ctx = &f.ctx;
    let s_o = ctx.s_o();
    let mut rep = VerifyReport::default();
    let n_sets = f.len();
    for n in 0..n_sets {
        for m in n + 1..n_sets {
            let hit = f.sets[n].first_common(&f.sets[m]).cloned();
            rep.push(
                CheckRow::check("rearranged: F_n pairwise disjoint", format!("n={} m={}", n + 1, m + 1), hit.is_none())
                    .witness_if_failed(|| show(&hit)),
            );
        }
    }
    for n in 0..n_sets {
        let fs = ctx.translate(Side::Right, s_o, &f.sets[n]);
        for m in 0..n_sets {
            let hit = fs.first_common(&f.sets[m]).cloned();
            rep.push(
                CheckRow::check("rearranged: F_n s_o ∩ F_m = ∅", format!("n={} m={}", n + 1, m + 1), hit.is_none())
                    .witness_if_failed(|| show(&hit)),
            );
        }
    }
    for s in ctx.gens() {
        let bds: Vec<FinSet<G::Elem>> = par::map(&f.sets, |x| ctx.boundary_set(Side::Left, s, x));
        for n in 0..n_sets {
            for m in n + 1..n_sets {
                let hit = bds[n].first_common(&bds[m]).cloned();
                rep.push(
                    CheckRow::check(
                        "rearranged: S-boundaries disjoint",
                        format!("s={} n={} m={}", show(s), n + 1, m + 1),
                        hit.is_none(),
                    )
                    .witness_if_failed(|| show(&hit)),
                );
            }
        }
    }
    for n in 0..n_sets.min(e.len()) {
        let (le, lf) = (e.sets[n].len(), f.sets[n].len());
        rep.push(
            CheckRow::check("rearranged: |F_n| = |E_n|", format!("n={}", n + 1), le == lf).with_value(format!("{lf} vs {le}")),
        );
        for g in tested {
            let a = ctx.sym_diff_size(Side::Left, g, &e.sets[n]);
            let b = ctx.sym_diff_size(Side::Left, g, &f.sets[n]);
            rep.push(
                CheckRow::check("rearranged: |gF_n△F_n| = |gE_n△E_n|", format!("g={} n={}", show(g), n + 1), a == b)
                    .with_value(format!("{b} vs {a}")),
            );
        }
    }
    for g in tested {
        let (pe, pf) = (phi_partial(e, g), phi_partial(f, g));
        rep.push(
            CheckRow::check("rearranged: Φ_F(g) = Φ_E(g)", format!("g={}", show(g)), pe == pf)
                .with_value(format!("{} vs {}", q_to_string(&pf), q_to_string(&pe))),
        );
    }
    rep
}

/// Default tested elements: `S` and `s_o^k` for `0 < |k| ≤ shift_bound`.
pub fn tested_elements<G: Group>(ctx: &GroupCtx<G>, shift_bound: i64) -> Vec<G::Elem> {
    let mut out: Vec<G::Elem> = ctx.gens().to_vec();
    for k in (-shift_bound..=shift_bound).filter(|k| *k != 0) {
        let g = ctx.gamma(k);
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// A window whose sets are pairwise disjoint and satisfy `F_n s_o ∩ F_m = ∅`.
#[derive(Clone, Debug)]
pub struct Rearranged<G: Group>(SchemeWindow<G>);

impl<G: Group> Rearranged<G> {
    /// Run [`rearrange`] and keep the result.
    pub fn build(w: &SchemeWindow<G>) -> Result<Self> {
        Self::certify(rearrange(w)?)
    }

    /// Accept an existing window after checking the disjointness conclusions.
    pub fn certify(w: SchemeWindow<G>) -> Result<Self> {
        let rep = check_rearranged(&w, &w, &[]);
        if let Some(bad) = rep.failures().next() {
            return Err(Error::Validation(format!("{} fails at {}", bad.condition, bad.scope)));
        }
        Ok(Self(w))
    }

    pub fn window(&self) -> &SchemeWindow<G> {
        &self.0
    }

    pub fn into_inner(self) -> SchemeWindow<G> {
        self.0
    }
}
