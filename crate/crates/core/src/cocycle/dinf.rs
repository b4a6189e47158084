use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::Rng;

use super::step::StepVector;
use crate::error::{Error, Result};
use crate::group::{DElem, FinSet, Group, GroupCtx, Side};
use crate::num::{harmonic, ln_bounds, qi, QSqrt, Q};
use crate::scheme::{show, CheckRow};

/// The function `η(r^m) = 1/√m` for `m > 0`, `0` otherwise, and
/// `η(r^m s) = η(r^{-m})` on `D_∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DihedralEta {
    pub m_max: i64,
}

impl DihedralEta {
    pub fn eval(&self, g: &DElem) -> QSqrt {
        let m = if g.1 == 1 { -g.0 } else { g.0 };
        if m > 0 {
            QSqrt::inv_sqrt(m as u64)
        } else {
            QSqrt::zero()
        }
    }

    /// Elements `r^m` and `r^m s` with `|m| ≤ m_max`.
    pub fn ball(&self) -> Vec<DElem> {
        (-self.m_max..=self.m_max).flat_map(|m| [(m, 0), (m, 1)]).collect()
    }

    /// `Σ_{m=1}^{M} (1/√(m+1) − 1/√m)²`.
    pub fn left_partial(&self) -> QSqrt {
        (1..=self.m_max as u64)
            .map(|m| {
                let d = &QSqrt::inv_sqrt(m + 1) - &QSqrt::inv_sqrt(m);
                &d * &d
            })
            .sum()
    }

    /// `Σ_{h in ball} (η(hs) − η(h))²`, which equals `4·H(M)`.
    pub fn right_partial(&self) -> QSqrt {
        let d = crate::group::Dihedral;
        self.ball()
            .iter()
            .map(|h| {
                let diff = &self.eval(&d.mul(h, &(0, 1))) - &self.eval(h);
                &diff * &diff
            })
            .sum()
    }

    /// `Σ_{h in ball} (η(g⁻¹h) − η(h))²` for a left translate.
    pub fn left_ball_norm(&self, g: &DElem) -> QSqrt {
        let d = crate::group::Dihedral;
        let gi = d.inv(g);
        self.ball()
            .iter()
            .map(|h| {
                let diff = &self.eval(&d.mul(&gi, h)) - &self.eval(h);
                &diff * &diff
            })
            .sum()
    }

    /// `4·H(M) > 4·ln(M) − 4`, decided with a certified upper bound on `ln M`.
    pub fn right_exceeds_log(&self) -> bool {
        let h = harmonic(self.m_max as u64) * qi(4);
        let (_, hi) = ln_bounds(&qi(self.m_max), 64);
        h > hi * qi(4) - qi(4)
    }
}

pub fn dihedral_eta(m_max: i64) -> Result<(DihedralEta, QSqrt, QSqrt)> {
    if m_max < 1 {
        return Err(Error::Validation("M must be at least 1".into()));
    }
    let eta = DihedralEta { m_max };
    let (l, r) = (eta.left_partial(), eta.right_partial());
    Ok((eta, l, r))
}

/// Check that `class` contains `g` and is closed under conjugation by `S`.
fn validate_class<G: Group>(ctx: &GroupCtx<G>, g: &G::Elem, class: &FinSet<G::Elem>) -> Result<()> {
    if !class.contains(g) {
        return Err(Error::Validation(format!("class does not contain {}", show(g))));
    }
    for c in class.iter() {
        for s in ctx.gens() {
            let k = ctx.conj(c, s);
            if !class.contains(&k) {
                return Err(Error::Validation(format!("class not closed: {} conjugated by {} gives {}", show(c), show(s), show(&k))));
            }
        }
    }
    Ok(())
}

/// Closure of `{g}` under conjugation by the generators, if it stays within
/// `limit` elements.
pub fn conjugacy_class<G: Group>(ctx: &GroupCtx<G>, g: &G::Elem, limit: usize) -> Result<FinSet<G::Elem>> {
    let mut seen = BTreeSet::from([g.clone()]);
    let mut frontier = vec![g.clone()];
    while let Some(c) = frontier.pop() {
        for s in ctx.gens() {
            let k = ctx.conj(&c, s);
            if seen.insert(k.clone()) {
                if seen.len() > limit {
                    return Err(Error::Range(format!("conjugacy class of {} exceeds {limit}", show(g))));
                }
                frontier.push(k);
            }
        }
    }
    Ok(ctx.set(seen))
}

/// `‖ρ(g⁻¹)ξ − ξ‖² ≤ Σ_{c ∈ class} ‖λ(c)ξ − ξ‖²` for finitely supported `ξ`.
pub fn fc_transfer_check<G: Group>(v: &StepVector<G>, g: &G::Elem, class: &FinSet<G::Elem>) -> Result<CheckRow> {
    let ctx = v.ctx();
    if *v.base() != Q::from_integer(BigInt::from(0)) {
        return Err(Error::Validation("ξ must be finitely supported (base 0)".into()));
    }
    validate_class(ctx, g, class)?;
    let n = v.len();
    let lhs = v.diff_norm_sq(Side::Right, &ctx.inv(g), n);
    let mut rhs = QSqrt::zero();
    for c in class.iter() {
        rhs += &v.diff_norm_sq(Side::Left, c, n);
    }
    let pass = lhs <= rhs;
    Ok(CheckRow::check("fc: ‖ρ(g⁻¹)ξ−ξ‖² ≤ Σ_c ‖λ(c)ξ−ξ‖²", format!("g={} |class|={}", show(g), class.len()), pass)
        .with_value(format!("{lhs} ≤ {rhs}")))
}

/// For `G` an extension of `D_∞` by a finite normal `K` and `E` with
/// `E s_o ∩ E = ∅`: `|s_o E ∩ E| ≤ 2|K|·Σ_{c∈K} |cE△E|`. With `K` trivial
/// the sharper `s_o E ∩ E = ∅` is checked.
pub fn dinf_no_scheme_check<G: Group>(
    ctx: &GroupCtx<G>,
    k: &FinSet<G::Elem>,
    quotient: &dyn Fn(&G::Elem) -> DElem,
    e: &FinSet<G::Elem>,
) -> Result<CheckRow> {
    let s_o = ctx.s_o();
    let image = quotient(s_o);
    if image.1 != 0 || image.0 == 0 {
        return Err(Error::Validation(format!("s_o maps to {image:?}, not a nontrivial rotation")));
    }
    if !k.contains(&ctx.identity()) {
        return Err(Error::Validation("K must contain the identity".into()));
    }
    for a in k.iter() {
        if quotient(a) != (0, 0) {
            return Err(Error::Validation(format!("{} is not in the kernel", show(a))));
        }
        for b in k.iter() {
            if !k.contains(&ctx.mul(a, b)) {
                return Err(Error::Validation("K is not closed under multiplication".into()));
            }
        }
        for s in ctx.gens() {
            if !k.contains(&ctx.conj(a, s)) {
                return Err(Error::Validation("K is not normal".into()));
            }
        }
    }
    if ctx.overlap(Side::Right, s_o, e) != 0 {
        return Err(Error::Validation("precondition E s_o ∩ E = ∅ fails".into()));
    }
    let lhs = ctx.overlap(Side::Left, s_o, e);
    if k.len() == 1 {
        return Ok(CheckRow::check("virtcyc: s_o E ∩ E = ∅ (K trivial)", format!("|E|={}", e.len()), lhs == 0)
            .with_value(format!("|s_oE∩E| = {lhs}")));
    }
    let sum: usize = k.iter().map(|c| ctx.sym_diff_size(Side::Left, c, e)).sum();
    let rhs = 2 * k.len() * sum;
    Ok(CheckRow::check("virtcyc: |s_oE∩E| ≤ 2|K|Σ|cE△E|", format!("|E|={} |K|={}", e.len(), k.len()), lhs <= rhs)
        .with_value(format!("{lhs} ≤ {rhs}")))
}

/// A random `E` with `E s_o ∩ E = ∅`: words of length `word_len` are drawn
/// and kept unless they collide with a kept element along `s_o`.
pub fn random_admissible_set<G: Group, R: Rng + ?Sized>(ctx: &GroupCtx<G>, rng: &mut R, max_size: usize, word_len: usize) -> FinSet<G::Elem> {
    let s_o = ctx.s_o();
    let s_inv = ctx.inv(s_o);
    let mut e = ctx.empty_set();
    let target = rng.random_range(0..=max_size);
    for _ in 0..4 * max_size {
        if e.len() >= target {
            break;
        }
        let h = ctx.random_elem(rng, word_len);
        if !e.contains(&ctx.mul(&h, s_o)) && !e.contains(&ctx.mul(&h, &s_inv)) {
            e.insert(h);
        }
    }
    e
}

/// `D_∞ × ℤ/2` with `S = {(r^±1, 0), (s, 0), (e, 1)}` and `s_o = (r, 0)`.
pub fn dinf_times_z2_ctx() -> GroupCtx<crate::group::DirectProduct<crate::group::Dihedral, crate::group::Abelian>> {
    use crate::group::{Abelian, DirectProduct, Dihedral};
    let g = DirectProduct::new(Dihedral, Abelian::cyclic(2));
    let gens = vec![((1, 0), vec![0]), ((-1, 0), vec![0]), ((0, 1), vec![0]), ((0, 0), vec![1])];
    GroupCtx::new(g, gens, ((1, 0), vec![0])).expect("valid generators")
}

#[cfg(test)]
mod tests {
    use super::super::step::Term;
    use super::*;
    use crate::group::{Dihedral, Heisenberg};
    use crate::num::q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eta_values() {
        let (eta, l, r) = dihedral_eta(3).unwrap();
        assert_eq!(eta.eval(&(4, 0)), QSqrt::rational(q(1, 2)));
        assert_eq!(eta.eval(&(-4, 1)), QSqrt::rational(q(1, 2)));
        assert!((l.to_f64() - 0.1086).abs() < 5e-4);
        assert_eq!(r.as_rational(), Some(q(22, 3)));
        let mut prev = QSqrt::zero();
        for m in 1..40 {
            let e = DihedralEta { m_max: m };
            let lp = e.left_partial();
            assert!(lp >= prev && lp < QSqrt::one());
            prev = lp;
            if m >= 2 {
                assert!(e.right_exceeds_log());
            }
        }
        // λ(s) fixes η exactly
        assert!(eta.left_ball_norm(&Dihedral::S).is_zero());
    }

    fn random_vector<G: Group>(ctx: &GroupCtx<G>, rng: &mut ChaCha8Rng, points: usize) -> StepVector<G> {
        let mut used = BTreeSet::new();
        let mut terms = Vec::new();
        while terms.len() < points {
            let h = ctx.random_elem(rng, 6);
            if used.insert(h.clone()) {
                terms.push(Term { set: ctx.set([h]), coef: q(rng.random_range(-5..=5), 1), root: rng.random_range(1..=7) });
            }
        }
        StepVector::new(ctx.clone(), qi(0), qi(1), terms).unwrap()
    }

    #[test]
    fn central_element_gives_equality() {
        let ctx = Heisenberg::standard_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z = Heisenberg::Z;
        let class = conjugacy_class(&ctx, &z, 8).unwrap();
        assert_eq!(class.len(), 1);
        for _ in 0..5 {
            let v = random_vector(&ctx, &mut rng, 12);
            let row = fc_transfer_check(&v, &z, &class).unwrap();
            assert_eq!(row.pass, Some(true));
            let n = v.len();
            assert_eq!(v.diff_norm_sq(Side::Right, &ctx.inv(&z), n), v.diff_norm_sq(Side::Left, &z, n));
        }
        assert!(conjugacy_class(&ctx, &Heisenberg::X, 50).is_err());
    }

    #[test]
    fn dinf_times_z2_transfer_and_virtcyc() {
        let ctx = dinf_times_z2_ctx();
        let g = ((0, 0), vec![1]);
        let class = conjugacy_class(&ctx, &g, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let v = random_vector(&ctx, &mut rng, 10);
            assert_eq!(fc_transfer_check(&v, &g, &class).unwrap().pass, Some(true));
        }
        let bad = ctx.set([g.clone(), ((1, 0), vec![0])]);
        assert!(fc_transfer_check(&random_vector(&ctx, &mut rng, 3), &g, &bad).is_err());

        let k = ctx.set([((0, 0), vec![0]), ((0, 0), vec![1])]);
        let quotient = |x: &((i64, u8), Vec<i64>)| x.0;
        let s_o = ctx.s_o().clone();
        for _ in 0..20 {
            let mut e = ctx.empty_set();
            while e.len() < 40 {
                let h = ctx.random_elem(&mut rng, 10);
                let conflict = e.contains(&ctx.mul(&h, &s_o)) || e.contains(&ctx.mul(&h, &ctx.inv(&s_o)));
                if !conflict {
                    e.insert(h);
                }
                if rng.random_range(0..60) == 0 {
                    break;
                }
            }
            let row = dinf_no_scheme_check(&ctx, &k, &quotient, &e).unwrap();
            assert_eq!(row.pass, Some(true));
        }
        let empty = ctx.empty_set();
        assert_eq!(dinf_no_scheme_check(&ctx, &k, &quotient, &empty).unwrap().pass, Some(true));
    }

    #[test]
    fn plain_dinf() {
        let ctx = Dihedral::standard_ctx();
        let k = ctx.set([(0, 0)]);
        let e = ctx.set([(0, 0), (2, 1), (5, 0), (-3, 1)]);
        assert_eq!(ctx.overlap(Side::Right, ctx.s_o(), &e), 0);
        let row = dinf_no_scheme_check(&ctx, &k, &|g: &DElem| *g, &e).unwrap();
        assert_eq!(row.pass, Some(true));
        let bad = ctx.set([(0, 0), (1, 0)]);
        assert!(dinf_no_scheme_check(&ctx, &k, &|g: &DElem| *g, &bad).is_err());
    }
}
