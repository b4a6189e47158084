use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::tower::{EpsFamily, TowerInput};
use super::{DyElem, Dyadic, LElem, Lamps, Semidirect};
use crate::error::{Error, Result};
use crate::group::{Abelian, FinSet, Group, GroupCtx};
use crate::num::{q, qi, Q};

/// Largest `R_n` the instance builders will enumerate.
pub const SIZE_LIMIT: u64 = 1 << 22;

/// Parameter schedule for the tower instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `A_n = 2n`, declared growth `q = 3/2`.
    Desk,
    /// `A_n = 2^n`, `q = 2`.
    Paper,
}

pub fn profile_a(profile: Profile, n_max: usize) -> Vec<i64> {
    (1..=n_max as i64)
        .map(|n| match profile {
            Profile::Desk => 2 * n,
            Profile::Paper => 1 << n,
        })
        .collect()
}

pub fn profile_q(profile: Profile) -> Q {
    match profile {
        Profile::Desk => q(3, 2),
        Profile::Paper => qi(2),
    }
}

/// `A ≀ ℤ` with `T = {δ_0(g) : g ∈ Q}` for the standard generators `Q` of `A`.
pub fn wreath_ctx(lamp: Abelian) -> Result<GroupCtx<Semidirect<Lamps>>> {
    if lamp.rank() == 0 || lamp.order() == Some(1) {
        return Err(Error::Validation("the lamp group must be nontrivial".into()));
    }
    let t: Vec<LElem> = lamp.standard_gens().into_iter().map(|g| Lamps::delta(0, g)).collect();
    Semidirect::new(Lamps::new(lamp)).ctx(&t)
}

/// `K_n`: all of `A` when finite, else the box `[0, 2^{n+1})^d`, whose
/// boundary ratio is `2^{-n}` for each standard generator.
pub fn wreath_k(lamp: &Abelian, n: usize) -> Vec<Vec<i64>> {
    lamp.elements().unwrap_or_else(|| lamp.folner_box(1i64 << (n + 1)))
}

/// `R_n = {η : supp η ⊆ [-1, A_n], η(-1) = η(A_n) = a_o, η(i) ∈ K}`.
pub fn wreath_rn(
    ctx: &GroupCtx<Semidirect<Lamps>>,
    k: &[Vec<i64>],
    a_o: &[i64],
    a_n: i64,
) -> Result<FinSet<(LElem, i64)>> {
    let lamps = ctx.group().base();
    let lamp = lamps.lamp();
    if !lamp.is_valid(&a_o.to_vec()) || a_o.iter().all(|&c| c == 0) {
        return Err(Error::Validation("the marker a_o must be a nontrivial lamp value".into()));
    }
    if k.is_empty() || k.iter().any(|v| !lamp.is_valid(v)) {
        return Err(Error::Validation("K must be a nonempty set of reduced lamp values".into()));
    }
    if a_n < 1 {
        return Err(Error::Validation(format!("A_n must be positive, got {a_n}")));
    }
    let size = (k.len() as u64).checked_pow(a_n as u32).filter(|&s| s <= SIZE_LIMIT);
    let Some(size) = size else {
        return Err(Error::Range(format!("|K|^A_n = {}^{a_n} exceeds the enumeration limit", k.len())));
    };
    let mut out = Vec::with_capacity(size as usize);
    let mut digits = vec![0usize; a_n as usize];
    loop {
        let pairs = std::iter::once((-1, a_o.to_vec()))
            .chain(digits.iter().enumerate().map(|(i, &d)| (i as i64, k[d].clone())))
            .chain(std::iter::once((a_n, a_o.to_vec())));
        out.push((lamps.from_pairs(pairs), 0));
        let mut i = 0;
        while i < digits.len() {
            digits[i] += 1;
            if digits[i] < k.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == digits.len() {
            break;
        }
    }
    Ok(ctx.set(out))
}

/// Tower input for `A ≀ ℤ` with `ε_n = 2^{-n}`. `A_n` must be distinct.
pub fn wreath_tower(lamp: Abelian, a: &[i64], q_growth: Q) -> Result<(GroupCtx<Semidirect<Lamps>>, TowerInput<Semidirect<Lamps>>)> {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Validation("the wreath tower needs distinct A_n".into()));
    }
    let ctx = wreath_ctx(lamp.clone())?;
    let mut a_o = vec![0; lamp.rank()];
    a_o[0] = 1;
    let r_sets = a
        .iter()
        .enumerate()
        .map(|(i, &an)| wreath_rn(&ctx, &wreath_k(&lamp, i + 1), &a_o, an))
        .collect::<Result<Vec<_>>>()?;
    let eps = (1..=a.len()).map(|n| Q::new(BigInt::from(1), BigInt::from(1) << n)).collect();
    let t = ctx.gens().iter().filter(|g| g.1 == 0).cloned().collect();
    let input = TowerInput {
        family: "wreath-tower".into(),
        r_sets,
        a: a.to_vec(),
        q: q_growth,
        eps,
        eps_family: EpsFamily::Geometric { coef: qi(1), ratio: q(1, 2) },
        t,
    };
    Ok((ctx, input))
}

/// `BS(1, d)` with `T = {±1}`.
pub fn bs_ctx(d: u32) -> Result<GroupCtx<Semidirect<Dyadic>>> {
    Semidirect::new(Dyadic::new(d)?).ctx(&[DyElem::int(1)])
}

/// Starts `a_n` of the progressions: `a_1 = 1`, then the least value
/// `≡ 1 (mod d)` past the previous progression.
pub fn bs_schedule(d: u32, a: &[i64]) -> Vec<BigInt> {
    let d = BigInt::from(d);
    let mut out = Vec::with_capacity(a.len());
    let mut next = BigInt::from(1);
    for &an in a {
        out.push(next.clone());
        next += &d * d.pow(2 * an as u32);
    }
    out
}

/// `R_n = {r·d^{-A_n} : r ∈ I_n}` with `I_n = {a_n + dj : 0 ≤ j < d^{2A_n}}`.
pub fn bs_rn(ctx: &GroupCtx<Semidirect<Dyadic>>, a_n: i64, start: &BigInt) -> Result<FinSet<(DyElem, i64)>> {
    let dy = ctx.group().base();
    let d = BigInt::from(dy.d());
    if (start % &d + &d) % &d != BigInt::from(1) % &d {
        return Err(Error::Validation(format!("a_n = {start} is not 1 mod {d}")));
    }
    if a_n < 1 {
        return Err(Error::Validation(format!("A_n must be positive, got {a_n}")));
    }
    let size = (dy.d() as u64).checked_pow(2 * a_n as u32).filter(|&s| s <= SIZE_LIMIT);
    let Some(size) = size else {
        return Err(Error::Range(format!("d^(2A_n) = {}^{} exceeds the enumeration limit", dy.d(), 2 * a_n)));
    };
    let elems = (0..size).map(|j| (dy.normalize(start + &d * BigInt::from(j), -a_n), 0));
    Ok(ctx.set(elems))
}

/// Tower input for `BS(1, d)` with `ε_n = 2d^{-A_n}`.
pub fn bs_tower(d: u32, a: &[i64], q_growth: Q) -> Result<(GroupCtx<Semidirect<Dyadic>>, TowerInput<Semidirect<Dyadic>>)> {
    let ctx = bs_ctx(d)?;
    let starts = bs_schedule(d, a);
    let r_sets = a.iter().zip(&starts).map(|(&an, s)| bs_rn(&ctx, an, s)).collect::<Result<Vec<_>>>()?;
    let db = BigInt::from(d);
    let eps = a.iter().map(|&an| Q::new(BigInt::from(2), db.pow(an as u32))).collect();
    let t = ctx.gens().iter().filter(|g| g.1 == 0).cloned().collect();
    let input = TowerInput {
        family: "bs-tower".into(),
        r_sets,
        a: a.to_vec(),
        q: q_growth,
        eps,
        eps_family: EpsFamily::Geometric { coef: qi(2), ratio: Q::new(BigInt::from(1), db) },
        t,
    };
    Ok((ctx, input))
}
