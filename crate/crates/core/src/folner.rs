//! Two-sided Følner families, the disjointification search, and the
//! symmetric ℓ²-cocycle built from its output.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::cocycle::StepVector;
use crate::error::{Error, Result};
use crate::group::{Abelian, FinSet, Group, GroupCtx, HElem, Heisenberg, Side};
use crate::num::{q_to_f64, q_to_string, qi, ratio, QSqrt, Q};
use crate::scheme::{show, CheckRow, VerifyReport};
use crate::semidirect::{wreath_ctx, LElem, Lamps, Semidirect, SIZE_LIMIT};

type SetFn<E> = Arc<dyn Fn(u64) -> Vec<E> + Send + Sync>;
type ExhaustFn<E> = Arc<dyn Fn(usize) -> Vec<E> + Send + Sync>;

/// Candidate sets `S_m` for `m_min ≤ m ≤ m_max` and an exhaustion `K_n` by
/// finite symmetric sets.
#[derive(Clone)]
pub struct FolnerFamily<G: Group> {
    pub ctx: GroupCtx<G>,
    pub name: String,
    pub m_min: u64,
    pub m_max: u64,
    sets: SetFn<G::Elem>,
    exhaustion: ExhaustFn<G::Elem>,
}

impl<G: Group> fmt::Debug for FolnerFamily<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FolnerFamily")
            .field("name", &self.name)
            .field("m_min", &self.m_min)
            .field("m_max", &self.m_max)
            .finish()
    }
}

impl<G: Group> FolnerFamily<G> {
    pub fn new(
        ctx: GroupCtx<G>,
        name: impl Into<String>,
        m_min: u64,
        m_max: u64,
        sets: impl Fn(u64) -> Vec<G::Elem> + Send + Sync + 'static,
        exhaustion: impl Fn(usize) -> Vec<G::Elem> + Send + Sync + 'static,
    ) -> Result<Self> {
        if m_min == 0 || m_min > m_max {
            return Err(Error::Validation(format!("empty parameter range [{m_min}, {m_max}]")));
        }
        Ok(Self { ctx, name: name.into(), m_min, m_max, sets: Arc::new(sets), exhaustion: Arc::new(exhaustion) })
    }

    pub fn set(&self, m: u64) -> FinSet<G::Elem> {
        self.ctx.set((self.sets)(m))
    }

    /// `K_n`, validated as finite and symmetric.
    pub fn exhaustion(&self, n: usize) -> Result<FinSet<G::Elem>> {
        let k = self.ctx.set((self.exhaustion)(n));
        if let Some(g) = k.iter().find(|g| !k.contains(&self.ctx.inv(g))) {
            return Err(Error::Validation(format!("K_{n} is not symmetric: {} lacks its inverse", show(g))));
        }
        Ok(k)
    }

    /// `K_n` symmetric and `K_n ⊆ K_{n+1}` for `n < n_max`.
    pub fn check_exhaustion(&self, n_max: usize) -> Result<()> {
        let mut prev = self.exhaustion(1)?;
        for n in 2..=n_max {
            let k = self.exhaustion(n)?;
            if let Some(g) = prev.iter().find(|g| !k.contains(g)) {
                return Err(Error::Validation(format!("K_{} ⊄ K_{n}: {} missing", n - 1, show(g))));
            }
            prev = k;
        }
        Ok(())
    }
}

/// Closed word ball of radius `r` about the identity.
pub fn word_ball<G: Group>(ctx: &GroupCtx<G>, r: usize) -> Vec<G::Elem> {
    let mut seen = BTreeSet::from([ctx.identity()]);
    let mut frontier = vec![ctx.identity()];
    for _ in 0..r {
        let mut next = Vec::new();
        for g in &frontier {
            for s in ctx.gens() {
                let h = ctx.mul(g, s);
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    seen.into_iter().collect()
}

/// `ℤ` with `S_m = [0, m)` and `K_n = [-n, n]`.
pub fn integer_intervals(m_max: u64) -> Result<FolnerFamily<Abelian>> {
    lattice_boxes(1, m_max)
}

/// `ℤ^d` with `S_m = [0, m)^d` and `K_n = [-n, n]^d`.
pub fn lattice_boxes(d: usize, m_max: u64) -> Result<FolnerFamily<Abelian>> {
    if d == 0 {
        return Err(Error::Validation("ℤ^0 is finite".into()));
    }
    let z = Abelian::lattice(d);
    let ctx = z.standard_ctx()?;
    let zs = z.clone();
    let exhaustion = move |n: usize| {
        let n = n as i64;
        let side = 2 * n + 1;
        zs.folner_box(side).into_iter().map(|v| v.into_iter().map(|x| x - n).collect()).collect()
    };
    FolnerFamily::new(ctx, format!("Z^{d} boxes"), 1, m_max, move |m| z.folner_box(m as i64), exhaustion)
}

/// Heisenberg boxes `{|a|, |b| ≤ L, |c| ≤ L²}` with `K_n` the word ball of
/// radius `n`.
pub fn heisenberg_boxes(l_max: u64) -> Result<FolnerFamily<Heisenberg>> {
    let ctx = Heisenberg::standard_ctx();
    let c2 = ctx.clone();
    let sets = |l: u64| {
        let l = l as i64;
        let mut out: Vec<HElem> = Vec::new();
        for a in -l..=l {
            for b in -l..=l {
                out.extend((-l * l..=l * l).map(|c| [a, b, c]));
            }
        }
        out
    };
    FolnerFamily::new(ctx, "Heisenberg boxes", 1, l_max, sets, move |n| word_ball(&c2, n))
}

/// Lamplighter rectangles `{(η, a) : a ∈ [0, m), supp η ⊆ [0, m)}` over a
/// finite lamp group, with `K_n` the word ball of radius `n`.
pub fn wreath_rectangles(lamp: Abelian, m_max: u64) -> Result<FolnerFamily<Semidirect<Lamps>>> {
    let values = lamp.elements().ok_or_else(|| Error::Validation("rectangles need a finite lamp group".into()))?;
    let ctx = wreath_ctx(lamp)?;
    let lamps = ctx.group().base().clone();
    let c2 = ctx.clone();
    let sets = move |m: u64| {
        let m = m as i64;
        let mut configs: Vec<LElem> = vec![Vec::new()];
        for p in 0..m {
            configs = configs
                .iter()
                .flat_map(|eta| {
                    let lamps = &lamps;
                    values.iter().map(move |v| lamps.mul(eta, &Lamps::delta(p, v.clone())))
                })
                .collect();
        }
        configs.iter().flat_map(|eta| (0..m).map(move |a| (eta.clone(), a))).collect()
    };
    FolnerFamily::new(ctx, "lamplighter rectangles", 1, m_max, sets, move |n| word_ball(&c2, n))
}

#[derive(Clone, Debug)]
struct Candidate {
    m: u64,
    size: usize,
    left: Q,
    right: Q,
    excl: Q,
}

impl Candidate {
    fn worst(&self) -> Q {
        self.left.clone().max(self.right.clone()).max(self.excl.clone())
    }

    fn describe(&self) -> String {
        format!(
            "m={} |S_m|={} left={} right={} |S_m∩E_n|/|S_m|={}",
            self.m,
            self.size,
            q_to_string(&self.left),
            q_to_string(&self.right),
            q_to_string(&self.excl)
        )
    }
}

fn max_ratio<G: Group>(ctx: &GroupCtx<G>, side: Side, k: &FinSet<G::Elem>, s: &FinSet<G::Elem>) -> Q {
    k.iter().map(|g| ratio(ctx.sym_diff_size(side, g, s), s.len())).max().unwrap_or_else(|| qi(0))
}

/// Pairwise disjoint `F_1, …, F_{n_max}` with `|gF_n△F_n|/|F_n| ≤ 1/n²` and
/// `|F_ng△F_n|/|F_n| ≤ 1/n²` for `g ∈ K_n`, and `|F_n|` strictly increasing.
///
/// For each `n` the search tries `m = m_prev + 1` and doubles until some
/// `S_m` has both boundary ratios and `|S_m ∩ E_n|/|S_m|` below `1/(4n²)`,
/// `|S_m| > n`, and `|S_m \ E_n| > |F_{n-1}|`, where `E_n = F_1 ∪ … ∪ F_{n-1}`.
/// Then `F_n = S_m \ E_n`.
pub fn disjointify<G: Group>(fam: &FolnerFamily<G>, n_max: usize) -> Result<Vec<FinSet<G::Elem>>> {
    fam.check_exhaustion(n_max)?;
    let ctx = &fam.ctx;
    let mut out: Vec<FinSet<G::Elem>> = Vec::new();
    let mut e = ctx.empty_set();
    let mut m = fam.m_min;
    for n in 1..=n_max {
        let k = fam.exhaustion(n)?;
        let thr = Q::new(1.into(), (4 * n * n).into());
        let mut best: Option<Candidate> = None;
        let found = loop {
            if m > fam.m_max {
                break None;
            }
            let s = fam.set(m);
            if s.len() as u64 > SIZE_LIMIT {
                break None;
            }
            let cand = Candidate {
                m,
                size: s.len(),
                left: max_ratio(ctx, Side::Left, &k, &s),
                right: max_ratio(ctx, Side::Right, &k, &s),
                excl: if s.is_empty() { qi(1) } else { ratio(s.intersection_len(&e)?, s.len()) },
            };
            let f = s.minus(&e)?;
            let grows = out.last().is_none_or(|p| f.len() > p.len());
            if cand.worst() < thr && s.len() > n && grows {
                break Some((cand, f));
            }
            if best.as_ref().is_none_or(|b| cand.worst() < b.worst()) {
                best = Some(cand);
            }
            m = m.saturating_mul(2);
        };
        let Some((cand, f)) = found else {
            let detail = best.map_or_else(|| "no candidate within range".to_string(), |b| b.describe());
            return Err(Error::Construction(format!(
                "{}: no S_m with m ≤ {} meets the thresholds for n = {n} (1/(4n²) = {}); best {detail}",
                fam.name,
                fam.m_max,
                q_to_string(&thr)
            )));
        };
        e = e.union(&f)?;
        out.push(f);
        m = cand.m + 1;
    }
    Ok(out)
}

/// One CSV row of a disjointified window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FolnerRow {
    pub n: usize,
    pub size: usize,
    pub max_left_ratio: String,
    pub max_right_ratio: String,
    pub max_left_f64: f64,
    pub max_right_f64: f64,
}

/// Re-check the conclusions of [`disjointify`] on `sets`.
pub fn check_disjointified<G: Group>(fam: &FolnerFamily<G>, sets: &[FinSet<G::Elem>]) -> Result<(VerifyReport, Vec<FolnerRow>)> {
    let ctx = &fam.ctx;
    let mut rep = VerifyReport::default();
    let mut rows = Vec::new();
    for (i, f) in sets.iter().enumerate() {
        let n = i + 1;
        for (j, g) in sets[..i].iter().enumerate() {
            let common = f.first_common(g).map(show);
            rep.push(
                CheckRow::check("folner: F_n pairwise disjoint", format!("F_{} ∩ F_{n}", j + 1), common.is_none())
                    .witness_if_failed(|| common.unwrap_or_default()),
            );
        }
        if f.is_empty() {
            rep.push(CheckRow::check("folner: F_n nonempty", format!("n={n}"), false));
            continue;
        }
        let k = fam.exhaustion(n)?;
        let bound = Q::new(1.into(), ((n * n) as i64).into());
        let left = max_ratio(ctx, Side::Left, &k, f);
        let right = max_ratio(ctx, Side::Right, &k, f);
        rep.push(
            CheckRow::check("folner: max_{g∈K_n} |gF_n△F_n|/|F_n| ≤ 1/n²", format!("n={n}"), left <= bound)
                .with_value(q_to_string(&left)),
        );
        rep.push(
            CheckRow::check("folner: max_{g∈K_n} |F_ng△F_n|/|F_n| ≤ 1/n²", format!("n={n}"), right <= bound)
                .with_value(q_to_string(&right)),
        );
        if i > 0 {
            let prev = sets[i - 1].len();
            rep.push(
                CheckRow::check("folner: |F_n| strictly increasing", format!("n={n}"), f.len() > prev)
                    .with_value(format!("{prev} < {}", f.len())),
            );
        }
        rows.push(FolnerRow {
            n,
            size: f.len(),
            max_left_f64: q_to_f64(&left),
            max_right_f64: q_to_f64(&right),
            max_left_ratio: q_to_string(&left),
            max_right_ratio: q_to_string(&right),
        });
    }
    Ok((rep, rows))
}

pub fn folner_csv(rows: &[FolnerRow]) -> String {
    let mut s = String::from("n,size,max_left_ratio,max_right_ratio\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.n, r.size, r.max_left_ratio, r.max_right_ratio));
    }
    s
}

/// `ξ = Σ 1/√|F_n| · 1_{F_n}`.
pub fn symmetric_cocycle<G: Group>(ctx: &GroupCtx<G>, sets: Vec<FinSet<G::Elem>>) -> Result<StepVector<G>> {
    StepVector::normalized(ctx.clone(), qi(0), qi(1), sets)
}

/// For each `g` in `tested` and each side: the truncated difference norm is
/// at most `Σ_{n≤N} |gF_n△F_n|/|F_n|`, which in turn is at most
/// `Σ_{n≤N} b_n(g)` with `b_n = 1/n²` when `g ∈ K_n` and `2` otherwise.
pub fn symmetric_norm_check<G: Group>(
    fam: &FolnerFamily<G>,
    v: &StepVector<G>,
    tested: &[G::Elem],
    n: usize,
) -> Result<VerifyReport> {
    let ctx = v.ctx();
    let n = n.min(v.len());
    let ks: Vec<FinSet<G::Elem>> = (1..=n).map(|k| fam.exhaustion(k)).collect::<Result<_>>()?;
    let mut rep = VerifyReport::default();
    for g in tested {
        let budget: Q = ks
            .iter()
            .enumerate()
            .map(|(i, k)| if k.contains(g) { Q::new(1.into(), (((i + 1) * (i + 1)) as i64).into()) } else { qi(2) })
            .sum();
        for side in [Side::Left, Side::Right] {
            let name = if side == Side::Left { "left" } else { "right" };
            let norm = v.diff_norm_sq(side, g, n);
            let phi: Q = v.terms()[..n].iter().map(|t| ratio(ctx.sym_diff_size(side, g, &t.set), t.set.len())).sum();
            let scope = format!("g={} N={n}", show(g));
            rep.push(
                CheckRow::check(&format!("symcoc: {name} ‖π(g)ξ−ξ‖² ≤ Σ|gF△F|/|F|"), scope.clone(), norm.cmp_rational(&phi).is_le())
                    .with_value(format!("{} ≤ {}", norm, q_to_string(&phi))),
            );
            rep.push(
                CheckRow::check(&format!("symcoc: {name} Σ|gF△F|/|F| ≤ Σ 1/n² budget"), scope, phi <= budget)
                    .with_value(format!("{} ≤ {}", q_to_string(&phi), q_to_string(&budget))),
            );
        }
    }
    Ok(rep)
}

/// For `p ∈ {0, 1/√|F_N|}`, `N' ↦ ‖ξ_{N'} − p‖²` over `F_1 ∪ … ∪ F_{N'}` is
/// nondecreasing, strictly at each `N'` with `|F_{N'}| ≠ 1/p²`; and
/// `‖ξ_N‖² = N`.
pub fn non_coboundary_check<G: Group>(v: &StepVector<G>, n: usize) -> VerifyReport {
    let n = n.min(v.len());
    let mut rep = VerifyReport::default();
    if n == 0 {
        return rep;
    }
    let norm = v.norm_sq_minus(&QSqrt::zero(), n);
    rep.push(CheckRow::check("symcoc: ‖ξ_N‖² = N", format!("N={n}"), norm.as_rational() == Some(qi(n as i64))).with_value(norm.to_string()));
    let last = v.terms()[n - 1].root;
    for (label, p) in [("0".to_string(), QSqrt::zero()), (format!("1/√{last}"), QSqrt::inv_sqrt(last))] {
        let mut prev = QSqrt::zero();
        let mut ok = true;
        let mut witness = None;
        for k in 1..=n {
            let cur = v.norm_sq_minus(&p, k);
            let strict = v.weight(k - 1) != p;
            let good = if strict { cur > prev } else { cur >= prev };
            if !good && witness.is_none() {
                witness = Some(format!("N'={k}: {cur} vs {prev}"));
            }
            ok &= good;
            prev = cur;
        }
        let mut row = CheckRow::check("symcoc: ‖ξ_N − p‖² grows with N", format!("p={label} N={n}"), ok).with_value(prev.to_string());
        if let Some(w) = witness {
            row = row.with_witness(w);
        }
        rep.push(row);
    }
    rep
}
