//! Lifting finite sets and left schemes through an amenable kernel
//! `1 → N → G → Q → 1`.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Abelian, DirectProduct, FinSet, Group, GroupCtx, HElem, Heisenberg, Side};
use crate::num::{q_to_string, qi, ratio, Q};
use crate::scheme::{show, CheckRow, GenBudget, SchemeWindow, VerifyReport, WindowParams};
use crate::semidirect::SIZE_LIMIT;

pub type GElem<X> = <<X as Extension>::G as Group>::Elem;
pub type QElem<X> = <<X as Extension>::Q as Group>::Elem;

/// Oracles for an extension `1 → N → G → Q → 1`.
pub trait Extension {
    type G: Group;
    type Q: Group;

    fn g_ctx(&self) -> &GroupCtx<Self::G>;
    fn q_ctx(&self) -> &GroupCtx<Self::Q>;
    /// The quotient map.
    fn quotient(&self, g: &GElem<Self>) -> QElem<Self>;
    /// A set-theoretic section `Q → G`.
    fn lift(&self, x: &QElem<Self>) -> GElem<Self>;
    fn in_kernel(&self, g: &GElem<Self>) -> bool;
    fn kernel_finite(&self) -> bool;
    /// Candidate Følner sets `K ⊆ N` in increasing size.
    fn kernel_candidates(&self) -> Box<dyn Iterator<Item = Vec<GElem<Self>>> + '_>;
    fn describe(&self) -> String;
}

/// Følner boxes of an abelian kernel: all of `N` when finite, else the full
/// torsion part times `[0, L)^d` for `L = 1, 2, …, l_max`.
fn abelian_candidates(n: &Abelian, l_max: u64) -> Box<dyn Iterator<Item = Vec<Vec<i64>>> + '_> {
    if n.is_finite() {
        return Box::new(std::iter::once(n.folner_box(1)));
    }
    let d = n.moduli().iter().filter(|&&m| m == 0).count() as u32;
    let torsion: u64 = n.moduli().iter().filter(|&&m| m > 0).product();
    Box::new(
        (1..=l_max as i64)
            .take_while(move |&l| (l as u64).checked_pow(d).and_then(|v| v.checked_mul(torsion)).is_some_and(|s| s <= SIZE_LIMIT))
            .map(move |l| n.folner_box(l)),
    )
}

/// `G = Q × N` with `N` abelian. With a twist seed, the section is
/// `x ↦ (x, c(x))` for a pseudo-random `c: Q → N`, which makes the
/// correction elements `α(s, d)` nontrivial.
#[derive(Clone, Debug)]
pub struct DirectExt<Qg: Group> {
    g: GroupCtx<DirectProduct<Qg, Abelian>>,
    q: GroupCtx<Qg>,
    n: Abelian,
    twist: Option<u64>,
    l_max: u64,
}

impl<Qg: Group> DirectExt<Qg> {
    /// `S = (S̄ × {0}) ∪ ({e} × T_N)` with `s_o = (s̄_o, 0)`.
    pub fn new(q: GroupCtx<Qg>, n: Abelian, twist: Option<u64>) -> Result<Self> {
        let grp = DirectProduct::new(q.group().clone(), n.clone());
        let zero = n.identity();
        let mut gens: Vec<_> = q.gens().iter().map(|s| (s.clone(), zero.clone())).collect();
        gens.extend(n.standard_gens().into_iter().map(|t| (q.identity(), t)));
        let g = GroupCtx::new(grp, gens, (q.s_o().clone(), zero))?;
        Ok(Self { g, q, n, twist, l_max: 1 << 12 })
    }

    pub fn kernel(&self) -> &Abelian {
        &self.n
    }

    pub fn with_l_max(mut self, l_max: u64) -> Self {
        self.l_max = l_max;
        self
    }

    fn twist_value(&self, x: &Qg::Elem) -> Vec<i64> {
        let Some(seed) = self.twist else {
            return self.n.identity();
        };
        // FNV-1a over the JSON encoding, mixed with the seed
        let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
        for b in serde_json::to_vec(x).expect("serializable").iter() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        let mut v: Vec<i64> = self
            .n
            .moduli()
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let r = (h.rotate_left(13 * i as u32) % 5) as i64;
                if m == 0 {
                    r - 2
                } else {
                    r
                }
            })
            .collect();
        self.n.reduce(&mut v);
        v
    }
}

impl<Qg: Group> Extension for DirectExt<Qg> {
    type G = DirectProduct<Qg, Abelian>;
    type Q = Qg;

    fn g_ctx(&self) -> &GroupCtx<Self::G> {
        &self.g
    }

    fn q_ctx(&self) -> &GroupCtx<Qg> {
        &self.q
    }

    fn quotient(&self, g: &(Qg::Elem, Vec<i64>)) -> Qg::Elem {
        g.0.clone()
    }

    fn lift(&self, x: &Qg::Elem) -> (Qg::Elem, Vec<i64>) {
        (x.clone(), self.twist_value(x))
    }

    fn in_kernel(&self, g: &(Qg::Elem, Vec<i64>)) -> bool {
        g.0 == self.q.identity()
    }

    fn kernel_finite(&self) -> bool {
        self.n.is_finite()
    }

    fn kernel_candidates(&self) -> Box<dyn Iterator<Item = Vec<(Qg::Elem, Vec<i64>)>> + '_> {
        let e = self.q.identity();
        Box::new(abelian_candidates(&self.n, self.l_max).map(move |k| k.into_iter().map(|v| (e.clone(), v)).collect()))
    }

    fn describe(&self) -> String {
        let twist = self.twist.map_or(String::new(), |s| format!(", twist {s}"));
        format!("{} × abelian{:?}{twist}", self.q.group().kind(), self.n.moduli())
    }
}

/// `H₃(ℤ) → ℤ²`, `(a, b, c) ↦ (a, b)`, with kernel the center. The section
/// `(a, b) ↦ (a, b, 0)` is not a homomorphism, so `α(y, d) = z^a`.
#[derive(Clone, Debug)]
pub struct CentralHeisExt {
    g: GroupCtx<Heisenberg>,
    q: GroupCtx<Abelian>,
    l_max: u64,
}

impl CentralHeisExt {
    pub fn new() -> Self {
        let q = Abelian::lattice(2).standard_ctx().expect("ℤ² context");
        Self { g: Heisenberg::standard_ctx(), q, l_max: 1 << 12 }
    }
}

impl Default for CentralHeisExt {
    fn default() -> Self {
        Self::new()
    }
}

impl Extension for CentralHeisExt {
    type G = Heisenberg;
    type Q = Abelian;

    fn g_ctx(&self) -> &GroupCtx<Heisenberg> {
        &self.g
    }

    fn q_ctx(&self) -> &GroupCtx<Abelian> {
        &self.q
    }

    fn quotient(&self, g: &HElem) -> Vec<i64> {
        vec![g[0], g[1]]
    }

    fn lift(&self, x: &Vec<i64>) -> HElem {
        [x[0], x[1], 0]
    }

    fn in_kernel(&self, g: &HElem) -> bool {
        g[0] == 0 && g[1] == 0
    }

    fn kernel_finite(&self) -> bool {
        false
    }

    fn kernel_candidates(&self) -> Box<dyn Iterator<Item = Vec<HElem>> + '_> {
        Box::new((1..=self.l_max as i64).map(|l| (0..l).map(|c| [0, 0, c]).collect()))
    }

    fn describe(&self) -> String {
        "heisenberg → Z^2 (central quotient)".into()
    }
}

/// Sampled checks of the extension oracles.
pub fn check_extension<X: Extension>(ext: &X, samples: usize, seed: u64) -> VerifyReport {
    let g = ext.g_ctx();
    let qc = ext.q_ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = VerifyReport::default();
    let mut hom = None;
    let mut sec = None;
    for _ in 0..samples {
        let a = g.random_elem(&mut rng, 6);
        let b = g.random_elem(&mut rng, 6);
        if ext.quotient(&g.mul(&a, &b)) != qc.mul(&ext.quotient(&a), &ext.quotient(&b)) && hom.is_none() {
            hom = Some(format!("a={} b={}", show(&a), show(&b)));
        }
        let x = qc.random_elem(&mut rng, 6);
        if ext.quotient(&ext.lift(&x)) != x && sec.is_none() {
            sec = Some(show(&x));
        }
    }
    let scope = format!("{samples} samples");
    rep.push(CheckRow::check("ext: q is a homomorphism", scope.clone(), hom.is_none()).witness_if_failed(|| hom.unwrap_or_default()));
    rep.push(CheckRow::check("ext: q∘lift = id", scope, sec.is_none()).witness_if_failed(|| sec.unwrap_or_default()));
    let mut outside = None;
    for k in ext.kernel_candidates().take(4) {
        if let Some(h) = k.iter().find(|h| !ext.in_kernel(h) || ext.quotient(h) != qc.identity()) {
            outside = Some(show(h));
            break;
        }
    }
    rep.push(CheckRow::check("ext: Følner candidates lie in N", "first 4 candidates", outside.is_none()).witness_if_failed(|| outside.unwrap_or_default()));
    rep
}

/// Which element of each `Γ̄`-orbit in `D ∪ S̄D` serves as representative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rep {
    #[default]
    Least,
    Greatest,
}

/// Bound on `|k|` when locating `y = s̄_o^k r` in quotients without a level
/// homomorphism.
pub const ORBIT_SEARCH_BOUND: i64 = 256;

/// `τ(s̄_o^k r) = s_o^k·ṙ` on `Y = Γ̄(D ∪ S̄D)`.
#[derive(Clone, Debug)]
pub struct Section<X: Extension + ?Sized> {
    reps: Vec<(QElem<X>, GElem<X>)>,
    charted: BTreeMap<QElem<X>, (usize, i64)>,
}

impl<X: Extension + ?Sized> Section<X> {
    pub fn reps(&self) -> impl Iterator<Item = &(QElem<X>, GElem<X>)> {
        self.reps.iter()
    }

    /// `(i, k)` with `y = s̄_o^k·r_i`.
    fn locate(&self, ext: &X, y: &QElem<X>) -> Result<(usize, i64)> {
        let qc = ext.q_ctx();
        if qc.charted() {
            let l = qc.group().level(y).expect("charted");
            let key = qc.mul(&qc.gamma(-l), y);
            let &(i, lr) = self
                .charted
                .get(&key)
                .ok_or_else(|| Error::Range(format!("{} lies outside the truncation Y", show(y))))?;
            return Ok((i, l - lr));
        }
        for (i, (r, _)) in self.reps.iter().enumerate() {
            for k in -ORBIT_SEARCH_BOUND..=ORBIT_SEARCH_BOUND {
                if qc.mul(&qc.gamma(k), r) == *y {
                    return Ok((i, k));
                }
            }
        }
        Err(Error::Range(format!("{} is not within s_o^±{ORBIT_SEARCH_BOUND} of a representative", show(y))))
    }

    pub fn tau(&self, ext: &X, y: &QElem<X>) -> Result<GElem<X>> {
        let (i, k) = self.locate(ext, y)?;
        let g = ext.g_ctx();
        Ok(g.mul(&g.gamma(k), &self.reps[i].1))
    }
}

fn check_infinite_order<X: Extension + ?Sized>(ext: &X) -> Result<()> {
    let qc = ext.q_ctx();
    let so = ext.quotient(ext.g_ctx().s_o());
    let e = qc.identity();
    let mut p = so.clone();
    for k in 1..=1024 {
        if p == e {
            return Err(Error::Domain(format!("q(s_o) has finite order {k}")));
        }
        p = qc.mul(&p, &so);
    }
    Ok(())
}

/// `D ∪ q(S)·D`.
fn neighbourhood<X: Extension + ?Sized>(ext: &X, d: &FinSet<QElem<X>>) -> BTreeSet<QElem<X>> {
    let qc = ext.q_ctx();
    let sbar: BTreeSet<QElem<X>> = ext.g_ctx().gens().iter().map(|s| ext.quotient(s)).collect();
    let mut y: BTreeSet<QElem<X>> = d.iter().cloned().collect();
    for s in &sbar {
        y.extend(d.iter().map(|x| qc.mul(s, x)));
    }
    y
}

/// Build `τ` with one representative per `Γ̄`-orbit of `D ∪ S̄D`.
pub fn build_section<X: Extension + ?Sized>(ext: &X, d: &FinSet<QElem<X>>, rep: Rep) -> Result<Section<X>> {
    if d.group_id() != ext.q_ctx().id() {
        return Err(Error::Domain("D is not a subset of Q".into()));
    }
    check_infinite_order(ext)?;
    if ext.quotient(ext.g_ctx().s_o()) != *ext.q_ctx().s_o() {
        return Err(Error::Validation("q(s_o) must be the distinguished element of Q".into()));
    }
    let qc = ext.q_ctx();
    let mut pts: Vec<QElem<X>> = neighbourhood(ext, d).into_iter().collect();
    if rep == Rep::Greatest {
        pts.reverse();
    }
    let mut section = Section { reps: Vec::new(), charted: BTreeMap::new() };
    for y in pts {
        if qc.charted() {
            let l = qc.group().level(&y).expect("charted");
            let key = qc.mul(&qc.gamma(-l), &y);
            if let std::collections::btree_map::Entry::Vacant(v) = section.charted.entry(key) {
                v.insert((section.reps.len(), l));
                let lifted = ext.lift(&y);
                section.reps.push((y, lifted));
            }
        } else if section.locate(ext, &y).is_err() {
            let lifted = ext.lift(&y);
            section.reps.push((y, lifted));
        }
    }
    Ok(section)
}

/// `q∘τ = id` on `D ∪ S̄D` and `τ(s̄_o^k y) = s_o^k τ(y)` for `0 < |k| ≤ 2`.
pub fn check_section<X: Extension + ?Sized>(ext: &X, section: &Section<X>, d: &FinSet<QElem<X>>) -> Result<VerifyReport> {
    let g = ext.g_ctx();
    let qc = ext.q_ctx();
    let mut rep = VerifyReport::default();
    let y = neighbourhood(ext, d);
    let mut bad_sec = None;
    let mut bad_eq = None;
    for x in &y {
        let t = section.tau(ext, x)?;
        if ext.quotient(&t) != *x && bad_sec.is_none() {
            bad_sec = Some(show(x));
        }
        for k in [-2, -1, 1, 2] {
            let moved = section.tau(ext, &qc.mul(&qc.gamma(k), x))?;
            if moved != g.mul(&g.gamma(k), &t) && bad_eq.is_none() {
                bad_eq = Some(format!("y={} k={k}", show(x)));
            }
        }
    }
    let scope = format!("|D ∪ S̄D|={}", y.len());
    rep.push(CheckRow::check("section: q∘τ = id", scope.clone(), bad_sec.is_none()).witness_if_failed(|| bad_sec.unwrap_or_default()));
    rep.push(CheckRow::check("section: τ(γ̄y) = q|_Γ⁻¹(γ̄)τ(y)", scope, bad_eq.is_none()).witness_if_failed(|| bad_eq.unwrap_or_default()));
    Ok(rep)
}

/// A lifted set `E = τ(D)·K`.
#[derive(Clone, Debug)]
pub struct LiftedSet<X: Extension + ?Sized> {
    pub e: FinSet<GElem<X>>,
    pub k: FinSet<GElem<X>>,
    pub section: Section<X>,
    /// Distinct correction elements `α(s, d) = τ(q(s)d)⁻¹·s·τ(d)`.
    pub alphas: BTreeSet<GElem<X>>,
    pub worst_alpha_ratio: Q,
}

fn alpha_ratio<G: Group>(ctx: &GroupCtx<G>, alphas: &BTreeSet<G::Elem>, k: &FinSet<G::Elem>) -> Q {
    alphas.iter().map(|a| ratio(ctx.sym_diff_size(Side::Left, a, k), k.len())).max().unwrap_or_else(|| qi(0))
}

/// Lift `D ⊆ Q` with `D s̄_o ∩ D = ∅` to `E ⊆ G`, choosing the first
/// candidate `K ⊆ N` with `|α(s,d)K △ K|/|K| ≤ eps` for all `s ∈ S`, `d ∈ D`.
pub fn lift_set<X: Extension + ?Sized>(ext: &X, d: &FinSet<QElem<X>>, eps: &Q, rep: Rep) -> Result<LiftedSet<X>> {
    let g = ext.g_ctx();
    let qc = ext.q_ctx();
    if let Some(x) = d.iter().find(|x| d.contains(&qc.mul(x, qc.s_o()))) {
        return Err(Error::Validation(format!("D s̄_o ∩ D ≠ ∅: {} and its translate", show(x))));
    }
    let section = build_section(ext, d, rep)?;
    let mut tau_d = BTreeMap::new();
    for x in d.iter() {
        tau_d.insert(x.clone(), section.tau(ext, x)?);
    }
    let mut alphas = BTreeSet::new();
    for s in g.gens() {
        let sbar = ext.quotient(s);
        for (x, t) in &tau_d {
            let target = section.tau(ext, &qc.mul(&sbar, x))?;
            let a = g.mul(&g.inv(&target), &g.mul(s, t));
            if !ext.in_kernel(&a) {
                return Err(Error::Construction(format!("α({}, {}) = {} is not in N", show(s), show(x), show(&a))));
            }
            alphas.insert(a);
        }
    }
    let mut best: Option<(Q, usize)> = None;
    let mut chosen = None;
    for cand in ext.kernel_candidates() {
        let k = g.set(cand);
        let r = alpha_ratio(g, &alphas, &k);
        if r <= *eps {
            chosen = Some((k, r));
            break;
        }
        if best.as_ref().is_none_or(|b| r < b.0) {
            best = Some((r, k.len()));
        }
    }
    let Some((k, worst)) = chosen else {
        let detail = best.map_or("no candidates".into(), |(r, n)| format!("best worst-α ratio {} at |K|={n}", q_to_string(&r)));
        return Err(Error::Construction(format!("no admissible K ⊆ N for ε = {}: {detail}", q_to_string(eps))));
    };
    if (tau_d.len() as u64).saturating_mul(k.len() as u64) > SIZE_LIMIT {
        return Err(Error::Range(format!("|E| = {}·{} exceeds the size limit", tau_d.len(), k.len())));
    }
    let mut e = g.empty_set();
    for t in tau_d.values() {
        for n in k.iter() {
            e.insert(g.mul(t, n));
        }
    }
    Ok(LiftedSet { e, k, section, alphas, worst_alpha_ratio: worst })
}

fn gamma_band<G: Group>(ctx: &GroupCtx<G>, e: &FinSet<G::Elem>, bound: i64) -> FinSet<G::Elem> {
    let mut out = ctx.empty_set();
    for k in -bound..=bound {
        let gk = ctx.gamma(k);
        for x in e.iter() {
            out.insert(ctx.mul(&gk, x));
        }
    }
    out
}

/// Conclusions (1)–(5) of the set lift, with `Γ` truncated to
/// `|k| ≤ shift_bound`.
pub fn check_lift<X: Extension + ?Sized>(
    ext: &X,
    d: &FinSet<QElem<X>>,
    lifted: &LiftedSet<X>,
    eps: &Q,
    shift_bound: i64,
) -> Result<VerifyReport> {
    let g = ext.g_ctx();
    let qc = ext.q_ctx();
    let e = &lifted.e;
    let mut rep = check_section(ext, &lifted.section, d)?;

    let image: BTreeSet<QElem<X>> = e.iter().map(|h| ext.quotient(h)).collect();
    rep.push(CheckRow::check("lift(1): q(E) = D", format!("|D|={}", d.len()), image == *d.elems()));
    rep.push(
        CheckRow::check("lift: |E| = |D|·|K| (fibers disjoint)", format!("|K|={}", lifted.k.len()), e.len() == d.len() * lifted.k.len())
            .with_value(e.len().to_string()),
    );
    let hit = e.iter().find(|h| e.contains(&g.mul(h, g.s_o())));
    rep.push(CheckRow::check("lift(2): E s_o ∩ E = ∅", format!("|E|={}", e.len()), hit.is_none()).witness_if_failed(|| hit.map(show).unwrap_or_default()));

    for s in g.gens() {
        let lhs = ratio(g.sym_diff_size(Side::Left, s, e), e.len());
        let rhs = ratio(qc.sym_diff_size(Side::Left, &ext.quotient(s), d), d.len()) + eps;
        rep.push(
            CheckRow::check("lift(3): |sE△E|/|E| ≤ |q(s)D△D|/|D| + ε", format!("s={}", show(s)), lhs <= rhs)
                .with_value(format!("{} ≤ {}", q_to_string(&lhs), q_to_string(&rhs))),
        );
    }
    let mut bad4 = None;
    for k in (-shift_bound..=shift_bound).filter(|&k| k != 0) {
        let lhs = ratio(g.sym_diff_size(Side::Left, &g.gamma(k), e), e.len());
        let rhs = ratio(qc.sym_diff_size(Side::Left, &qc.gamma(k), d), d.len());
        if lhs != rhs && bad4.is_none() {
            bad4 = Some(format!("k={k}: {} vs {}", q_to_string(&lhs), q_to_string(&rhs)));
        }
    }
    rep.push(
        CheckRow::check("lift(4): |γE△E|/|E| = |q(γ)D△D|/|D|", format!("|k| ≤ {shift_bound}"), bad4.is_none())
            .witness_if_failed(|| bad4.unwrap_or_default()),
    );
    let ge = gamma_band(g, e, shift_bound).symdiff(e)?;
    let gd = gamma_band(qc, d, shift_bound).symdiff(d)?;
    let q_ge: BTreeSet<QElem<X>> = ge.iter().map(|h| ext.quotient(h)).collect();
    rep.push(CheckRow::check("lift(5): q(ΓE△E) = Γ̄D△D", format!("|k| ≤ {shift_bound}"), q_ge == *gd.elems()));
    Ok(rep)
}

/// Lift every `D_n` with `ε = 1/n²`. Budgets are `|q(s)D_n△D_n|/|D_n| + 1/n²`.
pub fn lift_scheme<X: Extension + ?Sized>(ext: &X, qs: &SchemeWindow<X::Q>, rep: Rep) -> Result<(SchemeWindow<X::G>, Vec<LiftedSet<X>>)> {
    if qs.ctx.id() != ext.q_ctx().id() {
        return Err(Error::Domain("the scheme does not live on the quotient".into()));
    }
    let g = ext.g_ctx();
    let qc = ext.q_ctx();
    let mut lifts = Vec::new();
    let mut sets = Vec::new();
    let mut budgets: Vec<GenBudget<GElem<X>>> = g.gens().iter().map(|s| GenBudget { gen: s.clone(), per_n: Vec::new() }).collect();
    for (i, d) in qs.sets.iter().enumerate() {
        let n = (i + 1) as i64;
        let eps = Q::new(1.into(), (n * n).into());
        let l = lift_set(ext, d, &eps, rep)?;
        for b in &mut budgets {
            let r = ratio(qc.sym_diff_size(Side::Left, &ext.quotient(&b.gen), d), d.len());
            b.per_n.push(r + &eps);
        }
        sets.push(l.e.clone());
        lifts.push(l);
    }
    let mut params = WindowParams::new(format!("lift({})", qs.params.family));
    params.budgets = budgets;
    params.q = qs.params.q.clone();
    params.provenance = qs.params.provenance.clone();
    params.provenance.push(format!("lifted through {}", ext.describe()));
    let w = SchemeWindow::new(g.clone(), sets, params, qs.kappa.clone())?;
    Ok((w, lifts))
}

/// `Φ_E(s_o^k)` and `Φ_D(s̄_o^k)` agree term by term for `|k| ≤ shift_bound`.
pub fn check_lifted_gamma<X: Extension + ?Sized>(ext: &X, qs: &SchemeWindow<X::Q>, lifted: &SchemeWindow<X::G>, shift_bound: i64) -> VerifyReport {
    let g = ext.g_ctx();
    let qc = ext.q_ctx();
    let mut rep = VerifyReport::default();
    for (i, (e, d)) in lifted.sets.iter().zip(&qs.sets).enumerate() {
        let bad = (-shift_bound..=shift_bound).filter(|&k| k != 0).find(|&k| {
            ratio(g.sym_diff_size(Side::Left, &g.gamma(k), e), e.len()) != ratio(qc.sym_diff_size(Side::Left, &qc.gamma(k), d), d.len())
        });
        rep.push(
            CheckRow::check("lift: Φ_E(γ) = Φ_D(q(γ)) termwise", format!("n={} |k| ≤ {shift_bound}", i + 1), bad.is_none())
                .witness_if_failed(|| format!("k={}", bad.unwrap_or_default())),
        );
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nilpotent::{build_heisenberg_scheme, BoxParams};
    use crate::num::q;
    use crate::scheme::verify_scheme;

    #[test]
    fn trivial_kernel_singleton() {
        let ext = DirectExt::new(Heisenberg::standard_ctx(), Abelian::new(vec![]), None).unwrap();
        let d = ext.q_ctx().set([[0, 5, 1]]);
        let l = lift_set(&ext, &d, &qi(0), Rep::Least).unwrap();
        assert_eq!(l.e.len(), 1);
        assert_eq!(l.section.tau(&ext, &[0, 5, 1]).unwrap(), ext.lift(&[0, 5, 1]));
    }

    #[test]
    fn finite_kernel_lift() {
        let ext = DirectExt::new(Heisenberg::standard_ctx(), Abelian::cyclic(2), None).unwrap();
        assert!(check_extension(&ext, 50, 1).all_pass());
        let w = build_heisenberg_scheme(&BoxParams::desk(2)).unwrap();
        for d in &w.sets {
            let l = lift_set(&ext, d, &qi(0), Rep::Least).unwrap();
            assert_eq!(l.worst_alpha_ratio, qi(0));
            assert_eq!(l.e.len(), 2 * d.len());
            // τ picks the 0-flagged lift of each representative
            assert!(l.section.reps().all(|(_, t)| t.1 == vec![0]));
            let rep = check_lift(&ext, d, &l, &qi(0), 8).unwrap();
            assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn twisted_integer_kernel() {
        let ext = DirectExt::new(Heisenberg::standard_ctx(), Abelian::lattice(1), Some(7)).unwrap();
        let d = ext.q_ctx().set((0..2).flat_map(|b| (0..3).map(move |c| [0, b, c])));
        let eps = q(1, 4);
        let l = lift_set(&ext, &d, &eps, Rep::Least).unwrap();
        assert!(l.alphas.iter().any(|a| a.1 != vec![0]));
        // interval K = [0, L): ratio 2|α|/L
        let max_alpha = l.alphas.iter().map(|a| a.1[0].abs()).max().unwrap();
        let len = l.k.len() as i64;
        assert!(2 * max_alpha * 4 <= len && 2 * max_alpha * 4 > len - 4);
        assert!(check_lift(&ext, &d, &l, &eps, 6).unwrap().all_pass());
    }

    #[test]
    fn central_quotient_alpha() {
        let ext = CentralHeisExt::new();
        assert!(check_extension(&ext, 50, 2).all_pass());
        let qc = ext.q_ctx();
        let d = qc.set((0..1).flat_map(|a| (0..3).map(move |b| vec![a, b])).chain([vec![3, 0]]));
        let eps = q(1, 2);
        let l = lift_set(&ext, &d, &eps, Rep::Least).unwrap();
        assert!(l.alphas.contains(&[0, 0, 3]));
        assert!(check_lift(&ext, &d, &l, &eps, 5).unwrap().all_pass());
        let bad = qc.set([vec![0, 0], vec![1, 0]]);
        assert!(matches!(lift_set(&ext, &bad, &eps, Rep::Least), Err(Error::Validation(_))));
        let tight = CentralHeisExt { l_max: 4, ..CentralHeisExt::new() };
        assert!(matches!(lift_set(&tight, &d, &q(1, 100), Rep::Least), Err(Error::Construction(_))));
    }

    #[test]
    fn lifted_scheme_passes_and_is_rep_independent() {
        let ext = DirectExt::new(Heisenberg::standard_ctx(), Abelian::cyclic(2), Some(3)).unwrap();
        let w = build_heisenberg_scheme(&BoxParams::desk(3)).unwrap();
        let (lw, lifts) = lift_scheme(&ext, &w, Rep::Least).unwrap();
        let rep = verify_scheme(&lw, 8);
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert!(check_lifted_gamma(&ext, &w, &lw, 8).all_pass());
        for (l, d) in lifts.iter().zip(&w.sets) {
            assert!(check_lift(&ext, d, l, &l.worst_alpha_ratio, 4).unwrap().all_pass());
        }
        let (lw2, _) = lift_scheme(&ext, &w, Rep::Greatest).unwrap();
        assert!(verify_scheme(&lw2, 8).all_pass());
        for (a, b) in lw.sets.iter().zip(&lw2.sets) {
            assert_eq!(a.len(), b.len());
        }
    }
}
