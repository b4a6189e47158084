//! Inhomogeneous product measures on `{0,1}^G` seen through finite windows.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cocycle::StepVector;
use crate::error::{Error, Result};
use crate::group::{FinSet, Group, GroupCtx, Side};
use crate::num::{q, q_to_f64, q_to_string, qi, sqrt_bounds, Kappa, QSqrt, Q};
use crate::par;
use crate::scheme::{show, CheckRow, GammaProfile, SchemeWindow};

const ENCLOSURE_BITS: u64 = 128;

/// `μ_ξ = ⊗_h (ξ(h), 1 − ξ(h))` with `ξ = 1/2 + ε·Σ 1/√|F_n|·1_{F_n}`,
/// possibly translated: the marginal at `h` is `ξ(l⁻¹·h·r)`.
#[derive(Clone, Debug)]
pub struct ProductMeasure<G: Group> {
    marginal: StepVector<G>,
    eps: Q,
    delta: Q,
    kappa: Option<Kappa>,
    left: G::Elem,
    right: G::Elem,
}

impl<G: Group> ProductMeasure<G> {
    /// Requires `0 ≤ ε`, `1/2 + ε ≤ 1 − δ` with `δ = 1/3`, and when `κ` is
    /// given, `ε < 1/6` and `16ε² < κ`.
    pub fn new(ctx: &GroupCtx<G>, sets: Vec<FinSet<G::Elem>>, eps: Q, kappa: Option<Kappa>) -> Result<Self> {
        Self::with_delta(ctx, sets, eps, q(1, 3), kappa)
    }

    pub fn with_delta(ctx: &GroupCtx<G>, sets: Vec<FinSet<G::Elem>>, eps: Q, delta: Q, kappa: Option<Kappa>) -> Result<Self> {
        if eps < qi(0) {
            return Err(Error::Validation(format!("ε = {} is negative", q_to_string(&eps))));
        }
        if delta <= qi(0) || delta > q(1, 2) {
            return Err(Error::Validation(format!("δ = {} is outside (0, 1/2]", q_to_string(&delta))));
        }
        if &q(1, 2) + &eps > &qi(1) - &delta {
            return Err(Error::Validation(format!(
                "marginals reach 1/2 + ε = {}, above 1 − δ",
                q_to_string(&(&q(1, 2) + &eps))
            )));
        }
        if let Some(k) = &kappa {
            if eps >= q(1, 6) {
                return Err(Error::Validation(format!("ε = {} is not below 1/6", q_to_string(&eps))));
            }
            let sixteen_eps2 = &eps * &eps * qi(16);
            if k.cmp_rational(&sixteen_eps2) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::Validation(format!(
                    "16ε² = {} is not below κ = {}",
                    q_to_string(&sixteen_eps2),
                    k.describe()
                )));
            }
        }
        let marginal = StepVector::normalized(ctx.clone(), q(1, 2), eps.clone(), sets)?;
        let e = ctx.identity();
        Ok(Self { marginal, eps, delta, kappa, left: e.clone(), right: e })
    }

    /// The fair-coin measure.
    pub fn uniform(ctx: &GroupCtx<G>) -> Self {
        Self::new(ctx, Vec::new(), qi(0), None).expect("ε = 0 is admissible")
    }

    pub fn ctx(&self) -> &GroupCtx<G> {
        self.marginal.ctx()
    }

    pub fn marginal(&self) -> &StepVector<G> {
        &self.marginal
    }

    pub fn eps(&self) -> &Q {
        &self.eps
    }

    pub fn delta(&self) -> &Q {
        &self.delta
    }

    pub fn kappa(&self) -> Option<&Kappa> {
        self.kappa.as_ref()
    }

    /// Probability that coordinate `h` is 1.
    pub fn value(&self, h: &G::Elem) -> QSqrt {
        let ctx = self.ctx();
        let k = ctx.mul(&ctx.mul(&ctx.inv(&self.left), h), &self.right);
        self.marginal.evaluate(&k)
    }

    /// `μ_{λ(g)ξ}` or `μ_{ρ(g)ξ}`.
    pub fn translated(&self, side: Side, g: &G::Elem) -> Self {
        let mut out = self.clone();
        match side {
            Side::Left => out.left = self.ctx().mul(g, &self.left),
            Side::Right => out.right = self.ctx().mul(&self.right, g),
        }
        out
    }

    fn check_set(&self, w: &FinSet<G::Elem>) -> Result<()> {
        if w.group_id() != self.ctx().id() {
            return Err(Error::Domain("window belongs to a different group".into()));
        }
        Ok(())
    }
}

/// The event `{ω : ω(h) = a(h) for h ∈ W}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cylinder<E: Ord + Serialize> {
    pub window: FinSet<E>,
    #[serde(serialize_with = "pairs")]
    pub assignment: BTreeMap<E, bool>,
}

fn pairs<E: Serialize, S: serde::Serializer>(m: &BTreeMap<E, bool>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter())
}

impl<E: Ord + Clone + fmt::Debug + Serialize> Cylinder<E> {
    pub fn new(window: FinSet<E>, assignment: BTreeMap<E, bool>) -> Result<Self> {
        if assignment.len() != window.len() || !assignment.keys().all(|h| window.contains(h)) {
            return Err(Error::Validation("the assignment must cover exactly the window".into()));
        }
        Ok(Self { window, assignment })
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    /// Number of coordinates set to 1.
    pub fn ones(&self) -> usize {
        self.assignment.values().filter(|&&b| b).count()
    }
}

/// Build a cylinder on `ctx` from `(h, bit)` pairs.
pub fn cylinder<G: Group>(ctx: &GroupCtx<G>, bits: impl IntoIterator<Item = (G::Elem, bool)>) -> Cylinder<G::Elem> {
    let assignment: BTreeMap<_, _> = bits.into_iter().collect();
    let window = ctx.set(assignment.keys().cloned());
    Cylinder { window, assignment }
}

/// `μ(C) = Π_{h∈W} ξ(h)^{[a(h)=1]}·(1−ξ(h))^{[a(h)=0]}`, exactly.
pub fn cylinder_prob<G: Group>(mu: &ProductMeasure<G>, c: &Cylinder<G::Elem>) -> Result<QSqrt> {
    mu.check_set(&c.window)?;
    let one = QSqrt::one();
    let mut p = QSqrt::one();
    for (h, &bit) in &c.assignment {
        let x = mu.value(h);
        p = if bit { &p * &x } else { &p * &(&one - &x) };
    }
    Ok(p)
}

/// `shift(g)⁻¹C`: the cylinder on `g⁻¹W` (left) or `Wg` (right).
pub fn preimage<G: Group>(ctx: &GroupCtx<G>, side: Side, g: &G::Elem, c: &Cylinder<G::Elem>) -> Cylinder<G::Elem> {
    let gi = ctx.inv(g);
    cylinder(
        ctx,
        c.assignment.iter().map(|(h, &b)| {
            let k = match side {
                Side::Left => ctx.mul(&gi, h),
                Side::Right => ctx.mul(h, g),
            };
            (k, b)
        }),
    )
}

/// `μ_ξ(shift(g)⁻¹C) = μ_{π(g)ξ}(C)`, compared as exact field elements.
pub fn pushforward_check<G: Group>(mu: &ProductMeasure<G>, side: Side, g: &G::Elem, c: &Cylinder<G::Elem>) -> Result<CheckRow> {
    let lhs = cylinder_prob(mu, &preimage(mu.ctx(), side, g, c))?;
    let rhs = cylinder_prob(&mu.translated(side, g), c)?;
    let name = match side {
        Side::Left => "bern: L(g)_*μ_ξ = μ_{λ(g)ξ} on C",
        Side::Right => "bern: R(g)_*μ_ξ = μ_{ρ(g)ξ} on C",
    };
    Ok(CheckRow::check(name, format!("g={} |W|={}", show(g), c.len()), lhs == rhs).with_value(lhs.to_string()))
}

/// Radon–Nikodym derivative of the shifted measure on `C`, as the pair
/// `(μ_{π(g)ξ}(C), μ_ξ(C))`.
pub fn rn_derivative<G: Group>(mu: &ProductMeasure<G>, side: Side, g: &G::Elem, c: &Cylinder<G::Elem>) -> Result<(QSqrt, QSqrt)> {
    Ok((cylinder_prob(&mu.translated(side, g), c)?, cylinder_prob(mu, c)?))
}

/// `Σ count·[(√a−√b)² + (√(1−a)−√(1−b))²]` kept as a formal sum over
/// distinct marginal pairs `a < b`, with certified rational enclosures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HellingerSum {
    terms: BTreeMap<(QSqrt, QSqrt), u64>,
}

impl HellingerSum {
    pub fn add(&mut self, a: QSqrt, b: QSqrt) {
        if a == b {
            return;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        *self.terms.entry(key).or_insert(0) += 1;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(QSqrt, QSqrt), &u64)> {
        self.terms.iter()
    }

    /// `lo ≤ Σ ≤ hi`.
    pub fn enclosure(&self, bits: u64) -> (Q, Q) {
        let (mut lo, mut hi) = (qi(0), qi(0));
        for ((a, b), &count) in &self.terms {
            let (g_lo, g_hi) = gap_bounds(a, b, bits);
            let c = Q::from_integer(count.into());
            lo += g_lo * &c;
            hi += g_hi * c;
        }
        (lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclosure(64);
        q_to_f64(&((lo + hi) / qi(2)))
    }
}

impl fmt::Display for HellingerSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·H({a}, {b})")?;
        }
        Ok(())
    }
}

impl Serialize for HellingerSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn gap_bounds(a: &QSqrt, b: &QSqrt, bits: u64) -> (Q, Q) {
    let one = QSqrt::one();
    let ab = a * b;
    let cd = &(&one - a) * &(&one - b);
    let root = |x: &QSqrt| {
        let (lo, hi) = x.bounds(bits + 4);
        let lo = if lo < qi(0) { qi(0) } else { lo };
        (sqrt_bounds(&lo, bits).0, sqrt_bounds(&hi, bits).1)
    };
    let (r1_lo, r1_hi) = root(&ab);
    let (r2_lo, r2_hi) = root(&cd);
    let two = qi(2);
    (&two - &two * (r1_hi + r2_hi), &two - &two * (r1_lo + r2_lo))
}

/// Kakutani's Hellinger sum of `μ` against `ν` over `ball`.
pub fn kakutani_sum<G: Group>(mu: &ProductMeasure<G>, nu: &ProductMeasure<G>, ball: &FinSet<G::Elem>) -> Result<HellingerSum> {
    if mu.ctx().id() != nu.ctx().id() {
        return Err(Error::Domain("measures live on different groups".into()));
    }
    mu.check_set(ball)?;
    let mut s = HellingerSum::default();
    for h in ball.iter() {
        s.add(mu.value(h), nu.value(h));
    }
    Ok(s)
}

/// `Σ_{h∈ball} (ξ(h) − η(h))²`.
pub fn marginal_sq_diff<G: Group>(mu: &ProductMeasure<G>, nu: &ProductMeasure<G>, ball: &FinSet<G::Elem>) -> QSqrt {
    let mut total = QSqrt::zero();
    for h in ball.iter() {
        let d = &mu.value(h) - &nu.value(h);
        total += &(&d * &d);
    }
    total
}

/// For `a, b ∈ [1/2, 1/2+ε]`, the Hellinger gap lies between
/// `c_lo·(a−b)²` and `c_hi·(a−b)²` with these two constants.
pub fn gap_factors(eps: &Q) -> (Q, Q) {
    let half = q(1, 2);
    let lo = &half + qi(1) / (qi(2) + qi(4) * eps);
    let hi = &half + qi(1) / (qi(2) - qi(4) * eps);
    (lo, hi)
}

/// `gap(1/2, 1/2+ε)/ε²`, for display.
pub fn hellinger_gap_ratio(eps: &Q) -> f64 {
    let e = q_to_f64(eps);
    if e == 0.0 {
        return 1.0;
    }
    (2.0 - (1.0 + 2.0 * e).sqrt() - (1.0 - 2.0 * e).sqrt()) / (e * e)
}

/// `c_lo·D ≤ Σ ≤ c_hi·D` where `D = Σ(ξ−η)²` over the ball, checked with
/// certified enclosures.
pub fn kakutani_bounds_check<G: Group>(mu: &ProductMeasure<G>, nu: &ProductMeasure<G>, ball: &FinSet<G::Elem>) -> Result<Vec<CheckRow>> {
    let s = kakutani_sum(mu, nu, ball)?;
    let d = marginal_sq_diff(mu, nu, ball);
    let (c_lo, c_hi) = gap_factors(&mu.eps);
    let (s_lo, s_hi) = s.enclosure(ENCLOSURE_BITS);
    let lower = d.scale(&c_lo);
    let upper = d.scale(&c_hi);
    let scope = format!("|ball|={}", ball.len());
    Ok(vec![
        CheckRow::check("bern: Hellinger sum ≥ c_lo(ε)·Σ(ξ−η)²", scope.clone(), lower.cmp_rational(&s_lo).is_le())
            .with_value(format!("{:.6e} ≥ {:.6e}", q_to_f64(&s_lo), lower.to_f64())),
        CheckRow::check("bern: Hellinger sum ≤ c_hi(ε)·Σ(ξ−η)²", scope, upper.cmp_rational(&s_hi).is_ge())
            .with_value(format!("{:.6e} ≤ {:.6e}", q_to_f64(&s_hi), upper.to_f64())),
    ])
}

/// One row of the Kakutani CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KakutaniPoint {
    pub n: usize,
    pub left: f64,
    pub right: f64,
    pub left_exact: String,
    pub right_exact: String,
}

/// For `N = 1..n_max`: the Hellinger sum against `λ(g)ξ` over
/// `⋃_{n≤N} (F_n ∪ gF_n)`, and against `ρ(s_o)ξ` over `⋃_{n≤N} F_n`.
pub fn kakutani_growth<G: Group>(mu: &ProductMeasure<G>, g: &G::Elem, n_max: usize) -> Result<Vec<KakutaniPoint>> {
    let ctx = mu.ctx();
    let left_nu = mu.translated(Side::Left, g);
    let right_nu = mu.translated(Side::Right, ctx.s_o());
    let terms = mu.marginal.terms();
    let mut out = Vec::new();
    let mut left_ball = ctx.empty_set();
    let mut right_ball = ctx.empty_set();
    for (i, t) in terms.iter().take(n_max).enumerate() {
        for h in t.set.iter() {
            left_ball.insert(h.clone());
            left_ball.insert(ctx.mul(g, h));
            right_ball.insert(h.clone());
        }
        let l = kakutani_sum(mu, &left_nu, &left_ball)?;
        let r = kakutani_sum(mu, &right_nu, &right_ball)?;
        out.push(KakutaniPoint { n: i + 1, left: l.to_f64(), right: r.to_f64(), left_exact: l.to_string(), right_exact: r.to_string() });
    }
    Ok(out)
}

pub fn kakutani_csv(points: &[KakutaniPoint]) -> String {
    let mut s = String::from("N,kakutani_left,kakutani_right\n");
    for p in points {
        s.push_str(&format!("{},{:.12e},{:.12e}\n", p.n, p.left, p.right));
    }
    s
}

/// `δ⁻² + δ⁻¹(1−δ)⁻²`.
pub fn delta_gate(delta: &Q) -> Q {
    let one = qi(1);
    let inv = &one / delta;
    let co = &one / (&one - delta);
    &inv * &inv + &inv * &co * &co
}

/// One point of the conservativity series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservativityPoint {
    pub k: i64,
    pub sum: f64,
    pub delta: Option<f64>,
    /// `exact` when every term used the exact norm, else `mixed`.
    pub basis: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservativityReport {
    pub rows: Vec<CheckRow>,
    pub series: Vec<ConservativityPoint>,
    /// Tail exponent `α = 16ε²/κ` of the lower bound `|k|^{-α}` on the summands.
    pub alpha: Option<(f64, f64)>,
}

impl ConservativityReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("K,exp_sum,delta\n");
        for p in &self.series {
            let d = p.delta.map_or(String::new(), |d| format!("{d:.12e}"));
            s.push_str(&format!("{},{:.12e},{}\n", p.k, p.sum, d));
        }
        s
    }
}

/// `Σ_{|k|≤K} exp(−16·x_k)` for `K = k0, 2k0, …`, where `x_k` is the exact
/// `‖λ(s_o^k)ξ−ξ‖²` for `|k| ≤ exact_limit` and the bound `ε²·Φ(s_o^k)`
/// beyond. Also the exact gates `δ⁻²+δ⁻¹(1−δ)⁻² < 16`, `ε < 1/6` and
/// `16ε² < κ`.
pub fn conservativity_diagnostic<G: Group>(
    mu: &ProductMeasure<G>,
    w: &SchemeWindow<G>,
    k0: i64,
    doublings: usize,
    exact_limit: i64,
) -> Result<ConservativityReport> {
    if k0 < 1 {
        return Err(Error::Validation("K must start at 1 or more".into()));
    }
    if w.ctx.id() != mu.ctx().id() {
        return Err(Error::Domain("window and measure live on different groups".into()));
    }
    let mut rows = Vec::new();
    let gate = delta_gate(&mu.delta);
    rows.push(
        CheckRow::check("bern: δ⁻²+δ⁻¹(1−δ)⁻² < 16", format!("δ={}", q_to_string(&mu.delta)), gate < qi(16))
            .with_value(q_to_string(&gate)),
    );
    rows.push(CheckRow::check("bern: ε < 1/6", format!("ε={}", q_to_string(&mu.eps)), mu.eps < q(1, 6)));
    let sixteen = &mu.eps * &mu.eps * qi(16);
    let kappa = mu.kappa.clone().or_else(|| w.kappa.clone());
    let mut alpha = None;
    match &kappa {
        Some(k) => {
            let ok = k.cmp_rational(&sixteen) == Some(std::cmp::Ordering::Greater);
            rows.push(CheckRow::check("bern: 16ε² < κ", format!("κ={}", k.describe()), ok).with_value(q_to_string(&sixteen)));
            if k.is_positive() {
                let (lo, hi) = k.bounds(64);
                alpha = Some((q_to_f64(&(&sixteen / &hi)), q_to_f64(&(&sixteen / &lo))));
            }
        }
        None => rows.push(CheckRow::info("bern: 16ε² < κ", "no κ declared", q_to_string(&sixteen))),
    }

    let kmax = k0.checked_shl(doublings as u32).filter(|&k| k > 0).ok_or_else(|| Error::Range("K overflows".into()))?;
    let phi = GammaProfile::new(&w.ctx, &w.sets).phi_table(kmax);
    let eps2 = q_to_f64(&(&mu.eps * &mu.eps));
    let ctx = mu.ctx();
    let n = mu.marginal.len();
    let exact_upto = exact_limit.clamp(0, kmax);
    let exact: Vec<f64> = par::map_range(1, exact_upto + 1, |k| mu.marginal.diff_norm_sq(Side::Left, &ctx.gamma(k), n).to_f64());
    let x = |k: i64| if k <= exact_upto { exact[(k - 1) as usize] } else { eps2 * q_to_f64(&phi[k as usize]) };
    let mut series = Vec::new();
    let mut sum = 1.0;
    let mut done = 0i64;
    let mut prev: Option<f64> = None;
    let mut kk = k0;
    for _ in 0..=doublings {
        for k in done + 1..=kk {
            sum += 2.0 * (-16.0 * x(k)).exp();
        }
        done = kk;
        series.push(ConservativityPoint { k: kk, sum, delta: prev.map(|p| sum - p), basis: if kk <= exact_upto { "exact" } else { "mixed" } });
        prev = Some(sum);
        kk *= 2;
    }
    Ok(ConservativityReport { rows, series, alpha })
}

/// Draw the window's coordinates, `h ↦ 1` with probability `ξ(h)`, in the
/// window's sorted order.
pub fn sample<G: Group>(mu: &ProductMeasure<G>, window: &FinSet<G::Elem>, seed: u64) -> Result<Cylinder<G::Elem>> {
    mu.check_set(window)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw(mu, window, &mut rng))
}

fn draw<G: Group>(mu: &ProductMeasure<G>, window: &FinSet<G::Elem>, rng: &mut ChaCha8Rng) -> Cylinder<G::Elem> {
    let assignment = window
        .iter()
        .map(|h| {
            let u: f64 = rng.random();
            (h.clone(), u < mu.value(h).to_f64())
        })
        .collect();
    Cylinder { window: window.clone(), assignment }
}

/// `count` independent draws; draw `i` uses stream `i` of the seeded
/// generator, so the output does not depend on the thread count.
pub fn sample_many<G: Group>(mu: &ProductMeasure<G>, window: &FinSet<G::Elem>, seed: u64, count: usize) -> Result<Vec<Cylinder<G::Elem>>> {
    mu.check_set(window)?;
    Ok(par::map_range(0, count as i64, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        draw(mu, window, &mut rng)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Heisenberg;
    use crate::nilpotent::{build_heisenberg_scheme, BoxParams};
    use crate::scheme::Rearranged;

    fn heis_measure(n_max: usize, eps: Q) -> (Rearranged<Heisenberg>, ProductMeasure<Heisenberg>) {
        let w = build_heisenberg_scheme(&BoxParams::desk(n_max)).unwrap();
        let f = Rearranged::build(&w).unwrap();
        let win = f.window();
        let mu = ProductMeasure::new(&win.ctx, win.sets.clone(), eps, Some(Kappa::half_ln(qi(2)))).unwrap();
        (f, mu)
    }

    #[test]
    fn cylinder_probabilities() {
        let ctx = Heisenberg::standard_ctx();
        let u = ProductMeasure::uniform(&ctx);
        let c = cylinder(&ctx, (0..5).map(|i| ([i, 0, 0], i % 2 == 0)));
        assert_eq!(cylinder_prob(&u, &c).unwrap(), QSqrt::rational(q(1, 32)));
        let empty = cylinder(&ctx, std::iter::empty());
        assert_eq!(cylinder_prob(&u, &empty).unwrap(), QSqrt::one());

        let f1 = ctx.set([[0, 0, 0], [0, 1, 0], [0, 2, 0], [0, 3, 0]]);
        let mu = ProductMeasure::new(&ctx, vec![f1.clone()], q(1, 8), None).unwrap();
        for h in f1.iter() {
            assert_eq!(mu.value(h), QSqrt::rational(q(9, 16)));
        }
        let c = cylinder(&ctx, [([0, 0, 0], true), ([0, 1, 0], false)]);
        assert_eq!(cylinder_prob(&mu, &c).unwrap(), QSqrt::rational(q(9 * 7, 256)));
    }

    #[test]
    fn eps_gates_refuse() {
        let ctx = Heisenberg::standard_ctx();
        let k = Some(Kappa::half_ln(qi(2)));
        assert!(ProductMeasure::new(&ctx, vec![], q(1, 6), k.clone()).is_err());
        // √(ln2/2)/4 ≈ 0.147
        assert!(ProductMeasure::new(&ctx, vec![], q(3, 20), k.clone()).is_err());
        assert!(ProductMeasure::new(&ctx, vec![], q(7, 50), k).is_ok());
        assert!(ProductMeasure::new(&ctx, vec![], q(1, 5), None).is_err());
    }

    #[test]
    fn pushforward_identities() {
        let (f, mu) = heis_measure(2, q(1, 8));
        let ctx = &f.window().ctx;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f1: Vec<_> = f.window().sets[0].iter().cloned().collect();
        for _ in 0..10 {
            let pts: Vec<_> = (0..6).map(|_| f1[rng.random_range(0..f1.len())]).collect();
            let c = cylinder(ctx, pts.into_iter().map(|h| (h, rng.random())));
            for g in ctx.gens().iter().chain([ctx.s_o(), &ctx.identity()]) {
                for side in [Side::Left, Side::Right] {
                    assert_eq!(pushforward_check(&mu, side, g, &c).unwrap().pass, Some(true));
                }
            }
            let (a, b) = rn_derivative(&mu, Side::Left, &ctx.identity(), &c).unwrap();
            assert_eq!(a, b);
        }
        // right shift by s_o visibly moves the marginal off F_1
        let h = f1[0];
        assert!(mu.value(&h).to_f64() > 0.5);
        assert_eq!(mu.translated(Side::Right, ctx.s_o()).value(&h), QSqrt::rational(q(1, 2)));
    }

    #[test]
    fn kakutani_right_grows_left_bounded() {
        let eps = q(1, 8);
        let (f, mu) = heis_measure(3, eps.clone());
        let win = f.window();
        let ctx = &win.ctx;
        assert!(kakutani_sum(&mu, &mu, &win.sets[0]).unwrap().is_zero());
        let nu = mu.translated(Side::Right, ctx.s_o());
        let mut ball = ctx.empty_set();
        let (c_lo, _) = gap_factors(&eps);
        for (i, s) in win.sets.iter().enumerate() {
            ball = ball.union(s).unwrap();
            let n = (i + 1) as i64;
            assert_eq!(marginal_sq_diff(&mu, &nu, &ball).as_rational(), Some(&eps * &eps * qi(n)));
            let (lo, _) = kakutani_sum(&mu, &nu, &ball).unwrap().enclosure(ENCLOSURE_BITS);
            assert!(lo >= &c_lo * &eps * &eps * qi(n));
            assert!(kakutani_bounds_check(&mu, &nu, &ball).unwrap().iter().all(|r| r.pass == Some(true)));
        }
        let (_, c_hi) = gap_factors(&eps);
        for s in ctx.gens() {
            let nu = mu.translated(Side::Left, s);
            let mut ball = ctx.empty_set();
            for set in &win.sets {
                for h in set.iter() {
                    ball.insert(*h);
                    ball.insert(ctx.mul(s, h));
                }
            }
            let (_, hi) = kakutani_sum(&mu, &nu, &ball).unwrap().enclosure(ENCLOSURE_BITS);
            let budget = &c_hi * &eps * &eps * crate::scheme::phi_partial(win, s);
            assert!(hi <= budget, "{} > {}", q_to_f64(&hi), q_to_f64(&budget));
        }
        let pts = kakutani_growth(&mu, &ctx.gens()[0], 3).unwrap();
        assert!(pts.windows(2).all(|p| p[1].right > p[0].right));
        assert!(kakutani_csv(&pts).lines().count() == 4);
    }

    #[test]
    fn gates_and_series() {
        assert_eq!(delta_gate(&q(1, 3)), q(63, 4));
        let (f, mu) = heis_measure(3, q(1, 8));
        let rep = conservativity_diagnostic(&mu, f.window(), 1, 6, 8).unwrap();
        assert!(rep.rows.iter().all(|r| r.pass != Some(false)));
        assert_eq!(rep.rows[0].value.as_deref(), Some("63/4"));
        let (a_lo, a_hi) = rep.alpha.unwrap();
        assert!(a_lo <= a_hi && a_hi < 1.0);
        let deltas: Vec<f64> = rep.series.iter().filter_map(|p| p.delta).collect();
        // summands are at least exp(-16ε²(2·log₂k + 4)) by the Φ growth bound
        let floor = |k: i64| 2.0 * (-0.25 * (2.0 * (k as f64).log2() + 4.0)).exp();
        for (p, d) in rep.series.windows(2).zip(&deltas) {
            let want: f64 = (p[0].k + 1..=p[1].k).map(floor).sum();
            assert!(*d >= want, "{d} < {want}");
        }

        let ctx = &f.window().ctx;
        let zero = ProductMeasure::new(ctx, f.window().sets.clone(), qi(0), None).unwrap();
        let rep = conservativity_diagnostic(&zero, f.window(), 1, 4, 4).unwrap();
        for p in &rep.series {
            assert_eq!(p.sum, (2 * p.k + 1) as f64);
        }
        assert!(rep.csv().starts_with("K,exp_sum,delta"));
    }

    #[test]
    fn sampler_statistics() {
        let ctx = Heisenberg::standard_ctx();
        let u = ProductMeasure::uniform(&ctx);
        let one = ctx.set([[0, 0, 0]]);
        let draws = sample_many(&u, &one, 9, 100_000).unwrap();
        let mean = draws.iter().map(|c| c.ones()).sum::<usize>() as f64 / 1e5;
        assert!((mean - 0.5).abs() < 3.0 * (0.25f64 / 1e5).sqrt());

        let f1 = ctx.set([[0, 0, 0], [0, 1, 0], [0, 2, 0], [0, 3, 0]]);
        let mu = ProductMeasure::new(&ctx, vec![f1.clone()], q(1, 8), None).unwrap();
        let target = cylinder(&ctx, [([0, 0, 0], true), ([0, 1, 0], true)]);
        let p = cylinder_prob(&mu, &target).unwrap().to_f64();
        let w = target.window.clone();
        let trials = 40_000;
        let hits = sample_many(&mu, &w, 1, trials).unwrap().iter().filter(|c| **c == target).count() as f64;
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((hits / trials as f64 - p).abs() < 3.0 * sd);

        let a = sample(&mu, &f1, 42).unwrap();
        let b = sample(&mu, &f1, 42).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
