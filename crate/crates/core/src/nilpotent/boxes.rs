use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use super::direction::MalcevHeisData;
use super::malcev::Nil2Group;
use crate::error::{Error, Result};
use crate::group::{FinSet, GroupCtx, HElem, Heisenberg, Side};
use crate::num::{q_to_string, qi, ratio, Q};
use crate::par;
use crate::scheme::{GenBudget, SchemeWindow, WindowParams};
use crate::semidirect::{EpsFamily, TowerInput, SIZE_LIMIT};

/// A positive integer sequence indexed from `n = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum IntSeq {
    /// `coef · n^power · base^n`.
    Poly { coef: i64, power: u32, base: i64 },
    /// `⌈q^n⌉`.
    CeilPow {
        #[serde(with = "crate::num::qser")]
        q: Q,
    },
    List { values: Vec<i64> },
}

impl IntSeq {
    pub fn at(&self, n: usize) -> Result<i64> {
        let v = match self {
            IntSeq::Poly { coef, power, base } => {
                let n = n as i64;
                coef.checked_mul(n.checked_pow(*power).unwrap_or(i64::MAX))
                    .and_then(|x| x.checked_mul(base.checked_pow(n as u32)?))
                    .ok_or_else(|| Error::Range(format!("sequence value at n={n} overflows")))?
            }
            IntSeq::CeilPow { q } => {
                let p: Q = Pow::pow(q, n as u32);
                i64::try_from(p.ceil().to_integer()).map_err(|_| Error::Range(format!("⌈q^{n}⌉ overflows")))?
            }
            IntSeq::List { values } => *values
                .get(n - 1)
                .ok_or_else(|| Error::Range(format!("list has no entry for n={n}")))?,
        };
        Ok(v)
    }
}

/// Box parameters `A_n, B_n, C_n` and the start points `b_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxParams {
    pub a: IntSeq,
    pub b: IntSeq,
    pub c: IntSeq,
    #[serde(default = "one")]
    pub mu: i64,
    pub n_max: usize,
    /// Declared growth `A_n ≥ q^n`.
    #[serde(default, with = "crate::num::qopt", skip_serializing_if = "Option::is_none")]
    pub q: Option<Q>,
    /// Explicit `b_n`, validated against the recursion's requirements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_start: Option<Vec<i64>>,
}

fn one() -> i64 {
    1
}

/// Evaluated box parameters for `n = 1..=n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxTable {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
    pub b_start: Vec<i64>,
    pub mu: i64,
}

impl BoxTable {
    /// `I_n = [b_n, b_n + B_n)` for 1-based `n`.
    pub fn interval(&self, n: usize) -> std::ops::Range<i64> {
        self.b_start[n - 1]..self.b_start[n - 1] + self.b[n - 1]
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1).div_euclid(b)
}

impl BoxParams {
    /// `A_n = 2^n`, `B_n = n²`, `C_n = n²·2^n`, `q = 2`.
    pub fn desk(n_max: usize) -> Self {
        Self {
            a: IntSeq::Poly { coef: 1, power: 0, base: 2 },
            b: IntSeq::Poly { coef: 1, power: 2, base: 1 },
            c: IntSeq::Poly { coef: 1, power: 2, base: 2 },
            mu: 1,
            n_max,
            q: Some(qi(2)),
            b_start: None,
        }
    }

    pub fn with_mu(mut self, mu: i64) -> Self {
        self.mu = mu;
        self
    }

    fn is_desk_family(&self) -> bool {
        let d = Self::desk(self.n_max);
        self.a == d.a && self.b == d.b && self.c == d.c
    }

    pub fn table(&self) -> Result<BoxTable> {
        if self.n_max == 0 {
            return Err(Error::Validation("n_max must be at least 1".into()));
        }
        if self.mu < 1 {
            return Err(Error::Validation(format!("μ must be positive, got {}", self.mu)));
        }
        let eval = |s: &IntSeq, name: &str| -> Result<Vec<i64>> {
            (1..=self.n_max)
                .map(|n| {
                    let v = s.at(n)?;
                    if v < 1 {
                        return Err(Error::Validation(format!("{name}_{n} = {v} is not positive")));
                    }
                    Ok(v)
                })
                .collect()
        };
        let (a, b, c) = (eval(&self.a, "A")?, eval(&self.b, "B")?, eval(&self.c, "C")?);
        if let Some(q) = &self.q {
            for (i, &an) in a.iter().enumerate() {
                let qn: Q = Pow::pow(q, (i + 1) as u32);
                if qi(an) < qn {
                    return Err(Error::Validation(format!("A_{} = {an} < q^{} = {}", i + 1, i + 1, q_to_string(&qn))));
                }
            }
        }
        let mu = self.mu;
        let b_start = match &self.b_start {
            None => {
                let mut out: Vec<i64> = Vec::with_capacity(self.n_max);
                for n in 0..self.n_max {
                    let floor = ceil_div(c[n] + 1, mu);
                    let v = match out.last() {
                        None => floor,
                        Some(&prev) => floor.max(prev + b[n - 1] + 1),
                    };
                    out.push(v);
                }
                out
            }
            Some(given) => {
                if given.len() < self.n_max {
                    return Err(Error::Validation("b_start shorter than n_max".into()));
                }
                for n in 0..self.n_max {
                    if mu * given[n] <= c[n] {
                        return Err(Error::Validation(format!("μ·b_{} = {} does not exceed C_{} = {}", n + 1, mu * given[n], n + 1, c[n])));
                    }
                    if n > 0 && given[n] < given[n - 1] + b[n - 1] + 1 {
                        return Err(Error::Validation(format!("b_{} = {} violates b_{{n+1}} ≥ b_n + B_n + 1", n + 1, given[n])));
                    }
                }
                given[..self.n_max].to_vec()
            }
        };
        Ok(BoxTable { a, b, c, b_start, mu })
    }
}

/// `E_n = {x^a y^b z^c : 0 ≤ a < A_n, b ∈ I_n, 0 ≤ c < C_n}` in `H_3(ℤ)`,
/// with budgets `2/A_n` for `x^±1` and `2/B_n + A_n/C_n` for `y^±1`.
pub fn build_heisenberg_scheme(params: &BoxParams) -> Result<SchemeWindow<Heisenberg>> {
    if params.mu != 1 {
        return Err(Error::Validation("the Heisenberg box scheme needs μ = 1".into()));
    }
    let t = params.table()?;
    let ctx = Heisenberg::standard_ctx();
    let sets = par::map_range(1, params.n_max as i64 + 1, |n| {
        let n = n as usize;
        let (a, c, ib) = (t.a[n - 1], t.c[n - 1], t.interval(n));
        let elems: Vec<HElem> = (0..a).flat_map(|x| ib.clone().flat_map(move |y| (0..c).map(move |z| [x, y, z]))).collect();
        ctx.set(elems)
    });
    let mut p = WindowParams::new("heisenberg-box");
    p.a = t.a.clone();
    p.b_len = t.b.clone();
    p.c = t.c.clone();
    p.b_start = t.b_start.clone();
    p.mu = Some(1);
    p.q = params.q.clone();
    let xb: Vec<Q> = t.a.iter().map(|&a| Q::new(BigInt::from(2), BigInt::from(a))).collect();
    let yb: Vec<Q> = (0..params.n_max).map(|i| Q::new(BigInt::from(2), BigInt::from(t.b[i])) + Q::new(BigInt::from(t.a[i]), BigInt::from(t.c[i]))).collect();
    for g in [Heisenberg::X, [-1, 0, 0]] {
        p.budgets.push(GenBudget { gen: g, per_n: xb.clone() });
    }
    for g in [Heisenberg::Y, [0, -1, 0]] {
        p.budgets.push(GenBudget { gen: g, per_n: yb.clone() });
    }
    SchemeWindow::new(ctx, sets, p, None)
}

/// The context of the adapted presentation: `S` = basis elements and
/// inverses, `s_o = x`.
pub fn nil2_ctx(data: &MalcevHeisData) -> Result<GroupCtx<Nil2Group>> {
    data.group().standard_ctx()
}

/// `R_n = {x_3^{a_3}⋯x_r^{a_r} y^b z^c w_2^{d_2}⋯w_s^{d_s}}` with
/// `a_j ∈ [0, A_n)`, `b ∈ I_n` and central coordinates in `[0, C_n)`.
pub fn build_nil2_rn(ctx: &GroupCtx<Nil2Group>, data: &MalcevHeisData, params: &BoxParams, n: usize) -> Result<FinSet<Vec<i64>>> {
    if ctx.group().presentation() != &data.presentation {
        return Err(Error::Domain("context does not match the adapted presentation".into()));
    }
    let t = params.clone().with_mu(data.mu).table()?;
    if n == 0 || n > params.n_max {
        return Err(Error::Range(format!("n = {n} outside 1..={}", params.n_max)));
    }
    let (r, s) = (data.presentation.r(), data.presentation.s());
    let (a, c, ib) = (t.a[n - 1], t.c[n - 1], t.interval(n));
    let mut ranges: Vec<std::ops::Range<i64>> = vec![0..1];
    ranges.extend((1..r - 1).map(|_| 0..a));
    ranges.push(ib);
    ranges.extend((0..s).map(|_| 0..c));
    let size = ranges.iter().try_fold(1u64, |acc, rg| acc.checked_mul((rg.end - rg.start) as u64));
    if size.is_none_or(|sz| sz > SIZE_LIMIT) {
        return Err(Error::Range(format!("|R_{n}| exceeds the enumeration limit")));
    }
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for rg in ranges {
        out = out.into_iter().flat_map(|p| rg.clone().map(move |v| {
            let mut q = p.clone();
            q.push(v);
            q
        })).collect();
    }
    Ok(ctx.set(out))
}

/// Observed constant of the box estimate
/// `|φ^{-l}(t)R_n△R_n|/|R_n| ≤ K̂·(1/A_n + 1/B_n + A_n/C_n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhatReport {
    #[serde(with = "crate::num::qser")]
    pub khat: Q,
    /// Per `n`: the largest ratio over `(t, l)` and the bound expression.
    pub per_n: Vec<(String, String)>,
}

/// Tower input for a nil2 box family. `ε_n = K̂·(1/A_n + 1/B_n + A_n/C_n)`
/// with `K̂` measured over all `t ∈ T`, `0 ≤ l < A_n`, `n ≤ n_max`.
pub fn nil2_tower(ctx: &GroupCtx<Nil2Group>, data: &MalcevHeisData, params: &BoxParams) -> Result<(TowerInput<Nil2Group>, KhatReport)> {
    let tab = params.clone().with_mu(data.mu).table()?;
    let r_sets = (1..=params.n_max).map(|n| build_nil2_rn(ctx, data, params, n)).collect::<Result<Vec<_>>>()?;
    let t: Vec<Vec<i64>> = ctx.gens().iter().filter(|g| g[0] == 0).cloned().collect();
    let mut khat = Q::zero();
    let mut per_n = Vec::new();
    let mut bounds = Vec::new();
    for (i, rn) in r_sets.iter().enumerate() {
        let (a, b, c) = (tab.a[i], tab.b[i], tab.c[i]);
        let bound = Q::new(BigInt::one(), BigInt::from(a)) + Q::new(BigInt::one(), BigInt::from(b)) + Q::new(BigInt::from(a), BigInt::from(c));
        let jobs: Vec<(usize, i64)> = (0..t.len()).flat_map(|j| (0..a).map(move |l| (j, l))).collect();
        let sizes = par::map(&jobs, |&(j, l)| {
            let tl = ctx.conj(&t[j], &ctx.gamma(-l));
            ctx.sym_diff_size(Side::Left, &tl, rn)
        });
        let worst = ratio(sizes.into_iter().max().unwrap_or(0), rn.len());
        let k = &worst / &bound;
        if k > khat {
            khat = k;
        }
        per_n.push((q_to_string(&worst), q_to_string(&bound)));
        bounds.push(bound);
    }
    let eps: Vec<Q> = bounds.iter().map(|b| b * &khat).collect();
    let eps_family = if params.is_desk_family() {
        // 1/2^n + 2/n² ≤ (9/8 + 2)/n²
        EpsFamily::PSeries { coef: &khat * Q::new(BigInt::from(25), BigInt::from(8)), p: 2 }
    } else {
        EpsFamily::List
    };
    let input = TowerInput {
        family: "nil2-tower".into(),
        r_sets,
        a: tab.a.clone(),
        q: params.q.clone().unwrap_or_else(|| qi(2)),
        eps,
        eps_family,
        t,
    };
    Ok((input, KhatReport { khat, per_n }))
}
