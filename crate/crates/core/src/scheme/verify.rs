use std::collections::BTreeSet;

use num_traits::Zero;

use super::orbit::OrbitChart;
use super::report::{CheckRow, PhiRow, SeriesPoint, VerifyReport};
use super::window::SchemeWindow;
use crate::group::{FinSet, Group, GroupCtx, Side};
use crate::num::{q_to_f64, q_to_string, ratio, Kappa, Q};
use crate::par;

/// Knobs for [`verify_scheme_with`].
#[derive(Clone, Debug)]
pub struct VerifyOptions<E> {
    /// Powers `s_o^k` with `|k| ≤ shift_bound` are tested explicitly.
    pub shift_bound: i64,
    /// Extra elements checked through a word decomposition.
    pub extras: Vec<E>,
    /// Largest `K` of the recurrence series (rounded to a power of two).
    pub series_max: i64,
    pub word_radius: usize,
    pub kappa: Option<Kappa>,
}

impl<E> VerifyOptions<E> {
    pub fn new(shift_bound: i64) -> Self {
        Self { shift_bound, extras: Vec::new(), series_max: 4096, word_radius: 8, kappa: None }
    }
}

pub(crate) fn show<E: serde::Serialize>(e: &E) -> String {
    serde_json::to_string(e).unwrap_or_else(|_| "?".into())
}

/// Exact `|s_o^k E_n △ E_n| / |E_n|` for every `k`, through orbit charts when
/// the context has them and by direct counting otherwise.
pub struct GammaProfile<'a, G: Group> {
    ctx: &'a GroupCtx<G>,
    sets: &'a [FinSet<G::Elem>],
    charts: Option<Vec<OrbitChart<G::Elem>>>,
}

impl<'a, G: Group> GammaProfile<'a, G> {
    pub fn new(ctx: &'a GroupCtx<G>, sets: &'a [FinSet<G::Elem>]) -> Self {
        let charts = ctx.charted().then(|| sets.iter().map(|e| OrbitChart::build(ctx, e).expect("charted")).collect());
        Self { ctx, sets, charts }
    }

    pub fn is_charted(&self) -> bool {
        self.charts.is_some()
    }

    pub fn charts(&self) -> Option<&[OrbitChart<G::Elem>]> {
        self.charts.as_deref()
    }

    pub fn sym_diff(&self, n: usize, k: i64) -> usize {
        match &self.charts {
            Some(ch) => ch[n].gamma_sym_diff(k),
            None => self.ctx.sym_diff_size(Side::Left, &self.ctx.gamma(k), &self.sets[n]),
        }
    }

    pub fn ratio(&self, n: usize, k: i64) -> Q {
        ratio(self.sym_diff(n, k), self.sets[n].len())
    }

    /// Truncated `Φ(s_o^k)` over the first `upto` sets.
    pub fn phi(&self, k: i64, upto: usize) -> Q {
        (0..upto.min(self.sets.len())).map(|n| self.ratio(n, k)).fold(Q::zero(), |a, b| a + b)
    }

    /// `Φ(s_o^k)` for `k = 0..=kmax`.
    pub fn phi_table(&self, kmax: i64) -> Vec<Q> {
        par::map_range(0, kmax + 1, |k| self.phi(k, self.sets.len()))
    }
}

/// Truncated `Φ(g) = Σ_{n≤N} |gE_n △ E_n| / |E_n|`.
pub fn phi_partial<G: Group>(w: &SchemeWindow<G>, g: &G::Elem) -> Q {
    w.sets
        .iter()
        .map(|e| ratio(w.ctx.sym_diff_size(Side::Left, g, e), e.len()))
        .fold(Q::zero(), |a, b| a + b)
}

/// Recurrence series `Σ_{|k|≤K} exp(-c·Φ(s_o^k))` at `K = 1, 2, 4, …, kmax`.
pub fn exp_series(phi: &[Q], coeff: f64, kmax: i64) -> Vec<SeriesPoint> {
    let term = |k: usize| (-coeff * q_to_f64(&phi[k])).exp();
    let mut out = Vec::new();
    let mut sum = term(0);
    let mut prev_sum: Option<f64> = None;
    let mut done = 0usize;
    let mut kk = 1i64;
    while kk <= kmax {
        for k in done + 1..=kk as usize {
            sum += 2.0 * term(k);
        }
        done = kk as usize;
        out.push(SeriesPoint {
            k: kk,
            phi: q_to_string(&phi[kk as usize]),
            sum,
            delta: prev_sum.map(|p| sum - p),
        });
        prev_sum = Some(sum);
        kk *= 2;
    }
    out
}

/// Exact check of the left-scheme conditions on a finite window.
pub fn verify_scheme<G: Group>(w: &SchemeWindow<G>, shift_bound: i64) -> VerifyReport {
    verify_scheme_with(w, &VerifyOptions::new(shift_bound))
}

pub fn verify_scheme_with<G: Group>(w: &SchemeWindow<G>, opts: &VerifyOptions<G::Elem>) -> VerifyReport {
    let ctx = &w.ctx;
    let s_o = ctx.s_o();
    let mut rep = VerifyReport::default();
    let n_sets = w.sets.len();

    // (1) E_n s_o ∩ E_n = ∅
    let cond1 = par::map(&w.sets, |e| {
        par::find_first(e.elems(), |h| e.contains(&ctx.mul(h, s_o))).cloned()
    });
    for (n, hit) in cond1.into_iter().enumerate() {
        let row = CheckRow::check("cond1: E_n s_o ∩ E_n = ∅", format!("n={}", n + 1), hit.is_none());
        let row = match hit {
            Some(h) => row.with_witness(format!("h={} with h·s_o={} in E_n", show(&h), show(&ctx.mul(&h, s_o)))),
            None => row,
        };
        rep.push(row);
    }

    // (2) per-generator ratios, budgets, and partial Φ
    for s in ctx.gens() {
        let ratios = par::map(&w.sets, |e| ratio(ctx.sym_diff_size(Side::Left, s, e), e.len()));
        let mut budget_total = Some(Q::zero());
        for (n, r) in ratios.iter().enumerate() {
            match w.budget(s, n) {
                Some(b) => {
                    budget_total = budget_total.map(|t| t + b);
                    rep.push(
                        CheckRow::check("cond2: ratio ≤ declared budget", format!("s={} n={}", show(s), n + 1), r <= b)
                            .with_value(format!("{} ≤ {}", q_to_string(r), q_to_string(b))),
                    );
                }
                None => budget_total = None,
            }
        }
        let phi: Q = ratios.iter().fold(Q::zero(), |a, b| a + b);
        rep.phi_partial.push(PhiRow {
            g: show(s),
            value: q_to_string(&phi),
            budget: budget_total.as_ref().map(q_to_string),
            value_f64: q_to_f64(&phi),
        });
        if let Some(b) = budget_total {
            rep.push(
                CheckRow::check("cond2: Φ_partial(s) ≤ Σ budget", format!("s={}", show(s)), phi <= b)
                    .with_value(format!("{} ≤ {}", q_to_string(&phi), q_to_string(&b))),
            );
        }
    }
    // Remark-summ certificate for extra elements.
    for g in &opts.extras {
        match ctx.word_decompose(g, opts.word_radius) {
            Ok(word) => {
                for (n, e) in w.sets.iter().enumerate() {
                    let lhs = ctx.sym_diff_size(Side::Left, g, e);
                    let rhs: usize = word.iter().map(|s| ctx.sym_diff_size(Side::Left, s, e)).sum();
                    rep.push(
                        CheckRow::check("cond2: |gE△E| ≤ Σ|s_iE△E|", format!("g={} n={}", show(g), n + 1), lhs <= rhs)
                            .with_value(format!("{lhs} ≤ {rhs}")),
                    );
                }
                let phi = phi_partial(w, g);
                rep.phi_partial.push(PhiRow { g: show(g), value: q_to_string(&phi), budget: None, value_f64: q_to_f64(&phi) });
            }
            Err(err) => rep.push(CheckRow::check("cond2: word decomposition", format!("g={}", show(g)), false).with_witness(err.to_string())),
        }
    }
    rep.notes.push(
        "condition (2) is checked on S and on the listed extra elements; other g are covered by the word bound".into(),
    );

    let profile = GammaProfile::new(ctx, &w.sets);
    for k in (-opts.shift_bound..=opts.shift_bound).filter(|k| *k != 0) {
        let phi = profile.phi(k, n_sets);
        rep.phi_partial.push(PhiRow {
            g: format!("s_o^{k}"),
            value: q_to_string(&phi),
            budget: None,
            value_f64: q_to_f64(&phi),
        });
    }

    // (3) (ΓE_n △ E_n) ∩ (ΓE_m △ E_m) = ∅
    match profile.charts() {
        Some(charts) => {
            for n in 0..n_sets {
                for m in n + 1..n_sets {
                    let shared = charts[n].shared_rep(&charts[m]);
                    let scope = format!("n={} m={}", n + 1, m + 1);
                    let row = CheckRow::check("cond3: exact over all of Γ (orbit chart)", scope.clone(), shared.is_none());
                    rep.push(match shared {
                        Some(r) => {
                            let ln = charts[n].levels_of(r).unwrap_or(&[]);
                            let lm = charts[m].levels_of(r).unwrap_or(&[]);
                            let top = ln.iter().chain(lm).max().copied().unwrap_or(0) + 1;
                            let g = ctx.mul(&ctx.gamma(top), r);
                            row.with_witness(format!("common orbit of {}; {} lies in both", show(r), show(&g)))
                        }
                        None => row,
                    });
                    let hit = charts[n].shared_rep(&charts[m]).and_then(|r| {
                        let a = charts[n].truncated_halo(r, opts.shift_bound);
                        let b = charts[m].truncated_halo(r, opts.shift_bound);
                        a.intersection(&b).next().map(|l| ctx.mul(&ctx.gamma(*l), r))
                    });
                    let row = CheckRow::check(
                        "cond3: truncated |k| ≤ shift_bound",
                        format!("{scope} K={}", opts.shift_bound),
                        hit.is_none(),
                    );
                    rep.push(match hit {
                        Some(g) => row.with_witness(show(&g)),
                        None => row,
                    });
                }
            }
        }
        None => {
            let halos: Vec<BTreeSet<G::Elem>> = par::map(&w.sets, |e| {
                let mut h = BTreeSet::new();
                for k in -opts.shift_bound..=opts.shift_bound {
                    let gk = ctx.gamma(k);
                    for x in e.iter() {
                        let y = ctx.mul(&gk, x);
                        if !e.contains(&y) {
                            h.insert(y);
                        }
                    }
                }
                h
            });
            for n in 0..n_sets {
                for m in n + 1..n_sets {
                    let hit = halos[n].iter().find(|g| halos[m].contains(g));
                    let row = CheckRow::check(
                        "cond3: truncated |k| ≤ shift_bound",
                        format!("n={} m={} K={}", n + 1, m + 1, opts.shift_bound),
                        hit.is_none(),
                    );
                    rep.push(match hit {
                        Some(g) => row.with_witness(show(g)),
                        None => row,
                    });
                }
            }
        }
    }

    // (4) Σ exp(-κ Φ(s_o^k)) at doubling K
    let kappa = opts.kappa.clone().or_else(|| w.kappa.clone());
    match kappa {
        Some(kappa) => {
            let kmax = if profile.is_charted() { opts.series_max } else { opts.shift_bound.max(1) };
            let phi = profile.phi_table(kmax);
            let series = exp_series(&phi, kappa.to_f64(), kmax);
            let min_delta = series.iter().filter_map(|p| p.delta).fold(f64::INFINITY, f64::min);
            rep.push(CheckRow::info(
                "cond4: recurrence series (partial sums, no limit claimed)",
                format!("κ={} K≤{kmax}", kappa.describe()),
                format!("min doubling delta {min_delta:.6e}"),
            ));
            rep.series = series;
        }
        None => rep.notes.push("no κ declared: recurrence series skipped".into()),
    }
    rep
}
