//! Stage bodies shared by the subcommands and the pipeline.

use lscheme::bernoulli::{
    conservativity_diagnostic, kakutani_bounds_check, kakutani_csv, kakutani_growth, pushforward_check, sample, ProductMeasure,
};
use lscheme::cocycle::{asym_cocycle, dihedral_eta, dinf_no_scheme_check, dinf_times_z2_ctx, random_admissible_set};
use lscheme::group::{Abelian, DElem, DirectProduct, Dihedral, Group, Side};
use lscheme::lifting::{check_extension, check_lift, check_lifted_gamma, lift_scheme, DirectExt};
use lscheme::num::{harmonic, q_to_f64, q_to_string, qi, QSqrt, Q};
use lscheme::scheme::{
    check_rearranged, phi_partial, tested_elements, verify_scheme, verify_scheme_with, CheckRow, GammaProfile, Rearranged,
    SchemeWindow, VerifyOptions, VerifyReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{BernoulliConfig, DihedralConfig, LiftConfig, VerifyConfig};
use crate::CliError;

/// One pipeline stage: exact check rows plus stage-specific data.
#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub report: VerifyReport,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    /// `(file stem, content)` of CSV series.
    #[serde(skip)]
    pub csv: Vec<(String, String)>,
}

impl Stage {
    pub fn new(name: &str, report: VerifyReport) -> Self {
        Self { name: name.into(), pass: report.all_pass(), error: None, report, data: Value::Null, csv: Vec::new() }
    }

    pub fn failed(name: &str, err: &lscheme::Error) -> Self {
        Self { name: name.into(), pass: false, error: Some(err.to_string()), report: VerifyReport::default(), data: Value::Null, csv: Vec::new() }
    }

    pub fn with_data(mut self, data: Value) -> Self {
        self.data = data;
        self
    }

    pub fn with_csv(mut self, stem: &str, content: String) -> Self {
        self.csv.push((stem.into(), content));
        self
    }
}

fn show<E: Serialize>(e: &E) -> String {
    serde_json::to_string(e).unwrap_or_default()
}

/// Collapse many rows of one check into a single row with a count and the
/// first failure as witness.
fn summary_row(condition: &str, scope: &str, rows: &[CheckRow]) -> CheckRow {
    let bad = rows.iter().find(|r| r.pass == Some(false));
    let passed = rows.iter().filter(|r| r.pass == Some(true)).count();
    let row = CheckRow::check(condition, scope, bad.is_none()).with_value(format!("{passed}/{} pass", rows.len()));
    match bad {
        Some(b) => row.with_witness(format!("{}: {}", b.scope, b.value.clone().or_else(|| b.witness.clone()).unwrap_or_default())),
        None => row,
    }
}

pub fn verify_stage<G: Group>(w: &SchemeWindow<G>, cfg: &VerifyConfig) -> Stage {
    let mut opts = VerifyOptions::new(cfg.shift_bound);
    opts.series_max = cfg.series_max;
    let rep = verify_scheme_with(w, &opts);
    let series = rep.series_csv();
    let rows = rep.rows_csv();
    Stage::new("verify", rep).with_csv("verify_series", series).with_csv("verify_rows", rows)
}

pub fn rearrange_stage<G: Group>(w: &SchemeWindow<G>, shift_bound: i64) -> Result<(Stage, Rearranged<G>), lscheme::Error> {
    let f = Rearranged::build(w)?;
    let rep = check_rearranged(w, f.window(), &tested_elements(&w.ctx, shift_bound));
    let data = json!({ "gammas": f.window().params.gammas });
    Ok((Stage::new("rearrange", rep).with_data(data), f))
}

fn exact(x: &QSqrt) -> Value {
    json!({ "exact": x.to_string(), "f64": x.to_f64() })
}

pub fn cocycle_stage<G: Group>(f: &Rearranged<G>) -> Result<Stage, lscheme::Error> {
    let w = f.window();
    let ctx = &w.ctx;
    let s_o = ctx.s_o();
    let xi = asym_cocycle(f)?;
    let mut rep = VerifyReport::default();
    let mut right = Vec::new();
    for n in 1..=w.len() {
        let support = xi.support_diff_norm_sq(Side::Right, s_o, n);
        let full = xi.diff_norm_sq(Side::Right, s_o, n);
        rep.push(
            CheckRow::check("cocycle: Σ_{F_1..F_N} |ρ(s_o)ξ_N − ξ_N|² = N", format!("N={n}"), support.as_rational() == Some(qi(n as i64)))
                .with_value(support.to_string()),
        );
        rep.push(CheckRow::info("cocycle: ‖ρ(s_o)ξ_N − ξ_N‖²", format!("N={n}"), full.to_string()));
        right.push(json!({ "N": n, "support": exact(&support), "full": exact(&full) }));
    }
    let mut left = Vec::new();
    for s in ctx.gens() {
        let norm = xi.diff_norm_sq(Side::Left, s, w.len());
        let phi = phi_partial(w, s);
        rep.push(
            CheckRow::check("cocycle: ‖λ(s)ξ_N − ξ_N‖² = Φ_partial(s)", format!("s={}", show(s)), norm.as_rational().as_ref() == Some(&phi))
                .with_value(format!("{norm} vs {}", q_to_string(&phi))),
        );
        let budget: Option<Q> = (0..w.len()).map(|n| w.budget(s, n).cloned()).sum();
        if let Some(b) = &budget {
            rep.push(
                CheckRow::check("cocycle: ‖λ(s)ξ_N − ξ_N‖² ≤ Φ budget", format!("s={}", show(s)), norm.cmp_rational(b).is_le())
                    .with_value(format!("{norm} ≤ {}", q_to_string(b))),
            );
        }
        left.push(json!({ "s": s, "norm": exact(&norm), "budget": budget.as_ref().map(q_to_string) }));
    }
    Ok(Stage::new("cocycle", rep).with_data(json!({ "right_s_o": right, "left": left })))
}

pub fn bernoulli_stage<G: Group>(f: &Rearranged<G>, cfg: &BernoulliConfig, seed: u64) -> Result<Stage, CliError> {
    let w = f.window();
    let ctx = &w.ctx;
    let eps = cfg.eps_q()?;
    let kappa = cfg.kappa_q()?.or_else(|| w.kappa.clone());
    let mu = ProductMeasure::new(ctx, w.sets.clone(), eps, kappa)?;
    let cons = conservativity_diagnostic(&mu, w, cfg.k0, cfg.doublings, cfg.exact_limit)?;
    let mut rep = VerifyReport::default();
    for r in &cons.rows {
        rep.push(r.clone());
    }

    let pool: Vec<G::Elem> = w.sets.iter().flat_map(|e| e.iter().cloned()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in ctx.gens() {
        let mut rows = Vec::new();
        for _ in 0..cfg.cylinders {
            let size = rng.random_range(1..=cfg.cylinder_size.max(1));
            let elems: Vec<G::Elem> = (0..size)
                .map(|_| {
                    let h = &pool[rng.random_range(0..pool.len())];
                    if rng.random_bool(0.5) { ctx.mul(s, h) } else { h.clone() }
                })
                .collect();
            let c = sample(&mu, &ctx.set(elems), rng.random())?;
            rows.push(pushforward_check(&mu, Side::Left, s, &c)?);
        }
        rep.push(summary_row("bern: L(s)_*μ_ξ = μ_{λ(s)ξ} on cylinders", &format!("s={} size ≤ {}", show(s), cfg.cylinder_size), &rows));
    }

    let s_o = ctx.s_o();
    let kak = kakutani_growth(&mu, s_o, w.len())?;
    let mut ball = ctx.empty_set();
    for e in &w.sets {
        for h in e.iter() {
            ball.insert(h.clone());
            ball.insert(ctx.mul(s_o, h));
        }
    }
    for r in kakutani_bounds_check(&mu, &mu.translated(Side::Left, s_o), &ball)? {
        rep.push(r);
    }
    let data = json!({
        "eps": q_to_string(mu.eps()),
        "delta": q_to_string(mu.delta()),
        "kappa": mu.kappa().map(|k| k.describe()),
        "alpha": cons.alpha,
        "conservativity": cons.series,
        "kakutani": kak,
    });
    Ok(Stage::new("bernoulli", rep)
        .with_data(data)
        .with_csv("conservativity", cons.csv())
        .with_csv("kakutani", kakutani_csv(&kak)))
}

pub type Lifted<G> = SchemeWindow<DirectProduct<G, Abelian>>;

pub fn lift_stage<G: Group>(w: &SchemeWindow<G>, cfg: &LiftConfig, shift_bound: i64, seed: u64) -> Result<(Stage, Lifted<G>), lscheme::Error> {
    if !verify_scheme(w, shift_bound).all_pass() {
        return Err(lscheme::Error::Unverified("the quotient scheme fails verification".into()));
    }
    let ext = DirectExt::new(w.ctx.clone(), Abelian::new(cfg.kernel.clone()), cfg.twist)?;
    let (lw, lifts) = lift_scheme(&ext, w, cfg.rep.into())?;
    let mut rep = check_extension(&ext, 64, seed);
    let mut sizes = Vec::new();
    for (i, (l, d)) in lifts.iter().zip(&w.sets).enumerate() {
        let n = i as i64 + 1;
        let eps = Q::new(1.into(), (n * n).into());
        for mut row in check_lift(&ext, d, l, &eps, shift_bound)?.rows {
            row.scope = format!("n={n} {}", row.scope);
            rep.push(row);
        }
        sizes.push(json!({ "n": n, "D": d.len(), "K": l.k.len(), "E": l.e.len(), "worst_alpha_ratio": q_to_string(&l.worst_alpha_ratio) }));
    }
    rep.extend(verify_scheme(&lw, shift_bound));
    rep.extend(check_lifted_gamma(&ext, w, &lw, shift_bound));
    Ok((Stage::new("lift", rep).with_data(json!({ "extension": lscheme::lifting::Extension::describe(&ext), "sets": sizes })), lw))
}

pub fn phi_stage<G: Group>(w: &SchemeWindow<G>, k_max: i64) -> Stage {
    let table = GammaProfile::new(&w.ctx, &w.sets).phi_table(k_max);
    let mut csv = String::from("k,phi_partial,phi_f64\n");
    let gamma: Vec<Value> = table
        .iter()
        .enumerate()
        .map(|(k, p)| {
            csv.push_str(&format!("{k},{},{:.12e}\n", q_to_string(p), q_to_f64(p)));
            json!({ "k": k, "phi": q_to_string(p) })
        })
        .collect();
    let gens: Vec<Value> = w
        .ctx
        .gens()
        .iter()
        .map(|s| {
            let p = phi_partial(w, s);
            let budget: Option<Q> = (0..w.len()).map(|n| w.budget(s, n).cloned()).sum();
            json!({ "s": s, "phi": q_to_string(&p), "budget": budget.as_ref().map(q_to_string) })
        })
        .collect();
    Stage::new("phi", VerifyReport::default()).with_data(json!({ "generators": gens, "gamma": gamma })).with_csv("phi", csv)
}

/// Partial sums of the virtually cyclic cocycle and the no-scheme checks on
/// random admissible sets.
pub fn dihedral_stage(cfg: &DihedralConfig, seed: u64) -> Result<Stage, lscheme::Error> {
    let (eta, left, right) = dihedral_eta(cfg.m_max)?;
    let mut rep = VerifyReport::default();
    let floor = harmonic(cfg.m_max as u64) * qi(4) - qi(8);
    let scope = format!("M={}", cfg.m_max);
    rep.push(
        CheckRow::check("dihedral: right partial ≥ 4H(M) − 8", scope.clone(), right.cmp_rational(&floor).is_ge())
            .with_value(format!("{:.6} ≥ {:.6}", right.to_f64(), q_to_f64(&floor))),
    );
    rep.push(CheckRow::check("dihedral: right partial > 4 ln M − 4", scope.clone(), eta.right_exceeds_log()));
    rep.push(
        CheckRow::check("dihedral: left partial ≤ 1", scope, left.cmp_rational(&qi(1)).is_le()).with_value(format!("{:.9}", left.to_f64())),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = Dihedral::standard_ctx();
    let trivial = d.set([(0, 0)]);
    let rows = (0..cfg.samples)
        .map(|_| dinf_no_scheme_check(&d, &trivial, &|g: &DElem| *g, &random_admissible_set(&d, &mut rng, 40, 12)))
        .collect::<Result<Vec<_>, _>>()?;
    rep.push(summary_row("virtcyc: s_oE ∩ E = ∅ for admissible E", &format!("D∞, {} sets", cfg.samples), &rows));
    let dz = dinf_times_z2_ctx();
    let k = dz.set([((0, 0), vec![0]), ((0, 0), vec![1])]);
    let quotient = |x: &(DElem, Vec<i64>)| x.0;
    let rows = (0..cfg.samples)
        .map(|_| dinf_no_scheme_check(&dz, &k, &quotient, &random_admissible_set(&dz, &mut rng, 40, 12)))
        .collect::<Result<Vec<_>, _>>()?;
    rep.push(summary_row("virtcyc: |s_oE∩E| ≤ 2|K|Σ|cE△E|", &format!("D∞×ℤ/2, {} sets", cfg.samples), &rows));
    let data = json!({ "m_max": cfg.m_max, "left_partial": exact_f64(&left), "right_partial": exact_f64(&right) });
    Ok(Stage::new("dihedral", rep).with_data(data))
}

fn exact_f64(x: &QSqrt) -> Value {
    match x.as_rational() {
        Some(r) => json!({ "exact": q_to_string(&r), "f64": q_to_f64(&r) }),
        None => json!({ "f64": x.to_f64(), "terms": x.len() }),
    }
}
