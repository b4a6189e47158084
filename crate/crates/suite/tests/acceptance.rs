//! Acceptance checks: one printed line per criterion, non-zero exit if any
//! line fails.

use std::time::Instant;

use lscheme::bernoulli::{conservativity_diagnostic, cylinder, cylinder_prob, delta_gate, pushforward_check, ProductMeasure};
use lscheme::cocycle::{asym_cocycle, dihedral_eta, dinf_no_scheme_check, random_admissible_set};
use lscheme::group::{Abelian, DElem, Dihedral, FinSet, Group, GroupCtx, HElem, Heisenberg, Side};
use lscheme::lifting::{check_extension, check_lift, check_lifted_gamma, lift_scheme, DirectExt, Rep};
use lscheme::nilpotent::{
    big_det, big_mat_mul, build_heisenberg_scheme, check_heisenberg_direction, det, find_heisenberg_direction,
    nil2coords_holds, smith_normal_form, to_big, BMat, BoxParams, IMat, MalcevPresentation,
};
use lscheme::num::{harmonic, q, q_to_string, qi, ratio, QSqrt, Q};
use lscheme::scheme::{
    check_rearranged, require_scheme_capable, tested_elements, verify_scheme, Rearranged, SchemeWindow,
};
use lscheme::semidirect::{bs_tower, profile_a, profile_q, tower_check, tower_window, wreath_tower, Profile, TowerInput};
use lscheme_suite::{ensure, Outcome, Runner};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const A: [i64; 4] = [2, 4, 8, 16];
const B: [i64; 4] = [1, 4, 9, 16];
const C: [i64; 4] = [2, 16, 72, 256];

fn heisenberg_window() -> SchemeWindow<Heisenberg> {
    build_heisenberg_scheme(&BoxParams::desk(4)).expect("desk boxes build")
}

fn x_pow(k: i64) -> HElem {
    [k, 0, 0]
}

fn eps() -> Q {
    q(1, 10)
}

fn c1() -> Outcome {
    let start = Instant::now();
    let w = heisenberg_window();
    let ctx = &w.ctx;
    let x = Heisenberg::X;
    let y = Heisenberg::Y;
    let mut shifts = 0;
    for n in 0..4 {
        let e = &w.sets[n];
        let (a, b, c) = (A[n], B[n], C[n]);
        ensure(e.len() as i64 == a * b * c, || format!("|E_{}| = {}", n + 1, e.len()))?;
        ensure(ctx.overlap(Side::Right, &x, e) == 0, || format!("E_{} x ∩ E_{} ≠ ∅", n + 1, n + 1))?;
        let rx = ratio(ctx.sym_diff_size(Side::Left, &x, e), e.len());
        ensure(rx == q(2, a), || format!("n={}: |xE△E|/|E| = {}", n + 1, q_to_string(&rx)))?;
        let ry = ratio(ctx.sym_diff_size(Side::Left, &y, e), e.len());
        let by = q(2, b) + q(a, c);
        ensure(ry <= by, || format!("n={}: |yE△E|/|E| = {} > {}", n + 1, q_to_string(&ry), q_to_string(&by)))?;
        for k in -2 * A[3]..=2 * A[3] {
            let got = ctx.sym_diff_size(Side::Left, &x_pow(k), e) as i64;
            let want = 2 * k.abs().min(a) * b * c;
            ensure(got == want, || format!("n={} k={k}: {got} vs {want}", n + 1))?;
            shifts += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("4 boxes, {shifts} x^k shifts with |k| ≤ 32 exact"))
}

fn tower_identities<G: Group>(name: &str, ctx: &GroupCtx<G>, input: &TowerInput<G>) -> Result<String, String> {
    let w = tower_window(ctx, input).map_err(|e| e.to_string())?;
    let rep = tower_check(ctx, input, 3, 8);
    ensure(rep.all_pass(), || format!("{name}: tower check fails: {:?}", rep.failures().next()))?;
    let s_o = ctx.s_o();
    for (i, e) in w.sets.iter().enumerate() {
        let (a, r) = (input.a[i], &input.r_sets[i]);
        ensure(e.len() as i64 == a * r.len() as i64, || format!("{name} n={}: |E| = {}", i + 1, e.len()))?;
        ensure(ctx.overlap(Side::Right, s_o, e) == 0, || format!("{name} n={}: E s_o ∩ E ≠ ∅", i + 1))?;
        for k in [1, -1] {
            let got = ctx.sym_diff_size(Side::Left, &ctx.gamma(k), e);
            ensure(got == 2 * r.len(), || format!("{name} n={}: |s_o^{k}E△E| = {got}", i + 1))?;
        }
        for t in &input.t {
            let lhs = ctx.sym_diff_size(Side::Left, t, e);
            // s_o^{-l} t s_o^l acting on level l
            let rhs: usize = (0..a).map(|l| ctx.sym_diff_size(Side::Left, &ctx.mul(&ctx.mul(&ctx.gamma(-l), t), &ctx.gamma(l)), r)).sum();
            ensure(lhs == rhs, || format!("{name} n={}: |tE△E| = {lhs} vs {rhs}", i + 1))?;
            let bound = &input.eps[i] * qi(e.len() as i64);
            ensure(qi(lhs as i64) <= bound, || format!("{name} n={}: {lhs} > ε_n|E_n|", i + 1))?;
        }
    }
    Ok(format!("{name} sizes {:?}", w.sets.iter().map(FinSet::len).collect::<Vec<_>>()))
}

fn c2() -> Outcome {
    let start = Instant::now();
    let a = profile_a(Profile::Desk, 3);
    ensure(a == [2, 4, 6], || format!("desk profile {a:?}"))?;
    let (wc, wi) = wreath_tower(Abelian::cyclic(2), &a, profile_q(Profile::Desk)).map_err(|e| e.to_string())?;
    let w = tower_identities("ℤ/2≀ℤ", &wc, &wi)?;
    let (bc, bi) = bs_tower(2, &a, profile_q(Profile::Desk)).map_err(|e| e.to_string())?;
    let b = tower_identities("BS(1,2)", &bc, &bi)?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{w}; {b}"))
}

fn rearranged_ok<G: Group>(name: &str, w: &SchemeWindow<G>) -> Result<Rearranged<G>, String> {
    let f = Rearranged::build(w).map_err(|e| format!("{name}: {e}"))?;
    let fw = f.window();
    let rep = check_rearranged(w, fw, &tested_elements(&w.ctx, 16));
    ensure(rep.all_pass(), || format!("{name}: {:?}", rep.failures().next()))?;
    let ctx = &fw.ctx;
    for n in 0..fw.len() {
        let shifted = ctx.translate(Side::Right, ctx.s_o(), &fw.sets[n]);
        for m in 0..fw.len() {
            ensure(shifted.is_disjoint(&fw.sets[m]).unwrap(), || format!("{name}: F_{} s_o meets F_{}", n + 1, m + 1))?;
            if m > n {
                ensure(fw.sets[n].is_disjoint(&fw.sets[m]).unwrap(), || format!("{name}: F_{} meets F_{}", n + 1, m + 1))?;
            }
        }
    }
    Ok(f)
}

fn c3() -> Outcome {
    rearranged_ok("heisenberg", &heisenberg_window())?;
    let a = profile_a(Profile::Desk, 3);
    let (wc, wi) = wreath_tower(Abelian::cyclic(2), &a, profile_q(Profile::Desk)).map_err(|e| e.to_string())?;
    rearranged_ok("wreath", &tower_window(&wc, &wi).map_err(|e| e.to_string())?)?;
    let (bc, bi) = bs_tower(2, &a, profile_q(Profile::Desk)).map_err(|e| e.to_string())?;
    rearranged_ok("bs", &tower_window(&bc, &bi).map_err(|e| e.to_string())?)?;
    Ok("heisenberg, wreath and BS(1,2) windows, S and s_o^k for |k| ≤ 16".into())
}

/// The literal statement: the full right norm over the first N sets equals N.
fn c4() -> Outcome {
    let f = rearranged_ok("heisenberg", &heisenberg_window())?;
    let xi = asym_cocycle(&f).map_err(|e| e.to_string())?;
    let w = f.window();
    let s_o = w.ctx.s_o();
    let mut left = Vec::new();
    for s in w.ctx.gens() {
        let norm = xi.diff_norm_sq(Side::Left, s, 4);
        let budget: Q = (0..4).map(|n| w.budget(s, n).cloned().unwrap()).sum();
        ensure(norm.cmp_rational(&budget).is_le(), || format!("left s={s:?}: {norm} > {}", q_to_string(&budget)))?;
        left.push(norm.to_string());
    }
    let observed: Vec<String> = (1..=4).map(|n| xi.diff_norm_sq(Side::Right, s_o, n).to_string()).collect();
    let bad = (1..=4).find(|&n| xi.diff_norm_sq(Side::Right, s_o, n).as_rational() != Some(qi(n as i64)));
    match bad {
        None => Ok(format!("right norms {observed:?}, left norms {left:?} within budget")),
        Some(n) => Err(format!(
            "‖ρ(s_o)ξ_N − ξ_N‖² for N=1..4 is {observed:?}, not N (first mismatch N={n}); left norms {left:?} within budget"
        )),
    }
}

/// The sum over the support of ξ_N only.
fn c4_support() -> Outcome {
    let f = rearranged_ok("heisenberg", &heisenberg_window())?;
    let xi = asym_cocycle(&f).map_err(|e| e.to_string())?;
    let s_o = f.window().ctx.s_o();
    for n in 1..=4 {
        let v = xi.support_diff_norm_sq(Side::Right, s_o, n);
        // each h ∈ F_m contributes (0 − 1/√|F_m|)² since F_m s_o misses every F_k
        ensure(v.as_rational() == Some(qi(n as i64)), || format!("N={n}: {v}"))?;
    }
    Ok("Σ over F_1..F_N of |ρ(s_o)ξ_N − ξ_N|² = N for N=1..4".into())
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IMat {
    let (r, c) = (rng.random_range(1..=6), rng.random_range(1..=6));
    (0..r).map(|_| (0..c).map(|_| rng.random_range(-50..=50)).collect()).collect()
}

fn unimodular(m: &BMat) -> bool {
    m.len() == m[0].len() && big_det(m).abs().is_one()
}

fn c5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bits = 0;
    for i in 0..200 {
        let m = random_matrix(&mut rng);
        let s = smith_normal_form(&m).map_err(|e| format!("matrix {i}: {e}"))?;
        ensure(big_mat_mul(&big_mat_mul(&s.u, &to_big(&m)), &s.v) == to_big(&s.d), || format!("matrix {i}: UMV ≠ D"))?;
        bits = s.u.iter().chain(&s.v).flatten().map(|x| x.bits()).fold(bits, u64::max);
        ensure(unimodular(&s.u) && unimodular(&s.v), || format!("matrix {i}: U or V not unimodular"))?;
        let diag = s.diag();
        for (r, row) in s.d.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                ensure(r == c || v == 0, || format!("matrix {i}: D not diagonal"))?;
            }
        }
        ensure(diag.iter().all(|&d| d >= 0), || format!("matrix {i}: negative diagonal"))?;
        for p in diag.windows(2) {
            ensure(if p[0] == 0 { p[1] == 0 } else { p[1] % p[0] == 0 }, || format!("matrix {i}: {} ∤ {}", p[0], p[1]))?;
        }
        let g = m.iter().flatten().fold(0i64, |acc, &v| acc.gcd(&v));
        ensure(diag[0] == g, || format!("matrix {i}: d_1 = {} but gcd = {g}", diag[0]))?;
        if m.len() == m[0].len() {
            let prod: BigInt = diag.iter().map(|&d| BigInt::from(d)).product();
            ensure(det(&m).abs() == prod, || format!("matrix {i}: |det M| ≠ Π d_i"))?;
        }
    }
    let mut mus = Vec::new();
    for (name, pres) in presets() {
        let data = find_heisenberg_direction(&pres).map_err(|e| format!("{name}: {e}"))?;
        let rep = check_heisenberg_direction(&pres, &data);
        ensure(rep.all_pass(), || format!("{name}: {:?}", rep.failures().next()))?;
        let g = data.group();
        let r = data.presentation.r();
        let comm = g.commutator(&g.basis(data.y_index()), &g.basis(data.x_index()));
        let mut zmu = vec![0; data.presentation.dim()];
        zmu[r] = data.mu;
        ensure(comm == zmu, || format!("{name}: [y,x] = {comm:?}"))?;
        for i in 1..r - 1 {
            let c = g.commutator(&g.basis(i), &g.basis(data.x_index()));
            ensure(c[r] == 0, || format!("{name}: [x_{i}, x] has z-coordinate {}", c[r]))?;
        }
        ensure(unimodular(&to_big(&data.p)), || format!("{name}: basis change not unimodular"))?;
        mus.push(data.mu);
    }
    ensure(mus == [1, 2, 1], || format!("μ = {mus:?}"))?;
    Ok(format!("200 random matrices (widest transform entry {bits} bits); μ = {mus:?} for H₃, H₃(μ=2), H₅"))
}

fn presets() -> [(&'static str, MalcevPresentation); 3] {
    [
        ("H3", MalcevPresentation::heisenberg(1)),
        ("H3 μ=2", MalcevPresentation::heisenberg(2)),
        ("H5", MalcevPresentation::heisenberg5()),
    ]
}

fn c6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut total = 0;
    for (name, pres) in presets() {
        let data = find_heisenberg_direction(&pres).map_err(|e| e.to_string())?;
        let g = data.group();
        let (r, yi) = (data.presentation.r(), data.y_index());
        let x = g.basis(0);
        for _ in 0..1000 {
            let h: Vec<i64> = (0..data.presentation.dim()).map(|_| rng.random_range(-20..=20)).collect();
            let k = rng.random_range(-20..=20);
            ensure(nil2coords_holds(&data, &h, k), || format!("{name}: h={h:?} k={k}"))?;
            // right-multiply one generator at a time
            let step = if k >= 0 { x.clone() } else { g.inv(&x) };
            let mut out = h.clone();
            for _ in 0..k.abs() {
                out = g.mul(&out, &step);
            }
            ensure(out[yi] == h[yi] && out[r] == h[r] + data.mu * k * h[yi], || format!("{name}: oracle h={h:?} k={k}"))?;
            total += 1;
        }
    }
    Ok(format!("{total} random (h, k) over three presentations"))
}

fn lifted_run(w: &SchemeWindow<Heisenberg>, twist: Option<u64>, rep: Rep) -> Result<String, String> {
    let tag = format!("twist={twist:?} rep={rep:?}");
    let ext = DirectExt::new(w.ctx.clone(), Abelian::cyclic(2), twist).map_err(|e| e.to_string())?;
    let er = check_extension(&ext, 64, 7);
    ensure(er.all_pass(), || format!("{tag}: extension {:?}", er.failures().next()))?;
    let (lw, lifts) = lift_scheme(&ext, w, rep).map_err(|e| format!("{tag}: {e}"))?;
    let mut nontrivial = 0;
    for (i, (l, d)) in lifts.iter().zip(&w.sets).enumerate() {
        let n = i as i64 + 1;
        let r = check_lift(&ext, d, l, &q(1, n * n), 16).map_err(|e| e.to_string())?;
        ensure(r.all_pass(), || format!("{tag} n={n}: {:?}", r.failures().next()))?;
        ensure(l.k.len() == 2 && l.e.len() == 2 * d.len(), || format!("{tag} n={n}: |K|={} |E|={}", l.k.len(), l.e.len()))?;
        nontrivial += l.alphas.iter().filter(|a| a.1[0] != 0).count();
    }
    let v = verify_scheme(&lw, 16);
    ensure(v.all_pass(), || format!("{tag}: lifted window {:?}", v.failures().next()))?;
    let g = check_lifted_gamma(&ext, w, &lw, 16);
    ensure(g.all_pass(), || format!("{tag}: {:?}", g.failures().next()))?;
    let (gc, qc) = (&lw.ctx, &w.ctx);
    for (e, d) in lw.sets.iter().zip(&w.sets) {
        for k in -16..=16 {
            let le = ratio(gc.sym_diff_size(Side::Left, &gc.gamma(k), e), e.len());
            let ld = ratio(qc.sym_diff_size(Side::Left, &qc.gamma(k), d), d.len());
            ensure(le == ld, || format!("{tag}: Φ_E ≠ Φ_D at k={k}"))?;
        }
    }
    if twist.is_some() {
        ensure(nontrivial > 0, || format!("{tag}: every α(s,d) is trivial"))?;
    }
    Ok(format!("{tag}: {nontrivial} nontrivial α"))
}

fn c7() -> Outcome {
    let w = heisenberg_window();
    let a = lifted_run(&w, None, Rep::Least)?;
    let b = lifted_run(&w, Some(7), Rep::Least)?;
    let c = lifted_run(&w, Some(7), Rep::Greatest)?;
    Ok(format!("H₃×ℤ/2 → H₃, N=4, |k| ≤ 16; {a}; {b}; {c}"))
}

/// `Σ_{k=1}^{terms} 1/(k 2^k)`, a lower bound for ln 2.
fn ln2_lower(terms: u32) -> Q {
    (1..=terms).map(|k| Q::new(BigInt::one(), BigInt::from(k) * BigInt::from(2).pow(k))).sum()
}

fn heis_measure() -> Result<(Rearranged<Heisenberg>, ProductMeasure<Heisenberg>), String> {
    let f = rearranged_ok("heisenberg", &heisenberg_window())?;
    let w = f.window();
    let mu = ProductMeasure::new(&w.ctx, w.sets.clone(), eps(), w.kappa.clone()).map_err(|e| e.to_string())?;
    Ok((f, mu))
}

fn c8() -> Outcome {
    let (f, mu) = heis_measure()?;
    let ctx = &f.window().ctx;
    let pool: Vec<HElem> = f.window().sets.iter().flat_map(|e| e.iter().copied()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for s in ctx.gens() {
        let si = ctx.inv(s);
        let shifted = mu.translated(Side::Left, s);
        for _ in 0..100 {
            let size = rng.random_range(1..=8);
            let bits: Vec<(HElem, bool)> = (0..size)
                .map(|_| {
                    let h = pool[rng.random_range(0..pool.len())];
                    let h = if rng.random_bool(0.5) { ctx.mul(s, &h) } else { h };
                    (h, rng.random_bool(0.5))
                })
                .collect();
            let c = cylinder(ctx, bits);
            let row = pushforward_check(&mu, Side::Left, s, &c).map_err(|e| e.to_string())?;
            ensure(row.pass == Some(true), || format!("s={s:?}: {row:?}"))?;
            let mut oracle = QSqrt::one();
            for (h, &b) in &c.assignment {
                let p = mu.value(&ctx.mul(&si, h));
                oracle = if b { &oracle * &p } else { &oracle * &(&QSqrt::one() - &p) };
            }
            let got = cylinder_prob(&shifted, &c).map_err(|e| e.to_string())?;
            ensure((&got - &oracle).is_zero(), || format!("s={s:?}: μ_λ(s)ξ(C) = {got} vs {oracle}"))?;
            checked += 1;
        }
    }
    ensure(*mu.delta() == q(1, 3), || format!("δ = {}", q_to_string(mu.delta())))?;
    let gate = delta_gate(mu.delta());
    ensure(gate == q(63, 4), || format!("δ-gate = {}", q_to_string(&gate)))?;
    let sixteen = eps() * eps() * qi(16);
    let kappa = mu.kappa().ok_or("no κ")?;
    ensure(kappa.cmp_rational(&sixteen) == Some(std::cmp::Ordering::Greater), || "16ε² ≥ κ".into())?;
    // κ = ln(2)/2 for q = 2
    ensure(ln2_lower(20) / qi(2) > sixteen, || "oracle: ln(2)/2 ≤ 16ε²".into())?;
    Ok(format!("{checked} cylinders; δ-gate = 63/4; 16ε² = {} < κ", q_to_string(&sixteen)))
}

fn c9a() -> Outcome {
    let (f, mu) = heis_measure()?;
    let w = f.window();
    let rep = conservativity_diagnostic(&mu, w, 32, 7, 16).map_err(|e| e.to_string())?;
    let ks: Vec<i64> = rep.series.iter().map(|p| p.k).collect();
    ensure(ks == (5..=12).map(|e| 1i64 << e).collect::<Vec<_>>(), || format!("K = {ks:?}"))?;
    let eps2 = 0.01f64;
    let phi = |k: i64| -> f64 { A.iter().map(|&a| 2.0 * k.min(a) as f64 / a as f64).sum() };
    let mut oracle = 1.0;
    let mut done = 0;
    let mut min_inc = f64::INFINITY;
    for p in &rep.series {
        for k in done + 1..=p.k {
            oracle += 2.0 * (-16.0 * eps2 * phi(k)).exp();
        }
        done = p.k;
        let rel = ((p.sum - oracle) / oracle).abs();
        ensure(rel <= 1e-9, || format!("K={}: sum {} vs oracle {oracle}, rel {rel:e}", p.k, p.sum))?;
        if let Some(d) = p.delta {
            min_inc = min_inc.min(d);
        }
    }
    // each doubling adds at least 2K·exp(−16ε²·2N) with N = 4
    let floor = 64.0 * (-16.0 * eps2 * 8.0f64).exp();
    ensure(min_inc >= floor * (1.0 - 1e-9), || format!("smallest increment {min_inc} < {floor}"))?;
    Ok(format!("K = 2^5..2^12, smallest doubling increment {min_inc:.3} ≥ {floor:.3}"))
}

fn c9b() -> Outcome {
    let (_, l3, r3) = dihedral_eta(3).map_err(|e| e.to_string())?;
    ensure(r3.as_rational() == Some(q(22, 3)), || format!("right_partial(3) = {r3}"))?;
    let l3f: f64 = (1..=3).map(|m: i32| (1.0 / f64::from(m + 1).sqrt() - 1.0 / f64::from(m).sqrt()).powi(2)).sum();
    ensure((l3.to_f64() - l3f).abs() < 1e-12 && (l3f - 0.1086).abs() < 1e-4, || format!("left_partial(3) = {}", l3.to_f64()))?;
    let mut last = String::new();
    for m in [1i64, 10, 100, 1000, 10_000] {
        let (eta, left, right) = dihedral_eta(m).map_err(|e| e.to_string())?;
        let floor = harmonic(m as u64) * qi(4) - qi(8);
        ensure(right.cmp_rational(&floor).is_ge(), || format!("M={m}: right {right} < 4H(M) − 8"))?;
        ensure(left.cmp_rational(&qi(1)).is_le(), || format!("M={m}: left {} > 1", left.to_f64()))?;
        if m >= 2 {
            ensure(eta.right_exceeds_log(), || format!("M={m}: right ≤ 4 ln M − 4"))?;
        }
        last = format!("M=10^4: left {:.6}, right {:.3}", left.to_f64(), right.to_f64());
    }
    Ok(last)
}

fn cli(args: &[&str]) -> i32 {
    lscheme_cli::run(std::iter::once("lscheme").chain(args.iter().copied()))
}

fn c10() -> Outcome {
    for (name, a) in [("ℤ", Abelian::lattice(1)), ("ℤ²", Abelian::lattice(2)), ("ℤ×ℤ/3", Abelian::new(vec![0, 3]))] {
        let ctx = a.standard_ctx().map_err(|e| e.to_string())?;
        let r = require_scheme_capable(&ctx);
        ensure(matches!(r, Err(lscheme::Error::NoScheme(_))), || format!("{name} accepted"))?;
    }
    ensure(require_scheme_capable(&Heisenberg::standard_ctx()).is_ok(), || "H₃ refused".into())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |f: &str| tmp.path().join(f).to_string_lossy().into_owned();
    ensure(cli(&["build", "--group", "zd", "-o", &p("z.json")]) == 2, || "build zd did not exit 2".into())?;
    ensure(cli(&["build", "--group", "heisenberg", "--n-max", "2", "-o", &p("h.json")]) == 0, || "build failed".into())?;
    let mut s: Value = serde_json::from_str(&std::fs::read_to_string(p("h.json")).unwrap()).unwrap();
    // [1,3,0] ∈ E_1 and [1,3,0]·x = [2,3,3]
    s["sets"][0].as_array_mut().unwrap().push(serde_json::json!([2, 3, 3]));
    let s_str = s.to_string();
    std::fs::write(p("bad.json"), s_str).unwrap();
    let mut witnesses = Vec::new();
    for out in ["v1.json", "v2.json"] {
        ensure(cli(&["verify", &p("bad.json"), "-o", &p(out)]) == 1, || "corrupted window did not exit 1".into())?;
        let v: Value = serde_json::from_str(&std::fs::read_to_string(p(out)).unwrap()).unwrap();
        let row = v["rows"].as_array().unwrap().iter().find(|r| r["pass"] == false).cloned().ok_or("no failing row")?;
        ensure(row["witness"].is_string(), || format!("no witness in {row}"))?;
        witnesses.push(row);
    }
    ensure(witnesses[0] == witnesses[1], || "witness not reproducible".into())?;

    let d = Dihedral::standard_ctx();
    let trivial = d.set([(0, 0)]);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for i in 0..500 {
        let e = random_admissible_set(&d, &mut rng, 40, 12);
        ensure(d.overlap(Side::Right, d.s_o(), &e) == 0, || format!("set {i} not admissible"))?;
        let row = dinf_no_scheme_check(&d, &trivial, &|g: &DElem| *g, &e).map_err(|e| e.to_string())?;
        ensure(row.pass == Some(true), || format!("set {i}: {row:?}"))?;
        ensure(d.overlap(Side::Left, d.s_o(), &e) == 0, || format!("set {i}: s_oE ∩ E ≠ ∅"))?;
    }
    Ok(format!("FC kinds refused; exit 1 with witness {}; 500 D∞ sets", witnesses[0]["witness"]))
}

fn main() {
    let mut r = Runner::default();
    r.run("1", "Heisenberg box identities", c1);
    r.run("2", "tower level identities", c2);
    r.run("3", "rearranged window conclusions", c3);
    r.run("4", "right norm equals N", c4);
    r.run("4s", "right norm over the support equals N", c4_support);
    r.run("5", "Smith normal form and Heisenberg directions", c5);
    r.run("6", "nil2 coordinates under x^k", c6);
    r.run("7", "lifting through H₃×ℤ/2", c7);
    r.run("8", "Bernoulli pushforward and gates", c8);
    r.run("9a", "conservativity increments", c9a);
    r.run("9b", "dihedral partial sums", c9b);
    r.run("10", "negative controls", c10);
    std::process::exit(r.finish());
}
