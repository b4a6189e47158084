use std::sync::OnceLock;

use lscheme::cocycle::DihedralEta;
use lscheme::group::{Abelian, Dihedral, FinSet, Group, GroupCtx, Heisenberg, Side};
use lscheme::nilpotent::{
    big_det, big_mat_mul, build_heisenberg_scheme, find_heisenberg_direction, nil2coords_holds, smith_normal_form,
    to_big, BoxParams, IMat, MalcevPresentation, Nil2Group,
};
use lscheme::num::{harmonic, q, qi, sum_tree, QSqrt, Q};
use lscheme::scheme::{rearrange, verify_scheme, SchemeWindow};
use lscheme::semidirect::{bs_ctx, phi_power, phi_power_within_bound, wreath_ctx};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn associative<G: Group>(ctx: &GroupCtx<G>, seed: u64, len: usize) -> bool {
    let mut r = rng(seed);
    let (g, h, k) = (ctx.random_elem(&mut r, len), ctx.random_elem(&mut r, len), ctx.random_elem(&mut r, len));
    ctx.mul(&ctx.mul(&g, &h), &k) == ctx.mul(&g, &ctx.mul(&h, &k))
}

fn canonical<G: Group>(ctx: &GroupCtx<G>, seed: u64, len: usize) -> bool {
    let mut r = rng(seed);
    let (g, h) = (ctx.random_elem(&mut r, len), ctx.random_elem(&mut r, len));
    let gh = ctx.mul(&g, &h);
    let e = ctx.identity();
    ctx.group().is_valid(&gh)
        && ctx.mul(&gh, &e) == gh
        && ctx.mul(&e, &gh) == gh
        && ctx.mul(&gh, &ctx.inv(&gh)) == e
        && ctx.inv(&ctx.inv(&gh)) == gh
}

fn random_set<G: Group>(ctx: &GroupCtx<G>, r: &mut ChaCha8Rng, size: usize, len: usize) -> FinSet<G::Elem> {
    ctx.set((0..size).map(|_| ctx.random_elem(r, len)))
}

fn translation_bijective<G: Group>(ctx: &GroupCtx<G>, seed: u64, side: Side) -> bool {
    let mut r = rng(seed);
    let g = ctx.random_elem(&mut r, 6);
    let e = random_set(ctx, &mut r, 20, 5);
    let f = random_set(ctx, &mut r, 20, 5);
    let ge = ctx.translate(side, &g, &e);
    let gf = ctx.translate(side, &g, &f);
    let lhs = ctx.translate(side, &g, &e.symdiff(&f).unwrap());
    ge.len() == e.len() && lhs == ge.symdiff(&gf).unwrap()
}

/// `|gE △ E| ≤ Σ |s_i E △ E|` for `g = s_1⋯s_k`.
fn word_bound<G: Group>(ctx: &GroupCtx<G>, seed: u64) -> bool {
    let mut r = rng(seed);
    let word: Vec<G::Elem> = (0..r.random_range(1..8)).map(|_| ctx.gens()[r.random_range(0..ctx.gens().len())].clone()).collect();
    let g = word.iter().fold(ctx.identity(), |acc, s| ctx.mul(&acc, s));
    let e = random_set(ctx, &mut r, 25, 4);
    let total: usize = word.iter().map(|s| ctx.sym_diff_size(Side::Left, s, &e)).sum();
    ctx.sym_diff_size(Side::Left, &g, &e) <= total
}

fn nil2_h5() -> GroupCtx<Nil2Group> {
    Nil2Group::new(MalcevPresentation::heisenberg5()).standard_ctx().unwrap()
}

macro_rules! for_each_kind {
    ($f:ident ( $($arg:expr),* )) => {{
        prop_assert!($f(&Heisenberg::standard_ctx(), $($arg),*), "heisenberg");
        prop_assert!($f(&Dihedral::standard_ctx(), $($arg),*), "dihedral");
        prop_assert!($f(&Abelian::new(vec![0, 0, 3]).standard_ctx().unwrap(), $($arg),*), "abelian");
        prop_assert!($f(&wreath_ctx(Abelian::cyclic(2)).unwrap(), $($arg),*), "wreath");
        prop_assert!($f(&bs_ctx(2).unwrap(), $($arg),*), "bs");
        prop_assert!($f(&nil2_h5(), $($arg),*), "nil2");
    }};
}

fn desk_windows() -> &'static (SchemeWindow<Heisenberg>, SchemeWindow<Heisenberg>) {
    static W: OnceLock<(SchemeWindow<Heisenberg>, SchemeWindow<Heisenberg>)> = OnceLock::new();
    W.get_or_init(|| {
        let e = build_heisenberg_scheme(&BoxParams::desk(3)).unwrap();
        let f = rearrange(&e).unwrap();
        (e, f)
    })
}

fn small_matrix() -> impl Strategy<Value = IMat> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-50i64..=50, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplication_is_associative(seed in any::<u64>(), len in 0usize..12) {
        for_each_kind!(associative(seed, len));
    }

    #[test]
    fn products_are_canonical(seed in any::<u64>(), len in 0usize..12) {
        for_each_kind!(canonical(seed, len));
    }

    #[test]
    fn translations_are_bijective(seed in any::<u64>()) {
        for_each_kind!(translation_bijective(seed, Side::Left));
        for_each_kind!(translation_bijective(seed, Side::Right));
    }

    #[test]
    fn boundary_is_subadditive_along_words(seed in any::<u64>()) {
        for_each_kind!(word_bound(seed));
    }

    #[test]
    fn nil2_h3_matches_heisenberg(a in -40i64..40, b in -40i64..40, c in -40i64..40,
                                  a2 in -40i64..40, b2 in -40i64..40, c2 in -40i64..40) {
        let g = Nil2Group::new(MalcevPresentation::heisenberg(1));
        let lhs = g.mul(&vec![a, b, c], &vec![a2, b2, c2]);
        let rhs = Heisenberg.mul(&[a, b, c], &[a2, b2, c2]);
        prop_assert_eq!(lhs, rhs.to_vec());
    }

    #[test]
    fn nil2_coordinates_under_x_powers(seed in any::<u64>(), k in -20i64..=20, preset in 0usize..3) {
        let pres = [MalcevPresentation::heisenberg(1), MalcevPresentation::heisenberg(2), MalcevPresentation::heisenberg5()];
        let data = find_heisenberg_direction(&pres[preset]).unwrap();
        let mut r = rng(seed);
        let mut h: Vec<i64> = (0..data.presentation.dim()).map(|_| r.random_range(-30..=30)).collect();
        h[0] = 0;
        prop_assert!(nil2coords_holds(&data, &h, k));
    }

    #[test]
    fn smith_form_is_exact(m in small_matrix()) {
        let s = smith_normal_form(&m).unwrap();
        prop_assert_eq!(big_mat_mul(&big_mat_mul(&s.u, &to_big(&m)), &s.v), to_big(&s.d));
        prop_assert!(big_det(&s.u).abs().is_one() && big_det(&s.v).abs().is_one());
        for (i, row) in s.d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                prop_assert!(i == j || x == 0);
            }
        }
        for w in s.diag().windows(2) {
            prop_assert!(w[0] >= 0 && w[1] >= 0);
            let divides = if w[0] == 0 { w[1] == 0 } else { w[1] % w[0] == 0 };
            prop_assert!(divides, "{} does not divide {}", w[0], w[1]);
        }
    }

    #[test]
    fn phi_of_powers_within_log_bound(k in -100_000i64..=100_000, n in 1usize..=16) {
        let a: Vec<i64> = (1..=n as u32).map(|i| 1i64 << i).collect();
        prop_assert_eq!(phi_power(k, &a), phi_power(-k, &a));
        prop_assert_eq!(phi_power_within_bound(k, &a, &qi(2)), Some(true));
    }

    #[test]
    fn rearrangement_preserves_boundaries(seed in any::<u64>()) {
        let (e, f) = desk_windows();
        let ctx = &e.ctx;
        let g = ctx.random_elem(&mut rng(seed), 10);
        let s_o = ctx.s_o();
        for (en, fn_) in e.sets.iter().zip(&f.sets) {
            prop_assert_eq!(ctx.sym_diff_size(Side::Left, &g, fn_), ctx.sym_diff_size(Side::Left, &g, en));
            prop_assert_eq!(ctx.overlap(Side::Right, s_o, fn_), 0);
        }
    }

    #[test]
    fn dihedral_left_partials_monotone_and_bounded(m in 1i64..300) {
        let a = DihedralEta { m_max: m }.left_partial();
        let b = DihedralEta { m_max: m + 1 }.left_partial();
        prop_assert!(a < b);
        prop_assert!(b.cmp_rational(&qi(1)).is_le());
    }

    #[test]
    fn tree_sum_matches_sequential(terms in proptest::collection::vec((-1000i64..1000, 1i64..1000), 0..60)) {
        let qs: Vec<Q> = terms.iter().map(|&(n, d)| q(n, d)).collect();
        let fold = qs.iter().fold(Q::zero(), |acc, x| acc + x);
        prop_assert_eq!(sum_tree(qs), fold);
    }

    #[test]
    fn qsqrt_products_track_floats(a in 1u64..500, b in 1u64..500, c in -50i64..50, d in 1i64..50) {
        let x = QSqrt::sqrt_u64(a).scale(&q(c, d));
        let y = QSqrt::inv_sqrt(b);
        let exact = (&x * &y).to_f64();
        let float = (a as f64).sqrt() * c as f64 / d as f64 / (b as f64).sqrt();
        prop_assert!((exact - float).abs() <= 1e-12 * float.abs().max(1.0));
        prop_assert_eq!((&x * &y).signum(), c.cmp(&0));
    }
}

#[test]
fn harmonic_matches_definition() {
    for m in [0u64, 1, 2, 7, 50] {
        let fold = (1..=m).fold(Q::zero(), |acc, k| acc + q(1, k as i64));
        assert_eq!(harmonic(m), fold);
    }
}

#[test]
fn verify_reports_are_reproducible() {
    let (_, f) = desk_windows();
    let a = serde_json::to_string(&verify_scheme(f, 8)).unwrap();
    let b = serde_json::to_string(&verify_scheme(f, 8)).unwrap();
    assert_eq!(a, b);
}
