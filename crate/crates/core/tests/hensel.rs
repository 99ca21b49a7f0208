use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tate_core::hensel::{bezout, hensel_factor, lift_idempotent, APoly, TruncatedLocalRing};
use tate_core::selftest::random_near_idempotent;
use tate_core::{LaurentSeries, Scalar, ScalarRing, SeriesMatrix};

fn monic(rng: &mut ChaCha8Rng, k: ScalarRing, deg: usize) -> Vec<Scalar> {
    let p = k.characteristic() as i64;
    let mut v: Vec<Scalar> = (0..deg).map(|_| k.from_i64(rng.gen_range(0..p))).collect();
    v.push(k.one());
    v
}

fn k_mul(a: &[Scalar], b: &[Scalar], k: ScalarRing) -> Vec<Scalar> {
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    out
}

/// A monic lift of `ḡ` to `A` with random higher-order terms below the top degree.
fn random_lift(rng: &mut ChaCha8Rng, a: &TruncatedLocalRing, gbar: &[Scalar]) -> APoly {
    let p = a.field.characteristic() as i64;
    let mut g = a.lift_poly(gbar);
    for c in g.iter_mut().take(gbar.len() - 1) {
        let tail: Vec<i64> = (1..a.order).map(|_| rng.gen_range(0..p)).collect();
        *c = a
            .elem(
                &c.try_add(&LaurentSeries::from_coeffs(a.field, 1, &tail))
                    .unwrap(),
            )
            .unwrap();
    }
    g
}

fn reduce_to(a: &TruncatedLocalRing, p: &[LaurentSeries]) -> APoly {
    a.poly_trim(p.iter().map(|c| c.truncate(a.order)).collect())
}

#[test]
fn trivial_split_needs_no_iteration() {
    let q = ScalarRing::Rational;
    let a = TruncatedLocalRing::new(q, 5).unwrap();
    let g = a.lift_poly(&[q.zero(), -q.one(), q.one()]);
    let w = hensel_factor(&a, &g, &[q.zero(), q.one()], &[-q.one(), q.one()]).unwrap();
    assert_eq!(w.iterations, 0);
    assert_eq!(w.g1, a.lift_poly(&[-q.one(), q.one()]));
}

#[test]
fn random_factorizations_over_f5() {
    let f5 = ScalarRing::prime(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let mut done = 0;
    while done < 25 {
        let (d0, d1) = (rng.gen_range(1..4), rng.gen_range(1..4));
        let (g0bar, g1bar) = (monic(&mut rng, f5, d0), monic(&mut rng, f5, d1));
        if bezout(&g0bar, &g1bar, f5).is_none() {
            continue;
        }
        let n = rng.gen_range(2..9);
        let a = TruncatedLocalRing::new(f5, n).unwrap();
        let g = random_lift(&mut rng, &a, &k_mul(&g0bar, &g1bar, f5));
        let w = hensel_factor(&a, &g, &g0bar, &g1bar).unwrap();
        assert_eq!(a.poly_mul(&w.g0, &w.g1), g);
        let one = a.poly_add(&a.poly_mul(&w.s, &w.g0), &a.poly_mul(&w.t, &w.g1));
        assert_eq!(one, vec![a.one()]);
        assert!(a.is_monic(&w.g0) && a.is_monic(&w.g1));
        assert_eq!(a.reduce_poly(&w.g0), g0bar);
        assert_eq!(a.reduce_poly(&w.g1), g1bar);
        // quadratic convergence: at most ⌈log₂ N⌉ + 1 steps
        assert!(
            1i64 << w.iterations.saturating_sub(1) < 2 * n,
            "{} iterations at N = {n}",
            w.iterations
        );

        // the factors are unique: a deeper lift truncates to the same one, and
        // swapping the roles swaps the factors
        let deep = TruncatedLocalRing::new(f5, n + 3).unwrap();
        let gd: APoly = g
            .iter()
            .map(|c| deep.elem(&c.to_exact()).unwrap())
            .collect();
        let wd = hensel_factor(&deep, &gd, &g0bar, &g1bar).unwrap();
        assert_eq!(reduce_to(&a, &wd.g0), w.g0);
        let swapped = hensel_factor(&a, &g, &g1bar, &g0bar).unwrap();
        assert_eq!(swapped.g0, w.g1);
        done += 1;
    }
}

#[test]
fn factorization_preconditions() {
    let f5 = ScalarRing::prime(5).unwrap();
    let a = TruncatedLocalRing::new(f5, 4).unwrap();
    let o = |x| f5.from_i64(x);
    // λ² = λ·λ is not coprime
    let g = a.lift_poly(&[o(0), o(0), o(1)]);
    assert!(hensel_factor(&a, &g, &[o(0), o(1)], &[o(0), o(1)]).is_err());
    // not monic
    let g = a.lift_poly(&[o(0), o(4), o(2)]);
    assert!(hensel_factor(&a, &g, &[o(0), o(1)], &[o(2), o(1)]).is_err());
    // wrong residue factors
    let g = a.lift_poly(&[o(0), o(4), o(1)]);
    assert!(hensel_factor(&a, &g, &[o(1), o(1)], &[o(4), o(1)]).is_err());
    assert!(TruncatedLocalRing::new(ScalarRing::Rational.dual(), 3).is_err());
}

#[test]
fn golden_ratio_root_modulo_x_to_the_sixth_over_f11() {
    // λ² − λ − x = (λ − r)(λ − 1 + r) with r = −x + x² − 2x³ + 5x⁴ − 14x⁵ + …
    let f11 = ScalarRing::prime(11).unwrap();
    let a = TruncatedLocalRing::new(f11, 6).unwrap();
    let g = vec![
        a.elem(&LaurentSeries::from_coeffs(f11, 1, &[-1])).unwrap(),
        a.constant(&-f11.one()),
        a.one(),
    ];
    let w = hensel_factor(&a, &g, &[f11.zero(), f11.one()], &[-f11.one(), f11.one()]).unwrap();
    let r = -&a
        .elem(&LaurentSeries::from_coeffs(f11, 1, &[-1, 1, -2, 5, -14]))
        .unwrap();
    assert_eq!(w.g0, vec![r, a.one()]);
}

fn pm(field: ScalarRing, text: &str) -> SeriesMatrix {
    SeriesMatrix::parse_json_in(field, text, 'x').unwrap()
}

#[test]
fn idempotent_examples() {
    let q = ScalarRing::Rational;
    let a = TruncatedLocalRing::new(q, 6).unwrap();
    let e = pm(q, r#"[["1","0"],["0","0"]]"#);
    assert_eq!(
        lift_idempotent(&a, &e).unwrap().pi_tilde,
        e.map(|x| x.truncate(6))
    );
    let l = lift_idempotent(&a, &pm(q, r#"[["x","0"],["0","1"]]"#)).unwrap();
    assert_eq!(
        l.pi_tilde,
        pm(q, r#"[["0","0"],["0","1"]]"#).map(|x| x.truncate(6))
    );
    let c = l.check(&a).unwrap();
    assert!(c.ok());
    assert_eq!(c.residue_rank, 1);
    assert!(lift_idempotent(&a, &pm(q, r#"[["2","0"],["0","1"]]"#)).is_err());
    assert!(lift_idempotent(&a, &pm(q, r#"[["x^-1","0"],["0","1"]]"#)).is_err());
}

/// `p ↦ 3p² − 2p³` until it stabilizes.
fn iterate_idempotent(a: &TruncatedLocalRing, pi: &SeriesMatrix) -> SeriesMatrix {
    let k = a.field;
    let c = |x| LaurentSeries::constant(k.from_i64(x));
    let mut p = pi.map(|x| x.truncate(a.order));
    loop {
        let p2 = p.try_mul(&p).unwrap();
        let p3 = p2.try_mul(&p).unwrap();
        let next = p2
            .scale(&c(3))
            .unwrap()
            .try_sub(&p3.scale(&c(2)).unwrap())
            .unwrap()
            .map(|x| x.truncate(a.order));
        if next == p {
            return p;
        }
        p = next;
    }
}

#[test]
fn idempotent_lift_agrees_with_the_cubic_iteration() {
    let f7 = ScalarRing::prime(7).unwrap();
    let a = TruncatedLocalRing::new(f7, 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..20 {
        let pi = random_near_idempotent(&mut rng, &a).unwrap();
        let l = lift_idempotent(&a, &pi).unwrap();
        assert!(l.check(&a).unwrap().ok());
        assert_eq!(l.pi_tilde, iterate_idempotent(&a, &pi));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linear_factors_lift(r0 in 0i64..7, r1 in 0i64..7, tail in prop::collection::vec(0i64..7, 10), n in 1i64..6) {
        prop_assume!(r0 != r1);
        let f7 = ScalarRing::prime(7).unwrap();
        let a = TruncatedLocalRing::new(f7, n).unwrap();
        let g0bar = vec![f7.from_i64(-r0), f7.one()];
        let g1bar = vec![f7.from_i64(-r1), f7.one()];
        let mut g = a.lift_poly(&k_mul(&g0bar, &g1bar, f7));
        for (i, c) in g.iter_mut().take(2).enumerate() {
            let t = &tail[5 * i..5 * i + 5];
            *c = a.elem(&c.try_add(&LaurentSeries::from_coeffs(f7, 1, t)).unwrap()).unwrap();
        }
        let w = hensel_factor(&a, &g, &g0bar, &g1bar).unwrap();
        prop_assert_eq!(a.poly_mul(&w.g0, &w.g1), g.clone());
        // the root of g₀ is a root of g
        let root = -&w.g0[0];
        let val = g[0].try_add(&g[1].try_mul(&root).unwrap()).unwrap().try_add(&root.try_mul(&root).unwrap()).unwrap();
        prop_assert!(a.is_zero(&val));
    }
}
