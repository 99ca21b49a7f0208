use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tate_core::{Error, LaurentSeries, Scalar, ScalarRing};

fn q() -> ScalarRing {
    ScalarRing::Rational
}

fn s(ring: ScalarRing, text: &str) -> LaurentSeries {
    LaurentSeries::parse(ring, text).unwrap()
}

#[test]
fn cancellation_keeps_precision() {
    let a = s(q(), "t^-1 + 1 + O(t^3)");
    let b = s(q(), "-t^-1 + O(t^3)");
    assert_eq!(&a + &b, s(q(), "1 + O(t^3)"));
}

#[test]
fn difference_of_squares() {
    let a = s(q(), "1 + t + O(t^5)");
    let b = s(q(), "1 - t + O(t^5)");
    assert_eq!(&a * &b, s(q(), "1 - t^2 + O(t^5)"));
}

#[test]
fn product_matches_schoolbook_convolution_over_f5() {
    let f5 = ScalarRing::prime(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let a: Vec<i64> = (0..7).map(|_| rng.gen_range(0..5)).collect();
        let b: Vec<i64> = (0..6).map(|_| rng.gen_range(0..5)).collect();
        let (la, lb) = (rng.gen_range(-3..3), rng.gen_range(-3..3));
        let mut conv = BTreeMap::new();
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                *conv.entry(la + lb + (i + j) as i64).or_insert(0) += x * y;
            }
        }
        let p = &LaurentSeries::from_coeffs(f5, la, &a) * &LaurentSeries::from_coeffs(f5, lb, &b);
        for (e, c) in conv {
            assert_eq!(p.coeff(e).unwrap(), f5.from_i64(c.rem_euclid(5)));
        }
    }
}

#[test]
fn inverses() {
    assert_eq!(
        LaurentSeries::t_pow(q(), 1).invert().unwrap(),
        LaurentSeries::t_pow(q(), -1)
    );
    assert_eq!(
        s(q(), "1 + t + O(t^4)").invert().unwrap(),
        s(q(), "1 - t + t^2 - t^3 + O(t^4)")
    );
    let d = ScalarRing::Rational.dual();
    let x = LaurentSeries::parse(d, "1 + e*t").unwrap();
    assert_eq!(
        x.invert().unwrap(),
        LaurentSeries::parse(d, "1 - e*t").unwrap()
    );
    assert_eq!(s(q(), "1 + t").invert(), Err(Error::InexactInverse));
}

#[test]
fn geometric_series_oracle() {
    // 1/(1 − a t) = Σ aᵏ tᵏ
    for a in [-3i64, 2, 5] {
        let x = LaurentSeries::from_coeffs(q(), 0, &[1, -a]);
        let inv = x.invert_to(8).unwrap();
        for k in 0..8 {
            assert_eq!(inv.coeff(k).unwrap(), q().from_i64(a.pow(k as u32)));
        }
        assert_eq!(inv.prec(), Some(8));
    }
}

#[test]
fn derivatives() {
    assert_eq!(LaurentSeries::t_pow(q(), 2).derivative(), s(q(), "2*t"));
    assert_eq!(LaurentSeries::t_pow(q(), -1).derivative(), s(q(), "-t^-2"));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cs: Vec<i64> = (0..9).map(|_| rng.gen_range(-9..9)).collect();
    let f = LaurentSeries::from_coeffs(q(), -4, &cs);
    let d = f.derivative();
    for (i, c) in cs.iter().enumerate() {
        let n = i as i64 - 4;
        assert_eq!(d.coeff_or_zero(n - 1), q().from_i64(n * c));
    }
}

#[test]
fn residue_examples() {
    let r = |f: &str, g: &str| LaurentSeries::residue_coeff(&s(q(), f), &s(q(), g)).unwrap();
    assert_eq!(r("t^-1", "t"), q().one());
    assert_eq!(r("1 + t", "t^-1"), -q().one());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let f: Vec<i64> = (0..7).map(|_| rng.gen_range(-5..5)).collect();
        let g: Vec<i64> = (0..7).map(|_| rng.gen_range(-5..5)).collect();
        // Σ n·f₋ₙ·gₙ with both supported on −3..3
        let closed: i64 = (-3i64..=3)
            .map(|n| n * f[(3 - n) as usize] * g[(n + 3) as usize])
            .sum();
        let v = LaurentSeries::residue_coeff(
            &LaurentSeries::from_coeffs(q(), -3, &f),
            &LaurentSeries::from_coeffs(q(), -3, &g),
        )
        .unwrap();
        assert_eq!(v, q().from_i64(closed));
    }
}

#[test]
fn residue_beyond_precision_is_an_error() {
    let f = s(q(), "1 + O(t^1)");
    let g = s(q(), "t^-3");
    assert!(LaurentSeries::residue_coeff(&f, &g)
        .unwrap_err()
        .is_precision());
}

#[test]
fn parse_display_round_trip() {
    for ring in [q(), ScalarRing::prime(7).unwrap(), q().dual()] {
        for text in ["0", "1", "3*t^-2 + 1 + O(t^4)", "O(t^2)", "-t + t^5"] {
            let x = s(ring, text);
            assert_eq!(s(ring, &x.to_string()), x);
        }
    }
    assert!(LaurentSeries::parse(q(), "t^").is_err());
    assert!(LaurentSeries::parse(q(), "1 + O(t^1) + O(t^2) +").is_err());
}

fn ring_strategy() -> impl Strategy<Value = ScalarRing> {
    prop_oneof![
        Just(ScalarRing::Rational),
        Just(ScalarRing::Prime(5)),
        Just(ScalarRing::Prime(7).dual()),
    ]
}

fn series(ring: ScalarRing) -> impl Strategy<Value = LaurentSeries> {
    (
        -3i64..2,
        prop::collection::vec(-4i64..5, 0..6),
        prop::option::of(2i64..8),
    )
        .prop_map(move |(lo, cs, prec)| {
            let mut x = LaurentSeries::from_coeffs(ring, lo, &cs);
            if let Some(p) = prec {
                x = x.truncate(p);
            }
            x
        })
}

fn unit(ring: ScalarRing) -> impl Strategy<Value = LaurentSeries> {
    (1i64..4, prop::collection::vec(-4i64..5, 0..5), 3i64..8).prop_map(move |(c0, cs, p)| {
        let mut all = vec![c0];
        all.extend(cs);
        LaurentSeries::from_coeffs(ring, 0, &all).truncate(p)
    })
}

fn triple() -> impl Strategy<Value = (LaurentSeries, LaurentSeries, LaurentSeries)> {
    ring_strategy().prop_flat_map(|r| (series(r), series(r), series(r)))
}

fn exact_pair() -> impl Strategy<Value = (LaurentSeries, LaurentSeries)> {
    let poly = || {
        (-4i64..1, prop::collection::vec(-6i64..7, 0..8))
            .prop_map(|(lo, cs)| LaurentSeries::from_coeffs(ScalarRing::Rational, lo, &cs))
    };
    (poly(), poly())
}

proptest! {
    #[test]
    fn ring_axioms((a, b, c) in triple()) {
        prop_assert!((&(&a * &b) * &c).agrees_with(&(&a * &(&b * &c))));
        prop_assert!((&a * &(&b + &c)).agrees_with(&(&(&a * &b) + &(&a * &c))));
        prop_assert!((&a + &b).agrees_with(&(&b + &a)));
        prop_assert!((&a * &b).agrees_with(&(&b * &a)));
    }

    #[test]
    fn inverse_is_two_sided(u in ring_strategy().prop_flat_map(unit)) {
        let inv = u.invert().unwrap();
        let one = LaurentSeries::one(u.ring());
        prop_assert!((&u * &inv).agrees_with(&one));
        prop_assert!((&inv * &u).agrees_with(&one));
    }

    #[test]
    fn integration_by_parts((f, g) in exact_pair()) {
        let a = LaurentSeries::residue_coeff(&f, &g).unwrap();
        let b = LaurentSeries::residue_coeff(&g, &f).unwrap();
        prop_assert!((a + b).is_zero());
        let one = LaurentSeries::one(f.ring());
        prop_assert!(LaurentSeries::residue_coeff(&one, &f).unwrap().is_zero());
    }

    #[test]
    fn truncation_commutes_with_arithmetic((a, b, _c) in triple(), p in -2i64..6) {
        let lhs = (&a.truncate(p + 3) * &b.truncate(p + 3)).truncate(p);
        let rhs = (&a * &b).truncate(p);
        prop_assert!(lhs.agrees_with(&rhs));
        let sum = (&a.truncate(p) + &b.truncate(p)).truncate(p);
        prop_assert!(sum.agrees_with(&(&a + &b).truncate(p)));
    }

    #[test]
    fn dual_numbers_square_to_zero(c in -5i64..5) {
        let d = ScalarRing::Rational.dual();
        let e = d.epsilon();
        let x: Scalar = &e * &d.from_i64(c);
        prop_assert!((&x * &x).is_zero());
    }
}
