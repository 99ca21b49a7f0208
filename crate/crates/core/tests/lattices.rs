use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tate_core::detline::GradedLine;
use tate_core::lattice::{smith, window_lattices};
use tate_core::nilpotence::{is_topologically_nilpotent, rank_over_t, Nilpotence};
use tate_core::selftest::{random_lattice, random_laurent};
use tate_core::{Lattice, LaurentSeries, Mat, Scalar, ScalarRing, SeriesMatrix, WindowSpace};

fn q() -> ScalarRing {
    ScalarRing::Rational
}

fn mat(ring: ScalarRing, s: &str) -> SeriesMatrix {
    SeriesMatrix::parse_json(ring, s).unwrap()
}

fn lat(ring: ScalarRing, s: &str) -> Lattice {
    Lattice::new(mat(ring, s)).unwrap()
}

/// A random lattice between `t^{hi}` and `t^{lo}` in Hermite shape.
#[allow(clippy::needless_range_loop)]
fn random_window_lattice(
    rng: &mut ChaCha8Rng,
    ring: ScalarRing,
    n: usize,
    w: &WindowSpace,
) -> Lattice {
    let p = ring.characteristic() as i64;
    loop {
        let exps: Vec<i64> = (0..n).map(|_| rng.gen_range(w.lo..=w.hi)).collect();
        let mut h = SeriesMatrix::zeros(ring, n, n);
        for i in 0..n {
            h.set(i, i, LaurentSeries::t_pow(ring, exps[i]));
            for j in i + 1..n {
                let cs: Vec<(i64, Scalar)> = (w.lo..exps[i])
                    .map(|e| (e, ring.from_i64(rng.gen_range(0..p))))
                    .collect();
                h.set(i, j, LaurentSeries::exact(ring, cs));
            }
        }
        let l = Lattice::new(h).unwrap();
        if l.fits_window(w).unwrap() {
            return l;
        }
    }
}

/// A random product of elementary and constant diagonal matrices over `k[t]`.
fn random_unimodular_power_series(
    rng: &mut ChaCha8Rng,
    ring: ScalarRing,
    n: usize,
) -> SeriesMatrix {
    let mut u = SeriesMatrix::diagonal(
        ring,
        &(0..n)
            .map(|_| LaurentSeries::constant(ring.from_i64(rng.gen_range(1..4))))
            .collect::<Vec<_>>(),
    );
    for _ in 0..4 {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let x = random_laurent(rng, ring, 0, 2);
        u = u
            .try_mul(&SeriesMatrix::elementary(ring, n, i, j, x))
            .unwrap();
    }
    u
}

#[test]
fn standard_lattices() {
    for n in [1, 3] {
        let l = Lattice::standard(q(), n).unwrap();
        assert_eq!(l.pivot_exponents(), vec![0; n].as_slice());
        assert_eq!(l.hermite(), &SeriesMatrix::identity(q(), n));
    }
    let l = Lattice::standard(q(), 1).unwrap();
    assert!(l.contains(&[LaurentSeries::t_pow(q(), 2)]).unwrap());
    assert!(!l.contains(&[LaurentSeries::t_pow(q(), -1)]).unwrap());
}

#[test]
fn hermite_column_reduction() {
    let f2 = ScalarRing::prime(2).unwrap();
    let l = lat(f2, r#"[["t","1"],["0","1"]]"#);
    assert_eq!(l.pivot_exponents(), &[1, 0]);
    // swap and add columns by hand: same lattice
    let l2 = lat(f2, r#"[["1 + t","1"],["1","1"]]"#);
    assert_eq!(l, l2);
    assert_eq!(l.hermite_normalize().hermite(), l.hermite());
}

#[test]
fn hermite_is_basis_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let ring = if rng.gen_bool(0.5) {
            q()
        } else {
            ScalarRing::prime(5).unwrap()
        };
        let b = random_lattice(&mut rng, ring, n).unwrap();
        let u = if n == 1 {
            SeriesMatrix::scalar_operator(&LaurentSeries::from_coeffs(ring, 0, &[2, 1, 3]), 1)
        } else {
            random_unimodular_power_series(&mut rng, ring, n)
        };
        let l2 = Lattice::new(b.basis().try_mul(&u).unwrap()).unwrap();
        assert_eq!(l2.hermite(), b.hermite());
    }
}

#[test]
fn smith_examples() {
    let o = Lattice::standard(q(), 1).unwrap();
    let t2 = Lattice::monomial(q(), &[-2]).unwrap();
    assert_eq!(o.relative_position(&t2).unwrap().divisors, vec![-2]);
    assert_eq!(o.relative_position(&o).unwrap().divisors, vec![0]);
    assert_eq!(o.relative_dimension(&t2).unwrap(), 2);
    let s = smith(&mat(q(), r#"[["t","1"],["0","t"]]"#)).unwrap();
    assert_eq!(s.divisors, vec![2, 0]);
    assert!(s.verify().unwrap());
}

fn window_rows(l: &Lattice, w: &WindowSpace) -> Vec<Vec<Scalar>> {
    l.window_basis(w)
        .unwrap()
        .into_iter()
        .map(|(_, v)| v)
        .collect()
}

fn span_dim(ring: ScalarRing, rows: Vec<Vec<Scalar>>) -> i64 {
    if rows.is_empty() {
        return 0;
    }
    Mat::from_rows(ring, rows).rank() as i64
}

#[test]
fn smith_divisors_match_filtration_counts_over_f5() {
    let f5 = ScalarRing::prime(5).unwrap();
    let w = WindowSpace::symmetric(2, 3);
    let big = WindowSpace::symmetric(2, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..15 {
        let l = random_window_lattice(&mut rng, f5, 2, &w);
        let l2 = random_window_lattice(&mut rng, f5, 2, &w);
        let divisors = l.relative_position(&l2).unwrap().divisors;
        for j in -6..=6 {
            let tj = l
                .apply(&SeriesMatrix::scalar_operator(
                    &LaurentSeries::t_pow(f5, j),
                    2,
                ))
                .unwrap();
            let a = window_rows(&tj, &big);
            let mut both = a.clone();
            both.extend(window_rows(&l2, &big));
            let counted = span_dim(f5, both) - span_dim(f5, a);
            let predicted: i64 = divisors.iter().map(|&d| (j - d).max(0)).sum();
            assert_eq!(counted, predicted, "j = {j}, divisors {divisors:?}");
        }
    }
}

#[test]
fn relative_dimension_of_translate_is_minus_valuation() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..30 {
        let n = rng.gen_range(1..=2);
        let l = random_lattice(&mut rng, q(), n).unwrap();
        let g = random_lattice(&mut rng, q(), n).unwrap().basis().clone();
        let v = g.det().unwrap().valuation().unwrap();
        assert_eq!(l.relative_dimension(&l.apply(&g).unwrap()).unwrap(), -v);
    }
}

#[test]
fn relative_determinants() {
    let o = Lattice::standard(q(), 1).unwrap();
    assert_eq!(o.relative_determinant(&o).unwrap(), GradedLine::unit(q()));
    let c = Lattice::new(SeriesMatrix::scalar_operator(
        &LaurentSeries::constant(q().from_i64(5)),
        1,
    ))
    .unwrap();
    let d = o.relative_determinant(&c).unwrap();
    assert_eq!((d.grade, d.scalar), (0, q().from_i64(5)));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let n = rng.gen_range(1..=3);
        let ls: Vec<Lattice> = (0..3)
            .map(|_| random_lattice(&mut rng, q(), n).unwrap())
            .collect();
        let a = ls[0].relative_determinant(&ls[1]).unwrap();
        let b = ls[1].relative_determinant(&ls[2]).unwrap();
        let c = ls[0].relative_determinant(&ls[2]).unwrap();
        assert_eq!(&a.scalar * &b.scalar, c.scalar);
        assert_eq!(a.grade + b.grade, c.grade);
        assert_eq!(a.grade, ls[0].relative_dimension(&ls[1]).unwrap());
    }
}

#[test]
fn sums_and_meets() {
    let o = Lattice::standard(q(), 1).unwrap();
    let tm = Lattice::monomial(q(), &[-1]).unwrap();
    let t1 = Lattice::monomial(q(), &[1]).unwrap();
    assert_eq!(o.sum(&tm).unwrap(), tm);
    assert_eq!(o.meet(&t1).unwrap(), t1);
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let anchor = Lattice::standard(q(), 2).unwrap();
    for _ in 0..50 {
        let a = random_lattice(&mut rng, q(), 2).unwrap();
        let b = random_lattice(&mut rng, q(), 2).unwrap();
        let (s, m) = (a.sum(&b).unwrap(), a.meet(&b).unwrap());
        assert!(m.is_subset(&a).unwrap() && a.is_subset(&s).unwrap());
        assert!(m.is_subset(&b).unwrap() && b.is_subset(&s).unwrap());
        let d = |l: &Lattice| anchor.relative_dimension(l).unwrap();
        assert_eq!(d(&s) + d(&m), d(&a) + d(&b));
    }
}

#[test]
fn window_lattices_are_distinct_and_complete_in_rank_one() {
    let f3 = ScalarRing::prime(3).unwrap();
    let w = WindowSpace::symmetric(1, 3);
    let ls = window_lattices(f3, &w, 1000).unwrap();
    let exps: Vec<i64> = ls.iter().map(|l| l.pivot_exponents()[0]).collect();
    assert_eq!(exps, (-3..=3).collect::<Vec<_>>());
}

#[test]
fn nilpotence_verdicts() {
    assert_eq!(
        is_topologically_nilpotent(&mat(q(), r#"[["t","0"],["0","t"]]"#), 4).unwrap(),
        Nilpotence::Yes
    );
    assert_eq!(
        is_topologically_nilpotent(&mat(q(), r#"[["t","0"],["0","t^-1"]]"#), 4).unwrap(),
        Nilpotence::No
    );
    // companion of λ² − tλ − t³
    assert_eq!(
        is_topologically_nilpotent(&mat(q(), r#"[["0","t^3"],["1","t"]]"#), 0).unwrap(),
        Nilpotence::Yes
    );
}

#[test]
fn ranks_over_t() {
    assert_eq!(rank_over_t(&mat(q(), r#"[["t^2"]]"#), 8).unwrap().rank, 2);
    for n in 1..=3 {
        let t = SeriesMatrix::scalar_operator(&LaurentSeries::t_pow(q(), 1), n);
        assert_eq!(rank_over_t(&t, 8).unwrap().rank, n as i64);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let a = random_unimodular_power_series(&mut rng, q(), 2);
        let t = a.scale(&LaurentSeries::t_pow(q(), 1)).unwrap();
        assert_eq!(rank_over_t(&t, 16).unwrap().rank, 2);
    }
}

fn small_matrix() -> impl Strategy<Value = (usize, Vec<(i64, Vec<i64>)>)> {
    (1usize..=2).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((-2i64..2, prop::collection::vec(-3i64..4, 1..3)), n * n),
        )
    })
}

fn build(n: usize, entries: &[(i64, Vec<i64>)]) -> Option<SeriesMatrix> {
    let m = SeriesMatrix::from_fn(q(), n, n, |i, j| {
        let (lo, cs) = &entries[i * n + j];
        LaurentSeries::from_coeffs(q(), *lo, cs)
    });
    (!m.det().ok()?.is_zero()).then_some(m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relative_dimension_is_gl_invariant((n, a) in small_matrix(), b in prop::collection::vec((-2i64..2, prop::collection::vec(-3i64..4, 1..3)), 4), c in prop::collection::vec((-2i64..2, prop::collection::vec(-3i64..4, 1..3)), 4)) {
        let (Some(a), Some(b), Some(g)) = (build(n, &a), build(n, &b[..n * n]), build(n, &c[..n * n])) else {
            return Ok(());
        };
        let (l1, l2) = (Lattice::new(a).unwrap(), Lattice::new(b).unwrap());
        let d = l1.relative_dimension(&l2).unwrap();
        prop_assert_eq!(l1.apply(&g).unwrap().relative_dimension(&l2.apply(&g).unwrap()).unwrap(), d);
        prop_assert_eq!(l2.relative_dimension(&l1).unwrap(), -d);
        prop_assert_eq!(l1.relative_determinant(&l2).unwrap().grade, d);
    }

    #[test]
    fn hermite_normalize_is_idempotent((n, a) in small_matrix()) {
        if let Some(a) = build(n, &a) {
            let l = Lattice::new(a).unwrap();
            let h = l.hermite_normalize();
            prop_assert_eq!(h.hermite(), l.hermite());
            let hh = h.hermite_normalize();
            prop_assert_eq!(hh.hermite(), l.hermite());
        }
    }
}
