use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tate_core::detline::{koszul_sign, koszul_swap, DeterminantTheory, TriangleLeg};
use tate_core::fermion::FiniteCliffordModel;
use tate_core::grassmann::{
    check_pluecker, gaussian_binomial, monomial_point, pluecker, tautological_fiber,
    window_grassmannian, DEFAULT_CAP,
};
use tate_core::lattice::window_lattices;
use tate_core::selftest::random_lattice;
use tate_core::{GradedLine, Lattice, Scalar, ScalarRing, WindowSpace};

fn q() -> ScalarRing {
    ScalarRing::Rational
}

#[test]
fn delta_iso_examples() {
    let th = DeterminantTheory::standard(q(), 1).unwrap();
    let o = Lattice::standard(q(), 1).unwrap();
    let d = th.delta_iso(&o, &o).unwrap();
    assert_eq!((d.quotient.grade, d.scalar.clone()), (0, q().one()));
    let tm = Lattice::monomial(q(), &[-1]).unwrap();
    let d = th.delta_iso(&o, &tm).unwrap();
    assert_eq!(d.target.grade - d.source.grade, 1);
    assert_eq!(d.scalar, q().one());
    assert!(th.delta_iso(&tm, &o).is_err());
}

#[test]
fn delta_iso_unwinds_to_relative_determinants() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let th = DeterminantTheory::standard(q(), 2).unwrap();
    for _ in 0..30 {
        let l1 = random_lattice(&mut rng, q(), 2).unwrap();
        let l2 = l1.sum(&random_lattice(&mut rng, q(), 2).unwrap()).unwrap();
        let d = th.delta_iso(&l1, &l2).unwrap();
        let rel = l1.relative_determinant(&l2).unwrap();
        let ratio = &d.target.scalar * &(&d.source.scalar * &rel.scalar).inv().unwrap();
        assert_eq!(d.scalar, &ratio * &q().from_i64(d.sign));
        assert_eq!(d.target, th.line(&l1).unwrap().tensor(&rel));
    }
}

#[test]
fn standard_chain_commutes() {
    let th = DeterminantTheory::standard(q(), 1).unwrap();
    let ls: Vec<Lattice> = [0, -1, -2]
        .iter()
        .map(|&a| Lattice::monomial(q(), &[a]).unwrap())
        .collect();
    assert!(th
        .check_triangle(&ls[0], &ls[1], &ls[2])
        .unwrap()
        .commutes());
}

#[test]
fn injected_faults_are_reported() {
    let f3 = ScalarRing::prime(3).unwrap();
    let th = DeterminantTheory::standard(f3, 2).unwrap();
    let ls: Vec<Lattice> = [[1, 1], [0, 1], [-1, 0]]
        .iter()
        .map(|a| Lattice::monomial(f3, a).unwrap())
        .collect();
    let c = f3.from_i64(2);
    for (leg, expect) in [
        (TriangleLeg::Delta12, c.clone()),
        (TriangleLeg::Delta23, c.clone()),
        (TriangleLeg::Delta13, c.inv().unwrap()),
        (TriangleLeg::Quotient, c.inv().unwrap()),
    ] {
        let r = th
            .check_triangle_with_fault(&ls[0], &ls[1], &ls[2], Some((leg, c.clone())))
            .unwrap();
        assert_eq!(r.discrepancy, expect, "{leg:?}");
    }
}

#[test]
fn koszul_signs() {
    let g = |k| GradedLine::new(k, q().one()).unwrap();
    assert_eq!(koszul_sign(&g(1), &g(1)), -1);
    assert_eq!(koszul_sign(&g(0), &g(5)), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let a = GradedLine::new(rng.gen_range(-4..5), q().from_i64(rng.gen_range(1..9))).unwrap();
        let b = GradedLine::new(rng.gen_range(-4..5), q().from_i64(rng.gen_range(1..9))).unwrap();
        let (b1, a1, s1) = koszul_swap(&a, &b);
        let (a2, b2, s2) = koszul_swap(&b1, &a1);
        assert_eq!(s1, s2);
        assert_eq!((a2.tensor(&b2)), a.tensor(&b));
        assert_eq!(
            koszul_sign(&a, &b),
            koszul_sign(&g(a.grade % 2), &g(b.grade % 2))
        );
    }
}

#[test]
fn reassociation_closes_on_four_step_chains() {
    let f3 = ScalarRing::prime(3).unwrap();
    let th = DeterminantTheory::standard(f3, 2).unwrap();
    let ls = window_lattices(f3, &WindowSpace::symmetric(2, 1), DEFAULT_CAP).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 40 {
        let mut chain = vec![ls[rng.gen_range(0..ls.len())].clone()];
        for _ in 0..3 {
            let up: Vec<&Lattice> = ls
                .iter()
                .filter(|l| chain.last().unwrap().is_subset(l).unwrap())
                .collect();
            chain.push(up[rng.gen_range(0..up.len())].clone());
        }
        // q_{ijk} = via_quotient / s_{ik}
        let qq = |i: usize, j: usize, k: usize| {
            let c = th.check_triangle(&chain[i], &chain[j], &chain[k]).unwrap();
            assert!(c.commutes());
            let s = th.delta_iso(&chain[i], &chain[k]).unwrap().scalar;
            &c.via_quotient * &s.inv().unwrap()
        };
        assert_eq!(&qq(0, 1, 2) * &qq(0, 2, 3), &qq(1, 2, 3) * &qq(0, 1, 3));
        checked += 1;
    }
}

fn coordinate_vector(m: usize, mask: usize, ring: ScalarRing) -> Vec<Scalar> {
    (0..1 << m)
        .map(|i| if i == mask { ring.one() } else { ring.zero() })
        .collect()
}

#[test]
fn annihilator_examples() {
    let f5 = ScalarRing::prime(5).unwrap();
    let model = FiniteCliffordModel::new(f5, 1, 1).unwrap();
    model.check_clifford_relations().unwrap();
    let vac = model.annihilator_line(&[]).unwrap();
    assert_eq!(vac.spinor, model.vacuum());
    assert_eq!(vac.spinor, coordinate_vector(2, 0, f5));
    let line = model
        .annihilator_line(&[vec![f5.one(), f5.zero()]])
        .unwrap();
    assert_eq!(line.spinor, coordinate_vector(2, 0b01, f5));
    assert_eq!(line.grade - vac.grade, 1);
}

#[test]
fn annihilator_grades_follow_dimension() {
    let f2 = ScalarRing::prime(2).unwrap();
    let model = FiniteCliffordModel::new(f2, 2, 1).unwrap();
    let pts = window_grassmannian(f2, 2, 1, None, DEFAULT_CAP).unwrap();
    let base = model.annihilator_line(&[]).unwrap().grade;
    for u in &pts {
        let line = model.annihilator_line(&u.rows).unwrap();
        assert_eq!(line.grade - base, u.dim() as i64);
        assert_eq!(line.degree, u.dim());
    }
}

#[test]
fn wedge_isomorphisms_match_delta_iso_over_q() {
    let model = FiniteCliffordModel::new(q(), 2, 1).unwrap();
    let th = DeterminantTheory::standard(q(), 2).unwrap();
    let f = |s: &str| Lattice::new(tate_core::SeriesMatrix::parse_json(q(), s).unwrap()).unwrap();
    let chain = [
        f(r#"[["t","0"],["0","t"]]"#),
        f(r#"[["t","3"],["0","1"]]"#),
        f(r#"[["1","1/2*t^-1"],["0","t^-1"]]"#),
    ];
    for i in 0..3 {
        for j in i..3 {
            assert!(chain[i].is_subset(&chain[j]).unwrap());
            model.check_delta_iso(&th, &chain[i], &chain[j]).unwrap();
        }
    }
}

#[test]
fn pluecker_exhaustive_over_f2_and_f3() {
    for p in [2u64, 3] {
        let ring = ScalarRing::prime(p).unwrap();
        for d in 0..=4 {
            let pts = window_grassmannian(ring, 2, 1, Some(d), DEFAULT_CAP).unwrap();
            assert_eq!(pts.len() as u128, gaussian_binomial(4, d, p as u128));
            let rep = check_pluecker(ring, 4, &pts);
            assert!(rep.ok(), "p = {p}, d = {d}: {rep:?}");
        }
    }
}

#[test]
fn standard_lattice_is_a_coordinate_point() {
    let f3 = ScalarRing::prime(3).unwrap();
    let w = WindowSpace::symmetric(2, 1);
    let c = pluecker(f3, 4, &monomial_point(f3, &w, &[0, 0]));
    assert_eq!(c.iter().filter(|x| !x.is_zero()).count(), 1);
}

#[test]
fn tautological_line_two_ways() {
    let f3 = ScalarRing::prime(3).unwrap();
    let model = FiniteCliffordModel::new(f3, 2, 1).unwrap();
    for u in window_grassmannian(f3, 2, 1, Some(2), DEFAULT_CAP).unwrap() {
        let fib = tautological_fiber(&model, &u).unwrap();
        assert_eq!(fib.pluecker, fib.annihilator);
    }
}

proptest! {
    #[test]
    fn koszul_sign_is_bilinear_mod_two(a in -6i64..7, b in -6i64..7, c in -6i64..7) {
        let g = |k| GradedLine::new(k, ScalarRing::Rational.one()).unwrap();
        prop_assert_eq!(koszul_sign(&g(a + c), &g(b)), koszul_sign(&g(a), &g(b)) * koszul_sign(&g(c), &g(b)));
        prop_assert_eq!(koszul_sign(&g(a), &g(b)), koszul_sign(&g(b), &g(a)));
    }
}
