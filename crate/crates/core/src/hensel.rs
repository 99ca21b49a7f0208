//! Coprime factorization lifting and idempotent lifting over the truncated
//! local rings `A = k[x]/(x^N)`.
//!
//! Elements of `A` are series in `x` with absolute precision `N`;
//! polynomials over `A` are coefficient vectors, lowest degree first.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::scalar::{Scalar, ScalarRing};
use crate::series::LaurentSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncatedLocalRing {
    pub field: ScalarRing,
    pub order: i64,
}

/// A polynomial in `λ` over `A`, lowest degree first.
pub type APoly = Vec<LaurentSeries>;

impl TruncatedLocalRing {
    pub fn new(field: ScalarRing, order: i64) -> Result<Self> {
        if !field.is_field() {
            return Err(Error::UnsupportedRing(field));
        }
        if order < 1 {
            return Err(Error::Precondition(
                "truncation order must be at least 1".into(),
            ));
        }
        Ok(TruncatedLocalRing { field, order })
    }

    /// Reduce to `O(x^N)`, rejecting negative powers of `x`.
    pub fn elem(&self, a: &LaurentSeries) -> Result<LaurentSeries> {
        if a.ring() != self.field {
            return Err(Error::RingMismatch {
                left: self.field,
                right: a.ring(),
            });
        }
        if a.valuation_bound() < 0 {
            return Err(Error::Precondition(format!(
                "{} is not in k[x]/x^N",
                a.display_in('x')
            )));
        }
        if let Some(p) = a.prec() {
            if p < self.order {
                return Err(Error::PrecisionExhausted {
                    needed: self.order,
                    available: p,
                });
            }
        }
        Ok(a.truncate(self.order))
    }

    pub fn constant(&self, c: &Scalar) -> LaurentSeries {
        LaurentSeries::constant(c.clone()).truncate(self.order)
    }

    pub fn zero(&self) -> LaurentSeries {
        LaurentSeries::zero_to(self.field, self.order)
    }

    pub fn one(&self) -> LaurentSeries {
        self.constant(&self.field.one())
    }

    fn mul(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.try_mul(b).expect("same ring").truncate(self.order)
    }

    fn add(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.try_add(b).expect("same ring").truncate(self.order)
    }

    fn sub(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.try_sub(b).expect("same ring").truncate(self.order)
    }

    /// Inverse of a unit (nonzero constant term).
    pub fn inv(&self, a: &LaurentSeries) -> Result<LaurentSeries> {
        if a.coeff_or_zero(0).is_zero() {
            return Err(Error::NotUnit);
        }
        Ok(a.invert_to(self.order)?.truncate(self.order))
    }

    pub fn is_zero(&self, a: &LaurentSeries) -> bool {
        a.terms().next().is_none()
    }

    /// Lift a polynomial over `k`.
    pub fn lift_poly(&self, p: &[Scalar]) -> APoly {
        p.iter().map(|c| self.constant(c)).collect()
    }

    pub fn reduce_poly(&self, p: &[LaurentSeries]) -> Vec<Scalar> {
        trim_k(p.iter().map(|c| c.coeff_or_zero(0)).collect())
    }

    pub fn poly_trim(&self, mut p: APoly) -> APoly {
        while p.last().is_some_and(|c| self.is_zero(c)) {
            p.pop();
        }
        p
    }

    pub fn poly_add(&self, a: &[LaurentSeries], b: &[LaurentSeries]) -> APoly {
        let n = a.len().max(b.len());
        let z = self.zero();
        self.poly_trim(
            (0..n)
                .map(|i| self.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
                .collect(),
        )
    }

    pub fn poly_sub(&self, a: &[LaurentSeries], b: &[LaurentSeries]) -> APoly {
        let n = a.len().max(b.len());
        let z = self.zero();
        self.poly_trim(
            (0..n)
                .map(|i| self.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
                .collect(),
        )
    }

    pub fn poly_mul(&self, a: &[LaurentSeries], b: &[LaurentSeries]) -> APoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        self.poly_trim(out)
    }

    /// Division with remainder by a monic polynomial.
    pub fn poly_divmod(&self, a: &[LaurentSeries], m: &[LaurentSeries]) -> Result<(APoly, APoly)> {
        let m = self.poly_trim(m.to_vec());
        if !m
            .last()
            .is_some_and(|c| self.sub(c, &self.one()).terms().next().is_none())
        {
            return Err(Error::Precondition("divisor is not monic".into()));
        }
        let dm = m.len() - 1;
        let mut r = self.poly_trim(a.to_vec());
        if r.len() <= dm {
            return Ok((Vec::new(), r));
        }
        let mut q = vec![self.zero(); r.len() - dm];
        while r.len() > dm {
            let k = r.len() - 1 - dm;
            let c = r.last().expect("nonempty").clone();
            q[k] = c.clone();
            for (i, mi) in m.iter().enumerate() {
                r[k + i] = self.sub(&r[k + i], &self.mul(&c, mi));
            }
            r.pop();
            r = self.poly_trim(r);
        }
        Ok((self.poly_trim(q), r))
    }

    pub fn is_monic(&self, p: &[LaurentSeries]) -> bool {
        let p = self.poly_trim(p.to_vec());
        p.last()
            .is_some_and(|c| self.is_zero(&self.sub(c, &self.one())))
    }

    /// `p(M)` for a square matrix over `A`, by Horner's rule.
    pub fn eval_matrix(&self, p: &[LaurentSeries], m: &SeriesMatrix) -> Result<SeriesMatrix> {
        let n = m.rows();
        let mut acc = SeriesMatrix::zeros(self.field, n, n);
        for c in p.iter().rev() {
            acc = acc
                .try_mul(m)?
                .try_add(&SeriesMatrix::identity(self.field, n).scale(c)?)?;
            acc = acc.map(|x| x.truncate(self.order));
        }
        Ok(acc)
    }

    pub fn poly_display(&self, p: &[LaurentSeries]) -> String {
        let terms: Vec<String> = p
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !self.is_zero(c))
            .map(|(i, c)| {
                let c = c.to_exact().display_in('x');
                match i {
                    0 => format!("({c})"),
                    1 => format!("({c})*L"),
                    _ => format!("({c})*L^{i}"),
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

fn trim_k(mut p: Vec<Scalar>) -> Vec<Scalar> {
    while p.last().is_some_and(Scalar::is_zero) {
        p.pop();
    }
    p
}

fn k_sub(a: &[Scalar], b: &[Scalar], ring: ScalarRing) -> Vec<Scalar> {
    let n = a.len().max(b.len());
    let z = ring.zero();
    trim_k(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

fn k_mul(a: &[Scalar], b: &[Scalar], ring: ScalarRing) -> Vec<Scalar> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ring.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    trim_k(out)
}

fn k_divmod(a: &[Scalar], b: &[Scalar], ring: ScalarRing) -> (Vec<Scalar>, Vec<Scalar>) {
    let b = trim_k(b.to_vec());
    let lead = b.last().expect("nonzero divisor").inv().expect("field");
    let mut r = trim_k(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![ring.zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let c = r.last().expect("nonempty") * &lead;
        for (i, bi) in b.iter().enumerate() {
            r[k + i] = &r[k + i] - &(&c * bi);
        }
        q[k] = c;
        r.pop();
        r = trim_k(r);
    }
    (trim_k(q), r)
}

/// `(s, t)` with `s·a + t·b = 1` over `k`, or `None` if `gcd(a, b) ≠ 1`.
pub fn bezout(a: &[Scalar], b: &[Scalar], ring: ScalarRing) -> Option<(Vec<Scalar>, Vec<Scalar>)> {
    let (mut r0, mut r1) = (trim_k(a.to_vec()), trim_k(b.to_vec()));
    let (mut s0, mut s1) = (vec![ring.one()], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![ring.one()]);
    while !r1.is_empty() {
        let (q, r) = k_divmod(&r0, &r1, ring);
        let s2 = k_sub(&s0, &k_mul(&q, &s1, ring), ring);
        let t2 = k_sub(&t0, &k_mul(&q, &t1, ring), ring);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.len() != 1 {
        return None;
    }
    let inv = r0[0].inv()?;
    Some((
        s0.iter().map(|c| c * &inv).collect(),
        t0.iter().map(|c| c * &inv).collect(),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationWitness {
    pub g: APoly,
    pub g0: APoly,
    pub g1: APoly,
    pub s: APoly,
    pub t: APoly,
    pub iterations: usize,
}

/// Lift a coprime factorization `ḡ = ḡ₀ḡ₁` of a monic `g` over `A` to
/// `g = g₀g₁` with `s·g₀ + t·g₁ = 1`, by quadratic Hensel steps.
pub fn hensel_factor(
    a: &TruncatedLocalRing,
    g: &[LaurentSeries],
    g0bar: &[Scalar],
    g1bar: &[Scalar],
) -> Result<FactorizationWitness> {
    let k = a.field;
    let g: APoly = a.poly_trim(g.iter().map(|c| a.elem(c)).collect::<Result<_>>()?);
    if !a.is_monic(&g) {
        return Err(Error::Precondition("g is not monic".into()));
    }
    let (g0bar, g1bar) = (trim_k(g0bar.to_vec()), trim_k(g1bar.to_vec()));
    if !g0bar.last().is_some_and(Scalar::is_one) || !g1bar.last().is_some_and(Scalar::is_one) {
        return Err(Error::Precondition("residue factors must be monic".into()));
    }
    if k_mul(&g0bar, &g1bar, k) != a.reduce_poly(&g) {
        return Err(Error::Precondition(
            "residue factors do not multiply to g mod x".into(),
        ));
    }
    let (s_bar, t_bar) = bezout(&g0bar, &g1bar, k)
        .ok_or_else(|| Error::Precondition("residue factors are not coprime".into()))?;
    let mut g0 = a.lift_poly(&g0bar);
    let mut g1 = a.lift_poly(&g1bar);
    let mut s = a.lift_poly(&s_bar);
    let mut t = a.lift_poly(&t_bar);
    let one = vec![a.one()];
    let mut iterations = 0;
    loop {
        let e = a.poly_sub(&g, &a.poly_mul(&g0, &g1));
        let b = a.poly_sub(
            &a.poly_add(&a.poly_mul(&s, &g0), &a.poly_mul(&t, &g1)),
            &one,
        );
        if e.is_empty() && b.is_empty() {
            break;
        }
        if iterations > 64 {
            return Err(Error::Unstable("Hensel iteration did not converge".into()));
        }
        iterations += 1;
        let (q, r) = a.poly_divmod(&a.poly_mul(&s, &e), &g1)?;
        g0 = a.poly_add(&g0, &a.poly_add(&a.poly_mul(&t, &e), &a.poly_mul(&q, &g0)));
        g1 = a.poly_add(&g1, &r);
        let b = a.poly_sub(
            &a.poly_add(&a.poly_mul(&s, &g0), &a.poly_mul(&t, &g1)),
            &one,
        );
        let (c, d) = a.poly_divmod(&a.poly_mul(&s, &b), &g1)?;
        s = a.poly_sub(&s, &d);
        t = a.poly_sub(&a.poly_sub(&t, &a.poly_mul(&t, &b)), &a.poly_mul(&c, &g0));
    }
    Ok(FactorizationWitness {
        g,
        g0,
        g1,
        s,
        t,
        iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdempotentLift {
    pub pi: SeriesMatrix,
    pub pi_tilde: SeriesMatrix,
    pub f: APoly,
    pub g: APoly,
    pub witness: FactorizationWitness,
    /// `e = s·g₀`, with `e ≡ 0 mod g₀` and `e ≡ 1 mod g₁`.
    pub e: APoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdempotentChecks {
    pub idempotent: bool,
    pub commutes: bool,
    pub lifts_residue: bool,
    pub residue_rank: usize,
}

impl IdempotentChecks {
    pub fn ok(&self) -> bool {
        self.idempotent && self.commutes && self.lifts_residue
    }
}

fn reduce_matrix(a: &TruncatedLocalRing, m: &SeriesMatrix) -> SeriesMatrix {
    m.map(|x| x.truncate(a.order))
}

fn is_zero_matrix(a: &TruncatedLocalRing, m: &SeriesMatrix) -> bool {
    m.entries().all(|x| a.is_zero(&x.truncate(a.order)))
}

/// Given `π` over `A` with `π² ≡ π mod x`, build the idempotent `π̃ = e(π)`.
pub fn lift_idempotent(a: &TruncatedLocalRing, pi: &SeriesMatrix) -> Result<IdempotentLift> {
    if !pi.is_square() {
        return Err(Error::Dimension("π must be square".into()));
    }
    for x in pi.entries() {
        a.elem(x)?;
    }
    let pi = reduce_matrix(a, pi);
    let nu = reduce_matrix(a, &pi.try_mul(&pi)?.try_sub(&pi)?);
    if nu.entries().any(|x| !x.coeff_or_zero(0).is_zero()) {
        return Err(Error::Precondition("π² − π does not vanish mod x".into()));
    }
    // characteristic polynomial of ν, highest degree first
    let cp: Vec<LaurentSeries> = nu
        .charpoly()?
        .into_iter()
        .map(|c| c.truncate(a.order))
        .collect();
    let mut f: APoly = cp.into_iter().rev().collect();
    if f.len() > 1 && a.is_zero(&f[0]) {
        f.remove(0);
    }
    // g(λ) = (λ² − λ)·f(λ² − λ)
    let sq = vec![a.zero(), a.constant(&-a.field.one()), a.one()];
    let mut f_of_sq: APoly = Vec::new();
    for c in f.iter().rev() {
        f_of_sq = a.poly_add(&a.poly_mul(&f_of_sq, &sq), std::slice::from_ref(c));
    }
    let g = a.poly_mul(&sq, &f_of_sq);
    let m = f.len();
    let k = a.field;
    let g0bar = k_pow(&[k.zero(), k.one()], m, k);
    let g1bar = k_pow(&[-k.one(), k.one()], m, k);
    if k_mul(&g0bar, &g1bar, k) != a.reduce_poly(&g) {
        return Err(Error::Precondition(
            "residue spectrum of π² − π does not split into the 0 and 1 clusters".into(),
        ));
    }
    let witness = hensel_factor(a, &g, &g0bar, &g1bar)?;
    let e = a.poly_mul(&witness.s, &witness.g0);
    let pi_tilde = reduce_matrix(a, &a.eval_matrix(&e, &pi)?);
    Ok(IdempotentLift {
        pi,
        pi_tilde,
        f,
        g,
        witness,
        e,
    })
}

fn k_pow(p: &[Scalar], n: usize, ring: ScalarRing) -> Vec<Scalar> {
    let mut out = vec![ring.one()];
    for _ in 0..n {
        out = k_mul(&out, p, ring);
    }
    out
}

impl IdempotentLift {
    pub fn check(&self, a: &TruncatedLocalRing) -> Result<IdempotentChecks> {
        let p = &self.pi_tilde;
        let idempotent = is_zero_matrix(a, &p.try_mul(p)?.try_sub(p)?);
        let commutes = is_zero_matrix(a, &p.try_mul(&self.pi)?.try_sub(&self.pi.try_mul(p)?)?);
        let lifts_residue = p
            .try_sub(&self.pi)?
            .entries()
            .all(|x| x.coeff_or_zero(0).is_zero());
        let residue = crate::linalg::Mat::from_rows(a.field, p.constant_term());
        Ok(IdempotentChecks {
            idempotent,
            commutes,
            lifts_residue,
            residue_rank: residue.rank(),
        })
    }
}
