//! Truncated Laurent series with absolute precision.
//!
//! A [`LaurentSeries`] is a finite set of nonzero coefficients together with
//! an absolute precision: `prec = Some(N)` means the value is known modulo
//! `O(t^N)`, `None` means it is exact (a Laurent polynomial).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarRing};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    ring: ScalarRing,
    coeffs: BTreeMap<i64, Scalar>,
    prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl LaurentSeries {
    /// Build from `(exponent, coefficient)` pairs; repeated exponents are
    /// summed, zeros and terms at or beyond `prec` are dropped.
    pub fn new(
        ring: ScalarRing,
        terms: impl IntoIterator<Item = (i64, Scalar)>,
        prec: Option<i64>,
    ) -> Self {
        let mut coeffs: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(c.ring(), ring, "coefficient ring mismatch");
            if prec.is_some_and(|p| e >= p) {
                continue;
            }
            match coeffs.get_mut(&e) {
                Some(slot) => *slot += &c,
                None => {
                    coeffs.insert(e, c);
                }
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        LaurentSeries { ring, coeffs, prec }
    }

    pub fn exact(ring: ScalarRing, terms: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        Self::new(ring, terms, None)
    }

    pub fn zero(ring: ScalarRing) -> Self {
        Self::new(ring, [], None)
    }

    /// `O(t^prec)`: zero known only up to the given precision.
    pub fn zero_to(ring: ScalarRing, prec: i64) -> Self {
        Self::new(ring, [], Some(prec))
    }

    pub fn one(ring: ScalarRing) -> Self {
        Self::constant(ring.one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::exact(c.ring(), [(0, c)])
    }

    pub fn monomial(c: Scalar, e: i64) -> Self {
        Self::exact(c.ring(), [(e, c)])
    }

    /// `t^e` with coefficient one.
    pub fn t_pow(ring: ScalarRing, e: i64) -> Self {
        Self::monomial(ring.one(), e)
    }

    /// Exact Laurent polynomial from a coefficient slice starting at `low`.
    pub fn from_coeffs(ring: ScalarRing, low: i64, cs: &[i64]) -> Self {
        Self::exact(
            ring,
            cs.iter()
                .enumerate()
                .map(|(i, &c)| (low + i as i64, ring.from_i64(c))),
        )
    }

    pub fn ring(&self) -> ScalarRing {
        self.ring
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Stored nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `t^e`; fails if `e` lies beyond the known precision.
    pub fn coeff(&self, e: i64) -> Result<Scalar> {
        if let Some(p) = self.prec {
            if e >= p {
                return Err(Error::PrecisionExhausted {
                    needed: e + 1,
                    available: p,
                });
            }
        }
        Ok(self.coeff_or_zero(e))
    }

    /// Stored coefficient of `t^e`, zero if absent (no precision check).
    pub fn coeff_or_zero(&self, e: i64) -> Scalar {
        self.coeffs
            .get(&e)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    /// True for the exact zero series.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// True when no nonzero coefficient is stored (exact or `O(t^N)`).
    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Least exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Result<i64> {
        match self.coeffs.keys().next() {
            Some(&e) => Ok(e),
            None => match self.prec {
                Some(p) => Err(Error::UndeterminedValuation { prec: p }),
                None => Err(Error::NotUnit),
            },
        }
    }

    /// A lower bound for the valuation: the true valuation when determined,
    /// the precision for `O(t^N)`, and `i64::MAX` for exact zero.
    pub fn valuation_bound(&self) -> i64 {
        match self.coeffs.keys().next() {
            Some(&e) => e,
            None => self.prec.unwrap_or(i64::MAX),
        }
    }

    /// Largest stored exponent.
    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Result<Scalar> {
        let v = self.valuation()?;
        Ok(self.coeffs[&v].clone())
    }

    /// Reduce modulo `O(t^prec)` (never raises the precision).
    pub fn truncate(&self, prec: i64) -> Self {
        let p = min_prec(self.prec, Some(prec));
        Self::new(
            self.ring,
            self.coeffs.iter().map(|(e, c)| (*e, c.clone())),
            p,
        )
    }

    /// Forget precision information and treat the stored terms as exact.
    pub fn to_exact(&self) -> Self {
        LaurentSeries {
            ring: self.ring,
            coeffs: self.coeffs.clone(),
            prec: None,
        }
    }

    /// Equality modulo the coarser of the two precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.ring != other.ring {
            return false;
        }
        let p = min_prec(self.prec, other.prec);
        let keys = self.coeffs.keys().chain(other.coeffs.keys());
        keys.filter(|e| p.is_none_or(|p| **e < p))
            .all(|e| self.coeff_or_zero(*e) == other.coeff_or_zero(*e))
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring,
                right: other.ring,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let terms = self
            .terms()
            .chain(other.terms())
            .map(|(e, c)| (e, c.clone()));
        Ok(Self::new(self.ring, terms, min_prec(self.prec, other.prec)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ring));
        }
        let va = self.valuation_bound();
        let vb = other.valuation_bound();
        let prec = min_prec(self.prec.map(|p| p + vb), other.prec.map(|p| p + va));
        let mut out: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ea + eb;
                if prec.is_some_and(|p| e >= p) {
                    continue;
                }
                let prod = ca * cb;
                match out.get_mut(&e) {
                    Some(slot) => *slot += &prod,
                    None => {
                        out.insert(e, prod);
                    }
                }
            }
        }
        Ok(Self::new(self.ring, out, prec))
    }

    fn neg_ref(&self) -> Self {
        LaurentSeries {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            prec: self.prec,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::new(self.ring, self.terms().map(|(e, x)| (e, x * c)), self.prec)
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            ring: self.ring,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .collect(),
            prec: self.prec.map(|p| p + k),
        }
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::one(self.ring);
        for _ in 0..n {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    /// Termwise `d/dt`.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.ring,
            self.terms()
                .map(|(e, c)| (e - 1, c * self.ring.from_i64(e))),
            self.prec.map(|p| p - 1),
        )
    }

    /// Split `a₀ + ε·a₁` into base-field series.
    pub fn dual_parts(&self) -> (Self, Self) {
        let base = self.ring.base();
        let re = Self::new(
            base,
            self.terms().map(|(e, c)| (e, c.real_part())),
            self.prec,
        );
        let eps = Self::new(
            base,
            self.terms().map(|(e, c)| (e, c.eps_part())),
            self.prec,
        );
        (re, eps)
    }

    /// Embed into `ring`, which must share this series' base field.
    pub fn lift_to(&self, ring: ScalarRing) -> Self {
        Self::new(
            ring,
            self.terms().map(|(e, c)| (e, c.lift_to(ring))),
            self.prec,
        )
    }

    /// `re + ε·eps` for base-field series `re`, `eps`.
    pub fn from_dual_parts(re: &Self, eps: &Self) -> Self {
        let ring = re.ring.dual();
        let e = Self::monomial(ring.epsilon(), 0);
        re.lift_to(ring) + &e * &eps.lift_to(ring)
    }

    /// Multiplicative inverse.
    ///
    /// An exact series has an exact inverse only when it is a monomial times
    /// `1 + nilpotent`; other exact inputs yield [`Error::InexactInverse`] and
    /// must go through [`invert_to`](Self::invert_to).
    pub fn invert(&self) -> Result<Self> {
        if self.ring.is_dual() {
            let (re, eps) = self.dual_parts();
            let r = re.invert()?;
            return self.dual_combine(&r, &eps);
        }
        let v = self.valuation()?;
        let c = self.leading_coeff()?;
        let ci = c.inv().ok_or(Error::NotUnit)?;
        match self.prec {
            None if self.coeffs.len() == 1 => Ok(Self::monomial(ci, -v)),
            None => Err(Error::InexactInverse),
            Some(p) => Ok(self.field_inverse(v, &ci, p)),
        }
    }

    /// Inverse known to at least `O(t^prec)`; exact inputs are truncated as
    /// needed first.
    pub fn invert_to(&self, prec: i64) -> Result<Self> {
        if self.ring.is_dual() {
            let (re, eps) = self.dual_parts();
            let mut p = prec;
            loop {
                let r = re.invert_to(p)?;
                let out = self.dual_combine(&r, &eps)?;
                match out.prec() {
                    Some(q) if q < prec && self.is_exact() => p += prec - q,
                    _ => return Ok(out.truncate(prec)),
                }
            }
        }
        match self.invert() {
            Ok(x) => Ok(x.truncate(prec)),
            Err(Error::InexactInverse) => {
                let v = self.valuation()?;
                let p = (prec + 2 * v).max(v + 1);
                let c = self.leading_coeff()?.inv().ok_or(Error::NotUnit)?;
                Ok(self.truncate(p).field_inverse(v, &c, p).truncate(prec))
            }
            Err(e) => Err(e),
        }
    }

    fn dual_combine(&self, re_inv: &Self, eps: &Self) -> Result<Self> {
        // (a₀ + εa₁)⁻¹ = a₀⁻¹ − ε a₁ a₀⁻²
        let sq = re_inv.try_mul(re_inv)?;
        let e = eps.try_mul(&sq)?;
        Ok(Self::from_dual_parts(re_inv, &e.neg_ref()))
    }

    fn field_inverse(&self, v: i64, ci: &Scalar, p: i64) -> Self {
        let r = (p - v).max(0) as usize;
        let w: Vec<Scalar> = (0..r)
            .map(|k| &self.coeff_or_zero(v + k as i64) * ci)
            .collect();
        let mut b: Vec<Scalar> = Vec::with_capacity(r);
        for k in 0..r {
            if k == 0 {
                b.push(self.ring.one());
                continue;
            }
            let mut acc = self.ring.zero();
            for j in 1..=k {
                acc += &(&w[j] * &b[k - j]);
            }
            b.push(-acc);
        }
        let terms = b
            .into_iter()
            .enumerate()
            .map(|(k, x)| (k as i64 - v, &x * ci));
        Self::new(self.ring, terms, Some(p - 2 * v))
    }

    /// `res(f·dg)`: the `t⁻¹` coefficient of `f·g′`.
    pub fn residue_coeff(f: &Self, g: &Self) -> Result<Scalar> {
        f.try_mul(&g.derivative())?.coeff(-1)
    }

    /// Parse the series grammar with variable `t`.
    pub fn parse(ring: ScalarRing, text: &str) -> Result<Self> {
        Self::parse_in(ring, text, 't')
    }

    /// Parse `c*v^e + ... + O(v^N)` for an arbitrary single-letter variable.
    pub fn parse_in(ring: ScalarRing, text: &str, var: char) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty series literal".into()));
        }
        let mut terms = Vec::new();
        let mut prec = None;
        for part in split_terms(&s) {
            let (neg, body) = match part.as_bytes()[0] {
                b'+' => (false, &part[1..]),
                b'-' => (true, &part[1..]),
                _ => (false, part.as_str()),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in `{text}`")));
            }
            if let Some(inner) = body.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
                let (_, e) = parse_power(inner, var)?
                    .ok_or_else(|| Error::Parse(format!("bad O-term `{body}`")))?;
                if prec.is_some() {
                    return Err(Error::Parse("more than one O-term".into()));
                }
                prec = Some(e);
                continue;
            }
            let (coef, e) = match parse_power(body, var)? {
                Some((c, e)) => (c, e),
                None => (body, 0),
            };
            let c = if coef.is_empty() {
                ring.one()
            } else {
                ring.parse_scalar(coef)?
            };
            terms.push((e, if neg { -c } else { c }));
        }
        Ok(Self::new(ring, terms, prec))
    }
}

/// Split at top-level `+`/`-` that are not part of an exponent, a fraction
/// or a parenthesised scalar.
fn split_terms(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let boundary = (ch == '+' || ch == '-')
            && depth == 0
            && !cur.is_empty()
            && !matches!(
                prev,
                Some('^') | Some('/') | Some('*') | Some('+') | Some('-')
            );
        if boundary {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
        prev = Some(ch);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Split `coef*v^e`, `coef*v`, `v^e`, `v` into the coefficient text and the
/// exponent; `None` if the variable does not occur at top level.
fn parse_power(body: &str, var: char) -> Result<Option<(&str, i64)>> {
    let mut depth = 0i32;
    let mut pos = None;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == var && depth == 0 => pos = Some(i),
            _ => {}
        }
    }
    let Some(i) = pos else { return Ok(None) };
    let coef = &body[..i];
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let rest = &body[i + var.len_utf8()..];
    let e = if rest.is_empty() {
        1
    } else {
        let digits = rest
            .strip_prefix('^')
            .ok_or_else(|| Error::Parse(format!("expected `^` after `{var}` in `{body}`")))?;
        let digits = digits
            .strip_prefix('(')
            .and_then(|d| d.strip_suffix(')'))
            .unwrap_or(digits);
        digits
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad exponent in `{body}`")))?
    };
    Ok(Some((coef, e)))
}

impl LaurentSeries {
    /// Render with an arbitrary variable name.
    pub fn display_in(&self, var: char) -> String {
        let mut out = String::new();
        for (i, (e, c)) in self.terms().enumerate() {
            let mut cs = c.to_string();
            if c.ring().is_dual() && !c.real_part().is_zero() && !c.eps_part().is_zero() {
                cs = format!("({cs})");
            }
            let body = if e == 0 {
                cs
            } else {
                format!("{cs}*{var}^{e}")
            };
            if i == 0 {
                out.push_str(&body);
            } else if let Some(rest) = body.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&body);
            }
        }
        if let Some(p) = self.prec {
            if out.is_empty() {
                out = format!("O({var}^{p})");
            } else {
                out.push_str(&format!(" + O({var}^{p})"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in('t'))
    }
}

impl<'a> Add<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, o: &LaurentSeries) -> LaurentSeries {
        self.try_add(o).expect("series ring mismatch")
    }
}

impl<'a> Sub<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, o: &LaurentSeries) -> LaurentSeries {
        self.try_sub(o).expect("series ring mismatch")
    }
}

impl<'a> Mul<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, o: &LaurentSeries) -> LaurentSeries {
        self.try_mul(o).expect("series ring mismatch")
    }
}

impl Add<LaurentSeries> for LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, o: LaurentSeries) -> LaurentSeries {
        &self + &o
    }
}

impl Sub<LaurentSeries> for LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, o: LaurentSeries) -> LaurentSeries {
        &self - &o
    }
}

impl Mul<LaurentSeries> for LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, o: LaurentSeries) -> LaurentSeries {
        &self * &o
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.neg_ref()
    }
}

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> LaurentSeries {
        LaurentSeries::parse(ScalarRing::Rational, s).unwrap()
    }

    #[test]
    fn cancellation_and_difference_of_squares() {
        let a = q("t^-1 + 1 + O(t^3)");
        let b = q("-t^-1 + O(t^3)");
        assert_eq!(&a + &b, q("1 + O(t^3)"));
        let c = q("1 + t + O(t^5)") * q("1 - t + O(t^5)");
        assert_eq!(c, q("1 - t^2 + O(t^5)"));
    }

    #[test]
    fn inverses() {
        assert_eq!(q("t").invert().unwrap(), q("t^-1"));
        assert_eq!(
            q("1 + t + O(t^4)").invert().unwrap(),
            q("1 - t + t^2 - t^3 + O(t^4)")
        );
        let d = ScalarRing::DualRational;
        let x = LaurentSeries::parse(d, "1 + e*t").unwrap();
        assert_eq!(
            x.invert().unwrap(),
            LaurentSeries::parse(d, "1 - e*t").unwrap()
        );
        assert_eq!(q("1 + t").invert(), Err(Error::InexactInverse));
        assert_eq!(q("1 + t").invert_to(3).unwrap(), q("1 - t + t^2 + O(t^3)"));
        assert!(matches!(
            q("O(t^4)").invert(),
            Err(Error::UndeterminedValuation { prec: 4 })
        ));
        let y = LaurentSeries::parse(d, "e*t^-1 + 1").unwrap();
        assert_eq!(
            y.invert().unwrap(),
            LaurentSeries::parse(d, "1 - e*t^-1").unwrap()
        );
    }

    #[test]
    fn derivative_and_residue() {
        assert_eq!(q("t^2").derivative(), q("2*t"));
        assert_eq!(q("t^-1").derivative(), q("-1*t^-2"));
        assert_eq!(q("1 + O(t^4)").derivative().prec(), Some(3));
        assert!(LaurentSeries::residue_coeff(&q("t^-1"), &q("t"))
            .unwrap()
            .is_one());
        let r = LaurentSeries::residue_coeff(&q("1 + t"), &q("t^-1")).unwrap();
        assert_eq!(r, ScalarRing::Rational.from_i64(-1));
        assert!(LaurentSeries::residue_coeff(&q("t^-3"), &q("t^2 + O(t^3)")).is_err());
    }

    #[test]
    fn grammar_round_trip() {
        let s = "-1*t^-2 + 3 + 1/2*t^1 + O(t^6)";
        let x = q(s);
        assert_eq!(x.to_string(), s);
        assert_eq!(q(&x.to_string()), x);
        let d = ScalarRing::DualPrime(7);
        let y = LaurentSeries::parse(d, "(1+2e)*t^3 + 1+2e").unwrap();
        assert_eq!(y.coeff(0).unwrap(), d.parse_scalar("1+2e").unwrap());
        assert_eq!(LaurentSeries::parse(d, &y.to_string()).unwrap(), y);
        assert_eq!(q("O(t^2)").to_string(), "O(t^2)");
        assert_eq!(q("0").to_string(), "0");
        assert!(LaurentSeries::parse(ScalarRing::Rational, "1 + t^").is_err());
    }
}
