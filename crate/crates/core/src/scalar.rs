//! Exact scalar rings: the rationals, prime fields, and dual numbers over
//! either.
//!
//! A [`Scalar`] always knows which ring it lives in. Arithmetic between
//! scalars of different rings is a programming error and panics; the series
//! and matrix layers check compatibility up front and report
//! [`Error::RingMismatch`](crate::Error::RingMismatch) instead.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ring a scalar belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalarRing {
    Rational,
    Prime(u64),
    DualRational,
    DualPrime(u64),
}

impl ScalarRing {
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(ScalarRing::Prime(p))
        } else {
            Err(Error::Parse(format!("{p} is not prime")))
        }
    }

    pub fn is_dual(self) -> bool {
        matches!(self, ScalarRing::DualRational | ScalarRing::DualPrime(_))
    }

    pub fn is_field(self) -> bool {
        !self.is_dual()
    }

    /// The residue field (drops the dual-number part).
    pub fn base(self) -> ScalarRing {
        match self {
            ScalarRing::DualRational => ScalarRing::Rational,
            ScalarRing::DualPrime(p) => ScalarRing::Prime(p),
            r => r,
        }
    }

    /// Dual numbers over this ring's base field.
    pub fn dual(self) -> ScalarRing {
        match self.base() {
            ScalarRing::Prime(p) => ScalarRing::DualPrime(p),
            _ => ScalarRing::DualRational,
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            ScalarRing::Prime(p) | ScalarRing::DualPrime(p) => p,
            _ => 0,
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    /// The dual unit `ε`; panics for field rings.
    pub fn epsilon(self) -> Scalar {
        assert!(self.is_dual(), "epsilon requested in {self}");
        let base = self.base();
        Scalar {
            re: Base::zero(base),
            eps: Some(Base::one(base)),
        }
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        let base = self.base();
        Scalar {
            re: Base::from_bigint(base, &BigInt::from(n)),
            eps: self.is_dual().then(|| Base::zero(base)),
        }
    }

    pub fn from_ratio(self, num: i64, den: i64) -> Result<Scalar> {
        let n = self.from_i64(num);
        let d = self.from_i64(den).inv().ok_or_else(|| {
            Error::Parse(format!("denominator {den} is not invertible in {self}"))
        })?;
        Ok(n * d)
    }

    /// Build `re + eps·ε` from two base-field scalars.
    pub fn dual_number(self, re: &Scalar, eps: &Scalar) -> Scalar {
        assert!(self.is_dual());
        assert!(re.eps.is_none() && eps.eps.is_none());
        Scalar {
            re: re.re.clone(),
            eps: Some(eps.re.clone()),
        }
    }

    /// Parse a scalar literal: `3/4`, `-2`, `2e`, `e`, `1+2e`, `(1-1/2e)`.
    pub fn parse_scalar(self, text: &str) -> Result<Scalar> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(&s)
            .to_string();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar literal".into()));
        }
        // Split into signed summands at top level.
        let mut total = self.zero();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/')
            {
                let part = &s[start..i];
                total = total + self.parse_summand(part)?;
                start = i;
            }
        }
        Ok(total)
    }

    fn parse_summand(self, part: &str) -> Result<Scalar> {
        let (neg, body) = match part.as_bytes().first() {
            Some(b'+') => (false, &part[1..]),
            Some(b'-') => (true, &part[1..]),
            _ => (false, part),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("dangling sign in `{part}`")));
        }
        let (is_eps, num) = match body.strip_suffix('e') {
            Some(rest) => (true, rest),
            None => (false, body),
        };
        let value = if num.is_empty() {
            self.base().one()
        } else {
            self.base().parse_rational(num)?
        };
        let value = if neg { -value } else { value };
        if is_eps {
            if !self.is_dual() {
                return Err(Error::Parse(format!(
                    "`{part}` uses ε but the ring is {self}"
                )));
            }
            Ok(self.dual_number(&self.base().zero(), &value))
        } else if self.is_dual() {
            Ok(self.dual_number(&value, &self.base().zero()))
        } else {
            Ok(value)
        }
    }

    fn parse_rational(self, text: &str) -> Result<Scalar> {
        let bad = || Error::Parse(format!("bad rational literal `{text}`"));
        let (n, d) = match text.split_once('/') {
            Some((n, d)) => (n, d),
            None => (text, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        let num = Scalar {
            re: Base::from_bigint(self, &n),
            eps: None,
        };
        let den = Scalar {
            re: Base::from_bigint(self, &d),
            eps: None,
        };
        let den_inv = den
            .inv()
            .ok_or_else(|| Error::Parse(format!("denominator of `{text}` vanishes in {self}")))?;
        Ok(num * den_inv)
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for ScalarRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarRing::Rational => write!(f, "q"),
            ScalarRing::Prime(p) => write!(f, "fp:{p}"),
            ScalarRing::DualRational => write!(f, "dual:q"),
            ScalarRing::DualPrime(p) => write!(f, "dual:fp:{p}"),
        }
    }
}

impl FromStr for ScalarRing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("dual:") {
            return Ok(rest.parse::<ScalarRing>()?.dual());
        }
        if s == "q" || s == "Q" {
            return Ok(ScalarRing::Rational);
        }
        if let Some(p) = s.strip_prefix("fp:") {
            let p: u64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime `{p}`")))?;
            return ScalarRing::prime(p);
        }
        Err(Error::Parse(format!("unknown field spec `{s}`")))
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 || p > u32::MAX as u64 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Base {
    Q(BigRational),
    F { v: u64, p: u64 },
}

impl Base {
    fn zero(ring: ScalarRing) -> Base {
        Base::from_bigint(ring, &BigInt::zero())
    }

    fn one(ring: ScalarRing) -> Base {
        Base::from_bigint(ring, &BigInt::one())
    }

    fn from_bigint(ring: ScalarRing, n: &BigInt) -> Base {
        match ring.base() {
            ScalarRing::Prime(p) => {
                let r = n.mod_floor_u64(p);
                Base::F { v: r, p }
            }
            _ => Base::Q(BigRational::from_integer(n.clone())),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Base::Q(q) => q.is_zero(),
            Base::F { v, .. } => *v == 0,
        }
    }

    fn is_one(&self) -> bool {
        match self {
            Base::Q(q) => q.is_one(),
            Base::F { v, .. } => *v == 1,
        }
    }

    fn add(&self, o: &Base) -> Base {
        match (self, o) {
            (Base::Q(a), Base::Q(b)) => Base::Q(a + b),
            (Base::F { v: a, p }, Base::F { v: b, p: q }) if p == q => Base::F {
                v: (a + b) % p,
                p: *p,
            },
            _ => panic!("base field mismatch"),
        }
    }

    fn neg(&self) -> Base {
        match self {
            Base::Q(a) => Base::Q(-a),
            Base::F { v, p } => Base::F {
                v: (p - v) % p,
                p: *p,
            },
        }
    }

    fn mul(&self, o: &Base) -> Base {
        match (self, o) {
            (Base::Q(a), Base::Q(b)) => Base::Q(a * b),
            (Base::F { v: a, p }, Base::F { v: b, p: q }) if p == q => Base::F {
                v: ((*a as u128 * *b as u128) % *p as u128) as u64,
                p: *p,
            },
            _ => panic!("base field mismatch"),
        }
    }

    fn inv(&self) -> Option<Base> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Base::Q(a) => Base::Q(a.recip()),
            Base::F { v, p } => Base::F {
                v: pow_mod(*v, p - 2, *p),
                p: *p,
            },
        })
    }
}

fn pow_mod(b: u64, mut e: u64, p: u64) -> u64 {
    let m = p as u128;
    let mut acc = 1u128;
    let mut base = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}

trait ModFloor {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloor for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        let m = BigInt::from(p);
        let r = ((self % &m) + &m) % &m;
        r.to_u64().expect("residue fits in u64")
    }
}

/// An element of one of the supported scalar rings.
///
/// For field rings `eps` is `None`; for dual numbers the value is
/// `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: Base,
    eps: Option<Base>,
}

impl Scalar {
    pub fn ring(&self) -> ScalarRing {
        match (&self.re, &self.eps) {
            (Base::Q(_), None) => ScalarRing::Rational,
            (Base::F { p, .. }, None) => ScalarRing::Prime(*p),
            (Base::Q(_), Some(_)) => ScalarRing::DualRational,
            (Base::F { p, .. }, Some(_)) => ScalarRing::DualPrime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.as_ref().is_none_or(Base::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.eps.as_ref().is_none_or(Base::is_zero)
    }

    /// Units are the elements with nonzero ε-free part.
    pub fn is_unit(&self) -> bool {
        !self.re.is_zero()
    }

    /// The ε-free part, as an element of the base field.
    pub fn real_part(&self) -> Scalar {
        Scalar {
            re: self.re.clone(),
            eps: None,
        }
    }

    /// The ε-coefficient, as an element of the base field (zero for fields).
    pub fn eps_part(&self) -> Scalar {
        Scalar {
            re: self.eps.clone().unwrap_or_else(|| Base::zero(self.ring())),
            eps: None,
        }
    }

    /// Embed a base-field scalar into `ring` (which must have the same base).
    pub fn lift_to(&self, ring: ScalarRing) -> Scalar {
        assert_eq!(ring.base(), self.ring().base(), "incompatible lift");
        Scalar {
            re: self.re.clone(),
            eps: if ring.is_dual() {
                Some(self.eps.clone().unwrap_or_else(|| Base::zero(ring)))
            } else {
                None
            },
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        let r = self.re.inv()?;
        let eps = self.eps.as_ref().map(|b| b.mul(&r).mul(&r).neg());
        Some(Scalar { re: r, eps })
    }

    pub fn pow(&self, e: i64) -> Option<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.ring().one();
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        Some(acc)
    }

    /// The integer `n` as a scalar of this ring (reduced mod p if needed).
    pub fn from_int_like(&self, n: i64) -> Scalar {
        self.ring().from_i64(n)
    }

    /// Small integer representative in a prime field, if any.
    pub fn as_residue(&self) -> Option<u64> {
        match (&self.re, &self.eps) {
            (Base::F { v, .. }, None) => Some(*v),
            _ => None,
        }
    }

    /// The rational value, for field-`q` scalars.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match (&self.re, &self.eps) {
            (Base::Q(q), None) => Some(q),
            _ => None,
        }
    }
}

fn fmt_base(b: &Base, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match b {
        Base::Q(q) => {
            if q.is_integer() {
                write!(f, "{}", q.numer())
            } else {
                write!(f, "{}/{}", q.numer(), q.denom())
            }
        }
        Base::F { v, .. } => write!(f, "{v}"),
    }
}

fn base_negative(b: &Base) -> bool {
    matches!(b, Base::Q(q) if q.is_negative())
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.eps {
            None => fmt_base(&self.re, f),
            Some(e) if e.is_zero() => fmt_base(&self.re, f),
            Some(e) => {
                if !self.re.is_zero() {
                    fmt_base(&self.re, f)?;
                    if !base_negative(e) {
                        write!(f, "+")?;
                    }
                }
                fmt_base(e, f)?;
                write!(f, "e")
            }
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        assert_eq!(self.ring(), o.ring(), "scalar ring mismatch");
        Scalar {
            re: self.re.add(&o.re),
            eps: self.eps.as_ref().zip(o.eps.as_ref()).map(|(a, b)| a.add(b)),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        assert_eq!(self.ring(), o.ring(), "scalar ring mismatch");
        Scalar {
            re: self.re.mul(&o.re),
            eps: self
                .eps
                .as_ref()
                .zip(o.eps.as_ref())
                .map(|(a, b)| self.re.mul(b).add(&a.mul(&o.re))),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: self.re.neg(),
            eps: self.eps.as_ref().map(Base::neg),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$m(&o)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = &*self + o;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = &*self - o;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}
