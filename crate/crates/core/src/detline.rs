//! Graded lines and determinant theories.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::scalar::{Scalar, ScalarRing};
use crate::window::{shuffle_sign, Position};

/// A graded line `(grade, scalar)`: the coordinate of a distinguished
/// element relative to an implicit basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedLine {
    pub grade: i64,
    pub scalar: Scalar,
}

impl GradedLine {
    pub fn new(grade: i64, scalar: Scalar) -> Result<Self> {
        if scalar.is_zero() {
            return Err(Error::Precondition(
                "graded line scalar must be nonzero".into(),
            ));
        }
        Ok(GradedLine { grade, scalar })
    }

    pub fn unit(ring: ScalarRing) -> Self {
        GradedLine {
            grade: 0,
            scalar: ring.one(),
        }
    }

    pub fn tensor(&self, o: &GradedLine) -> GradedLine {
        GradedLine {
            grade: self.grade + o.grade,
            scalar: &self.scalar * &o.scalar,
        }
    }

    pub fn inverse(&self) -> GradedLine {
        GradedLine {
            grade: -self.grade,
            scalar: self.scalar.inv().expect("graded line scalars are units"),
        }
    }

    pub fn scaled(&self, c: &Scalar) -> GradedLine {
        GradedLine {
            grade: self.grade,
            scalar: &self.scalar * c,
        }
    }
}

impl fmt::Display for GradedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[grade {}, {}]", self.grade, self.scalar)
    }
}

/// `(-1)^{ab}`.
pub fn koszul_sign(a: &GradedLine, b: &GradedLine) -> i64 {
    if (a.grade * b.grade).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The commutativity constraint `a ⊗ b ↦ (-1)^{p(a)p(b)} b ⊗ a`.
///
/// Returns the swapped pair with the sign absorbed into the first factor,
/// together with the sign itself.
pub fn koszul_swap(a: &GradedLine, b: &GradedLine) -> (GradedLine, GradedLine, i64) {
    let s = koszul_sign(a, b);
    let ring = b.scalar.ring();
    (b.scaled(&ring.from_i64(s)), a.clone(), s)
}

/// `Δ(L) = Δ₀ ⊗ det(L/L₀)` for a fixed anchor `(L₀, Δ₀)`.
#[derive(Clone, Debug)]
pub struct DeterminantTheory {
    anchor: Lattice,
    anchor_line: GradedLine,
}

/// The isomorphism `Δ(L₁) ⊗ det(L₂/L₁) → Δ(L₂)`: it sends
/// `source ⊗ quotient` to `scalar · target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaIso {
    pub source: GradedLine,
    pub quotient: GradedLine,
    pub target: GradedLine,
    /// Shuffle sign of the quotient monomials past those of `L₁`.
    pub sign: i64,
    pub scalar: Scalar,
}

/// Which structure map of a nested triple to corrupt in
/// [`DeterminantTheory::check_triangle_with_fault`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangleLeg {
    Delta12,
    Delta23,
    Delta13,
    Quotient,
}

/// Both composites `Δ(L₁) ⊗ det(L₂/L₁) ⊗ det(L₃/L₂) → Δ(L₃)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleCheck {
    /// Through `Δ(L₂) ⊗ det(L₃/L₂)`.
    pub via_middle: Scalar,
    /// Through `Δ(L₁) ⊗ det(L₃/L₁)`.
    pub via_quotient: Scalar,
    /// `via_middle / via_quotient`.
    pub discrepancy: Scalar,
}

impl TriangleCheck {
    pub fn commutes(&self) -> bool {
        self.discrepancy.is_one()
    }
}

impl DeterminantTheory {
    pub fn new(anchor: Lattice, anchor_line: GradedLine) -> Self {
        DeterminantTheory {
            anchor,
            anchor_line,
        }
    }

    /// Anchored at `k[[t]]ⁿ` with the unit line.
    pub fn standard(ring: ScalarRing, n: usize) -> Result<Self> {
        Ok(DeterminantTheory::new(
            Lattice::standard(ring, n)?,
            GradedLine::unit(ring),
        ))
    }

    pub fn anchor(&self) -> &Lattice {
        &self.anchor
    }

    pub fn line(&self, l: &Lattice) -> Result<GradedLine> {
        Ok(self
            .anchor_line
            .tensor(&self.anchor.relative_determinant(l)?))
    }

    pub fn delta_iso(&self, l1: &Lattice, l2: &Lattice) -> Result<DeltaIso> {
        if !l1.is_subset(l2)? {
            return Err(Error::Precondition(
                "delta_iso needs nested lattices L1 ⊆ L2".into(),
            ));
        }
        let source = self.line(l1)?;
        let target = self.line(l2)?;
        let quotient = l1.relative_determinant(l2)?;
        let sign = quotient_sign(l1, l2);
        let ring = l1.ring();
        let ratio = &target.scalar * &(&source.scalar * &quotient.scalar).inv().expect("unit");
        let scalar = &ratio * &ring.from_i64(sign);
        Ok(DeltaIso {
            source,
            quotient,
            target,
            sign,
            scalar,
        })
    }

    /// Condition (iv) for `L₁ ⊆ L₂ ⊆ L₃`.
    pub fn check_triangle(
        &self,
        l1: &Lattice,
        l2: &Lattice,
        l3: &Lattice,
    ) -> Result<TriangleCheck> {
        self.check_triangle_with_fault(l1, l2, l3, None)
    }

    /// As [`check_triangle`](Self::check_triangle), with one structure map
    /// multiplied by a scalar.
    pub fn check_triangle_with_fault(
        &self,
        l1: &Lattice,
        l2: &Lattice,
        l3: &Lattice,
        fault: Option<(TriangleLeg, Scalar)>,
    ) -> Result<TriangleCheck> {
        let ring = l1.ring();
        let factor = |leg: TriangleLeg| match &fault {
            Some((l, c)) if *l == leg => c.clone(),
            _ => ring.one(),
        };
        let d12 = self.delta_iso(l1, l2)?;
        let d23 = self.delta_iso(l2, l3)?;
        let d13 = self.delta_iso(l1, l3)?;
        let s12 = &d12.scalar * &factor(TriangleLeg::Delta12);
        let s23 = &d23.scalar * &factor(TriangleLeg::Delta23);
        let s13 = &d13.scalar * &factor(TriangleLeg::Delta13);
        // det(L₂/L₁) ⊗ det(L₃/L₂) → det(L₃/L₁)
        let q = quotient_composition(l1, l2, l3)? * factor(TriangleLeg::Quotient);
        let via_middle = &s12 * &s23;
        let via_quotient = &q * &s13;
        let discrepancy = &via_middle * &via_quotient.inv().expect("unit");
        Ok(TriangleCheck {
            via_middle,
            via_quotient,
            discrepancy,
        })
    }
}

fn quotient_positions(l1: &Lattice, l2: &Lattice, hi: i64) -> Vec<Position> {
    let inner = l1.leading_positions(hi);
    l2.leading_positions(hi)
        .into_iter()
        .filter(|p| !inner.contains(p))
        .collect()
}

fn window_top(ls: &[&Lattice]) -> i64 {
    ls.iter().map(|l| l.cutoff()).max().unwrap_or(0) + 1
}

/// Sign of `ω(L₁) ∧ q ↦ ω(L₂)`, where `q` wedges the echelon vectors of `L₂`
/// whose pivots are not pivots of `L₁`. Independent of the window top.
fn quotient_sign(l1: &Lattice, l2: &Lattice) -> i64 {
    let hi = window_top(&[l1, l2]);
    shuffle_sign(&l1.leading_positions(hi), &quotient_positions(l1, l2, hi))
}

/// Scalar of `det(L₂/L₁) ⊗ det(L₃/L₂) → det(L₃/L₁)` on the stored-basis
/// generators.
fn quotient_composition(l1: &Lattice, l2: &Lattice, l3: &Lattice) -> Result<Scalar> {
    let r12 = l1.relative_determinant(l2)?;
    let r23 = l2.relative_determinant(l3)?;
    let r13 = l1.relative_determinant(l3)?;
    let hi = window_top(&[l1, l2, l3]);
    let sign = shuffle_sign(
        &quotient_positions(l1, l2, hi),
        &quotient_positions(l2, l3, hi),
    );
    let ratio = &r13.scalar * &(&r12.scalar * &r23.scalar).inv().expect("unit");
    Ok(&ratio * &l1.ring().from_i64(sign))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul() {
        let q = ScalarRing::Rational;
        let a = GradedLine::new(1, q.from_i64(2)).unwrap();
        let b = GradedLine::new(1, q.from_i64(3)).unwrap();
        let (x, y, s) = koszul_swap(&a, &b);
        assert_eq!(s, -1);
        let (x2, y2, _) = koszul_swap(&y, &x);
        assert_eq!(x2.tensor(&y2), a.tensor(&b));
    }

    #[test]
    fn standard_chain() {
        let q = ScalarRing::Rational;
        let d = DeterminantTheory::standard(q, 1).unwrap();
        let l0 = Lattice::monomial(q, &[0]).unwrap();
        let l1 = Lattice::monomial(q, &[-1]).unwrap();
        let l2 = Lattice::monomial(q, &[-2]).unwrap();
        let iso = d.delta_iso(&l0, &l1).unwrap();
        assert_eq!(iso.target.grade - iso.source.grade, 1);
        assert!(iso.scalar.is_one());
        assert!(d.check_triangle(&l0, &l1, &l2).unwrap().commutes());
        assert!(d.delta_iso(&l1, &l0).is_err());
        let c = q.from_i64(5);
        let bad = d
            .check_triangle_with_fault(&l0, &l1, &l2, Some((TriangleLeg::Delta23, c.clone())))
            .unwrap();
        assert_eq!(bad.discrepancy, c);
    }
}
