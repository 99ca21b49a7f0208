//! The Whitehead factorization of `diag(t, t⁻¹)` into elementary matrices
//! and its interpolation `A(x, t)` from the identity.

use crate::error::Result;
use crate::matrix::SeriesMatrix;
use crate::scalar::{Scalar, ScalarRing};
use crate::series::LaurentSeries;

/// A polynomial in `x` with Laurent-polynomial coefficients in `t`,
/// lowest `x`-degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XtPoly {
    pub ring: ScalarRing,
    pub coeffs: Vec<LaurentSeries>,
}

impl XtPoly {
    pub fn constant(f: LaurentSeries) -> Self {
        XtPoly {
            ring: f.ring(),
            coeffs: vec![f],
        }
        .trim()
    }

    pub fn zero(ring: ScalarRing) -> Self {
        XtPoly {
            ring,
            coeffs: Vec::new(),
        }
    }

    pub fn one(ring: ScalarRing) -> Self {
        Self::constant(LaurentSeries::one(ring))
    }

    /// `x·f`.
    pub fn x_times(f: LaurentSeries) -> Self {
        let ring = f.ring();
        XtPoly {
            ring,
            coeffs: vec![LaurentSeries::zero(ring), f],
        }
        .trim()
    }

    fn trim(mut self) -> Self {
        while self.coeffs.last().is_some_and(LaurentSeries::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &XtPoly) -> XtPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = LaurentSeries::zero(self.ring);
        XtPoly {
            ring: self.ring,
            coeffs: (0..n)
                .map(|i| {
                    self.coeffs
                        .get(i)
                        .unwrap_or(&z)
                        .try_add(o.coeffs.get(i).unwrap_or(&z))
                        .expect("same ring")
                })
                .collect(),
        }
        .trim()
    }

    pub fn neg(&self) -> XtPoly {
        XtPoly {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, o: &XtPoly) -> XtPoly {
        if self.is_zero() || o.is_zero() {
            return XtPoly::zero(self.ring);
        }
        let mut coeffs =
            vec![LaurentSeries::zero(self.ring); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j]
                    .try_add(&a.try_mul(b).expect("same ring"))
                    .expect("same ring");
            }
        }
        XtPoly {
            ring: self.ring,
            coeffs,
        }
        .trim()
    }

    /// Substitute `x = x₀`.
    pub fn eval(&self, x0: &Scalar) -> LaurentSeries {
        let mut acc = LaurentSeries::zero(self.ring);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(x0).try_add(c).expect("same ring");
        }
        acc
    }
}

/// A `2×2` matrix over `k[x][t, t⁻¹]`.
pub type XtMatrix = [[XtPoly; 2]; 2];

pub fn xt_mul(a: &XtMatrix, b: &XtMatrix) -> XtMatrix {
    let e = |i: usize, j: usize| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn xt_det(a: &XtMatrix) -> XtPoly {
    a[0][0].mul(&a[1][1]).add(&a[0][1].mul(&a[1][0]).neg())
}

pub fn xt_eval(a: &XtMatrix, x0: &Scalar) -> SeriesMatrix {
    let ring = a[0][0].ring;
    SeriesMatrix::from_fn(ring, 2, 2, |i, j| a[i][j].eval(x0))
}

/// An elementary factor `I + c·E_{ij}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elementary {
    pub row: usize,
    pub col: usize,
    pub entry: LaurentSeries,
}

impl Elementary {
    pub fn matrix(&self) -> SeriesMatrix {
        SeriesMatrix::elementary(self.entry.ring(), 2, self.row, self.col, self.entry.clone())
    }

    /// `I + x·c·E_{ij}`.
    pub fn interpolated(&self) -> XtMatrix {
        let ring = self.entry.ring();
        let mut m = [
            [XtPoly::one(ring), XtPoly::zero(ring)],
            [XtPoly::zero(ring), XtPoly::one(ring)],
        ];
        m[self.row][self.col] = XtPoly::x_times(self.entry.clone());
        m
    }
}

/// `diag(u, u⁻¹) = L(u⁻¹ − 1) · U(1) · L(u − 1) · U(−u⁻¹)` with `u = t`,
/// where `U(a) = I + aE₁₂` and `L(b) = I + bE₂₁`.
pub fn whitehead_factor(ring: ScalarRing) -> Vec<Elementary> {
    let t = LaurentSeries::t_pow(ring, 1);
    let tinv = LaurentSeries::t_pow(ring, -1);
    let one = LaurentSeries::one(ring);
    vec![
        Elementary {
            row: 1,
            col: 0,
            entry: tinv.try_sub(&one).expect("same ring"),
        },
        Elementary {
            row: 0,
            col: 1,
            entry: one.clone(),
        },
        Elementary {
            row: 1,
            col: 0,
            entry: t.try_sub(&one).expect("same ring"),
        },
        Elementary {
            row: 0,
            col: 1,
            entry: -tinv,
        },
    ]
}

pub fn multiply_factors(ring: ScalarRing, factors: &[Elementary]) -> Result<SeriesMatrix> {
    let mut acc = SeriesMatrix::identity(ring, 2);
    for f in factors {
        acc = acc.try_mul(&f.matrix())?;
    }
    Ok(acc)
}

/// `A(x, t)`: the product of the factors with every off-diagonal entry
/// scaled by `x`, so that `A(0, t) = I` and `A(1, t) = diag(t, t⁻¹)`.
pub fn interpolate_elementary(ring: ScalarRing) -> XtMatrix {
    let mut acc = [
        [XtPoly::one(ring), XtPoly::zero(ring)],
        [XtPoly::zero(ring), XtPoly::one(ring)],
    ];
    for f in whitehead_factor(ring) {
        acc = xt_mul(&acc, &f.interpolated());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_multiply_back() {
        let q = ScalarRing::Rational;
        let p = multiply_factors(q, &whitehead_factor(q)).unwrap();
        assert_eq!(p, SeriesMatrix::monomial_diagonal(q, &[1, -1]));
        let a = interpolate_elementary(q);
        assert_eq!(xt_eval(&a, &q.zero()), SeriesMatrix::identity(q, 2));
        assert_eq!(
            xt_eval(&a, &q.one()),
            SeriesMatrix::monomial_diagonal(q, &[1, -1])
        );
        assert_eq!(xt_det(&a), XtPoly::one(q));
    }
}
