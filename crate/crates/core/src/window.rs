//! Finite windows `t^{lo}k[[t]]ⁿ / t^{hi}k[[t]]ⁿ` and their monomial bases.
//!
//! Monomials `t^e·e_r` are ordered by exponent descending, then row
//! ascending. Exterior-algebra coordinates, Plücker coordinates and the
//! shuffle signs of determinant lines all use this order.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarRing};
use crate::series::LaurentSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WindowSpace {
    pub n: usize,
    pub lo: i64,
    pub hi: i64,
}

/// A monomial `t^exp · e_row`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub row: usize,
    pub exp: i64,
}

impl Position {
    /// Sort key realising the global monomial order.
    pub fn key(self) -> (i64, usize) {
        (-self.exp, self.row)
    }

    pub fn precedes(self, other: Position) -> bool {
        self.key() < other.key()
    }
}

impl WindowSpace {
    /// The symmetric window `t^{-N}k[[t]]ⁿ / t^{N}k[[t]]ⁿ`.
    pub fn symmetric(n: usize, half: i64) -> Self {
        WindowSpace {
            n,
            lo: -half,
            hi: half,
        }
    }

    pub fn dim(&self) -> usize {
        self.n * (self.hi - self.lo).max(0) as usize
    }

    pub fn index(&self, p: Position) -> usize {
        debug_assert!(p.exp >= self.lo && p.exp < self.hi && p.row < self.n);
        (self.hi - 1 - p.exp) as usize * self.n + p.row
    }

    pub fn position(&self, idx: usize) -> Position {
        Position {
            row: idx % self.n,
            exp: self.hi - 1 - (idx / self.n) as i64,
        }
    }

    pub fn contains(&self, p: Position) -> bool {
        p.row < self.n && p.exp >= self.lo && p.exp < self.hi
    }

    /// Coordinates of a vector of series; terms at or above `hi` vanish in
    /// the window, terms below `lo` are an error.
    pub fn coords(&self, ring: ScalarRing, v: &[LaurentSeries]) -> Result<Vec<Scalar>> {
        let mut out = vec![ring.zero(); self.dim()];
        for (row, x) in v.iter().enumerate() {
            if let Some(p) = x.prec() {
                if p < self.hi {
                    return Err(Error::PrecisionExhausted {
                        needed: self.hi,
                        available: p,
                    });
                }
            }
            for (e, c) in x.terms() {
                if e >= self.hi {
                    continue;
                }
                if e < self.lo {
                    return Err(Error::NotAdapted(format!(
                        "vector has a t^{e} term below the window floor t^{}",
                        self.lo
                    )));
                }
                out[self.index(Position { row, exp: e })] = c.clone();
            }
        }
        Ok(out)
    }

    /// The vector of series with the given window coordinates.
    pub fn vector(&self, ring: ScalarRing, coords: &[Scalar]) -> Vec<LaurentSeries> {
        let mut terms: Vec<Vec<(i64, Scalar)>> = vec![Vec::new(); self.n];
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                let p = self.position(i);
                terms[p.row].push((p.exp, c.clone()));
            }
        }
        terms
            .into_iter()
            .map(|t| LaurentSeries::exact(ring, t))
            .collect()
    }

    /// All positions in increasing global order.
    pub fn positions(&self) -> Vec<Position> {
        (0..self.dim()).map(|i| self.position(i)).collect()
    }
}

/// Sign of the permutation that sorts the concatenation `a ++ b` of two
/// individually sorted position lists.
pub fn shuffle_sign(a: &[Position], b: &[Position]) -> i64 {
    let mut inversions = 0usize;
    for y in b {
        inversions += a.iter().filter(|x| y.precedes(**x)).count();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}
