//! The finite Clifford model on `Λ(M_w)`, `M_w = t^{-N}k[[t]]ⁿ / t^{N}k[[t]]ⁿ`.
//!
//! Spinors are dense coefficient vectors indexed by bitmasks over the window
//! positions; bit `i` is the `i`-th monomial in the global order, and the
//! mask `S` stands for `e_{i₁} ∧ … ∧ e_{i_k}` with `i₁ < … < i_k`.

use crate::detline::DeterminantTheory;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::Mat;
use crate::scalar::{Scalar, ScalarRing};
use crate::window::{shuffle_sign, WindowSpace};

/// Largest window dimension for the dense exterior algebra.
pub const MAX_WINDOW_DIM: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiniteCliffordModel {
    pub ring: ScalarRing,
    pub window: WindowSpace,
}

/// The line cut out by `U ⊕ U^⊥` in `Λ(M_w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilatorLine {
    /// `dim U − Nn`.
    pub grade: i64,
    pub degree: usize,
    /// Spanning spinor of the common kernel.
    pub spinor: Vec<Scalar>,
    /// `Λ^{top}U` computed by wedging a basis of `U`.
    pub top: Vec<Scalar>,
}

fn sign_before(mask: usize, i: usize) -> bool {
    (mask & ((1usize << i) - 1)).count_ones() % 2 == 1
}

fn signed(c: Scalar, negate: bool) -> Scalar {
    if negate {
        -c
    } else {
        c
    }
}

impl FiniteCliffordModel {
    pub fn new(ring: ScalarRing, n: usize, half: i64) -> Result<Self> {
        if !ring.is_field() {
            return Err(Error::UnsupportedRing(ring));
        }
        let window = WindowSpace::symmetric(n, half);
        if window.dim() > MAX_WINDOW_DIM {
            return Err(Error::EnumerationCap {
                count: window.dim() as u128,
                cap: MAX_WINDOW_DIM as u128,
            });
        }
        Ok(FiniteCliffordModel { ring, window })
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn spinor_dim(&self) -> usize {
        1 << self.dim()
    }

    pub fn vacuum(&self) -> Vec<Scalar> {
        let mut v = vec![self.ring.zero(); self.spinor_dim()];
        v[0] = self.ring.one();
        v
    }

    /// `x ∧ v`.
    pub fn wedge(&self, x: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![self.ring.zero(); v.len()];
        for (s, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, xi) in x.iter().enumerate() {
                if xi.is_zero() || s & (1 << i) != 0 {
                    continue;
                }
                let term = signed(xi * c, sign_before(s, i));
                out[s | (1 << i)] = &out[s | (1 << i)] + &term;
            }
        }
        out
    }

    /// `ι_ξ v`, an odd derivation acting from the left.
    pub fn contract(&self, xi: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![self.ring.zero(); v.len()];
        for (s, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, xii) in xi.iter().enumerate() {
                if xii.is_zero() || s & (1 << i) == 0 {
                    continue;
                }
                let term = signed(xii * c, sign_before(s, i));
                out[s & !(1 << i)] = &out[s & !(1 << i)] + &term;
            }
        }
        out
    }

    fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut e = vec![self.ring.zero(); self.dim()];
        e[i] = self.ring.one();
        e
    }

    /// Checks `x∧x∧ = 0`, `ι_ξι_ξ = 0` and `x∧ι_ξ + ι_ξ x∧ = ξ(x)` on
    /// basis vectors and every monomial spinor.
    pub fn check_clifford_relations(&self) -> Result<()> {
        let m = self.dim();
        for s in 0..self.spinor_dim() {
            let mut v = vec![self.ring.zero(); self.spinor_dim()];
            v[s] = self.ring.one();
            for i in 0..m {
                let ei = self.basis_vector(i);
                if self
                    .wedge(&ei, &self.wedge(&ei, &v))
                    .iter()
                    .any(|c| !c.is_zero())
                {
                    return Err(Error::Property(format!(
                        "wedge(e{i})² ≠ 0 on monomial {s:b}"
                    )));
                }
                if self
                    .contract(&ei, &self.contract(&ei, &v))
                    .iter()
                    .any(|c| !c.is_zero())
                {
                    return Err(Error::Property(format!(
                        "contract(e{i}*)² ≠ 0 on monomial {s:b}"
                    )));
                }
                for j in 0..m {
                    let ej = self.basis_vector(j);
                    let a = self.wedge(&ei, &self.contract(&ej, &v));
                    let b = self.contract(&ej, &self.wedge(&ei, &v));
                    let expect = if i == j {
                        self.ring.one()
                    } else {
                        self.ring.zero()
                    };
                    for (k, (x, y)) in a.iter().zip(&b).enumerate() {
                        let want = if k == s {
                            expect.clone()
                        } else {
                            self.ring.zero()
                        };
                        if x + y != want {
                            return Err(Error::Property(format!(
                                "anticommutator of e{i} and e{j}* fails on monomial {s:b}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Wedge of the given vectors, in order, applied to the vacuum.
    pub fn wedge_all(&self, vs: &[Vec<Scalar>]) -> Vec<Scalar> {
        let mut w = self.vacuum();
        for v in vs.iter().rev() {
            w = self.wedge(v, &w);
        }
        w
    }

    /// Common kernel of `x∧` (`x ∈ U`) and `ι_ξ` (`ξ ∈ U^⊥`), computed by
    /// brute force degree by degree.
    pub fn annihilator_line(&self, u: &[Vec<Scalar>]) -> Result<AnnihilatorLine> {
        let m = self.dim();
        if u.iter().any(|v| v.len() != m) {
            return Err(Error::Dimension(format!(
                "subspace vectors must have length {m}"
            )));
        }
        let ubasis: Vec<Vec<Scalar>> = if u.is_empty() {
            Vec::new()
        } else {
            let (r, piv) = Mat::from_rows(self.ring, u.to_vec()).rref();
            (0..piv.len()).map(|i| r.row(i).to_vec()).collect()
        };
        let k = ubasis.len();
        let perp = if k == 0 {
            (0..m).map(|i| self.basis_vector(i)).collect()
        } else {
            Mat::from_rows(self.ring, ubasis.clone()).kernel()
        };
        let mut kernel: Vec<(usize, Vec<Scalar>)> = Vec::new();
        for d in 0..=m {
            let masks: Vec<usize> = (0..self.spinor_dim())
                .filter(|s| s.count_ones() as usize == d)
                .collect();
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            let images = |f: &dyn Fn(&[Scalar]) -> Vec<Scalar>, rows: &mut Vec<Vec<Scalar>>| {
                let cols: Vec<Vec<Scalar>> = masks
                    .iter()
                    .map(|&s| {
                        let mut v = vec![self.ring.zero(); self.spinor_dim()];
                        v[s] = self.ring.one();
                        f(&v)
                    })
                    .collect();
                for t in 0..self.spinor_dim() {
                    if cols.iter().any(|c| !c[t].is_zero()) {
                        rows.push(cols.iter().map(|c| c[t].clone()).collect());
                    }
                }
            };
            for x in &ubasis {
                images(&|v| self.wedge(x, v), &mut rows);
            }
            for xi in &perp {
                images(&|v| self.contract(xi, v), &mut rows);
            }
            let ker = if rows.is_empty() {
                (0..masks.len())
                    .map(|i| {
                        let mut v = vec![self.ring.zero(); masks.len()];
                        v[i] = self.ring.one();
                        v
                    })
                    .collect()
            } else {
                Mat::from_rows(self.ring, rows).kernel()
            };
            for kv in ker {
                let mut spinor = vec![self.ring.zero(); self.spinor_dim()];
                for (c, &s) in kv.into_iter().zip(&masks) {
                    spinor[s] = c;
                }
                kernel.push((d, spinor));
            }
        }
        if kernel.len() != 1 {
            return Err(Error::Property(format!(
                "annihilator has dimension {}, expected 1",
                kernel.len()
            )));
        }
        let (degree, spinor) = kernel.pop().expect("one element");
        let top = self.wedge_all(&ubasis);
        if !proportional(&spinor, &top) {
            return Err(Error::Property(
                "annihilator differs from the top wedge of U".into(),
            ));
        }
        Ok(AnnihilatorLine {
            grade: k as i64 - (m / 2) as i64,
            degree,
            spinor,
            top,
        })
    }

    fn check_lattice(&self, l: &Lattice) -> Result<()> {
        if l.ring() != self.ring {
            return Err(Error::RingMismatch {
                left: self.ring,
                right: l.ring(),
            });
        }
        Ok(())
    }

    /// The subspace `L / t^N k[[t]]ⁿ` of `M_w`, by its sorted echelon basis.
    pub fn subspace(&self, l: &Lattice) -> Result<Vec<Vec<Scalar>>> {
        self.check_lattice(l)?;
        Ok(l.window_basis(&self.window)?
            .into_iter()
            .map(|(_, v)| v)
            .collect())
    }

    /// `ω(L)`: the wedge of the sorted echelon basis; its coefficient at the
    /// pivot monomial is `1`.
    pub fn omega(&self, l: &Lattice) -> Result<Vec<Scalar>> {
        Ok(self.wedge_all(&self.subspace(l)?))
    }

    /// `λ` with `ω(L₁) ∧ q = λ·ω(L₂)`, where `q` wedges the echelon vectors
    /// of `L₂` whose pivots are not pivots of `L₁`.
    pub fn wedge_ratio(&self, l1: &Lattice, l2: &Lattice) -> Result<Scalar> {
        self.check_lattice(l1)?;
        let b1 = l1.window_basis(&self.window)?;
        let b2 = l2.window_basis(&self.window)?;
        let p1: Vec<_> = b1.iter().map(|(p, _)| *p).collect();
        let q: Vec<Vec<Scalar>> = b2
            .iter()
            .filter(|(p, _)| !p1.contains(p))
            .map(|(_, v)| v.clone())
            .collect();
        let mut w = self.wedge_all(&q);
        for (_, v) in b1.iter().rev() {
            w = self.wedge(v, &w);
        }
        let target = self.wedge_all(&b2.into_iter().map(|(_, v)| v).collect::<Vec<_>>());
        ratio(&w, &target).ok_or_else(|| Error::Property("wedge is not a multiple of ω(L₂)".into()))
    }

    /// Compare the wedge isomorphism with `delta_iso` for `L₁ ⊆ L₂`.
    pub fn check_delta_iso(
        &self,
        theory: &DeterminantTheory,
        l1: &Lattice,
        l2: &Lattice,
    ) -> Result<()> {
        let lam = self.wedge_ratio(l1, l2)?;
        let iso = theory.delta_iso(l1, l2)?;
        if lam != iso.scalar {
            return Err(Error::Property(format!(
                "wedge isomorphism scalar {lam} differs from delta_iso scalar {}",
                iso.scalar
            )));
        }
        Ok(())
    }

    /// `sign` of the shuffle putting the pivots of `L₂/L₁` after those of `L₁`.
    pub fn pivot_shuffle(&self, l1: &Lattice, l2: &Lattice) -> i64 {
        let p1 = l1.leading_positions(self.window.hi);
        let q: Vec<_> = l2
            .leading_positions(self.window.hi)
            .into_iter()
            .filter(|p| !p1.contains(p))
            .collect();
        shuffle_sign(&p1, &q)
    }
}

fn ratio(a: &[Scalar], b: &[Scalar]) -> Option<Scalar> {
    let i = b.iter().position(|x| !x.is_zero())?;
    let lam = &a[i] * &b[i].inv()?;
    a.iter()
        .zip(b)
        .all(|(x, y)| x == &(&lam * y))
        .then_some(lam)
}

fn proportional(a: &[Scalar], b: &[Scalar]) -> bool {
    ratio(a, b).is_some_and(|l| !l.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_model() {
        let f2 = ScalarRing::prime(2).unwrap();
        let m = FiniteCliffordModel {
            ring: f2,
            window: WindowSpace { n: 1, lo: 0, hi: 2 },
        };
        m.check_clifford_relations().unwrap();
        let vac = m.annihilator_line(&[]).unwrap();
        assert_eq!(vac.spinor, m.vacuum());
        let e1 = vec![f2.one(), f2.zero()];
        let line = m.annihilator_line(&[e1]).unwrap();
        assert_eq!(line.degree, 1);
        assert!(line.spinor[1].is_one());
    }

    #[test]
    fn delta_iso_matches_wedges() {
        let q = ScalarRing::Rational;
        let m = FiniteCliffordModel::new(q, 2, 1).unwrap();
        let theory = DeterminantTheory::standard(q, 2).unwrap();
        let l1 = Lattice::monomial(q, &[0, 1]).unwrap();
        let l2 = Lattice::monomial(q, &[-1, 0]).unwrap();
        m.check_delta_iso(&theory, &l1, &l2).unwrap();
        let line = m.annihilator_line(&m.subspace(&l2).unwrap()).unwrap();
        assert_eq!(line.grade, 1);
    }
}
