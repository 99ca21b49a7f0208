//! Finite-window pieces of the co-Sato Grassmannian and their Plücker
//! coordinates.
//!
//! A window lattice is a `k`-subspace `L` with `t^N k[[t]]ⁿ ⊆ L ⊆ t^{-N}k[[t]]ⁿ`;
//! it is determined by `U = L / t^N k[[t]]ⁿ ⊆ M_w`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fermion::FiniteCliffordModel;
use crate::linalg::Mat;
use crate::scalar::{Scalar, ScalarRing};
use crate::window::{Position, WindowSpace};

/// Default bound on the number of enumerated points.
pub const DEFAULT_CAP: u128 = 200_000;

/// A window lattice, stored as the reduced row echelon basis of `U`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WindowPoint {
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
}

impl WindowPoint {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Number of `d`-dimensional subspaces of `𝔽_q^m`.
pub fn gaussian_binomial(m: usize, d: usize, q: u128) -> u128 {
    if d > m {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..d {
        num *= q.pow((m - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// All window lattices of dimension `d` (all dimensions when `None`) in the
/// window `t^{-N}k[[t]]ⁿ / t^{N}k[[t]]ⁿ` over a prime field.
pub fn window_grassmannian(
    ring: ScalarRing,
    n: usize,
    half: i64,
    d: Option<usize>,
    cap: u128,
) -> Result<Vec<WindowPoint>> {
    let ScalarRing::Prime(p) = ring else {
        return Err(Error::UnsupportedRing(ring));
    };
    let m = WindowSpace::symmetric(n, half).dim();
    let dims: Vec<usize> = match d {
        Some(d) if d > m => {
            return Err(Error::Precondition(format!(
                "dimension {d} exceeds window dimension {m}"
            )))
        }
        Some(d) => vec![d],
        None => (0..=m).collect(),
    };
    let total: u128 = dims
        .iter()
        .map(|&k| gaussian_binomial(m, k, p as u128))
        .sum();
    if total > cap {
        return Err(Error::EnumerationCap { count: total, cap });
    }
    let mut out = Vec::new();
    for k in dims {
        for pivots in subsets(m, k) {
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|r| {
                    let pv = pivots.clone();
                    ((pivots[r] + 1)..m)
                        .filter(move |c| !pv.contains(c))
                        .map(move |c| (r, c))
                })
                .collect();
            let count = (p as u128).pow(free.len() as u32);
            for mut code in 0..count {
                let mut rows = vec![vec![ring.zero(); m]; k];
                for (r, &c) in pivots.iter().enumerate() {
                    rows[r][c] = ring.one();
                }
                for &(r, c) in &free {
                    rows[r][c] = ring.from_i64((code % p as u128) as i64);
                    code /= p as u128;
                }
                out.push(WindowPoint {
                    rows,
                    pivots: pivots.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// The point of a subspace spanned by arbitrary vectors.
pub fn window_point(ring: ScalarRing, vectors: &[Vec<Scalar>]) -> WindowPoint {
    if vectors.is_empty() {
        return WindowPoint {
            rows: Vec::new(),
            pivots: Vec::new(),
        };
    }
    let (r, pivots) = Mat::from_rows(ring, vectors.to_vec()).rref();
    WindowPoint {
        rows: (0..pivots.len()).map(|i| r.row(i).to_vec()).collect(),
        pivots,
    }
}

/// `L = t^a k[[t]]ⁿ`-type points: `U` spanned by the monomials of exponent
/// at least `a_r` in row `r`.
pub fn monomial_point(ring: ScalarRing, window: &WindowSpace, exps: &[i64]) -> WindowPoint {
    let vs: Vec<Vec<Scalar>> = window
        .positions()
        .into_iter()
        .filter(|p| p.exp >= exps[p.row])
        .map(|p| {
            let mut v = vec![ring.zero(); window.dim()];
            v[window.index(p)] = ring.one();
            v
        })
        .collect();
    window_point(ring, &vs)
}

/// Plücker coordinates `p_I` (`k×k` minors on the columns `I`, with `I`
/// running over increasing `k`-subsets in lexicographic order), scaled so
/// the first nonzero coordinate is `1`.
pub fn pluecker(ring: ScalarRing, m: usize, u: &WindowPoint) -> Vec<Scalar> {
    let k = u.dim();
    let mut coords: Vec<Scalar> = subsets(m, k)
        .into_iter()
        .map(|cols| {
            if k == 0 {
                return ring.one();
            }
            let minor: Vec<Vec<Scalar>> = u
                .rows
                .iter()
                .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
                .collect();
            Mat::from_rows(ring, minor).det()
        })
        .collect();
    if let Some(first) = coords.iter().find(|c| !c.is_zero()).cloned() {
        let inv = first.inv().expect("field element");
        for c in &mut coords {
            *c = &*c * &inv;
        }
    }
    coords
}

fn subset_rank(m: usize, set: &[usize]) -> usize {
    subsets(m, set.len())
        .iter()
        .position(|s| s == set)
        .expect("valid subset")
}

/// `p` at an index list that need not be sorted.
fn signed_coord(ring: ScalarRing, m: usize, coords: &[Scalar], idx: &[usize]) -> Scalar {
    let mut v = idx.to_vec();
    let mut sign = false;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return ring.zero();
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = !sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return ring.zero();
    }
    let c = coords[subset_rank(m, &v)].clone();
    if sign {
        -c
    } else {
        c
    }
}

/// Evaluate every quadratic Plücker relation
/// `Σ_l (−1)^l p_{I ∪ j_l} p_{J ∖ j_l}` for `|I| = k−1`, `|J| = k+1`; returns
/// the first nonvanishing one.
pub fn pluecker_relations(
    ring: ScalarRing,
    m: usize,
    k: usize,
    coords: &[Scalar],
) -> Option<(Vec<usize>, Vec<usize>, Scalar)> {
    if k == 0 || k >= m {
        return None;
    }
    for i in subsets(m, k - 1) {
        for j in subsets(m, k + 1) {
            let mut acc = ring.zero();
            for l in 0..j.len() {
                let mut a = i.clone();
                a.push(j[l]);
                let b: Vec<usize> = j
                    .iter()
                    .enumerate()
                    .filter(|(x, _)| *x != l)
                    .map(|(_, &y)| y)
                    .collect();
                let term = &signed_coord(ring, m, coords, &a) * &signed_coord(ring, m, coords, &b);
                acc = if l % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            if !acc.is_zero() {
                return Some((i, j, acc));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannReport {
    pub points: usize,
    pub distinct_images: usize,
    pub relation_failures: usize,
}

impl GrassmannReport {
    pub fn ok(&self) -> bool {
        self.points == self.distinct_images && self.relation_failures == 0
    }
}

/// Injectivity of the Plücker map and the quadratic relations on a set of
/// points of equal dimension.
pub fn check_pluecker(ring: ScalarRing, m: usize, points: &[WindowPoint]) -> GrassmannReport {
    let mut seen = HashSet::new();
    let mut failures = 0;
    for u in points {
        let c = pluecker(ring, m, u);
        if pluecker_relations(ring, m, u.dim(), &c).is_some() {
            failures += 1;
        }
        seen.insert(c);
    }
    GrassmannReport {
        points: points.len(),
        distinct_images: seen.len(),
        relation_failures: failures,
    }
}

/// The tautological line at `U` read two ways: the Plücker vector and the
/// fermion annihilator line, both in the monomial basis of `Λ^{dim U}(M_w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautologicalFiber {
    pub grade: i64,
    pub pluecker: Vec<Scalar>,
    pub annihilator: Vec<Scalar>,
}

pub fn tautological_fiber(
    model: &FiniteCliffordModel,
    u: &WindowPoint,
) -> Result<TautologicalFiber> {
    let m = model.dim();
    let line = model.annihilator_line(&u.rows)?;
    let k = u.dim();
    // Λ^k coordinates in lexicographic subset order: bit i ↔ column i
    let annihilator: Vec<Scalar> = subsets(m, k)
        .into_iter()
        .map(|s| line.spinor[s.iter().fold(0usize, |acc, &i| acc | (1 << i))].clone())
        .collect();
    let scale = annihilator
        .iter()
        .find(|c| !c.is_zero())
        .and_then(Scalar::inv)
        .ok_or_else(|| Error::Property("annihilator line has no degree-k component".into()))?;
    let annihilator = annihilator.iter().map(|c| c * &scale).collect();
    Ok(TautologicalFiber {
        grade: line.grade,
        pluecker: pluecker(model.ring, m, u),
        annihilator,
    })
}

/// The window positions of the pivots of `U`.
pub fn pivot_positions(window: &WindowSpace, u: &WindowPoint) -> Vec<Position> {
    u.pivots.iter().map(|&i| window.position(i)).collect()
}
