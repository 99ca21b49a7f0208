//! Topological nilpotence of `k((t))`-linear operators and the rank of a
//! Tate space over `k((s))` acting through a nilpotent operator.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::SeriesMatrix;
use crate::series::LaurentSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Nilpotence {
    Yes,
    No,
    /// The Newton polygon was not determined; `witness` is the least
    /// `m ≤ max_power` with `Tᵐ k[[t]]ⁿ ⊆ t·k[[t]]ⁿ`, if any.
    Undecided {
        witness: Option<u32>,
    },
}

impl fmt::Display for Nilpotence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nilpotence::Yes => write!(f, "yes"),
            Nilpotence::No => write!(f, "no"),
            Nilpotence::Undecided { witness: Some(m) } => {
                write!(f, "undecided (T^{m} maps k[[t]]^n into t k[[t]]^n)")
            }
            Nilpotence::Undecided { witness: None } => write!(f, "undecided"),
        }
    }
}

/// Valuations of the roots of a monic polynomial `[1, c₁, …, cₙ]`
/// (coefficient of `λ^{n-k}` is `c_k`), read off its Newton polygon.
/// `None` stands for the root `0` (infinite valuation).
pub fn root_valuations(poly: &[LaurentSeries]) -> Result<Vec<Option<Ratio<i64>>>> {
    let n = poly.len() - 1;
    // points (x, val) with x the power of λ
    let mut pts: Vec<(i64, i64)> = Vec::new();
    for (k, c) in poly.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        pts.push(((n - k) as i64, c.valuation()?));
    }
    pts.sort();
    let zeros = pts[0].0 as usize;
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point if it lies on or above the chord
            if (y2 - y1) * (p.0 - x1) >= (p.1 - y1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = vec![None; zeros];
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let v = Ratio::new(y1 - y2, x2 - x1);
        out.extend(std::iter::repeat_n(Some(v), (x2 - x1) as usize));
    }
    Ok(out)
}

/// Decide whether `Tⁿ → 0` as `n → ∞` from the Newton polygon of the
/// characteristic polynomial, falling back to bounded powers when the
/// polygon is not determined by the available precision.
pub fn is_topologically_nilpotent(t: &SeriesMatrix, max_power: u32) -> Result<Nilpotence> {
    let cp = t.charpoly()?;
    let mut undetermined = false;
    for c in &cp[1..] {
        match c.valuation() {
            Ok(v) if v <= 0 => return Ok(Nilpotence::No),
            Ok(_) => {}
            Err(Error::NotUnit) => {}
            Err(Error::UndeterminedValuation { prec }) if prec >= 1 => {}
            Err(Error::UndeterminedValuation { .. }) => undetermined = true,
            Err(e) => return Err(e),
        }
    }
    if !undetermined {
        return Ok(Nilpotence::Yes);
    }
    let mut power = t.clone();
    for m in 1..=max_power {
        if power.entries().all(|x| x.valuation_bound() >= 1) {
            return Ok(Nilpotence::Undecided { witness: Some(m) });
        }
        power = power.try_mul(t)?;
    }
    Ok(Nilpotence::Undecided { witness: None })
}

/// Result of [`rank_over_t`]: the rank and the stable lattice used.
#[derive(Clone, Debug)]
pub struct RankCertificate {
    pub rank: i64,
    pub lattice: Lattice,
    pub iterations: usize,
}

/// For a topologically nilpotent invertible `T` on `k((s))ⁿ`, build the
/// `T`-stable lattice `L = Σ Tᵐ k[[s]]ⁿ` and return `dim_k L/TL`.
pub fn rank_over_t(t: &SeriesMatrix, max_iter: usize) -> Result<RankCertificate> {
    match is_topologically_nilpotent(t, 0)? {
        Nilpotence::Yes => {}
        v => {
            return Err(Error::Precondition(format!(
                "operator is not topologically nilpotent ({v})"
            )));
        }
    }
    if t.det()?.is_known_zero() {
        return Err(Error::Precondition("operator is not invertible".into()));
    }
    let l0 = Lattice::standard(t.ring(), t.rows())?;
    let mut l = l0.clone();
    for it in 0..max_iter {
        let next = l0.sum(&l.apply(t)?)?;
        if next == l {
            let tl = l.apply(t)?;
            let rank = tl.relative_dimension(&l)?;
            return Ok(RankCertificate {
                rank,
                lattice: l,
                iterations: it,
            });
        }
        l = next.hermite_normalize();
    }
    Err(Error::Unstable(format!(
        "T-stable lattice not reached after {max_iter} steps"
    )))
}
