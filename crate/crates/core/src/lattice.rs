//! Lattices in `k((t))ⁿ` over a field `k`.
//!
//! Every lattice `L` contains `t^K k[[t]]ⁿ` for an explicit `K` (its
//! cutoff), computed from the valuation of the basis determinant. Terms of
//! exponent above `K` can be dropped from generators without changing the
//! lattice, so Hermite and Smith reduction run on exact Laurent polynomials.

use std::fmt;

use crate::detline::GradedLine;
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::scalar::{Scalar, ScalarRing};
use crate::series::LaurentSeries;
use crate::window::{Position, WindowSpace};

#[derive(Clone, Debug)]
pub struct Lattice {
    ring: ScalarRing,
    basis: SeriesMatrix,
    hermite: SeriesMatrix,
    transform: SeriesMatrix,
    exps: Vec<i64>,
    cutoff: i64,
    det_val: i64,
    det_lc: Scalar,
}

impl PartialEq for Lattice {
    fn eq(&self, o: &Self) -> bool {
        self.ring == o.ring && self.hermite == o.hermite
    }
}

impl Eq for Lattice {}

impl std::hash::Hash for Lattice {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ring.hash(state);
        self.hermite.hash(state);
    }
}

/// Elementary divisors `a₁ ≥ … ≥ aₙ` with transforms `U · C · V ≡ diag(t^{aᵢ})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub divisors: Vec<i64>,
    pub left: SeriesMatrix,
    pub right: SeriesMatrix,
    pub input: SeriesMatrix,
    pub cutoff: i64,
}

fn clip(x: &LaurentSeries, c: i64) -> LaurentSeries {
    x.truncate(c).to_exact()
}

/// The part of `x` at exponents `≥ a`, divided by `t^a`.
fn quotient_part(x: &LaurentSeries, a: i64) -> LaurentSeries {
    LaurentSeries::exact(
        x.ring(),
        x.terms()
            .filter(|(e, _)| *e >= a)
            .map(|(e, c)| (e - a, c.clone())),
    )
}

/// The unit `x·t^{-v}` and its inverse modulo `t^{prec}`, as exact polynomials.
fn unit_inverse(x: &LaurentSeries, v: i64, prec: i64) -> Result<LaurentSeries> {
    let u = x.shift(-v);
    Ok(u.invert_to(prec.max(1))?.to_exact())
}

fn check_field(ring: ScalarRing) -> Result<()> {
    if ring.is_field() {
        Ok(())
    } else {
        Err(Error::UnsupportedRing(ring))
    }
}

/// Column operations on a generator matrix stored column-wise, with the
/// accumulated transform.
struct ColumnReducer {
    cols: Vec<Vec<LaurentSeries>>,
    v: Vec<Vec<LaurentSeries>>,
    cut: i64,
}

impl ColumnReducer {
    fn new(ring: ScalarRing, cols: Vec<Vec<LaurentSeries>>, cut: i64) -> Self {
        let k = cols.len();
        let v = (0..k)
            .map(|j| {
                (0..k)
                    .map(|i| {
                        if i == j {
                            LaurentSeries::one(ring)
                        } else {
                            LaurentSeries::zero(ring)
                        }
                    })
                    .collect()
            })
            .collect();
        let cols = cols
            .into_iter()
            .map(|c| c.iter().map(|x| clip(x, cut)).collect())
            .collect();
        ColumnReducer { cols, v, cut }
    }

    fn scale(&mut self, j: usize, w: &LaurentSeries) {
        for x in self.cols[j].iter_mut() {
            *x = clip(&(&*x * w), self.cut);
        }
        for x in self.v[j].iter_mut() {
            *x = &*x * w;
        }
    }

    /// `col[dst] -= q · col[src]`
    fn eliminate(&mut self, dst: usize, src: usize, q: &LaurentSeries) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.cols[dst].len() {
            let s = &self.cols[src][i] * q;
            self.cols[dst][i] = clip(&(&self.cols[dst][i] - &s), self.cut);
        }
        for i in 0..self.v[dst].len() {
            let s = &self.v[src][i] * q;
            self.v[dst][i] = &self.v[dst][i] - &s;
        }
    }
}

/// Column Hermite form of the lattice generated by the columns of `gens`,
/// given that it contains `t^cutoff k[[t]]ⁿ`.
fn hermite(gens: &SeriesMatrix, cutoff: i64) -> Result<(SeriesMatrix, Vec<i64>, SeriesMatrix)> {
    let ring = gens.ring();
    let n = gens.rows();
    let k = gens.cols();
    let cut = cutoff + 1;
    let mut red = ColumnReducer::new(ring, gens.columns(), cut);
    let mut active: Vec<usize> = (0..k).collect();
    let mut slots = vec![0usize; n];
    let mut exps = vec![0i64; n];
    for i in (0..n).rev() {
        let best = active
            .iter()
            .filter(|&&j| !red.cols[j][i].is_zero())
            .min_by_key(|&&j| (red.cols[j][i].valuation_bound(), j))
            .copied();
        let Some(p) = best else {
            return Err(Error::Precondition(
                "generators do not span a full-rank lattice".into(),
            ));
        };
        let a = red.cols[p][i].valuation()?;
        if a >= cut {
            return Err(Error::Precondition(format!(
                "pivot t^{a} lies above the declared cutoff t^{cutoff}"
            )));
        }
        let w = unit_inverse(&red.cols[p][i], a, cut - a)?;
        red.scale(p, &w);
        debug_assert_eq!(red.cols[p][i], LaurentSeries::t_pow(ring, a));
        for &j in &active {
            if j != p && !red.cols[j][i].is_zero() {
                let q = red.cols[j][i].shift(-a);
                red.eliminate(j, p, &q);
            }
        }
        active.retain(|&j| j != p);
        slots[i] = p;
        exps[i] = a;
    }
    if active
        .iter()
        .any(|&j| red.cols[j].iter().any(|x| !x.is_zero()))
    {
        return Err(Error::Precondition(
            "surplus generators did not reduce to zero".into(),
        ));
    }
    let order: Vec<usize> = slots
        .iter()
        .copied()
        .chain(active.iter().copied())
        .collect();
    let mut red = ColumnReducer {
        cols: order.iter().map(|&j| red.cols[j].clone()).collect(),
        v: order.iter().map(|&j| red.v[j].clone()).collect(),
        cut,
    };
    for j in 0..n {
        for i in (0..j).rev() {
            let q = quotient_part(&red.cols[j][i], exps[i]);
            red.eliminate(j, i, &q);
        }
    }
    let h = SeriesMatrix::from_columns(ring, n, &red.cols[..n]);
    let v = SeriesMatrix::from_columns(ring, k, &red.v);
    Ok((h, exps, v))
}

/// `H⁻¹` for upper-triangular `H` with diagonal `t^{aᵢ}`; exact.
#[allow(clippy::needless_range_loop)]
fn triangular_inverse(h: &SeriesMatrix, exps: &[i64]) -> SeriesMatrix {
    let ring = h.ring();
    let n = h.rows();
    let mut out = SeriesMatrix::zeros(ring, n, n);
    for c in 0..n {
        let mut x = vec![LaurentSeries::zero(ring); n];
        for i in (0..n).rev() {
            let mut acc = if i == c {
                LaurentSeries::one(ring)
            } else {
                LaurentSeries::zero(ring)
            };
            for j in i + 1..n {
                acc = &acc - &(h.get(i, j) * &x[j]);
            }
            x[i] = acc.shift(-exps[i]);
        }
        for (i, xi) in x.into_iter().enumerate() {
            out.set(i, c, xi);
        }
    }
    out
}

impl Lattice {
    /// The lattice spanned over `k[[t]]` by the columns of an invertible
    /// square matrix.
    pub fn new(basis: SeriesMatrix) -> Result<Self> {
        let ring = basis.ring();
        check_field(ring)?;
        if !basis.is_square() || basis.rows() == 0 {
            return Err(Error::Dimension(
                "lattice basis must be a nonempty square matrix".into(),
            ));
        }
        let n = basis.rows() as i64;
        let det = basis.det()?;
        let det_val = det.valuation()?;
        let det_lc = det.leading_coeff()?;
        let m = basis.min_valuation();
        let cutoff = det_val - (n - 1) * m;
        if let Some(p) = basis.prec() {
            if p <= cutoff {
                return Err(Error::PrecisionExhausted {
                    needed: cutoff + 1,
                    available: p,
                });
            }
        }
        let (hermite, exps, transform) = hermite(&basis, cutoff)?;
        Ok(Lattice {
            ring,
            basis,
            hermite,
            transform,
            exps,
            cutoff,
            det_val,
            det_lc,
        })
    }

    /// The lattice generated by the columns of `gens` (exact entries), which
    /// the caller guarantees to contain `t^cutoff k[[t]]ⁿ`.
    pub fn from_generators(gens: &SeriesMatrix, cutoff: i64) -> Result<Self> {
        let ring = gens.ring();
        check_field(ring)?;
        if !gens.is_exact() {
            return Err(Error::Precondition("generators must be exact".into()));
        }
        let (hermite, exps, transform) = hermite(gens, cutoff)?;
        let det_val = exps.iter().sum();
        let cutoff = cutoff.min(det_val - (exps.len() as i64 - 1) * hermite.min_valuation());
        Ok(Lattice {
            ring,
            basis: hermite.clone(),
            hermite,
            transform,
            exps,
            cutoff,
            det_val,
            det_lc: ring.one(),
        })
    }

    /// `k[[t]]ⁿ`.
    pub fn standard(ring: ScalarRing, n: usize) -> Result<Self> {
        Self::new(SeriesMatrix::identity(ring, n))
    }

    /// `⊕ t^{aᵢ} k[[t]]`.
    pub fn monomial(ring: ScalarRing, exps: &[i64]) -> Result<Self> {
        Self::new(SeriesMatrix::monomial_diagonal(ring, exps))
    }

    pub fn ring(&self) -> ScalarRing {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    pub fn basis(&self) -> &SeriesMatrix {
        &self.basis
    }

    /// Canonical column Hermite form: upper triangular, pivots `t^{aᵢ}`,
    /// entries right of a pivot in row `i` supported below `t^{aᵢ}`.
    pub fn hermite(&self) -> &SeriesMatrix {
        &self.hermite
    }

    /// `V` with `basis · V ≡ hermite` modulo `t^{cutoff+1}` entrywise.
    pub fn hermite_transform(&self) -> &SeriesMatrix {
        &self.transform
    }

    pub fn pivot_exponents(&self) -> &[i64] {
        &self.exps
    }

    /// An exponent `K` with `t^K k[[t]]ⁿ ⊆ L`.
    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Valuation and leading coefficient of the determinant of the stored basis.
    pub fn basis_det(&self) -> (i64, &Scalar) {
        (self.det_val, &self.det_lc)
    }

    /// The same lattice with its Hermite form as stored basis.
    pub fn hermite_normalize(&self) -> Lattice {
        Lattice {
            basis: self.hermite.clone(),
            transform: SeriesMatrix::identity(self.ring, self.rank()),
            det_val: self.exps.iter().sum(),
            det_lc: self.ring.one(),
            ..self.clone()
        }
    }

    fn check_compatible(&self, o: &Lattice) -> Result<()> {
        if self.ring != o.ring {
            return Err(Error::RingMismatch {
                left: self.ring,
                right: o.ring,
            });
        }
        if self.rank() != o.rank() {
            return Err(Error::Dimension(format!(
                "ambient ranks {} and {} differ",
                self.rank(),
                o.rank()
            )));
        }
        Ok(())
    }

    fn hermite_inverse(&self) -> SeriesMatrix {
        triangular_inverse(&self.hermite, &self.exps)
    }

    /// Smith form of `H⁻¹H′`, where `H`, `H′` are the Hermite bases.
    pub fn relative_position(&self, o: &Lattice) -> Result<SmithForm> {
        self.check_compatible(o)?;
        let c = self.hermite_inverse().try_mul(&o.hermite)?;
        smith(&c)
    }

    /// `d_L^{L′} = dim(L′/L∩L′) − dim(L/L∩L′)`.
    pub fn relative_dimension(&self, o: &Lattice) -> Result<i64> {
        Ok(-self.relative_position(o)?.divisors.iter().sum::<i64>())
    }

    /// Grade `d_L^{L′}` and the leading coefficient of `det(B⁻¹B′)` for the
    /// stored bases.
    pub fn relative_determinant(&self, o: &Lattice) -> Result<GradedLine> {
        let grade = self.relative_dimension(o)?;
        debug_assert_eq!(grade, self.det_val - o.det_val);
        let scalar = &o.det_lc * &self.det_lc.inv().expect("nonzero leading coefficient");
        GradedLine::new(grade, scalar)
    }

    pub fn sum(&self, o: &Lattice) -> Result<Lattice> {
        self.check_compatible(o)?;
        let n = self.rank();
        let cols: Vec<_> = self
            .hermite
            .columns()
            .into_iter()
            .chain(o.hermite.columns())
            .collect();
        let gens = SeriesMatrix::from_columns(self.ring, n, &cols);
        Lattice::from_generators(&gens, self.cutoff.min(o.cutoff))
    }

    /// `L^∨ = {w : wᵀv ∈ k[[t]] for all v ∈ L}`, with basis `(H⁻¹)ᵀ`.
    pub fn dual(&self) -> Result<Lattice> {
        Lattice::new(self.hermite_inverse().transpose())
    }

    pub fn meet(&self, o: &Lattice) -> Result<Lattice> {
        self.dual()?.sum(&o.dual()?)?.dual()
    }

    /// Membership of a column vector.
    pub fn contains(&self, v: &[LaurentSeries]) -> Result<bool> {
        if v.len() != self.rank() {
            return Err(Error::Dimension(
                "vector length differs from lattice rank".into(),
            ));
        }
        let x = self.hermite_inverse().apply(v)?;
        for xi in &x {
            if xi.terms().next().is_some_and(|(e, _)| e < 0) {
                return Ok(false);
            }
            if let Some(p) = xi.prec() {
                if p < 0 {
                    return Err(Error::PrecisionExhausted {
                        needed: 0,
                        available: p,
                    });
                }
            }
        }
        Ok(true)
    }

    pub fn is_subset(&self, o: &Lattice) -> Result<bool> {
        self.check_compatible(o)?;
        for c in self.hermite.columns() {
            if !o.contains(&c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The image `g·L`.
    pub fn apply(&self, g: &SeriesMatrix) -> Result<Lattice> {
        Lattice::new(g.try_mul(&self.basis)?)
    }

    /// Whether `t^{hi}k[[t]]ⁿ ⊆ L ⊆ t^{lo}k[[t]]ⁿ`.
    pub fn fits_window(&self, w: &WindowSpace) -> Result<bool> {
        if w.n != self.rank() || self.hermite.min_valuation() < w.lo {
            return Ok(false);
        }
        for r in 0..w.n {
            let mut v = vec![LaurentSeries::zero(self.ring); w.n];
            v[r] = LaurentSeries::t_pow(self.ring, w.hi);
            if !self.contains(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Echelon basis of `L / t^{hi}k[[t]]ⁿ`: the vectors `t^m·h_j` with
    /// pivot `t^{a_j+m}e_j` below the window top, sorted by pivot position.
    pub fn window_basis(&self, w: &WindowSpace) -> Result<Vec<(Position, Vec<Scalar>)>> {
        if !self.fits_window(w)? {
            return Err(Error::NotAdapted(format!(
                "lattice does not lie between t^{} and t^{}",
                w.hi, w.lo
            )));
        }
        let mut out = Vec::new();
        for (j, &a) in self.exps.iter().enumerate() {
            let col = self.hermite.column(j);
            for e in a..w.hi {
                let v: Vec<_> = col.iter().map(|x| x.shift(e - a)).collect();
                out.push((Position { row: j, exp: e }, w.coords(self.ring, &v)?));
            }
        }
        out.sort_by_key(|(p, _)| p.key());
        Ok(out)
    }

    /// Pivot positions of the window basis, sorted: `{(j, e) : a_j ≤ e < hi}`.
    pub fn leading_positions(&self, hi: i64) -> Vec<Position> {
        let mut out: Vec<Position> = self
            .exps
            .iter()
            .enumerate()
            .flat_map(|(j, &a)| (a..hi).map(move |e| Position { row: j, exp: e }))
            .collect();
        out.sort_by_key(|p| p.key());
        out
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.hermite)
    }
}

/// Every lattice `L` with `t^{hi}k[[t]]ⁿ ⊆ L ⊆ t^{lo}k[[t]]ⁿ` over a prime
/// field, one per column Hermite form.
pub fn window_lattices(ring: ScalarRing, w: &WindowSpace, cap: u128) -> Result<Vec<Lattice>> {
    let ScalarRing::Prime(p) = ring else {
        return Err(Error::UnsupportedRing(ring));
    };
    let n = w.n;
    if n == 0 || w.hi < w.lo {
        return Err(Error::Dimension("empty window".into()));
    }
    let span = (w.hi - w.lo + 1) as usize;
    let mut out = Vec::new();
    let mut exps = vec![w.lo; n];
    let mut seen: u128 = 0;
    loop {
        // free coefficients: h[i][j], j > i, at exponents lo..a_i
        let slots: Vec<(usize, usize, i64)> = (0..n)
            .flat_map(|i| {
                let a = exps[i];
                ((i + 1)..n).flat_map(move |j| (w.lo..a).map(move |e| (i, j, e)))
            })
            .collect();
        let count = (p as u128)
            .checked_pow(slots.len() as u32)
            .unwrap_or(u128::MAX);
        seen = seen.saturating_add(count);
        if seen > cap {
            return Err(Error::EnumerationCap { count: seen, cap });
        }
        for mut code in 0..count {
            let mut h = SeriesMatrix::zeros(ring, n, n);
            for (i, &a) in exps.iter().enumerate() {
                h.set(i, i, LaurentSeries::t_pow(ring, a));
            }
            for &(i, j, e) in &slots {
                let c = (code % p as u128) as i64;
                code /= p as u128;
                if c != 0 {
                    let x = h.get(i, j) + &LaurentSeries::monomial(ring.from_i64(c), e);
                    h.set(i, j, x);
                }
            }
            let l = Lattice::new(h)?;
            if l.fits_window(w)? {
                out.push(l);
            }
        }
        let mut r = 0;
        while r < n {
            exps[r] += 1;
            if ((exps[r] - w.lo) as usize) < span {
                break;
            }
            exps[r] = w.lo;
            r += 1;
        }
        if r == n {
            return Ok(out);
        }
    }
}

/// Smith normal form over `k[[t]]` of a square matrix over `k((t))` with
/// exact entries and nonzero determinant.
#[allow(clippy::needless_range_loop)]
pub fn smith(c: &SeriesMatrix) -> Result<SmithForm> {
    let ring = c.ring();
    check_field(ring)?;
    if !c.is_square() {
        return Err(Error::Dimension("Smith form of a non-square matrix".into()));
    }
    let n = c.rows();
    let det = c.det()?;
    let dv = det.valuation()?;
    let cutoff = dv - (n as i64 - 1) * c.min_valuation();
    if let Some(p) = c.prec() {
        if p <= cutoff {
            return Err(Error::PrecisionExhausted {
                needed: cutoff + 1,
                available: p,
            });
        }
    }
    let cut = cutoff + 1;
    let mut m: Vec<Vec<LaurentSeries>> = (0..n)
        .map(|i| (0..n).map(|j| clip(c.get(i, j), cut)).collect())
        .collect();
    let mut u = SeriesMatrix::identity(ring, n);
    let mut v = SeriesMatrix::identity(ring, n);
    let mut divisors = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if !x.is_zero() && best.is_none_or(|(b, _, _)| x.valuation_bound() < b) {
                    best = Some((x.valuation_bound(), i, j));
                }
            }
        }
        let Some((a, pi, pj)) = best else {
            return Err(Error::Precondition("matrix is singular".into()));
        };
        m.swap(k, pi);
        swap_rows(&mut u, k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        swap_cols(&mut v, k, pj);
        let w = unit_inverse(&m[k][k], a, cut - a)?;
        for row in m.iter_mut() {
            row[k] = clip(&(&row[k] * &w), cut);
        }
        for i in 0..n {
            let x = v.get(i, k) * &w;
            v.set(i, k, x);
        }
        for j in k + 1..n {
            if m[k][j].is_zero() {
                continue;
            }
            let q = m[k][j].shift(-a);
            for row in m.iter_mut() {
                row[j] = clip(&(&row[j] - &(&row[k] * &q)), cut);
            }
            for i in 0..n {
                let x = v.get(i, j) - &(v.get(i, k) * &q);
                v.set(i, j, x);
            }
        }
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let q = m[i][k].shift(-a);
            for j in 0..n {
                m[i][j] = clip(&(&m[i][j] - &(&m[k][j] * &q)), cut);
            }
            for j in 0..n {
                let x = u.get(i, j) - &(u.get(k, j) * &q);
                u.set(i, j, x);
            }
        }
        divisors.push(a);
    }
    // Pivots come out ascending; report them descending.
    let perm: Vec<usize> = (0..n).rev().collect();
    let left = SeriesMatrix::from_fn(ring, n, n, |i, j| u.get(perm[i], j).clone());
    let right = SeriesMatrix::from_fn(ring, n, n, |i, j| v.get(i, perm[j]).clone());
    divisors.reverse();
    Ok(SmithForm {
        divisors,
        left,
        right,
        input: c.clone(),
        cutoff,
    })
}

fn swap_rows(m: &mut SeriesMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let x = m.get(a, j).clone();
        let y = m.get(b, j).clone();
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

fn swap_cols(m: &mut SeriesMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m.get(i, a).clone();
        let y = m.get(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

impl SmithForm {
    /// Whether `U·C·V − diag(t^{aᵢ})` vanishes below `t^{cutoff+1}`.
    pub fn verify(&self) -> Result<bool> {
        let ring = self.input.ring();
        let d = SeriesMatrix::monomial_diagonal(ring, &self.divisors);
        let r = self
            .left
            .try_mul(&self.input)?
            .try_mul(&self.right)?
            .try_sub(&d)?;
        let ok = r.entries().all(|x| x.valuation_bound() > self.cutoff);
        Ok(ok)
    }
}
