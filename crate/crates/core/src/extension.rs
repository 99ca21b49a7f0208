//! The canonical central extension through window compression: residues as
//! traces of commutators, commutator pairings of commuting operators, the
//! dual-number commutator on `R((t))/L_g`, and lifts of operators with
//! their determinant-defect cocycle.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{local_echelon, Mat};
use crate::matrix::SeriesMatrix;
use crate::scalar::{Scalar, ScalarRing};
use crate::series::LaurentSeries;
use crate::window::{shuffle_sign, Position, WindowSpace};

/// Orientation `σ` relating [`residue_trace`] to [`LaurentSeries::residue_coeff`].
pub const RESIDUE_ORIENTATION: i64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueTrace {
    pub value: Scalar,
    /// Half-widths `N` of the two windows `t^{-N}k[[t]]/t^{N}k[[t]]` used.
    pub windows: [i64; 2],
}

fn exact_support(f: &LaurentSeries) -> Result<i64> {
    if !f.is_exact() {
        return Err(Error::Precondition(
            "residue_trace needs Laurent polynomials".into(),
        ));
    }
    Ok(f.terms().map(|(e, _)| e.abs()).max().unwrap_or(0))
}

/// Matrix of `f` on the window, columns indexed by window positions. With
/// `project`, terms below the window floor are dropped (the compression
/// `PfP`); otherwise they are an error.
fn compress(f: &SeriesMatrix, w: &WindowSpace, project: bool) -> Result<Mat> {
    let ring = f.ring();
    let mut m = Mat::zeros(ring, w.dim(), w.dim());
    for (j, p) in w.positions().into_iter().enumerate() {
        let mut v = vec![LaurentSeries::zero(ring); w.n];
        v[p.row] = LaurentSeries::t_pow(ring, p.exp);
        let mut image = f.apply(&v)?;
        if project {
            for x in &mut image {
                *x = LaurentSeries::new(
                    ring,
                    x.terms()
                        .filter(|(e, _)| *e >= w.lo)
                        .map(|(e, c)| (e, c.clone())),
                    x.prec(),
                );
            }
        }
        let image = w.coords(ring, &image)?;
        for (i, c) in image.into_iter().enumerate() {
            m.set(i, j, c);
        }
    }
    Ok(m)
}

fn trace_at(f: &LaurentSeries, g: &LaurentSeries, half: i64) -> Result<Scalar> {
    let w = WindowSpace::symmetric(1, half);
    let fm = compress(&SeriesMatrix::scalar_operator(f, 1), &w, true)?;
    let gm = compress(&SeriesMatrix::scalar_operator(g, 1), &w, true)?;
    let plus: Vec<usize> = (0..w.dim()).filter(|&i| w.position(i).exp >= 0).collect();
    let minus: Vec<usize> = (0..w.dim()).filter(|&i| w.position(i).exp < 0).collect();
    // tr(G₊₋F₋₊ − F₊₋G₋₊): the boundary term of tr[P₊fP₊, P₊gP₊] at the
    // window floor cancels, leaving the contribution of the split at t⁰
    let mut acc = f.ring().zero();
    for &a in &plus {
        for &b in &minus {
            acc += &(gm.get(a, b) * fm.get(b, a));
            acc -= &(fm.get(a, b) * gm.get(b, a));
        }
    }
    Ok(acc)
}

/// Trace over `t^{-N}k[[t]]/t^{N}k[[t]]` of the commutator of the
/// compressions of `f` and `g` to `k[[t]]`, computed at `N` and `N + 1`.
pub fn residue_trace(
    f: &LaurentSeries,
    g: &LaurentSeries,
    window: Option<i64>,
) -> Result<ResidueTrace> {
    if f.ring() != g.ring() {
        return Err(Error::RingMismatch {
            left: f.ring(),
            right: g.ring(),
        });
    }
    let need = exact_support(f)?.max(exact_support(g)?).max(1);
    let half = window.unwrap_or(need);
    if half < need {
        return Err(Error::NotAdapted(format!(
            "window half-width {half} is below the exponent support {need}"
        )));
    }
    let a = trace_at(f, g, half)?;
    let b = trace_at(f, g, half + 1)?;
    if a != b {
        return Err(Error::Unstable(format!(
            "trace {a} at N = {half}, {b} at N = {}",
            half + 1
        )));
    }
    Ok(ResidueTrace {
        value: a,
        windows: [half, half + 1],
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pairing {
    pub value: Scalar,
    /// The `(lo, hi)` exponents of the two ambient windows used.
    pub windows: [(i64, i64); 2],
}

/// Whether `g ∈ GL_n(R[[t]])`.
pub fn preserves_standard(g: &SeriesMatrix) -> Result<bool> {
    if !g.is_square() || g.min_valuation() < 0 {
        return Ok(false);
    }
    let d = g.det()?;
    if d.valuation_bound() < 0 {
        return Ok(false);
    }
    Ok(d.coeff(0)?.is_unit())
}

/// `det(a | bΛ/t^{hi}) / det(a | Λ/t^{hi})` with `Λ = t^{base}R[[t]]ⁿ`,
/// both determinants read off the ambient window `t^{lo}/t^{hi}`.
fn pairing_at(a: &SeriesMatrix, b: &SeriesMatrix, base: i64, lo: i64, hi: i64) -> Result<Scalar> {
    let ring = a.ring();
    let n = a.rows();
    let w = WindowSpace { n, lo, hi };
    let ax = compress(a, &w, false)?;
    let mut gens = Vec::new();
    let bmin = b.min_valuation();
    for r in 0..n {
        for e in base..(hi - bmin.min(0)).max(base) {
            let mut v = vec![LaurentSeries::zero(ring); n];
            v[r] = LaurentSeries::t_pow(ring, e);
            gens.push(w.coords(ring, &b.apply(&v)?)?);
        }
    }
    let (ybasis, pivots) = local_echelon(ring, gens, w.dim())?;
    let free: Vec<usize> = (0..w.dim()).filter(|c| !pivots.contains(c)).collect();
    let mut quot = Mat::zeros(ring, free.len(), free.len());
    for (j, &q) in free.iter().enumerate() {
        let mut v: Vec<Scalar> = (0..w.dim()).map(|i| ax.get(i, q).clone()).collect();
        for (y, &p) in ybasis.iter().zip(&pivots) {
            let f = v[p].clone();
            if !f.is_zero() {
                for (x, yi) in v.iter_mut().zip(y) {
                    *x = &*x - &(&f * yi);
                }
            }
        }
        for (i, &qi) in free.iter().enumerate() {
            quot.set(i, j, v[qi].clone());
        }
    }
    let inner: Vec<usize> = (0..w.dim())
        .filter(|&i| w.position(i).exp >= base)
        .collect();
    let mut lam = Mat::zeros(ring, inner.len(), inner.len());
    for (i, &x) in inner.iter().enumerate() {
        for (j, &y) in inner.iter().enumerate() {
            lam.set(i, j, ax.get(x, y).clone());
        }
    }
    let det_x = ax.det();
    let det_q = quot.det();
    let det_l = lam.det();
    let unit = |d: &Scalar, what: &str| {
        d.inv()
            .ok_or_else(|| Error::Precondition(format!("determinant on {what} is not a unit")))
    };
    Ok(&(&det_x * &unit(&det_q, "the window quotient")?) * &unit(&det_l, "the base lattice")?)
}

/// Pairing of `a ∈ GL_n(R[[t]])` with a commuting invertible `b`, relative to
/// `Λ = t^{base}R[[t]]ⁿ`; computed on two nested ambient windows.
fn pairing_core(a: &SeriesMatrix, b: &SeriesMatrix, base: i64) -> Result<Pairing> {
    let binv = b.inverse_to(base + 1)?;
    let lo = base.min(base + b.min_valuation());
    let hi = (base + 1).max(base - binv.min_valuation());
    let v1 = pairing_at(a, b, base, lo, hi)?;
    let v2 = pairing_at(a, b, base, lo - 1, hi + 1)?;
    if v1 != v2 {
        return Err(Error::Unstable(format!(
            "pairing {v1} on window ({lo}, {hi}) but {v2} on ({}, {})",
            lo - 1,
            hi + 1
        )));
    }
    Ok(Pairing {
        value: v1,
        windows: [(lo, hi), (lo - 1, hi + 1)],
    })
}

/// The commutator pairing `⟨g, h⟩` of commuting operators on `R((t))ⁿ`, one of
/// which lies in `GL_n(R[[t]])`: for `g` preserving `Λ = R[[t]]ⁿ` it is
/// `det(g | hΛ/t^M Λ) / det(g | Λ/t^M Λ)`, and `⟨h, g⟩ = ⟨g, h⟩⁻¹`.
pub fn commutator_pairing(g: &SeriesMatrix, h: &SeriesMatrix) -> Result<Pairing> {
    if g.ring() != h.ring() {
        return Err(Error::RingMismatch {
            left: g.ring(),
            right: h.ring(),
        });
    }
    if !g.is_square() || !h.is_square() || g.rows() != h.rows() {
        return Err(Error::Dimension(
            "pairing needs square operators of equal size".into(),
        ));
    }
    let gh = g.try_mul(h)?;
    let hg = h.try_mul(g)?;
    if !gh.try_sub(&hg)?.entries().all(LaurentSeries::is_known_zero) {
        return Err(Error::Precondition("operators do not commute".into()));
    }
    if preserves_standard(g)? {
        pairing_core(g, h, 0)
    } else if preserves_standard(h)? {
        let p = pairing_core(h, g, 0)?;
        Ok(Pairing {
            value: p.value.inv().expect("pairings are units"),
            ..p
        })
    } else {
        Err(Error::Precondition(
            "neither operator lies in GL_n(R[[t]]); no adapted window".into(),
        ))
    }
}

/// `⟨f, g⟩` for multiplication operators on `R((t))`.
pub fn symbol(f: &LaurentSeries, g: &LaurentSeries) -> Result<Pairing> {
    commutator_pairing(
        &SeriesMatrix::scalar_operator(f, 1),
        &SeriesMatrix::scalar_operator(g, 1),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BeilinsonReport {
    pub commutator: Scalar,
    /// `res(u·dg)`.
    pub residue: Scalar,
    /// `res(g·du/u)`.
    pub dlog_residue: Scalar,
    /// `N` in `t^{-N}R[[t]] ⊇ L_g`, for the two quotient windows.
    pub quotient_windows: [i64; 2],
    pub windows: [(i64, i64); 2],
}

impl BeilinsonReport {
    /// `σ′` with `commutator = 1 + σ′·cε·res(u·dg)`, if one exists.
    pub fn udg_sign(&self, c: &Scalar) -> Option<i64> {
        let base = self.residue.ring();
        let eps = self.commutator.eps_part();
        let target = &c.lift_to(base) * &self.residue;
        if !self.commutator.real_part().is_one() {
            return None;
        }
        if target.is_zero() {
            return eps.is_zero().then_some(1);
        }
        if eps == target {
            Some(1)
        } else if eps == -target {
            Some(-1)
        } else {
            None
        }
    }
}

/// The commutator of `u ∈ k[[t]]ˣ` and `1 + cεg` on `M = R((t))/L_g`,
/// `R = k[ε]/(ε²)`, `L_g = R[[t]] + εgR[[t]]`.
///
/// Both operators preserve `L_g`. The windows are the images in `M` of
/// `t^{-N}R[[t]] ⊇ L_g`; determinants on them are differences of
/// determinants on `t^{-N}R[[t]]/t^M` and `L_g/t^M`, and the latter cancel
/// in the commutator.
pub fn beilinson_commutator(
    u: &LaurentSeries,
    g: &LaurentSeries,
    c: &Scalar,
    window: Option<i64>,
) -> Result<BeilinsonReport> {
    let k = u.ring();
    if !k.is_field() || g.ring() != k || c.ring() != k {
        return Err(Error::Precondition(
            "u, g and c must live over the same field".into(),
        ));
    }
    if !g.is_exact() {
        return Err(Error::Precondition("g must be a Laurent polynomial".into()));
    }
    if u.valuation()? != 0 {
        return Err(Error::NotUnit);
    }
    let r = k.dual();
    let s = if g.is_zero() {
        0
    } else {
        (-g.valuation()?).max(0)
    };
    let n0 = window.unwrap_or(s).max(s);
    let uu = SeriesMatrix::scalar_operator(&u.lift_to(r), 1);
    let h = LaurentSeries::one(r).try_add(&g.lift_to(r).scale(&(&r.epsilon() * &c.lift_to(r))))?;
    let hh = SeriesMatrix::scalar_operator(&h, 1);
    let p1 = pairing_core(&uu, &hh, -n0)?;
    let p2 = pairing_core(&uu, &hh, -n0 - 1)?;
    if p1.value != p2.value {
        return Err(Error::Unstable(format!(
            "quotient windows N = {n0} and {} disagree: {} vs {}",
            n0 + 1,
            p1.value,
            p2.value
        )));
    }
    let residue = LaurentSeries::residue_coeff(u, g)?;
    let prec = u.prec().unwrap_or(i64::MAX).min(s.saturating_add(2));
    let du_u = u.derivative().try_mul(&u.invert_to(prec)?)?;
    let dlog_residue = g.try_mul(&du_u)?.coeff(-1)?;
    Ok(BeilinsonReport {
        commutator: p1.value,
        residue,
        dlog_residue,
        quotient_windows: [n0, n0 + 1],
        windows: p1.windows,
    })
}

/// A lift `(g, μ)` of an operator to the central extension anchored at a
/// lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub op: SeriesMatrix,
    pub mu: Scalar,
}

/// Lifts over a field, anchored at `L₀`.
#[derive(Clone, Debug)]
pub struct CentralExtension {
    anchor: Lattice,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingReport {
    /// `δ(gᵢ, gⱼ)`.
    pub table: Vec<Vec<Scalar>>,
    /// Name of the gauge trivializing the table, if one was found.
    pub gauge: Option<&'static str>,
    /// A commuting pair with `δ(g,h) ≠ δ(h,g)`, with the commutator.
    pub obstruction: Option<(usize, usize, Scalar)>,
}

impl SplittingReport {
    pub fn splits(&self) -> bool {
        self.gauge.is_some()
    }
}

impl CentralExtension {
    pub fn new(anchor: Lattice) -> Self {
        CentralExtension { anchor }
    }

    pub fn standard(ring: ScalarRing, n: usize) -> Result<Self> {
        Ok(CentralExtension::new(Lattice::standard(ring, n)?))
    }

    pub fn anchor(&self) -> &Lattice {
        &self.anchor
    }

    /// `c_g(L)`: the transport `g_*: Δ(L) → Δ(gL)` on canonical generators,
    /// normalised by `g_*ω(B) = ω(gB)` for the deep lattice `B = t^K k[[t]]ⁿ`
    /// lying in both `L` and `L₀`.
    pub fn transport(&self, g: &SeriesMatrix, l: &Lattice) -> Result<Scalar> {
        self.transport_at(g, l, l.cutoff().max(self.anchor.cutoff()))
    }

    fn transport_at(&self, g: &SeriesMatrix, l: &Lattice, depth: i64) -> Result<Scalar> {
        let ring = l.ring();
        let n = l.rank();
        let gl = l.apply(g)?;
        let b = Lattice::monomial(ring, &vec![depth; n])?;
        let gb = b.apply(g)?;
        let lo = [
            l.hermite().min_valuation(),
            gl.hermite().min_valuation(),
            gb.hermite().min_valuation(),
            depth,
        ]
        .into_iter()
        .min()
        .expect("nonempty");
        let hi = gb.cutoff().max(gl.cutoff()).max(depth) + 1;
        let w = WindowSpace { n, lo, hi };
        let inner = b.leading_positions(hi);
        let mut rows: Vec<Vec<Scalar>> = gb.window_basis(&w)?.into_iter().map(|(_, v)| v).collect();
        let mut quotient: Vec<Position> = Vec::new();
        for (p, v) in l.window_basis(&w)? {
            if inner.contains(&p) {
                continue;
            }
            quotient.push(p);
            rows.push(w.coords(ring, &g.apply(&w.vector(ring, &v))?)?);
        }
        let cols: Vec<usize> = gl
            .leading_positions(hi)
            .into_iter()
            .map(|p| w.index(p))
            .collect();
        if cols.len() != rows.len() {
            return Err(Error::Property(
                "transported wedge has the wrong degree".into(),
            ));
        }
        let minor = Mat::from_rows(
            ring,
            rows.iter()
                .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
                .collect(),
        );
        let sign = shuffle_sign(&inner, &quotient);
        Ok(&minor.det() * &ring.from_i64(sign))
    }

    /// `δ(g,h) = c_g(hL₀) / c_g(L₀)`.
    pub fn cocycle(&self, g: &SeriesMatrix, h: &SeriesMatrix) -> Result<Scalar> {
        let hl = self.anchor.apply(h)?;
        let depth = hl.cutoff().max(self.anchor.cutoff());
        let num = self.transport_at(g, &hl, depth)?;
        let den = self.transport_at(g, &self.anchor, depth)?;
        den.inv()
            .map(|d| &num * &d)
            .ok_or_else(|| Error::Precondition("operator is not invertible on the anchor".into()))
    }

    pub fn identity(&self) -> Lift {
        Lift {
            op: SeriesMatrix::identity(self.anchor.ring(), self.anchor.rank()),
            mu: self.anchor.ring().one(),
        }
    }

    pub fn lift(&self, g: &SeriesMatrix) -> Lift {
        Lift {
            op: g.clone(),
            mu: self.anchor.ring().one(),
        }
    }

    /// `(g, μ)(h, ν) = (gh, μν·δ(g,h))`.
    pub fn multiply(&self, a: &Lift, b: &Lift) -> Result<Lift> {
        let d = self.cocycle(&a.op, &b.op)?;
        Ok(Lift {
            op: a.op.try_mul(&b.op)?,
            mu: &(&a.mu * &b.mu) * &d,
        })
    }

    /// Commutator of the lifts of commuting `g`, `h`: `δ(g,h)/δ(h,g)`.
    pub fn lift_commutator(&self, g: &SeriesMatrix, h: &SeriesMatrix) -> Result<Scalar> {
        let a = self.cocycle(g, h)?;
        let b = self.cocycle(h, g)?;
        Ok(&a * &b.inv().expect("cocycle values are units"))
    }

    /// Search for a gauge `φ` with `δ(g,h) = φ(gh)/(φ(g)φ(h))` on the family,
    /// trying `φ = 1` and `φ(g) = c_g(L₀)^{±1}`.
    pub fn splitting_check(&self, family: &[SeriesMatrix]) -> Result<SplittingReport> {
        let ring = self.anchor.ring();
        let mut table = Vec::new();
        for g in family {
            let mut row = Vec::new();
            for h in family {
                row.push(self.cocycle(g, h)?);
            }
            table.push(row);
        }
        let mut obstruction = None;
        'outer: for i in 0..family.len() {
            for j in (i + 1)..family.len() {
                let gh = family[i].try_mul(&family[j])?;
                let hg = family[j].try_mul(&family[i])?;
                if gh == hg && table[i][j] != table[j][i] {
                    let comm = &table[i][j] * &table[j][i].inv().expect("unit");
                    obstruction = Some((i, j, comm));
                    break 'outer;
                }
            }
        }
        let candidates: [(&'static str, i64); 3] =
            [("trivial", 0), ("transport", 1), ("inverse transport", -1)];
        let mut gauge = None;
        if obstruction.is_none() {
            'cand: for (name, power) in candidates {
                let phi = |g: &SeriesMatrix| -> Result<Scalar> {
                    if power == 0 {
                        return Ok(ring.one());
                    }
                    let c = self.transport(g, &self.anchor)?;
                    Ok(if power > 0 { c } else { c.inv().expect("unit") })
                };
                for (i, g) in family.iter().enumerate() {
                    for (j, h) in family.iter().enumerate() {
                        let lhs = &table[i][j] * &(&phi(g)? * &phi(h)?);
                        if lhs != phi(&g.try_mul(h)?)? {
                            continue 'cand;
                        }
                    }
                }
                gauge = Some(name);
                break;
            }
        }
        Ok(SplittingReport {
            table,
            gauge,
            obstruction,
        })
    }
}
