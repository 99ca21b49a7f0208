//! Dimension theories and ℤ-torsors on finite chart nerves.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::SeriesMatrix;
use crate::scalar::ScalarRing;
use crate::series::LaurentSeries;

/// An integer-valued function on lattices with `d(L′) − d(L) = d_L^{L′}`.
#[derive(Clone, Debug)]
pub struct DimensionTheory {
    anchor: Lattice,
    anchor_value: i64,
}

impl DimensionTheory {
    pub fn new(anchor: Lattice, anchor_value: i64) -> Self {
        DimensionTheory {
            anchor,
            anchor_value,
        }
    }

    /// The theory anchored at `(L, 0)` for a lattice whose stored basis has
    /// determinant of valuation zero.
    pub fn canonical(anchor: Lattice) -> Result<Self> {
        let (v, _) = anchor.basis_det();
        if v != 0 {
            return Err(Error::Precondition(format!(
                "anchor basis determinant has valuation {v}, expected 0"
            )));
        }
        Ok(DimensionTheory::new(anchor, 0))
    }

    pub fn anchor(&self) -> &Lattice {
        &self.anchor
    }

    pub fn anchor_value(&self) -> i64 {
        self.anchor_value
    }

    pub fn eval(&self, l: &Lattice) -> Result<i64> {
        Ok(self.anchor_value + self.anchor.relative_dimension(l)?)
    }
}

/// An oriented overlap component from chart `from` to chart `to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Overlap {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

/// A triple-overlap component together with the overlap components its
/// projections land in: `ij` joins `charts[0]`–`charts[1]`, `jk` joins
/// `charts[1]`–`charts[2]`, `ik` joins `charts[0]`–`charts[2]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Triple {
    pub charts: [usize; 3],
    pub ij: String,
    pub jk: String,
    pub ik: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChartNerve {
    pub charts: Vec<String>,
    pub overlaps: Vec<Overlap>,
    pub triples: Vec<Triple>,
}

impl ChartNerve {
    pub fn add_chart(&mut self, name: impl Into<String>) -> usize {
        self.charts.push(name.into());
        self.charts.len() - 1
    }

    pub fn add_overlap(&mut self, from: usize, to: usize, label: impl Into<String>) -> usize {
        self.overlaps.push(Overlap {
            from,
            to,
            label: label.into(),
        });
        self.overlaps.len() - 1
    }

    fn chart_index(&self, name: &str) -> Result<usize> {
        self.charts
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Parse(format!("unknown chart `{name}`")))
    }

    /// Index of the stored component joining `a`, `b` with this label, and
    /// its orientation relative to `a → b`.
    fn find(&self, a: usize, b: usize, label: &str) -> Option<(usize, i64)> {
        let fwd = self
            .overlaps
            .iter()
            .position(|o| o.from == a && o.to == b && o.label == label);
        if let Some(i) = fwd {
            return Some((i, 1));
        }
        self.overlaps
            .iter()
            .position(|o| o.from == b && o.to == a && o.label == label)
            .map(|i| (i, -1))
    }

    /// Unordered edges: the first stored orientation of each component.
    fn edges(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, o) in self.overlaps.iter().enumerate() {
            let dup = out.iter().any(|&j: &usize| {
                let p = &self.overlaps[j];
                p.label == o.label
                    && ((p.from == o.to && p.to == o.from) || (p.from == o.from && p.to == o.to))
            });
            if !dup {
                out.push(i);
            }
        }
        out
    }

    fn validate_shape(&self) -> Result<()> {
        for o in &self.overlaps {
            if o.from >= self.charts.len() || o.to >= self.charts.len() {
                return Err(Error::Precondition(format!(
                    "overlap `{}` references a missing chart",
                    o.label
                )));
            }
        }
        for (t, tr) in self.triples.iter().enumerate() {
            let [i, j, k] = tr.charts;
            for (a, b, l) in [(i, j, &tr.ij), (j, k, &tr.jk), (i, k, &tr.ik)] {
                if self.find(a, b, l).is_none() {
                    return Err(Error::CocycleViolation {
                        triple: t,
                        detail: format!("projection `{l}` is not a declared overlap component"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// A Čech 1-cocycle of integers on a chart nerve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZTorsor {
    pub nerve: ChartNerve,
    /// Transition `g_{from,to}` for each stored overlap orientation.
    pub transition: Vec<i64>,
}

/// Spanning-tree reduction of a torsor: chart potentials gauging tree
/// transitions to zero, and the residual transition on each non-tree edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsorClass {
    pub potentials: Vec<i64>,
    pub residuals: Vec<(String, i64)>,
}

impl TorsorClass {
    pub fn is_trivial(&self) -> bool {
        self.residuals.iter().all(|(_, r)| *r == 0)
    }

    /// The class as an integer when `H¹` of the nerve has a single
    /// generator.
    pub fn value(&self) -> Option<i64> {
        match self.residuals.as_slice() {
            [(_, r)] => Some(*r),
            [] => Some(0),
            _ => None,
        }
    }
}

impl fmt::Display for TorsorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}")?,
            None => write!(
                f,
                "{:?}",
                self.residuals.iter().map(|(_, r)| r).collect::<Vec<_>>()
            )?,
        }
        write!(f, " (potentials {:?}", self.potentials)?;
        for (l, r) in &self.residuals {
            write!(f, "; residual on {l}: {r}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverKind {
    /// The connected degree-d cyclic cover of a circle nerve.
    Cyclic,
    /// `degree` consecutive sheets of the universal cover (a tree).
    TreeTruncation,
}

impl ZTorsor {
    pub fn new(nerve: ChartNerve, transition: Vec<i64>) -> Result<Self> {
        if transition.len() != nerve.overlaps.len() {
            return Err(Error::Dimension(
                "one transition per overlap component is required".into(),
            ));
        }
        nerve.validate_shape()?;
        Ok(ZTorsor { nerve, transition })
    }

    pub fn trivial(nerve: ChartNerve) -> Self {
        let n = nerve.overlaps.len();
        ZTorsor {
            nerve,
            transition: vec![0; n],
        }
    }

    /// `g_{ab}` on the component joining `a`, `b` with the given label.
    pub fn g(&self, a: usize, b: usize, label: &str) -> Option<i64> {
        self.nerve
            .find(a, b, label)
            .map(|(i, s)| s * self.transition[i])
    }

    /// Antisymmetry across doubly-listed components and the cocycle
    /// condition on every declared triple.
    pub fn validate(&self) -> Result<()> {
        self.nerve.validate_shape()?;
        for (i, o) in self.nerve.overlaps.iter().enumerate() {
            let rev = self
                .nerve
                .overlaps
                .iter()
                .position(|p| p.from == o.to && p.to == o.from && p.label == o.label);
            if let Some(j) = rev {
                let self_loop_same = j == i;
                if !self_loop_same && self.transition[j] != -self.transition[i] {
                    return Err(Error::Property(format!(
                        "antisymmetry fails on `{}`: {} vs {}",
                        o.label, self.transition[i], self.transition[j]
                    )));
                }
            }
        }
        for (t, tr) in self.nerve.triples.iter().enumerate() {
            let [i, j, k] = tr.charts;
            let gij = self.g(i, j, &tr.ij).expect("validated shape");
            let gjk = self.g(j, k, &tr.jk).expect("validated shape");
            let gik = self.g(i, k, &tr.ik).expect("validated shape");
            if gij + gjk != gik {
                return Err(Error::CocycleViolation {
                    triple: t,
                    detail: format!("g_ij + g_jk = {} but g_ik = {gik}", gij + gjk),
                });
            }
        }
        Ok(())
    }

    /// Spanning-forest gauge fixing.
    pub fn class(&self) -> Result<TorsorClass> {
        self.validate()?;
        let (potentials, tree) = self.spanning_tree();
        let mut residuals = Vec::new();
        for e in self.nerve.edges() {
            if tree.contains(&e) {
                continue;
            }
            let o = &self.nerve.overlaps[e];
            residuals.push((
                o.label.clone(),
                self.transition[e] + potentials[o.from] - potentials[o.to],
            ));
        }
        Ok(TorsorClass {
            potentials,
            residuals,
        })
    }

    fn spanning_tree(&self) -> (Vec<i64>, Vec<usize>) {
        let nc = self.nerve.charts.len();
        let mut pot: Vec<Option<i64>> = vec![None; nc];
        let mut tree = Vec::new();
        let edges = self.nerve.edges();
        for root in 0..nc {
            if pot[root].is_some() {
                continue;
            }
            pot[root] = Some(0);
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &e in &edges {
                    let o = &self.nerve.overlaps[e];
                    let (v, g) = if o.from == u {
                        (o.to, self.transition[e])
                    } else if o.to == u {
                        (o.from, -self.transition[e])
                    } else {
                        continue;
                    };
                    if pot[v].is_none() {
                        pot[v] = Some(pot[u].unwrap() + g);
                        tree.push(e);
                        queue.push_back(v);
                    }
                }
            }
        }
        (pot.into_iter().map(Option::unwrap).collect(), tree)
    }

    /// Sum of transitions along a cycle of `(component index, forward?)` steps.
    pub fn monodromy(&self, cycle: &[(usize, bool)]) -> Result<i64> {
        let mut at: Option<usize> = None;
        let mut total = 0;
        let mut start = None;
        for &(e, fwd) in cycle {
            let o = self
                .nerve
                .overlaps
                .get(e)
                .ok_or_else(|| Error::Precondition(format!("no overlap component {e}")))?;
            let (a, b, g) = if fwd {
                (o.from, o.to, self.transition[e])
            } else {
                (o.to, o.from, -self.transition[e])
            };
            if let Some(x) = at {
                if x != a {
                    return Err(Error::Precondition(
                        "cycle steps are not consecutive".into(),
                    ));
                }
            } else {
                start = Some(a);
            }
            at = Some(b);
            total += g;
        }
        if at != start {
            return Err(Error::Precondition("path is not closed".into()));
        }
        Ok(total)
    }

    /// Add the coboundary of `h`: `g_{ij} ↦ g_{ij} + h_i − h_j`.
    pub fn gauge(&self, h: &[i64]) -> Result<ZTorsor> {
        if h.len() != self.nerve.charts.len() {
            return Err(Error::Dimension(
                "one potential per chart is required".into(),
            ));
        }
        let transition = self
            .nerve
            .overlaps
            .iter()
            .zip(&self.transition)
            .map(|(o, g)| g + h[o.from] - h[o.to])
            .collect();
        Ok(ZTorsor {
            nerve: self.nerve.clone(),
            transition,
        })
    }

    pub fn sum(&self, o: &ZTorsor) -> Result<ZTorsor> {
        if self.nerve != o.nerve {
            return Err(Error::Precondition(
                "torsors live on different nerves".into(),
            ));
        }
        Ok(ZTorsor {
            nerve: self.nerve.clone(),
            transition: self
                .transition
                .iter()
                .zip(&o.transition)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn power(&self, m: i64) -> ZTorsor {
        ZTorsor {
            nerve: self.nerve.clone(),
            transition: self.transition.iter().map(|g| m * g).collect(),
        }
    }

    /// Subdivide overlap component `e` by a new chart, with transitions
    /// `(g, 0)` on the two halves.
    pub fn refine(&self, e: usize) -> Result<ZTorsor> {
        let o = self
            .nerve
            .overlaps
            .get(e)
            .ok_or_else(|| Error::Precondition(format!("no overlap component {e}")))?
            .clone();
        let mut nerve = self.nerve.clone();
        let mid = nerve.add_chart(format!("{}.mid", o.label));
        nerve.overlaps[e] = Overlap {
            from: o.from,
            to: mid,
            label: format!("{}.a", o.label),
        };
        nerve.add_overlap(mid, o.to, format!("{}.b", o.label));
        let mut transition = self.transition.clone();
        transition.push(0);
        ZTorsor::new(nerve, transition)
    }

    /// Pull back along a cover of a circle-type nerve.
    pub fn splitting_cover(&self, degree: usize, kind: CoverKind) -> Result<ZTorsor> {
        if degree == 0 {
            return Err(Error::Precondition(
                "cover degree must be at least 1".into(),
            ));
        }
        let class = self.class()?;
        let (_, tree) = self.spanning_tree();
        let loops: Vec<usize> = self
            .nerve
            .edges()
            .into_iter()
            .filter(|e| !tree.contains(e))
            .collect();
        if loops.len() != 1
            || !self.nerve.triples.is_empty()
            || self.nerve.edges().len() != self.nerve.overlaps.len()
        {
            return Err(Error::Precondition(format!(
                "splitting covers need a circle-type nerve (found {} independent loops)",
                class.residuals.len()
            )));
        }
        let gen = loops[0];
        let nc = self.nerve.charts.len();
        let mut nerve = ChartNerve::default();
        for s in 0..degree {
            for c in &self.nerve.charts {
                nerve.add_chart(format!("{c}@{s}"));
            }
        }
        let mut transition = Vec::new();
        for s in 0..degree {
            for (e, o) in self.nerve.overlaps.iter().enumerate() {
                let target_sheet = if e == gen { s + 1 } else { s };
                let target_sheet = match kind {
                    CoverKind::Cyclic => target_sheet % degree,
                    CoverKind::TreeTruncation if target_sheet < degree => target_sheet,
                    CoverKind::TreeTruncation => continue,
                };
                nerve.add_overlap(
                    s * nc + o.from,
                    target_sheet * nc + o.to,
                    format!("{}@{s}", o.label),
                );
                transition.push(self.transition[e]);
            }
        }
        ZTorsor::new(nerve, transition)
    }

    /// Plain text form: `chart NAME`, `overlap FROM TO LABEL G` and
    /// `triple I J K IJ JK IK` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.nerve.charts {
            out.push_str(&format!("chart {c}\n"));
        }
        for (o, g) in self.nerve.overlaps.iter().zip(&self.transition) {
            let (a, b) = (&self.nerve.charts[o.from], &self.nerve.charts[o.to]);
            out.push_str(&format!("overlap {a} {b} {} {g}\n", o.label));
        }
        for t in &self.nerve.triples {
            let [i, j, k] = t.charts.map(|c| &self.nerve.charts[c]);
            out.push_str(&format!("triple {i} {j} {k} {} {} {}\n", t.ij, t.jk, t.ik));
        }
        out
    }

    pub fn parse(text: &str) -> Result<ZTorsor> {
        let mut nerve = ChartNerve::default();
        let mut transition = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let w: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: `{line}`", ln + 1));
            match w.as_slice() {
                ["chart", name] => {
                    nerve.add_chart(*name);
                }
                ["overlap", a, b, label, g] => {
                    let (a, b) = (nerve.chart_index(a)?, nerve.chart_index(b)?);
                    nerve.add_overlap(a, b, *label);
                    transition.push(g.parse().map_err(|_| bad())?);
                }
                ["triple", i, j, k, ij, jk, ik] => {
                    let charts = [
                        nerve.chart_index(i)?,
                        nerve.chart_index(j)?,
                        nerve.chart_index(k)?,
                    ];
                    nerve.triples.push(Triple {
                        charts,
                        ij: ij.to_string(),
                        jk: jk.to_string(),
                        ik: ik.to_string(),
                    });
                }
                _ => return Err(bad()),
            }
        }
        ZTorsor::new(nerve, transition)
    }
}

/// The one-chart circle nerve of a nodal curve: the normalization glued to
/// itself across the node.
pub fn nodal_nerve() -> ChartNerve {
    let mut nerve = ChartNerve::default();
    let c = nerve.add_chart("normalization");
    nerve.add_overlap(c, c, "node");
    nerve
}

/// The dimension torsor of the rank-n module on the nodal curve obtained by
/// gluing the fibres at `0` and `1` through `A(t)`: `u(1,t) = A(t)·u(0,t)`.
/// The transition across the node is the lattice jump `d_{k[[t]]ⁿ}^{A·k[[t]]ⁿ}`.
pub fn gluing_torsor(a: &SeriesMatrix) -> Result<ZTorsor> {
    let std = Lattice::standard(a.ring(), a.rows())?;
    let jump = std.relative_dimension(&std.apply(a)?)?;
    ZTorsor::new(nodal_nerve(), vec![jump])
}

/// The torsor of `M = {u ∈ k[x] ⊗ k((t)) : u(1,t) = t·u(0,t)}` over the
/// nodal ring; its class generates `H¹ ≅ ℤ`.
pub fn nodal_dim_torsor() -> ZTorsor {
    let ring = ScalarRing::Rational;
    let t = SeriesMatrix::scalar_operator(&LaurentSeries::t_pow(ring, 1), 1);
    gluing_torsor(&t).expect("multiplication by t defines a lattice jump")
}
