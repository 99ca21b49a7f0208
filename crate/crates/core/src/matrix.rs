//! Matrices of Laurent series.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarRing};
use crate::series::LaurentSeries;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesMatrix {
    ring: ScalarRing,
    rows: usize,
    cols: usize,
    data: Vec<LaurentSeries>,
}

impl SeriesMatrix {
    pub fn new(
        ring: ScalarRing,
        rows: usize,
        cols: usize,
        data: Vec<LaurentSeries>,
    ) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| x.ring() != ring) {
            return Err(Error::RingMismatch {
                left: ring,
                right: bad.ring(),
            });
        }
        Ok(SeriesMatrix {
            ring,
            rows,
            cols,
            data,
        })
    }

    pub fn from_fn(
        ring: ScalarRing,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> LaurentSeries,
    ) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        SeriesMatrix {
            ring,
            rows,
            cols,
            data,
        }
    }

    pub fn from_rows(ring: ScalarRing, rows: Vec<Vec<LaurentSeries>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix literal".into()));
        }
        Self::new(ring, r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(ring: ScalarRing, rows: usize, cols: usize) -> Self {
        Self::from_fn(ring, rows, cols, |_, _| LaurentSeries::zero(ring))
    }

    pub fn identity(ring: ScalarRing, n: usize) -> Self {
        Self::diagonal(ring, &vec![LaurentSeries::one(ring); n])
    }

    pub fn diagonal(ring: ScalarRing, d: &[LaurentSeries]) -> Self {
        Self::from_fn(ring, d.len(), d.len(), |i, j| {
            if i == j {
                d[i].clone()
            } else {
                LaurentSeries::zero(ring)
            }
        })
    }

    /// `diag(t^{e₀}, …)`.
    pub fn monomial_diagonal(ring: ScalarRing, exps: &[i64]) -> Self {
        let d: Vec<_> = exps
            .iter()
            .map(|&e| LaurentSeries::t_pow(ring, e))
            .collect();
        Self::diagonal(ring, &d)
    }

    /// Identity plus `x` in position `(i, j)`, `i ≠ j`.
    pub fn elementary(ring: ScalarRing, n: usize, i: usize, j: usize, x: LaurentSeries) -> Self {
        assert_ne!(i, j, "elementary matrices are off-diagonal");
        let mut m = Self::identity(ring, n);
        m.set(i, j, x);
        m
    }

    /// Multiplication by a scalar series on `k((t))ⁿ`.
    pub fn scalar_operator(f: &LaurentSeries, n: usize) -> Self {
        Self::diagonal(f.ring(), &vec![f.clone(); n])
    }

    pub fn ring(&self) -> ScalarRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentSeries) {
        assert_eq!(v.ring(), self.ring);
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &LaurentSeries> {
        self.data.iter()
    }

    pub fn column(&self, j: usize) -> Vec<LaurentSeries> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<LaurentSeries>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn from_columns(ring: ScalarRing, rows: usize, cols: &[Vec<LaurentSeries>]) -> Self {
        Self::from_fn(ring, rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(LaurentSeries::is_exact)
    }

    /// Smallest stored exponent over all entries (`i64::MAX` for the zero matrix).
    pub fn min_valuation(&self) -> i64 {
        self.data
            .iter()
            .map(LaurentSeries::valuation_bound)
            .min()
            .unwrap_or(i64::MAX)
    }

    /// Largest stored exponent over all entries.
    pub fn max_degree(&self) -> Option<i64> {
        self.data.iter().filter_map(LaurentSeries::degree).max()
    }

    /// Coarsest precision among the entries (`None` if all exact).
    pub fn prec(&self) -> Option<i64> {
        self.data.iter().filter_map(LaurentSeries::prec).min()
    }

    pub fn map(&self, f: impl Fn(&LaurentSeries) -> LaurentSeries) -> Self {
        let data: Vec<_> = self.data.iter().map(f).collect();
        let ring = data.first().map_or(self.ring, LaurentSeries::ring);
        SeriesMatrix {
            ring,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        if self.ring != o.ring {
            return Err(Error::RingMismatch {
                left: self.ring,
                right: o.ring,
            });
        }
        let mut data = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = LaurentSeries::zero(self.ring);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.try_add(&a.try_mul(b)?)?;
                }
                data.push(acc);
            }
        }
        Ok(SeriesMatrix {
            ring: self.ring,
            rows: self.rows,
            cols: o.cols,
            data,
        })
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::Dimension("matrix shapes differ".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesMatrix {
            data,
            ..self.clone()
        })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x)
    }

    pub fn scale(&self, c: &LaurentSeries) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|x| x.try_mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesMatrix {
            data,
            ..self.clone()
        })
    }

    pub fn apply(&self, v: &[LaurentSeries]) -> Result<Vec<LaurentSeries>> {
        if v.len() != self.cols {
            return Err(Error::Dimension("vector length mismatch".into()));
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = LaurentSeries::zero(self.ring);
                for (j, x) in v.iter().enumerate() {
                    acc = acc.try_add(&self.get(i, j).try_mul(x)?)?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// Coefficients `[1, c₁, …, cₙ]` of `det(λI − A) = λⁿ + c₁λⁿ⁻¹ + … + cₙ`,
    /// computed division-free (Berkowitz).
    pub fn charpoly(&self) -> Result<Vec<LaurentSeries>> {
        if !self.is_square() {
            return Err(Error::Dimension(
                "characteristic polynomial of a non-square matrix".into(),
            ));
        }
        let ring = self.ring;
        let one = LaurentSeries::one(ring);
        let mut v = vec![one.clone()];
        for r in 0..self.rows {
            // Toeplitz column [1, -a, -R C, -R M C, …] for the leading (r+1)-block.
            let a = self.get(r, r).clone();
            let mut col: Vec<LaurentSeries> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let mut t = vec![one.clone(), -&a];
            for _ in 0..r {
                let rc = (0..r).try_fold(LaurentSeries::zero(ring), |acc, j| {
                    acc.try_add(&self.get(r, j).try_mul(&col[j])?)
                })?;
                t.push(-&rc);
                col = (0..r)
                    .map(|i| {
                        (0..r).try_fold(LaurentSeries::zero(ring), |acc, j| {
                            acc.try_add(&self.get(i, j).try_mul(&col[j])?)
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
            }
            let mut next = Vec::with_capacity(r + 2);
            for i in 0..r + 2 {
                let mut acc = LaurentSeries::zero(ring);
                for (j, vj) in v.iter().enumerate() {
                    if i >= j {
                        acc = acc.try_add(&t[i - j].try_mul(vj)?)?;
                    }
                }
                next.push(acc);
            }
            v = next;
        }
        Ok(v)
    }

    pub fn det(&self) -> Result<LaurentSeries> {
        let cp = self.charpoly()?;
        let c = cp.last().expect("nonempty").clone();
        Ok(if self.rows % 2 == 1 { -c } else { c })
    }

    /// Inverse of an exact matrix whose determinant is a monomial times
    /// `1 + nilpotent`, via the adjugate.
    pub fn exact_inverse(&self) -> Result<Self> {
        let d = self.det()?.invert()?;
        self.adjugate()?.scale(&d)
    }

    /// Inverse known to `O(t^prec)` in every entry.
    pub fn inverse_to(&self, prec: i64) -> Result<Self> {
        let adj = self.adjugate()?;
        let slack = prec - adj.min_valuation().min(0);
        let d = self.det()?.invert_to(slack)?;
        Ok(adj.scale(&d)?.map(|x| x.truncate(prec)))
    }

    pub fn adjugate(&self) -> Result<Self> {
        let n = self.rows;
        if !self.is_square() {
            return Err(Error::Dimension("adjugate of a non-square matrix".into()));
        }
        if n == 1 {
            return Ok(Self::identity(self.ring, 1));
        }
        let mut out = Self::zeros(self.ring, n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = Self::from_fn(self.ring, n - 1, n - 1, |a, b| {
                    let r = if a < j { a } else { a + 1 };
                    let c = if b < i { b } else { b + 1 };
                    self.get(r, c).clone()
                });
                let d = minor.det()?;
                out.set(i, j, if (i + j) % 2 == 0 { d } else { -d });
            }
        }
        Ok(out)
    }

    /// Parse a JSON array of rows of series-grammar strings.
    pub fn parse_json(ring: ScalarRing, text: &str) -> Result<Self> {
        Self::parse_json_in(ring, text, 't')
    }

    pub fn parse_json_in(ring: ScalarRing, text: &str, var: char) -> Result<Self> {
        let rows: Vec<Vec<String>> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix literal: {e}")))?;
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| LaurentSeries::parse_in(ring, s, var))
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::from_rows(ring, rows)
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }

    /// Entry of `(t^0)`-coefficients, for matrices over `k[[t]]`.
    pub fn constant_term(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).coeff_or_zero(0))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.to_string_rows();
        write!(
            f,
            "{}",
            serde_json::to_string(&rows).map_err(|_| fmt::Error)?
        )
    }
}
