//! Dense matrices over a scalar ring.
//!
//! Row reduction and kernels assume a field; determinants also work over the
//! dual numbers, and [`local_echelon`] reduces over `k[ε]` with unit pivots.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarRing};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    ring: ScalarRing,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(ring: ScalarRing, rows: usize, cols: usize) -> Self {
        Mat {
            ring,
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: ScalarRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: ScalarRing, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        Mat {
            ring,
            rows: r,
            cols: c,
            data,
        }
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

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let mut out = Mat::zeros(self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).fold(self.ring.zero(), |acc, i| acc + self.get(i, i))
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(self.ring.zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Reduced row echelon form and pivot columns (field rings only).
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        assert!(self.ring.is_field(), "rref needs a field");
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero field element");
            m.scale_row(r, &inv);
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    m.axpy_row(i, r, &-f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{x : A x = 0}` (field rings only).
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.ring.zero(); self.cols];
                v[f] = self.ring.one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f);
                }
                v
            })
            .collect()
    }

    /// Determinant over a field or over dual numbers.
    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.ring.is_field() {
            return self.field_det();
        }
        let base = self.ring.base();
        let re = self.map(base, Scalar::real_part);
        let eps = self.map(base, Scalar::eps_part);
        let d0 = re.field_det();
        let d1 = if !d0.is_zero() {
            let x = re.solve_matrix(&eps).expect("invertible real part");
            &d0 * &x.trace()
        } else {
            (0..self.cols).fold(base.zero(), |acc, j| {
                let mut m = re.clone();
                for i in 0..self.rows {
                    m.set(i, j, eps.get(i, j).clone());
                }
                acc + m.field_det()
            })
        };
        self.ring.dual_number(&d0, &d1)
    }

    fn map(&self, ring: ScalarRing, f: impl Fn(&Scalar) -> Scalar) -> Mat {
        Mat {
            ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn field_det(&self) -> Scalar {
        let mut m = self.clone();
        let mut det = self.ring.one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return self.ring.zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            let inv = piv.inv().expect("nonzero field element");
            for i in c + 1..m.rows {
                if !m.get(i, c).is_zero() {
                    let f = m.get(i, c) * &inv;
                    m.axpy_row(i, c, &-f);
                }
            }
        }
        det
    }

    /// Solve `self · X = rhs` for square invertible `self` over a field.
    pub fn solve_matrix(&self, rhs: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(self.ring, n, n + rhs.cols);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                aug.set(i, n + j, rhs.get(i, j).clone());
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
            return None;
        }
        let mut x = Mat::zeros(self.ring, n, rhs.cols);
        for i in 0..n {
            for j in 0..rhs.cols {
                x.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        self.solve_matrix(&Mat::identity(self.ring, self.rows))
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, f: &Scalar) {
        for j in 0..self.cols {
            let v = self.get(r, j) * f;
            self.set(r, j, v);
        }
    }

    /// `row[dst] += f · row[src]`
    fn axpy_row(&mut self, dst: usize, src: usize, f: &Scalar) {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if !s.is_zero() {
                let v = self.get(dst, j) + &(s * f);
                self.set(dst, j, v);
            }
        }
    }
}

/// Echelon basis of the row span over a local ring (`k` or `k[ε]`), using
/// only unit pivots. Each returned row has a 1 in its pivot column and zeros
/// in the other pivot columns. Fails if the span is not a free direct summand.
pub fn local_echelon(
    ring: ScalarRing,
    rows: Vec<Vec<Scalar>>,
    width: usize,
) -> Result<(Vec<Vec<Scalar>>, Vec<usize>)> {
    let mut rows: Vec<Vec<Scalar>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut basis: Vec<Vec<Scalar>> = Vec::new();
    let mut pivots = Vec::new();
    for c in 0..width {
        let Some(p) = rows.iter().position(|r| r[c].is_unit()) else {
            continue;
        };
        let mut pr = rows.swap_remove(p);
        let inv = pr[c].inv().expect("unit pivot");
        for x in pr.iter_mut() {
            *x = &*x * &inv;
        }
        for r in rows.iter_mut().chain(basis.iter_mut()) {
            let f = r[c].clone();
            if !f.is_zero() {
                for (x, y) in r.iter_mut().zip(&pr) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        basis.push(pr);
        pivots.push(c);
    }
    if !rows.is_empty() {
        return Err(Error::NotAdapted(format!(
            "span is not a free direct summand over {ring}"
        )));
    }
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    let basis = order.iter().map(|&i| basis[i].clone()).collect();
    let pivots = order.iter().map(|&i| pivots[i]).collect();
    Ok((basis, pivots))
}
