//! Dense matrices over a [`Ring`]: determinants and inverses over any
//! commutative ring, row reduction and nullspaces over fields.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<R: Ring> {
    ring: R,
    rows: usize,
    cols: usize,
    data: Vec<R::Elem>,
}

impl<R: Ring> Matrix<R> {
    pub fn zeros(ring: &R, rows: usize, cols: usize) -> Self {
        Matrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &R, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: &R, rows: Vec<Vec<R::Elem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Matrix {
            ring: ring.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(ring: &R, rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            ring,
            rows.iter()
                .map(|r| r.iter().map(|&x| ring.from_i64(x)).collect())
                .collect(),
        )
    }

    pub fn ring(&self) -> &R {
        &self.ring
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

    pub fn get(&self, i: usize, j: usize) -> &R::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[R::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<S: Ring, F: Fn(&R::Elem) -> S::Elem>(&self, ring: &S, f: F) -> Matrix<S> {
        Matrix {
            ring: ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<S: Ring, F: Fn(&R::Elem) -> Result<S::Elem>>(&self, ring: &S, f: F) -> Result<Matrix<S>> {
        Ok(Matrix {
            ring: ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn neg(&self) -> Self {
        self.map(&self.ring, |x| self.ring.neg(x))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = &self.ring;
        let mut out = Self::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = r.zero();
                for k in 0..self.cols {
                    acc = r.add(&acc, &r.mul(self.get(i, k), other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != skip_row) {
            for j in (0..self.cols).filter(|&j| j != skip_col) {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            ring: self.ring.clone(),
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }

    /// Determinant by cofactor expansion; division-free, so valid over any
    /// commutative ring. Intended for the small matrices used here.
    pub fn det(&self) -> Result<R::Elem> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        Ok(self.det_unchecked())
    }

    fn det_unchecked(&self) -> R::Elem {
        let r = &self.ring;
        match self.rows {
            0 => r.one(),
            1 => self.get(0, 0).clone(),
            2 => r.sub(
                &r.mul(self.get(0, 0), self.get(1, 1)),
                &r.mul(self.get(0, 1), self.get(1, 0)),
            ),
            n => {
                let mut acc = r.zero();
                for j in 0..n {
                    if r.is_zero(self.get(0, j)) {
                        continue;
                    }
                    let t = r.mul(self.get(0, j), &self.minor(0, j).det_unchecked());
                    acc = if j % 2 == 0 { r.add(&acc, &t) } else { r.sub(&acc, &t) };
                }
                acc
            }
        }
    }

    pub fn adjugate(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("adjugate of a non-square matrix".into()));
        }
        let n = self.rows;
        let r = &self.ring;
        let mut adj = Self::zeros(r, n, n);
        if n == 1 {
            adj.set(0, 0, r.one());
            return Ok(adj);
        }
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det_unchecked();
                adj.set(j, i, if (i + j) % 2 == 0 { c } else { r.neg(&c) });
            }
        }
        Ok(adj)
    }

    /// Inverse over the ring itself: exists iff the determinant is a unit.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.det()?;
        let d_inv = self
            .ring
            .inv(&d)
            .ok_or_else(|| Error::MatrixNotInvertible(self.ring.to_string()))?;
        let adj = self.adjugate()?;
        Ok(adj.map(&self.ring, |x| self.ring.mul(x, &d_inv)))
    }

    /// Reduced row echelon form over a field; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let r = self.ring.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&i| !r.is_zero(self.get(i, col))) else {
                continue;
            };
            if p != row {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, row * self.cols + j);
                }
            }
            let inv = r.inv(self.get(row, col)).expect("nonzero element of a field");
            for j in col..self.cols {
                let v = r.mul(self.get(row, j), &inv);
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i == row || r.is_zero(self.get(i, col)) {
                    continue;
                }
                let factor = self.get(i, col).clone();
                for j in col..self.cols {
                    let v = r.sub(self.get(i, j), &r.mul(&factor, self.get(row, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{v : M v = 0}` over a field, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<R::Elem>> {
        let r = &self.ring;
        let mut m = self.clone();
        let pivots = m.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![r.zero(); self.cols];
            v[free] = r.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = r.neg(m.get(i, free));
            }
            out.push(v);
        }
        out
    }
}

impl<R: Ring> fmt::Display for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| self.ring.format(x))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    #[test]
    fn integer_inverse() {
        let z = RingSpec::Integers;
        let a = Matrix::from_i64(&z, &[vec![2, 1], vec![1, 1]]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(inv, Matrix::from_i64(&z, &[vec![1, -1], vec![-1, 2]]).unwrap());
        let b = Matrix::from_i64(&z, &[vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(b.inverse().unwrap_err().name(), "MatrixNotInvertible");
    }

    #[test]
    fn three_by_three() {
        let q = RingSpec::Rationals;
        let a = Matrix::from_i64(&q, &[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]).unwrap();
        assert_eq!(a.det().unwrap(), q.from_i64(18));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(&q, 3));
    }

    #[test]
    fn nullspace_over_rationals() {
        let q = RingSpec::Rationals;
        let a = Matrix::from_i64(&q, &[vec![1, 2, 3], vec![2, 4, 6]]).unwrap();
        assert_eq!(a.rank(), 1);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let col = Matrix::from_rows(&q, v.into_iter().map(|x| vec![x]).collect()).unwrap();
            assert!(a.mul(&col).unwrap().data.iter().all(|x| q.is_zero(x)));
        }
    }
}
