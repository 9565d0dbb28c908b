//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

/// A dense matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, p);
            for r in 0..m.rows {
                if r != rank && !m.get(r, col).is_zero() {
                    let f = m.get(r, col) / m.get(rank, col);
                    m.axpy_row(r, rank, &f);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn determinant(&self) -> Result<Rational> {
        if self.rows != self.cols {
            return Err(Error::Singular(format!("{}x{} matrix has no determinant", self.rows, self.cols)));
        }
        let mut m = self.clone();
        let mut det = Rational::one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            det *= m.get(col, col);
            for r in col + 1..m.rows {
                if !m.get(r, col).is_zero() {
                    let f = m.get(r, col) / m.get(col, col);
                    m.axpy_row(r, col, &f);
                }
            }
        }
        Ok(det)
    }

    /// Solves `A x = b` for square nonsingular `A`.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        if self.rows != self.cols {
            return Err(Error::Singular(format!(
                "system is {}x{}, expected square",
                self.rows, self.cols
            )));
        }
        if b.len() != self.rows {
            return Err(Error::Singular("right-hand side has wrong length".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Err(Error::Singular(format!("no pivot in column {col} of {n}x{n} system")));
            };
            m.swap_rows(p, col);
            rhs.swap(p, col);
            let piv = m.get(col, col).clone();
            for r in 0..n {
                if r != col && !m.get(r, col).is_zero() {
                    let f = m.get(r, col) / &piv;
                    m.axpy_row(r, col, &f);
                    let d = &f * &rhs[col];
                    rhs[r] -= d;
                }
            }
        }
        Ok((0..n).map(|i| &rhs[i] / m.get(i, i)).collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// row[r] -= f * row[s]
    fn axpy_row(&mut self, r: usize, s: usize, f: &Rational) {
        for j in 0..self.cols {
            let v = f * self.get(s, j);
            if !v.is_zero() {
                self.data[r * self.cols + j] -= v;
            }
        }
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &x[j]).sum())
            .collect()
    }
}
