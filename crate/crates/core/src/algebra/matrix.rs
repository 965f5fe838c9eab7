use std::fmt;

use num_traits::{Num, Signed};

use super::Scalar;
use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone + Num> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    actual: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
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

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy with row and column `k` removed.
    pub fn minor(&self, k: usize) -> Self {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != k) {
            for j in (0..self.cols).filter(|&j| j != k) {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix {
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T: Scalar> Matrix<T> {
    /// Exact determinant (fraction-free elimination for exact scalars).
    pub fn determinant(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(T::determinant(self))
    }

    /// Solves `self * x = rhs` by Gauss-Jordan elimination.
    ///
    /// Exact scalars pivot on the first nonzero entry; floating scalars use
    /// partial pivoting. A singular system reports the rank it found.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: rhs.len(),
            });
        }
        let mut a = self.clone();
        let mut b = rhs.to_vec();
        let mut rank = 0;
        let mut pivot_cols = Vec::with_capacity(n);
        for col in 0..n {
            let pivot = if T::EXACT {
                (rank..n).find(|&r| !a[(r, col)].is_zero())
            } else {
                (rank..n)
                    .filter(|&r| !a[(r, col)].is_zero())
                    .max_by(|&x, &y| {
                        a[(x, col)]
                            .abs()
                            .partial_cmp(&a[(y, col)].abs())
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
            };
            let Some(p) = pivot else { continue };
            a.swap_rows(rank, p);
            b.swap(rank, p);
            let inv = T::one() / a[(rank, col)].clone();
            for j in col..n {
                a[(rank, j)] = a[(rank, j)].clone() * inv.clone();
            }
            b[rank] = b[rank].clone() * inv;
            for r in 0..n {
                if r == rank || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for j in col..n {
                    let v = a[(rank, j)].clone() * factor.clone();
                    a[(r, j)] = a[(r, j)].clone() - v;
                }
                let v = b[rank].clone() * factor;
                b[r] = b[r].clone() - v;
            }
            pivot_cols.push(col);
            rank += 1;
        }
        if rank < n {
            return Err(Error::Singular { rank, size: n });
        }
        Ok(b)
    }
}

/// Bareiss fraction-free elimination. Every division is exact when `T` is
/// an integral domain, so integer inputs never leave the integers.
pub fn bareiss_determinant<T: Clone + Num>(m: &Matrix<T>) -> T {
    let n = m.rows;
    if n == 0 {
        return T::one();
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                Some(r) => {
                    a.swap_rows(k, r);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[(i, j)].clone() * a[(k, k)].clone() - a[(i, k)].clone() * a[(k, j)].clone();
                a[(i, j)] = v / prev.clone();
            }
        }
        prev = a[(k, k)].clone();
    }
    let det = a[(n - 1, n - 1)].clone();
    if negate {
        T::zero() - det
    } else {
        det
    }
}

/// LU with partial pivoting, for floating scalars.
pub(crate) fn lu_determinant<T: Clone + Num + Signed + PartialOrd>(m: &Matrix<T>) -> T {
    let n = m.rows;
    let mut a = m.clone();
    let mut det = T::one();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| {
                a[(x, k)]
                    .abs()
                    .partial_cmp(&a[(y, k)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(k);
        if a[(p, k)].is_zero() {
            return T::zero();
        }
        if p != k {
            a.swap_rows(k, p);
            det = T::zero() - det;
        }
        let pivot = a[(k, k)].clone();
        det = det * pivot.clone();
        for i in k + 1..n {
            let f = a[(i, k)].clone() / pivot.clone();
            for j in k..n {
                let v = f.clone() * a[(k, j)].clone();
                a[(i, j)] = a[(i, j)].clone() - v;
            }
        }
    }
    det
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.data[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}
