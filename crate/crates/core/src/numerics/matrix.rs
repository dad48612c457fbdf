use std::fmt;

use super::bigfloat::BigFloat;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Scalar types the dense linear algebra below works over.
pub trait Field: Clone + PartialEq + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `|self| > |other|`, used for pivot selection.
    fn magnitude_gt(&self, other: &Self) -> bool;
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn magnitude_gt(&self, other: &Self) -> bool {
        self.abs() > other.abs()
    }
}

impl Field for BigFloat {
    fn zero_like(&self) -> Self {
        BigFloat::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        BigFloat::one(self.prec())
    }
    fn is_zero(&self) -> bool {
        BigFloat::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn magnitude_gt(&self, other: &Self) -> bool {
        self.abs() > other.abs()
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    /// Builds a matrix from rows of equal length. `cols` is used when `rows`
    /// is empty.
    pub fn from_rows_with_cols(rows: Vec<Vec<T>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(cols, Vec::len);
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::from_rows_with_cols(rows, 0)
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<Matrix<U>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// Places `blocks` along the diagonal, `zero` elsewhere.
    pub fn block_diag(blocks: &[&Matrix<T>], zero: T) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::filled(rows, cols, zero);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(parts: &[&Matrix<T>]) -> Result<Self> {
        let cols = parts.first().map_or(0, |p| p.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            if p.cols != cols {
                return Err(Error::DimensionMismatch(format!(
                    "vstack of {} and {} columns",
                    cols, p.cols
                )));
            }
            data.extend(p.data.iter().cloned());
            rows += p.rows;
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Places matrices with equal row counts side by side.
    pub fn hstack(parts: &[&Matrix<T>]) -> Result<Self> {
        let t: Vec<Matrix<T>> = parts.iter().map(|p| p.transpose()).collect();
        let refs: Vec<&Matrix<T>> = t.iter().collect();
        Ok(Matrix::vstack(&refs)?.transpose())
    }
}

impl<T: Field> Matrix<T> {
    pub fn identity(n: usize, one: &T) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { one.one_like() } else { one.zero_like() })
    }

    pub fn mul(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: Option<T> = None;
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let p = a.mul(b);
                    acc = Some(match acc {
                        Some(s) => s.add(&p),
                        None => p,
                    });
                }
                out.push(acc.unwrap_or_else(|| self.zero_for(other)));
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data: out,
        })
    }

    fn zero_for(&self, other: &Matrix<T>) -> T {
        self.data
            .first()
            .or(other.data.first())
            .expect("zero of an empty product")
            .zero_like()
    }

    /// `self * v`; zero entries are skipped.
    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc: Option<T> = None;
            for (a, b) in self.row(i).iter().zip(v) {
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let p = a.mul(b);
                acc = Some(match acc {
                    Some(s) => s.add(&p),
                    None => p,
                });
            }
            out.push(acc.unwrap_or_else(|| self.zero_for(self)));
        }
        Ok(out)
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{what} of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    /// Gaussian elimination on `[self | rhs]`. Returns the determinant and the
    /// reduced right-hand side (`self^-1 * rhs`), or an error if singular.
    fn eliminate(&self, rhs: Option<&Matrix<T>>) -> (T, Option<Matrix<T>>) {
        let n = self.rows;
        let one = self.data[0].one_like();
        let mut a = self.clone();
        let mut b = rhs.cloned();
        let mut det = one.clone();
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a.get(r, col).magnitude_gt(a.get(piv, col)) {
                    piv = r;
                }
            }
            if a.get(piv, col).is_zero() {
                return (one.zero_like(), None);
            }
            if piv != col {
                a.swap_rows(piv, col);
                if let Some(b) = b.as_mut() {
                    b.swap_rows(piv, col);
                }
                det = det.neg();
            }
            let p = a.get(col, col).clone();
            det = det.mul(&p);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).div(&p);
                for c in col..n {
                    let v = a.get(r, c).sub(&f.mul(a.get(col, c)));
                    a.set(r, c, v);
                }
                if let Some(b) = b.as_mut() {
                    for c in 0..b.cols {
                        let v = b.get(r, c).sub(&f.mul(b.get(col, c)));
                        b.set(r, c, v);
                    }
                }
            }
        }
        if let Some(b) = b.as_mut() {
            for r in 0..n {
                let p = a.get(r, r).clone();
                for c in 0..b.cols {
                    let v = b.get(r, c).div(&p);
                    b.set(r, c, v);
                }
            }
        }
        (det, b)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub fn det(&self) -> Result<T> {
        self.require_square("determinant")?;
        if self.rows == 0 {
            return Err(Error::DimensionMismatch("determinant of an empty matrix".into()));
        }
        Ok(self.eliminate(None).0)
    }

    pub fn inverse(&self) -> Result<Matrix<T>> {
        self.require_square("inverse")?;
        if self.rows == 0 {
            return Ok(self.clone());
        }
        let id = Matrix::identity(self.rows, &self.data[0]);
        self.solve(&id)
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        self.require_square("solve")?;
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve with {} equations and a right-hand side of {} rows",
                self.rows, rhs.rows
            )));
        }
        if self.rows == 0 {
            return Ok(rhs.clone());
        }
        match self.eliminate(Some(rhs)) {
            (_, Some(x)) => Ok(x),
            (det, None) => Err(Error::Singular {
                det: det.to_string(),
            }),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &self.data)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::ratio(p, q)
    }

    fn rm(rows: &[&[(i64, i64)]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|row| row.iter().map(|&(p, q)| r(p, q)).collect()).collect()).unwrap()
    }

    #[test]
    fn two_by_two_inverse_is_exact() {
        let m = rm(&[&[(2, 1), (1, 1)], &[(1, 1), (2, 1)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv, rm(&[&[(2, 3), (-1, 3)], &[(-1, 3), (2, 3)]]));
        assert_eq!(m.det().unwrap(), r(3, 1));
    }

    #[test]
    fn block_determinant() {
        // 0.2 on the diagonal, 0.1 elsewhere: det = 0.1^2 * 3
        let c = rm(&[&[(1, 5), (1, 10)], &[(1, 10), (1, 5)]]);
        assert_eq!(c.det().unwrap(), r(3, 100));
    }

    #[test]
    fn singular_reports_determinant() {
        let m = rm(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]);
        assert!(matches!(m.inverse(), Err(Error::Singular { det }) if det == "0"));
    }

    #[test]
    fn dimension_errors() {
        assert!(Matrix::from_rows(vec![vec![r(1, 1)], vec![]]).is_err());
        let a = rm(&[&[(1, 1), (2, 1)]]);
        assert!(a.mul(&a).is_err());
        assert!(a.mul_vec(&[r(1, 1)]).is_err());
        assert!(a.inverse().is_err());
    }

    #[test]
    fn block_diag_and_stack() {
        let a = rm(&[&[(1, 1)]]);
        let b = rm(&[&[(2, 1), (3, 1)]]);
        let d = Matrix::block_diag(&[&a, &b], Rational::zero());
        assert_eq!(d, rm(&[&[(1, 1), (0, 1), (0, 1)], &[(0, 1), (2, 1), (3, 1)]]));
        let v = Matrix::vstack(&[&b, &b]).unwrap();
        assert_eq!(v.rows(), 2);
        let h = Matrix::hstack(&[&a, &b]).unwrap();
        assert_eq!(h, rm(&[&[(1, 1), (2, 1), (3, 1)]]));
    }

    #[test]
    fn float_inverse_times_matrix_is_near_identity() {
        let m = Matrix::from_rows(vec![
            vec![BigFloat::from_f64(4.0, 80), BigFloat::from_f64(1.0, 80)],
            vec![BigFloat::from_f64(2.0, 80), BigFloat::from_f64(3.0, 80)],
        ])
        .unwrap();
        let p = m.mul(&m.inverse().unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p.get(i, j).to_f64() - want).abs() < 1e-20);
            }
        }
    }
}
