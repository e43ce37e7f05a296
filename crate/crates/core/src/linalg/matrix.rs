use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use super::LinalgError;
use crate::scalar::Real;

/// Dense complex matrix stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self::from_fn(rows, cols, |i, j| Complex::new(f(i, j), T::zero()))
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row slices; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn require_square(&self) -> Result<usize, LinalgError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[Complex<T>] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [Complex<T>] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Two distinct mutable columns.
    pub(crate) fn col_pair_mut(&mut self, i: usize, j: usize) -> (&mut [Complex<T>], &mut [Complex<T>]) {
        assert!(i < j);
        let r = self.rows;
        let (lo, hi) = self.data.split_at_mut(j * r);
        (&mut lo[i * r..(i + 1) * r], &mut hi[..r])
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// `self + shift·I` for square matrices.
    pub fn add_diagonal(&self, shift: Complex<T>) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] = m[(i, i)] + shift;
        }
        m
    }

    /// `diag(d) · self`
    pub fn scale_rows(&self, d: &[Complex<T>]) -> Self {
        assert_eq!(d.len(), self.rows);
        let mut m = self.clone();
        for j in 0..self.cols {
            for (x, &di) in m.col_mut(j).iter_mut().zip(d) {
                *x = *x * di;
            }
        }
        m
    }

    /// `self · diag(d)`
    pub fn scale_cols(&self, d: &[Complex<T>]) -> Self {
        assert_eq!(d.len(), self.cols);
        let mut m = self.clone();
        for (j, &dj) in d.iter().enumerate() {
            for x in m.col_mut(j) {
                *x = *x * dj;
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let out_col = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for k in 0..self.cols {
                let b = rhs[(k, j)];
                if b.re == T::zero() && b.im == T::zero() {
                    continue;
                }
                let a_col = &self.data[k * self.rows..(k + 1) * self.rows];
                for (o, &a) in out_col.iter_mut().zip(a_col) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.rows];
        for (k, &b) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.col(k)) {
                *o = *o + a * b;
            }
        }
        out
    }

    pub fn norm_fro(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        (0..self.cols).fold(T::zero(), |m, j| m.max(self.col(j).iter().map(|z| z.norm()).sum()))
    }

    /// Largest deviation `|a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.cols {
            for i in 0..self.rows.min(self.cols) {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[j * self.rows + i]
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn matmul_and_adjoint() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 1.0), c(2.0, 0.0)], vec![c(0.0, -1.0), c(3.0, 2.0)]]);
        let b = CMatrix::from_rows(&[vec![c(0.0, 1.0)], vec![c(1.0, 0.0)]]);
        let ab = &a * &b;
        assert_eq!(ab[(0, 0)], c(1.0, 1.0) * c(0.0, 1.0) + c(2.0, 0.0));
        assert_eq!(ab[(1, 0)], c(0.0, -1.0) * c(0.0, 1.0) + c(3.0, 2.0));
        let ah = a.adjoint();
        assert_eq!(ah[(0, 1)], c(0.0, 1.0));
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn diagonal_scalings() {
        let a = CMatrix::<f64>::identity(3);
        let d = [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 3.0)];
        assert_eq!(a.scale_rows(&d), CMatrix::from_diag(&d));
        assert_eq!(a.scale_cols(&d), CMatrix::from_diag(&d));
        assert!(CMatrix::from_diag(&d).hermitian_defect() > 5.9);
    }
}
