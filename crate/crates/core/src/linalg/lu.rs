use num_complex::Complex;

use super::{CMatrix, LinalgError};
use crate::scalar::Real;

/// LU factorization with partial (row) pivoting, `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    factors: CMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &CMatrix<T>) -> Result<Self, LinalgError> {
        let n = a.require_square()?;
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = T::zero();
            for i in k..n {
                let v = f[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() {
                return Err(LinalgError::Singular { column: k });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = f[(k, j)];
                    f[(k, j)] = f[(p, j)];
                    f[(p, j)] = tmp;
                }
            }
            let pivot_inv = f[(k, k)].inv();
            for x in &mut f.col_mut(k)[k + 1..] {
                *x = *x * pivot_inv;
            }
            for j in k + 1..n {
                let akj = f[(k, j)];
                if akj.re == T::zero() && akj.im == T::zero() {
                    continue;
                }
                let (lk, cj) = f.col_pair_mut(k, j);
                for (x, &l) in cj[k + 1..].iter_mut().zip(&lk[k + 1..]) {
                    *x = *x - l * akj;
                }
            }
        }
        Ok(Lu { factors: f, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve_in_place(&self, b: &mut [Complex<T>]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let permuted: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        b.copy_from_slice(&permuted);
        // forward substitution with unit lower factor
        for k in 0..n {
            let bk = b[k];
            if bk.re == T::zero() && bk.im == T::zero() {
                continue;
            }
            for (x, &l) in b[k + 1..].iter_mut().zip(&self.factors.col(k)[k + 1..]) {
                *x = *x - l * bk;
            }
        }
        for k in (0..n).rev() {
            b[k] = b[k] / self.factors[(k, k)];
            let bk = b[k];
            for (x, &u) in b[..k].iter_mut().zip(&self.factors.col(k)[..k]) {
                *x = *x - u * bk;
            }
        }
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_matrix(&self, b: &CMatrix<T>) -> CMatrix<T> {
        let mut x = b.clone();
        for j in 0..b.cols() {
            self.solve_in_place(x.col_mut(j));
        }
        x
    }

    pub fn inverse(&self) -> CMatrix<T> {
        self.solve_matrix(&CMatrix::identity(self.dim()))
    }

    /// Smallest pivot modulus; a cheap singularity indicator.
    pub fn min_pivot(&self) -> T {
        (0..self.dim()).fold(T::infinity(), |m, k| m.min(self.factors[(k, k)].norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_of_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20;
        let a = CMatrix::from_fn(n, n, |_, _| {
            Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let inv = Lu::new(&a).unwrap().inverse();
        let prod = &a * &inv;
        let defect = (&prod - &CMatrix::identity(n)).max_abs();
        assert!(defect < 1e-12, "defect {defect}");
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = CMatrix::<f64>::from_real_fn(3, 3, |i, _| i as f64);
        assert!(matches!(Lu::new(&a), Err(LinalgError::Singular { .. })));
    }
}
