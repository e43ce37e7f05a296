use num_complex::Complex;

use super::{CMatrix, LinalgError};
use crate::scalar::Real;

/// Householder vector for `x`: returns `(v, tau, |beta|)` with
/// `(I - tau v v*) x = beta e_1`. `x` is overwritten by `v`.
fn householder<T: Real>(x: &mut [Complex<T>]) -> (T, T) {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if norm == T::zero() {
        return (T::zero(), T::zero());
    }
    let x0 = x[0];
    let phase = if x0.norm() == T::zero() {
        Complex::new(T::one(), T::zero())
    } else {
        x0 / x0.norm()
    };
    let beta = -phase * norm;
    x[0] = x0 - beta;
    let vnorm2 = x.iter().map(|z| z.norm_sqr()).sum::<T>();
    if vnorm2 == T::zero() {
        return (T::zero(), norm);
    }
    (T::lit(2.0) / vnorm2, norm)
}

/// Reduces `a` (rows ≥ cols) to real bidiagonal form; returns
/// `(diagonal, superdiagonal)` moduli.
fn bidiagonalize<T: Real>(mut a: CMatrix<T>) -> (Vec<T>, Vec<T>) {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n.saturating_sub(1)];
    for k in 0..n {
        // left reflector on column k, rows k..m
        let mut v: Vec<Complex<T>> = a.col(k)[k..].to_vec();
        let (tau, beta) = householder(&mut v);
        d[k] = beta;
        if tau != T::zero() {
            for j in k + 1..n {
                let col = &mut a.col_mut(j)[k..];
                let dot: Complex<T> = v.iter().zip(col.iter()).map(|(vi, ci)| vi.conj() * ci).sum();
                let s = dot * tau;
                for (c, vi) in col.iter_mut().zip(&v) {
                    *c = *c - *vi * s;
                }
            }
        }
        if k + 1 < n {
            // right reflector on row k, columns k+1..n, applied to rows k+1..m
            let mut w: Vec<Complex<T>> = (k + 1..n).map(|j| a[(k, j)].conj()).collect();
            let (tau, beta) = householder(&mut w);
            e[k] = beta;
            if tau != T::zero() {
                let rows = m - (k + 1);
                let mut y = vec![Complex::new(T::zero(), T::zero()); rows];
                for (jj, j) in (k + 1..n).enumerate() {
                    let wj = w[jj];
                    for (yi, &aij) in y.iter_mut().zip(&a.col(j)[k + 1..]) {
                        *yi = *yi + aij * wj;
                    }
                }
                for (jj, j) in (k + 1..n).enumerate() {
                    let f = w[jj].conj() * tau;
                    for (aij, &yi) in a.col_mut(j)[k + 1..].iter_mut().zip(&y) {
                        *aij = *aij - yi * f;
                    }
                }
            }
        }
    }
    (d, e)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
/// `diag` is overwritten with the eigenvalues (unsorted).
fn tridiagonal_eigenvalues<T: Real>(diag: &mut [T], off: &[T]) -> Result<(), LinalgError> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    let mut e = vec![T::zero(); n];
    e[..n - 1].copy_from_slice(off);
    let eps = T::epsilon();
    let scale = diag.iter().chain(off.iter()).fold(T::zero(), |m, x| m.max(x.abs()));
    let floor = eps * eps * scale;
    let two = T::lit(2.0);
    // total budget across all eigenvalues, as in LAPACK's dsterf
    let budget = 30 * n;
    let mut iter = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= eps * dd + floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > budget {
                return Err(LinalgError::NonConvergence { iterations: iter });
            }
            let mut g = (diag[l + 1] - diag[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r } else { -r };
            g = diag[m] - diag[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] -= p;
                    e[m] = T::zero();
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + two * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Singular values in descending order.
///
/// Householder bidiagonalization followed by implicit QL on the
/// Golub–Kahan tridiagonal `[[0, B], [Bᵀ, 0]]`, whose eigenvalues are `±σᵢ`.
/// Absolute accuracy is a small multiple of `ε·σ_max`.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Result<Vec<T>, LinalgError> {
    let work = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    let n = work.cols();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (d, e) = bidiagonalize(work);
    let mut off = Vec::with_capacity(2 * n - 1);
    for k in 0..n {
        off.push(d[k]);
        if k + 1 < n {
            off.push(e[k]);
        }
    }
    let mut diag = vec![T::zero(); 2 * n];
    tridiagonal_eigenvalues(&mut diag, &off)?;
    diag.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(diag.into_iter().take(n).map(|x| x.abs()).collect())
}

/// Full singular value decomposition `A = U Σ V*` by one-sided Jacobi.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: CMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: CMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn new(a: &CMatrix<T>) -> Result<Self, LinalgError> {
        if a.rows() < a.cols() {
            let t = Self::new(&a.adjoint())?;
            return Ok(Svd {
                u: t.v,
                singular_values: t.singular_values,
                v: t.u,
            });
        }
        let (m, n) = (a.rows(), a.cols());
        let mut w = a.clone();
        let mut v = CMatrix::identity(n);
        let eps = T::epsilon();
        let mut sweep = 0;
        loop {
            let mut rotated = false;
            for i in 0..n {
                for j in i + 1..n {
                    let (ci, cj) = w.col_pair_mut(i, j);
                    let alpha: T = ci.iter().map(|z| z.norm_sqr()).sum();
                    let beta: T = cj.iter().map(|z| z.norm_sqr()).sum();
                    let gamma: Complex<T> = ci.iter().zip(cj.iter()).map(|(x, y)| x.conj() * y).sum();
                    let g = gamma.norm();
                    if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let phase = (gamma / g).conj();
                    let zeta = (beta - alpha) / (T::lit(2.0) * g);
                    let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                    let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                        let yp = *y * phase;
                        let xi = *x;
                        *x = xi * c - yp * s;
                        *y = xi * s + yp * c;
                    }
                    let (vi, vj) = v.col_pair_mut(i, j);
                    for (x, y) in vi.iter_mut().zip(vj.iter_mut()) {
                        let yp = *y * phase;
                        let xi = *x;
                        *x = xi * c - yp * s;
                        *y = xi * s + yp * c;
                    }
                }
            }
            sweep += 1;
            if !rotated {
                break;
            }
            if sweep > 80 {
                return Err(LinalgError::NonConvergence { iterations: sweep });
            }
        }
        let mut order: Vec<(usize, T)> = (0..n)
            .map(|j| (j, w.col(j).iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()))
            .collect();
        order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let mut u = CMatrix::zeros(m, n);
        let mut vs = CMatrix::zeros(n, n);
        let mut sv = Vec::with_capacity(n);
        for (dst, &(src, sigma)) in order.iter().enumerate() {
            sv.push(sigma);
            vs.col_mut(dst).copy_from_slice(v.col(src));
            if sigma > T::zero() {
                for (o, &x) in u.col_mut(dst).iter_mut().zip(w.col(src)) {
                    *o = x / sigma;
                }
            }
        }
        Ok(Svd {
            u,
            singular_values: sv,
            v: vs,
        })
    }

    /// `U Σ V*`
    pub fn reconstruct(&self) -> CMatrix<T> {
        let sigma: Vec<Complex<T>> = self
            .singular_values
            .iter()
            .map(|&s| Complex::new(s, T::zero()))
            .collect();
        self.u.scale_cols(&sigma).matmul(&self.v.adjoint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, m: usize, n: usize) -> CMatrix<f64> {
        CMatrix::from_fn(m, n, |_, _| {
            Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn diagonal_singular_values() {
        let a = CMatrix::from_diag(&[
            Complex::new(3.0_f64, 0.0),
            Complex::new(0.0, -4.0),
            Complex::new(1.0, 0.0),
        ]);
        let s = singular_values(&a).unwrap();
        for (x, y) in s.iter().zip([4.0, 3.0, 1.0]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn two_routes_agree_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(m, n) in &[(1, 1), (5, 5), (12, 7), (7, 12), (30, 30)] {
            let a = random(&mut rng, m, n);
            let fast = singular_values(&a).unwrap();
            let svd = Svd::new(&a).unwrap();
            assert_eq!(fast.len(), m.min(n));
            for (x, y) in fast.iter().zip(&svd.singular_values) {
                assert!((x - y).abs() < 1e-12 * fast[0], "{m}x{n}: {x} vs {y}");
            }
            let resid = (&svd.reconstruct() - &a).norm_fro() / a.norm_fro();
            assert!(resid < 1e-12, "reconstruction {resid}");
        }
    }

    #[test]
    fn shifted_periodic_laplacian() {
        // widely spread singular values with near-degenerate pairs
        let n = 256;
        let h = 8.0 * std::f64::consts::PI / n as f64;
        let z = Complex::new(-200.0, 350.0);
        let a = CMatrix::from_fn(n, n, |i, j| {
            let k = (i + n - j) % n;
            let v = if k == 0 {
                2.0 / (h * h) + 2.0 * (2.0 * i as f64 * h).cos()
            } else if k == 1 || k == n - 1 {
                -1.0 / (h * h)
            } else {
                0.0
            };
            Complex::new(v, 0.0) - if k == 0 { z } else { Complex::new(0.0, 0.0) }
        });
        let fast = singular_values(&a).unwrap();
        let svd = Svd::new(&a).unwrap();
        for (x, y) in fast.iter().zip(&svd.singular_values) {
            assert!((x - y).abs() < 1e-12 * fast[0], "{x} vs {y}");
        }
    }

    #[test]
    fn rank_deficient_matrix() {
        let u: Vec<Complex<f64>> = (0..6).map(|i| Complex::new(i as f64, 1.0)).collect();
        let v: Vec<Complex<f64>> = (0..6).map(|i| Complex::new(1.0, -(i as f64))).collect();
        let a = CMatrix::from_fn(6, 6, |i, j| u[i] * v[j].conj());
        let s = singular_values(&a).unwrap();
        let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((s[0] - nu * nv).abs() < 1e-12 * nu * nv);
        assert!(s[1..].iter().all(|&x| x < 1e-12 * nu * nv));
    }
}
