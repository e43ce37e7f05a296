use num_complex::Complex;

use super::{CMatrix, LinalgError};
use crate::scalar::{abs1, Real};

/// Row-major square work array; the QR sweeps are row-oriented.
struct Work<T> {
    n: usize,
    a: Vec<Complex<T>>,
}

impl<T: Real> Work<T> {
    fn from_matrix(m: &CMatrix<T>) -> Self {
        let n = m.rows();
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                a.push(m[(i, j)]);
            }
        }
        Work { n, a }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.a[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.a[i * self.n + j] = v;
    }

    fn to_matrix(&self) -> CMatrix<T> {
        CMatrix::from_fn(self.n, self.n, |i, j| self.at(i, j))
    }
}

/// Diagonal similarity scaling by powers of two (Parlett–Reinsch).
fn balance<T: Real>(w: &mut Work<T>) {
    let n = w.n;
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += abs1(w.at(j, i));
                    r += abs1(w.at(i, j));
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < T::lit(0.95) * s {
                done = false;
                let ginv = T::one() / f;
                for j in 0..n {
                    let v = w.at(i, j) * ginv;
                    w.set(i, j, v);
                }
                for j in 0..n {
                    let v = w.at(j, i) * f;
                    w.set(j, i, v);
                }
            }
        }
    }
}

fn reduce_to_hessenberg<T: Real>(w: &mut Work<T>) {
    let n = w.n;
    if n < 3 {
        return;
    }
    let two = T::lit(2.0);
    let mut v = vec![Complex::new(T::zero(), T::zero()); n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let norm = (k + 1..n).map(|i| w.at(i, k).norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = w.at(k + 1, k);
        let phase = if x0.norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0 / x0.norm()
        };
        let beta = -phase * norm;
        for (t, i) in (k + 1..n).enumerate() {
            v[t] = w.at(i, k);
        }
        v[0] = x0 - beta;
        let vnorm2: T = v[..len].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let tau = two / vnorm2;
        // rows k+1..n from the left: A <- (I - tau v v*) A
        for j in k..n {
            let mut dot = Complex::new(T::zero(), T::zero());
            for (t, vt) in v[..len].iter().enumerate() {
                dot = dot + vt.conj() * w.at(k + 1 + t, j);
            }
            let s = dot * tau;
            for (t, &vt) in v[..len].iter().enumerate() {
                let val = w.at(k + 1 + t, j) - vt * s;
                w.set(k + 1 + t, j, val);
            }
        }
        // columns k+1..n from the right: A <- A (I - tau v v*)
        for i in 0..n {
            let row = &mut w.a[i * n + k + 1..i * n + n];
            let mut dot = Complex::new(T::zero(), T::zero());
            for (x, vt) in row.iter().zip(&v[..len]) {
                dot = dot + *x * *vt;
            }
            let s = dot * tau;
            for (x, vt) in row.iter_mut().zip(&v[..len]) {
                *x = *x - s * vt.conj();
            }
        }
        w.set(k + 1, k, beta);
        for i in k + 2..n {
            w.set(i, k, Complex::new(T::zero(), T::zero()));
        }
    }
}

/// Upper Hessenberg matrix unitarily similar to `m`.
pub fn hessenberg<T: Real>(m: &CMatrix<T>) -> Result<CMatrix<T>, LinalgError> {
    m.require_square()?;
    let mut w = Work::from_matrix(m);
    reduce_to_hessenberg(&mut w);
    Ok(w.to_matrix())
}

/// Complex Givens pair `(c, s)` with `[c s; -s̄ c]·[a; b] = [r; 0]`.
fn givens<T: Real>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>) {
    let na = a.norm();
    let nb = b.norm();
    if nb == T::zero() {
        return (T::one(), Complex::new(T::zero(), T::zero()));
    }
    if na == T::zero() {
        return (T::zero(), Complex::new(T::one(), T::zero()));
    }
    let nu = na.hypot(nb);
    let c = na / nu;
    let s = (a / na) * b.conj() / nu;
    (c, s)
}

fn rotate_rows<T: Real>(w: &mut Work<T>, r: usize, c: T, s: Complex<T>, cols: std::ops::RangeInclusive<usize>) {
    let n = w.n;
    let sc = s.conj();
    for j in cols {
        let x = w.a[r * n + j];
        let y = w.a[(r + 1) * n + j];
        w.a[r * n + j] = x * c + s * y;
        w.a[(r + 1) * n + j] = y * c - sc * x;
    }
}

fn rotate_cols<T: Real>(w: &mut Work<T>, col: usize, c: T, s: Complex<T>, rows: std::ops::RangeInclusive<usize>) {
    let n = w.n;
    let sc = s.conj();
    for i in rows {
        let x = w.a[i * n + col];
        let y = w.a[i * n + col + 1];
        w.a[i * n + col] = x * c + y * sc;
        w.a[i * n + col + 1] = y * c - x * s;
    }
}

/// Eigenvalue of the trailing 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let disc = (diff * diff + b * c).sqrt();
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a square complex matrix.
///
/// Balancing, Householder reduction to Hessenberg form, then single-shift
/// complex QR with Wilkinson shifts and occasional exceptional shifts.
pub fn eigenvalues<T: Real>(m: &CMatrix<T>) -> Result<Vec<Complex<T>>, LinalgError> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut w = Work::from_matrix(m);
    balance(&mut w);
    reduce_to_hessenberg(&mut w);

    let eps = T::epsilon();
    let norm = w.a.iter().fold(T::zero(), |acc, z| acc.max(abs1(*z)));
    let mut eig = vec![Complex::new(T::zero(), T::zero()); n];
    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n.max(10);

    while hi > 0 {
        // locate the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = abs1(w.at(lo, lo - 1));
            let mut tst = abs1(w.at(lo - 1, lo - 1)) + abs1(w.at(lo, lo));
            if tst == T::zero() {
                tst = norm;
            }
            if sub <= eps * tst {
                w.set(lo, lo - 1, Complex::new(T::zero(), T::zero()));
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = w.at(hi, hi);
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > max_total {
            return Err(LinalgError::NonConvergence { iterations: total });
        }
        let shift = if its.is_multiple_of(10) {
            w.at(hi, hi) + Complex::new(T::lit(0.75) * abs1(w.at(hi, hi - 1)), T::zero())
        } else {
            wilkinson_shift(w.at(hi - 1, hi - 1), w.at(hi - 1, hi), w.at(hi, hi - 1), w.at(hi, hi))
        };

        // implicit single-shift QR sweep on rows/cols lo..=hi
        let (c, s) = givens(w.at(lo, lo) - shift, w.at(lo + 1, lo));
        rotate_rows(&mut w, lo, c, s, lo..=hi);
        rotate_cols(&mut w, lo, c, s, lo..=(lo + 2).min(hi));
        for k in lo + 1..hi {
            let (c, s) = givens(w.at(k, k - 1), w.at(k + 1, k - 1));
            rotate_rows(&mut w, k, c, s, (k - 1)..=hi);
            w.set(k + 1, k - 1, Complex::new(T::zero(), T::zero()));
            rotate_cols(&mut w, k, c, s, lo..=(k + 2).min(hi));
        }
    }
    eig[0] = w.at(0, 0);
    Ok(eig)
}
