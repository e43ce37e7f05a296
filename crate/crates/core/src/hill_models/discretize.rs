use num_complex::Complex;

use super::{HillError, PeriodicPotential};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Finite-difference model of `H₀ = −d²/dx² + V₀` and `H = H₀ + V` on a
/// periodic box `[0, ℓ)` with `n` points and mesh `h = ℓ/n`.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct DiscretizedOperator<T> {
    n: usize,
    length: T,
    mesh: T,
    grid: Vec<T>,
    v0: Vec<T>,
    v: Vec<Complex<T>>,
    v1: Vec<Complex<T>>,
    v2: Vec<Complex<T>>,
    h0: CMatrix<T>,
    h: CMatrix<T>,
}

/// Kato factors `V₁ = |V|^{1/2}`, `V₂ = sign(V)|V|^{1/2}` with `sign(0) = 0`.
pub fn kato_factors<T: Real>(v: &[Complex<T>]) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    v.iter()
        .map(|&z| {
            let r = z.norm();
            if r == T::zero() {
                return (Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()));
            }
            let root = r.sqrt();
            let sign = z / r;
            (Complex::new(root, T::zero()), sign * root)
        })
        .unzip()
}

/// Builds the discretization.
///
/// The perturbation is sampled at `x_j = j·h`, factored, and then stored as
/// the product `V₂V₁`, so `diag(V) = V₂V₁` holds bitwise for the matrices
/// used downstream.
pub fn discretize<T: Real>(
    v0: &PeriodicPotential<T>,
    v: impl Fn(T) -> Complex<T>,
    n: usize,
    length: T,
) -> Result<DiscretizedOperator<T>, HillError> {
    if n < 16 {
        return Err(HillError::GridTooSmall(n));
    }
    let cells = (length / v0.period).round();
    let multiple_ok = length.is_finite()
        && cells >= T::one()
        && (length / v0.period - cells).abs() <= T::lit(1e-9) * cells.max(T::one());
    if !multiple_ok {
        return Err(HillError::NotPeriodMultiple {
            length: length.to_f64_lossy(),
            period: v0.period.to_f64_lossy(),
        });
    }
    let mesh = length / T::from_usize_lossy(n);
    let grid: Vec<T> = (0..n).map(|j| mesh * T::from_usize_lossy(j)).collect();
    let v0_grid: Vec<T> = grid.iter().map(|&x| v0.value(x)).collect();
    let sampled: Vec<Complex<T>> = grid.iter().map(|&x| v(x)).collect();
    if let Some(j) = sampled.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(HillError::Potential(format!(
            "perturbation is not finite at x = {}",
            grid[j]
        )));
    }
    let (v1, v2) = kato_factors(&sampled);
    let vprod: Vec<Complex<T>> = v2.iter().zip(&v1).map(|(&b, &a)| b * a).collect();

    let inv_h2 = T::one() / (mesh * mesh);
    let two = T::lit(2.0);
    let h0 = CMatrix::from_real_fn(n, n, |i, j| {
        if i == j {
            two * inv_h2 + v0_grid[i]
        } else if (i + 1) % n == j || (j + 1) % n == i {
            -inv_h2
        } else {
            T::zero()
        }
    });
    let mut h = h0.clone();
    for (j, &z) in vprod.iter().enumerate() {
        h.col_mut(j)[j] = h0[(j, j)] + z;
    }
    Ok(DiscretizedOperator {
        n,
        length,
        mesh,
        grid,
        v0: v0_grid,
        v: vprod,
        v1,
        v2,
        h0,
        h,
    })
}

impl<T: Real> DiscretizedOperator<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Box length `ℓ`.
    pub fn length(&self) -> T {
        self.length
    }

    /// Mesh width `h = ℓ/n`.
    pub fn mesh(&self) -> T {
        self.mesh
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    /// `V₀ + c` at the grid points.
    pub fn v0(&self) -> &[T] {
        &self.v0
    }

    /// `V` at the grid points (equal to `V₂V₁` entrywise).
    pub fn potential(&self) -> &[Complex<T>] {
        &self.v
    }

    /// Diagonal of `V₁`.
    pub fn v1(&self) -> &[Complex<T>] {
        &self.v1
    }

    /// Diagonal of `V₂`.
    pub fn v2(&self) -> &[Complex<T>] {
        &self.v2
    }

    pub fn v1_matrix(&self) -> CMatrix<T> {
        CMatrix::from_diag(&self.v1)
    }

    pub fn v2_matrix(&self) -> CMatrix<T> {
        CMatrix::from_diag(&self.v2)
    }

    pub fn h0(&self) -> &CMatrix<T> {
        &self.h0
    }

    pub fn h(&self) -> &CMatrix<T> {
        &self.h
    }

    /// `max_j |V₀(x_j) + c|`
    pub fn v0_sup(&self) -> T {
        self.v0.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Grid `L^p` norm `(h Σ |V_j|^p)^{1/p}`.
    pub fn v_norm_p(&self, p: T) -> T {
        let s: T = self.v.iter().map(|z| z.norm().powf(p)).sum();
        (self.mesh * s).powf(p.recip())
    }

    /// Whether `V` vanishes at every grid point.
    pub fn is_unperturbed(&self) -> bool {
        self.v.iter().all(|z| z.re == T::zero() && z.im == T::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn factor_examples() {
        let (v1, v2) = kato_factors(&[c(-4.0, 0.0), c(0.0, 3.0), c(0.0, 0.0)]);
        assert_eq!(v1[0], c(2.0, 0.0));
        assert_eq!(v2[0], c(-2.0, 0.0));
        assert_eq!(v1[1], c(3f64.sqrt(), 0.0));
        assert_eq!(v2[1], c(0.0, 3f64.sqrt()));
        assert_eq!(v1[2], c(0.0, 0.0));
        assert_eq!(v2[2], c(0.0, 0.0));
    }

    #[test]
    fn zero_perturbation_leaves_h0() {
        let v0 = PeriodicPotential::cosine(2.0, PI, 1.5).unwrap();
        let op = discretize(&v0, |_| c(0.0, 0.0), 64, 4.0 * PI).unwrap();
        assert_eq!(op.h().as_slice(), op.h0().as_slice());
        assert!(op.v1().iter().chain(op.v2()).all(|z| *z == c(0.0, 0.0)));
        assert!(op.is_unperturbed());
        assert_eq!(op.v_norm_p(2.0), 0.0);
    }

    #[test]
    fn structure_invariants() {
        let v0 = PeriodicPotential::cosine(2.0, PI, 1.5).unwrap();
        let op = discretize(&v0, |x| c((-x * x).exp() - 0.3, 0.5 * (2.0 * x).sin()), 128, 2.0 * PI).unwrap();
        assert!(op.h0().hermitian_defect() <= 1e-14);
        assert!(op.h0().as_slice().iter().all(|z| z.im == 0.0));
        for j in 0..op.n() {
            assert_eq!(op.v2()[j] * op.v1()[j], op.potential()[j]);
            assert_eq!(op.h()[(j, j)], op.h0()[(j, j)] + op.potential()[j]);
            assert!(op.v1()[j].im == 0.0 && op.v1()[j].re >= 0.0);
            assert!((op.v2()[j].norm() - op.v1()[j].norm()).abs() <= 1e-15 * op.v1()[j].norm().max(1.0));
        }
        assert!((op.mesh() - 2.0 * PI / 128.0).abs() < 1e-16);
        assert_eq!(op.v0_sup(), op.v0().iter().fold(0.0_f64, |m, x| m.max(x.abs())));
    }

    #[test]
    fn point_perturbation_factors() {
        let v0 = PeriodicPotential::free(1.0, 0.0).unwrap();
        let op = discretize(&v0, |x| if x == 0.0 { c(-4.0, 0.0) } else { c(0.0, 0.0) }, 16, 1.0).unwrap();
        assert_eq!(op.v1()[0], c(2.0, 0.0));
        assert_eq!(op.v2()[0], c(-2.0, 0.0));
        assert_eq!(op.potential()[0], c(-4.0, 0.0));
        let op = discretize(&v0, |x| if x == 0.0 { c(0.0, 3.0) } else { c(0.0, 0.0) }, 16, 1.0).unwrap();
        assert_eq!(op.v2()[0], c(0.0, 3f64.sqrt()));
        // grid measure: h · |V|^p
        assert!((op.v_norm_p(2.0) - (9.0_f64 / 16.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_geometry() {
        let v0 = PeriodicPotential::cosine(2.0, PI, 0.0).unwrap();
        assert!(matches!(
            discretize(&v0, |_| c(0.0, 0.0), 64, 3.0),
            Err(HillError::NotPeriodMultiple { .. })
        ));
        assert!(matches!(
            discretize(&v0, |_| c(0.0, 0.0), 8, PI),
            Err(HillError::GridTooSmall(8))
        ));
        assert!(discretize(&v0, |_| c(f64::NAN, 0.0), 16, PI).is_err());
    }
}
