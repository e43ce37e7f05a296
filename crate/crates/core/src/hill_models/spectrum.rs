use num_complex::Complex;
use serde::Serialize;

use super::HillError;
use crate::band_geometry::BandSet;
use crate::linalg::{self, CMatrix, LinalgError, Lu};
use crate::scalar::Real;

/// Largest matrix handed to the dense eigensolver by default.
pub const DEFAULT_DENSE_LIMIT: usize = 2048;
/// Bound on `‖Mv − λv‖ / ‖M‖_F` for every sampled eigenpair.
pub const BACKWARD_ERROR_BOUND: f64 = 1e-8;
const SAMPLED_PAIRS: usize = 10;

/// Outcome of the backward-error check on sampled eigenpairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenCheck<T> {
    pub sampled: usize,
    /// Largest `‖Mv − λv‖ / ‖M‖_F` over the sampled pairs.
    pub max_residual: T,
}

/// All eigenvalues of `m`, sorted by real then imaginary part, after
/// checking a sample of them against inverse-iteration eigenvectors.
pub fn eigenvalues<T: Real>(m: &CMatrix<T>) -> Result<Vec<Complex<T>>, HillError> {
    eigenvalues_with_limit(m, DEFAULT_DENSE_LIMIT).map(|(eigs, _)| eigs)
}

pub fn eigenvalues_with_limit<T: Real>(
    m: &CMatrix<T>,
    limit: usize,
) -> Result<(Vec<Complex<T>>, EigenCheck<T>), HillError> {
    let n = m.require_square()?;
    if n > limit {
        return Err(HillError::DenseLimit { n, limit });
    }
    let mut eigs = linalg::eigenvalues(m).map_err(|e| match e {
        LinalgError::NonConvergence { iterations } => HillError::NonConvergence { iterations },
        other => HillError::Linalg(other),
    })?;
    eigs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    let check = backward_error_check(m, &eigs)?;
    if !(check.max_residual <= T::lit(BACKWARD_ERROR_BOUND)) {
        return Err(HillError::BackwardError {
            residual: check.max_residual.to_f64_lossy(),
            bound: BACKWARD_ERROR_BOUND,
        });
    }
    Ok((eigs, check))
}

fn backward_error_check<T: Real>(m: &CMatrix<T>, eigs: &[Complex<T>]) -> Result<EigenCheck<T>, HillError> {
    let n = eigs.len();
    let norm = m.norm_fro();
    if n == 0 || norm == T::zero() {
        return Ok(EigenCheck {
            sampled: n.min(SAMPLED_PAIRS),
            max_residual: T::zero(),
        });
    }
    let count = n.min(SAMPLED_PAIRS);
    let mut worst = T::zero();
    for s in 0..count {
        let lambda = eigs[s * (n - 1) / (count - 1).max(1)];
        worst = worst.max(pair_residual(m, lambda, norm)?);
    }
    Ok(EigenCheck {
        sampled: count,
        max_residual: worst,
    })
}

/// Residual of `λ` with the eigenvector from three steps of inverse iteration.
fn pair_residual<T: Real>(m: &CMatrix<T>, lambda: Complex<T>, norm: T) -> Result<T, HillError> {
    let n = m.rows();
    let eps = T::epsilon();
    let mut lu = None;
    // nudge the shift off an exactly singular pivot
    for k in 0..8 {
        let nudge = norm * eps * T::lit(4f64.powi(k));
        let shift = lambda + Complex::new(nudge, nudge) * T::lit(if k == 0 { 0.0 } else { 1.0 });
        if let Ok(f) = Lu::new(&m.add_diagonal(-shift)) {
            lu = Some(f);
            break;
        }
    }
    let lu = lu.ok_or(HillError::Linalg(LinalgError::Singular { column: 0 }))?;
    let mut x: Vec<Complex<T>> = (0..n)
        .map(|j| {
            let t = T::from_usize_lossy(j + 1);
            Complex::new(T::one() / t, (t * T::lit(0.618_033_988_749_895)).sin())
        })
        .collect();
    for _ in 0..3 {
        lu.solve_in_place(&mut x);
        let s = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !(s.is_finite() && s > T::zero()) {
            break;
        }
        for z in &mut x {
            *z = *z / s;
        }
    }
    let mx = m.matvec(&x);
    let r = mx
        .iter()
        .zip(&x)
        .map(|(&a, &b)| (a - lambda * b).norm_sqr())
        .sum::<T>()
        .sqrt();
    let xn = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    Ok(r / (xn * norm))
}

/// Eigenvalues at distance more than `tol` from the bands.
pub fn discrete_spectrum_outside<T: Real>(
    eigs: &[Complex<T>],
    bands: &BandSet<T>,
    tol: T,
) -> Result<Vec<Complex<T>>, HillError> {
    if !(tol > T::zero() && tol.is_finite()) {
        return Err(HillError::FilterTolerance(tol.to_f64_lossy()));
    }
    discrete_spectrum_outside_with(eigs, bands, |_| tol)
}

/// As [`discrete_spectrum_outside`] with a tolerance depending on the eigenvalue.
pub fn discrete_spectrum_outside_with<T: Real>(
    eigs: &[Complex<T>],
    bands: &BandSet<T>,
    tol: impl Fn(Complex<T>) -> T,
) -> Result<Vec<Complex<T>>, HillError> {
    let mut out = Vec::new();
    for &z in eigs {
        let t = tol(z);
        if !(t > T::zero() && t.is_finite()) {
            return Err(HillError::FilterTolerance(t.to_f64_lossy()));
        }
        if bands.dist(z) > t {
            out.push(z);
        }
    }
    Ok(out)
}
