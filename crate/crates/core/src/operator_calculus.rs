//! Schatten-norm calculus on matrices and numerical checks of the operator
//! inequalities behind the Lieb–Thirring bounds: the Kato resolvent identity,
//! Hölder's inequality for Schatten norms, the Neumann-series bound, and the
//! resolvent-difference estimates on a discretized operator.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hill_models::DiscretizedOperator;
use crate::linalg::{self, singular_values, CMatrix, LinalgError, Lu};
use crate::scalar::Real;
use crate::spectral_constants::{eta, omega0, ConstantsError, ExponentPack, ThresholdOmega};

/// Relative conditioning floor: `z` counts as on the spectrum of `T` when
/// `σ_min(T − z) ≤ NEAR_SPECTRUM_REL · σ_max(T − z)`.
pub const NEAR_SPECTRUM_REL: f64 = 1e-8;
/// Contract on the relative resolvent-identity residual.
pub const RESOLVENT_TOL: f64 = 1e-9;
/// Relative slack on Hölder and Neumann inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("Schatten exponent must be finite and at least 1, got {0}")]
    Exponent(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("z is numerically on the spectrum of {side} (sigma_min = {sigma_min:e}, threshold {threshold:e})")]
    NearSpectrum { side: Side, sigma_min: f64, threshold: f64 },
    #[error("I + V2 R(z,H0) V1 is numerically singular (sigma_min = {sigma_min:e})")]
    MiddleFactorSingular { sigma_min: f64 },
    #[error("precondition failed: ||T|| = {norm} exceeds 1/2")]
    PreconditionFailed { norm: f64 },
    #[error("omega = {omega} must not exceed omega0 = {omega0}")]
    OmegaAboveThreshold { omega: f64, omega0: f64 },
    #[error("lowest eigenvalue of H0 is {0}, must be positive")]
    NonPositiveA1(f64),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("A - A0 vanishes")]
    ZeroPerturbation,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
}

/// Which operator a conditioning failure refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    H,
    H0,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::H => "H",
            Side::H0 => "H0",
        })
    }
}

fn check_exponent<T: Real>(p: T) -> Result<(), OperatorError> {
    if !(p >= T::one() && p.is_finite()) {
        return Err(OperatorError::Exponent(p.to_f64_lossy()));
    }
    Ok(())
}

/// Singular values `s₁ ≥ s₂ ≥ … ≥ 0` of a matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularSpectrum<T> {
    values: Vec<T>,
}

impl<T: Real> SingularSpectrum<T> {
    pub fn new(m: &CMatrix<T>) -> Result<Self, OperatorError> {
        Ok(SingularSpectrum {
            values: singular_values(m)?,
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Largest singular value (operator norm); 0 for an empty matrix.
    pub fn largest(&self) -> T {
        self.values.first().copied().unwrap_or(T::zero())
    }

    pub fn smallest(&self) -> T {
        self.values.last().copied().unwrap_or(T::zero())
    }

    /// `(Σ sᵢ^p)^{1/p}`
    pub fn schatten(&self, p: T) -> Result<T, OperatorError> {
        check_exponent(p)?;
        let top = self.largest();
        if top == T::zero() {
            return Ok(T::zero());
        }
        // scale by s₁ to keep s^p representable
        let s: T = self.values.iter().map(|&x| (x / top).powf(p)).sum();
        Ok(top * s.powf(p.recip()))
    }
}

/// Schatten `p`-norm `(Σ sᵢ^p)^{1/p}`.
pub fn schatten_norm<T: Real>(m: &CMatrix<T>, p: T) -> Result<T, OperatorError> {
    check_exponent(p)?;
    SingularSpectrum::new(m)?.schatten(p)
}

/// Operator norm, the largest singular value.
pub fn operator_norm<T: Real>(m: &CMatrix<T>) -> Result<T, OperatorError> {
    Ok(SingularSpectrum::new(m)?.largest())
}

/// Outcome of one resolvent-identity evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolventCheck<T> {
    pub z: Complex<T>,
    /// `‖R(z,H) − RHS‖ / ‖R(z,H)‖`
    pub residual: T,
    /// `σ_min(H − z)`
    pub sigma_min_h: T,
    /// `σ_min(H₀ − z)`
    pub sigma_min_h0: T,
    /// `σ_min(I + V₂R(z,H₀)V₁)`
    pub sigma_min_middle: T,
}

impl<T: Real> ResolventCheck<T> {
    pub fn holds(&self) -> bool {
        self.residual <= T::lit(RESOLVENT_TOL)
    }
}

fn conditioned<T: Real>(m: &CMatrix<T>, side: Side) -> Result<SingularSpectrum<T>, OperatorError> {
    let s = SingularSpectrum::new(m)?;
    let threshold = T::lit(NEAR_SPECTRUM_REL) * s.largest();
    if !(s.smallest() > threshold) {
        return Err(OperatorError::NearSpectrum {
            side,
            sigma_min: s.smallest().to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    Ok(s)
}

/// Checks `R(z,H) = R(z,H₀) − R(z,H₀)V₁[I + V₂R(z,H₀)V₁]^{−1}V₂R(z,H₀)` for
/// `H = H₀ + V₂V₁` with diagonal factors.
pub fn verify_resolvent_identity_parts<T: Real>(
    h0: &CMatrix<T>,
    v1: &[Complex<T>],
    v2: &[Complex<T>],
    z: Complex<T>,
) -> Result<ResolventCheck<T>, OperatorError> {
    let n = h0.require_square()?;
    if v1.len() != n || v2.len() != n {
        return Err(OperatorError::Dimension(format!(
            "H0 is {n}x{n} but the factors have lengths {} and {}",
            v1.len(),
            v2.len()
        )));
    }
    let v: Vec<Complex<T>> = v2.iter().zip(v1).map(|(&b, &a)| b * a).collect();
    let h0_z = h0.add_diagonal(-z);
    let mut h_z = h0_z.clone();
    for (j, &vj) in v.iter().enumerate() {
        h_z.col_mut(j)[j] = h_z[(j, j)] + vj;
    }
    let s_h0 = conditioned(&h0_z, Side::H0)?;
    let s_h = conditioned(&h_z, Side::H)?;

    let r0 = Lu::new(&h0_z)?.inverse();
    let r = Lu::new(&h_z)?.inverse();
    let middle = r0
        .scale_rows(v2)
        .scale_cols(v1)
        .add_diagonal(Complex::new(T::one(), T::zero()));
    let s_mid = SingularSpectrum::new(&middle)?;
    if !(s_mid.smallest() > T::lit(NEAR_SPECTRUM_REL) * s_mid.largest()) {
        return Err(OperatorError::MiddleFactorSingular {
            sigma_min: s_mid.smallest().to_f64_lossy(),
        });
    }
    let middle_inv = Lu::new(&middle)?.inverse();
    let left = r0.scale_cols(v1);
    let right = r0.scale_rows(v2);
    let rhs = &r0 - &left.matmul(&middle_inv).matmul(&right);
    let diff = &r - &rhs;
    let r_norm = s_h.smallest().recip();
    Ok(ResolventCheck {
        z,
        residual: operator_norm(&diff)? / r_norm,
        sigma_min_h: s_h.smallest(),
        sigma_min_h0: s_h0.smallest(),
        sigma_min_middle: s_mid.smallest(),
    })
}

/// Resolvent identity for a discretized operator.
pub fn verify_resolvent_identity<T: Real>(
    op: &DiscretizedOperator<T>,
    z: Complex<T>,
) -> Result<ResolventCheck<T>, OperatorError> {
    verify_resolvent_identity_parts(op.h0(), op.v1(), op.v2(), z)
}

/// `count` points on an ellipse enclosing the Gershgorin discs of every
/// given matrix, hence their spectra.
pub fn gershgorin_contour<T: Real>(matrices: &[&CMatrix<T>], count: usize) -> Vec<Complex<T>> {
    let (mut re_lo, mut re_hi, mut im_lo, mut im_hi) =
        (T::infinity(), T::neg_infinity(), T::infinity(), T::neg_infinity());
    for m in matrices {
        for i in 0..m.rows() {
            let radius: T = (0..m.cols()).filter(|&j| j != i).map(|j| m[(i, j)].norm()).sum();
            let c = m[(i, i)];
            re_lo = re_lo.min(c.re - radius);
            re_hi = re_hi.max(c.re + radius);
            im_lo = im_lo.min(c.im - radius);
            im_hi = im_hi.max(c.im + radius);
        }
    }
    if !re_lo.is_finite() {
        return Vec::new();
    }
    let two = T::lit(2.0);
    let center = Complex::new((re_lo + re_hi) / two, (im_lo + im_hi) / two);
    let (hx, hy) = ((re_hi - re_lo) / two, (im_hi - im_lo) / two);
    let margin = T::one() + T::lit(0.1) * hx.max(hy);
    // an ellipse with semi-axes √2·(half-widths) contains the box
    let (a, b) = (T::SQRT_2() * hx + margin, T::SQRT_2() * hy + margin);
    (0..count)
        .map(|k| {
            let theta = T::lit(2.0) * T::PI() * (T::from_usize_lossy(k) + T::lit(0.5)) / T::from_usize_lossy(count);
            center + Complex::new(a * theta.cos(), b * theta.sin())
        })
        .collect()
}

/// Resolvent identity at every point of a `count`-point Gershgorin contour.
pub fn resolvent_contour_checks<T: Real>(
    op: &DiscretizedOperator<T>,
    count: usize,
) -> Result<Vec<ResolventCheck<T>>, OperatorError> {
    gershgorin_contour(&[op.h0(), op.h()], count)
        .into_par_iter()
        .map(|z| verify_resolvent_identity(op, z))
        .collect()
}

/// Both sides of `‖AB‖_{S_p} ≤ ‖A‖_{S_{2p}} ‖B‖_{S_{2p}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderCheck<T> {
    pub lhs: T,
    pub rhs: T,
}

impl<T: Real> HolderCheck<T> {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (T::one() + T::lit(INEQUALITY_SLACK))
    }
}

pub fn verify_schatten_holder<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, p: T) -> Result<HolderCheck<T>, OperatorError> {
    check_exponent(p)?;
    if a.cols() != b.rows() {
        return Err(OperatorError::Dimension(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let two_p = T::lit(2.0) * p;
    Ok(HolderCheck {
        lhs: schatten_norm(&a.matmul(b), p)?,
        rhs: schatten_norm(a, two_p)? * schatten_norm(b, two_p)?,
    })
}

/// `‖T‖` and `‖(I+T)^{−1}‖` for a contraction with `‖T‖ ≤ 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NeumannCheck<T> {
    pub norm_t: T,
    pub norm_inv: T,
}

impl<T: Real> NeumannCheck<T> {
    pub fn holds(&self) -> bool {
        self.norm_inv <= T::lit(2.0) * (T::one() + T::lit(INEQUALITY_SLACK))
    }
}

/// Computes `‖(I+T)^{−1}‖`. `‖T‖` may exceed 1/2 by the relative slack
/// [`INEQUALITY_SLACK`] to absorb rounding in the singular values.
pub fn verify_neumann_bound<T: Real>(t: &CMatrix<T>) -> Result<NeumannCheck<T>, OperatorError> {
    t.require_square()?;
    let norm_t = operator_norm(t)?;
    if norm_t > T::lit(0.5) * (T::one() + T::lit(INEQUALITY_SLACK)) {
        return Err(OperatorError::PreconditionFailed {
            norm: norm_t.to_f64_lossy(),
        });
    }
    let s = SingularSpectrum::new(&t.add_diagonal(Complex::new(T::one(), T::zero())))?;
    Ok(NeumannCheck {
        norm_t,
        norm_inv: s.smallest().recip(),
    })
}

/// Outcome of comparing a computed quantity with a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Within,
    Exceeds,
    EmpiricalOnly,
}

/// A measured quantity with the continuum bound it is compared against.
/// Items are reported, never asserted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalItem<T> {
    pub name: String,
    pub quantity: T,
    pub bound: Option<T>,
    /// `quantity / bound`; absent when the bound is missing or zero.
    pub ratio: Option<T>,
    pub verdict: Verdict,
}

impl<T: Real> EmpiricalItem<T> {
    pub fn new(name: &str, quantity: T, bound: Option<T>) -> Self {
        let ratio = bound.filter(|b| *b > T::zero()).map(|b| quantity / b);
        let verdict = match bound {
            None => Verdict::EmpiricalOnly,
            Some(b) if quantity <= b => Verdict::Within,
            Some(_) => Verdict::Exceeds,
        };
        EmpiricalItem {
            name: name.to_string(),
            quantity,
            bound,
            ratio,
            verdict,
        }
    }
}

/// Resolvent estimates at `ω ≤ ω₀` on a discretized operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KatoChainReport<T> {
    pub omega: T,
    pub threshold: ThresholdOmega<T>,
    /// Lowest eigenvalue of `H₀`, used as `a₁`.
    pub a1: T,
    pub v0_sup: T,
    /// Grid norm `(h Σ |V_j|^p)^{1/p}`.
    pub v_norm_p: T,
    pub eta: T,
    pub items: Vec<EmpiricalItem<T>>,
}

/// Lowest eigenvalue of a Hermitian matrix.
fn lowest_eigenvalue<T: Real>(m: &CMatrix<T>) -> Result<T, OperatorError> {
    let eigs = linalg::eigenvalues(m)?;
    Ok(eigs.iter().map(|z| z.re).fold(T::infinity(), T::min))
}

/// Evaluates on the discretization
///
/// * `‖V₂R(ω,H₀)V₁‖` against 1/2,
/// * `‖(I + V₂R(ω,H₀)V₁)^{−1}‖` against 2 (only meaningful when the first is within),
/// * `‖R(ω,H) − R(ω,H₀)‖_{S_p}` against `4η²‖V‖_p / |ω|^{q+1}`.
///
/// The continuum bounds do not bind a finite discretization, so the items are
/// empirical comparisons.
pub fn kato_chain_report<T: Real>(
    op: &DiscretizedOperator<T>,
    omega: T,
    pack: &ExponentPack<T>,
) -> Result<KatoChainReport<T>, OperatorError> {
    let a1 = lowest_eigenvalue(op.h0())?;
    if !(a1 > T::zero()) {
        return Err(OperatorError::NonPositiveA1(a1.to_f64_lossy()));
    }
    let p = pack.p;
    let v0_sup = op.v0_sup();
    let v_norm = op.v_norm_p(p);
    let threshold = omega0(p, pack.d, a1, v0_sup, v_norm)?;
    if !(omega <= threshold.omega0) {
        return Err(OperatorError::OmegaAboveThreshold {
            omega: omega.to_f64_lossy(),
            omega0: threshold.omega0.to_f64_lossy(),
        });
    }
    let eta = eta(p, pack.d)?;
    let w = Complex::new(omega, T::zero());
    let h0_w = op.h0().add_diagonal(-w);
    conditioned(&h0_w, Side::H0)?;
    let h_w = op.h().add_diagonal(-w);
    conditioned(&h_w, Side::H)?;
    let r0 = Lu::new(&h0_w)?.inverse();
    let r = Lu::new(&h_w)?.inverse();

    let t = r0.scale_rows(op.v2()).scale_cols(op.v1());
    let t_norm = operator_norm(&t)?;
    let half = T::lit(0.5);
    let mut items = vec![EmpiricalItem::new("norm_v2_r0_v1", t_norm, Some(half))];
    let inv = SingularSpectrum::new(&t.add_diagonal(Complex::new(T::one(), T::zero())))?
        .smallest()
        .recip();
    let neumann_bound = if t_norm <= half { Some(T::lit(2.0)) } else { None };
    items.push(EmpiricalItem::new("norm_inverse_middle_factor", inv, neumann_bound));
    let diff = schatten_norm(&(&r - &r0), p)?;
    let bound = T::lit(4.0) * eta * eta * v_norm / omega.abs().powf(pack.q + T::one());
    items.push(EmpiricalItem::new("schatten_p_resolvent_difference", diff, Some(bound)));
    Ok(KatoChainReport {
        omega,
        threshold,
        a1,
        v0_sup,
        v_norm_p: v_norm,
        eta,
        items,
    })
}

/// Empirical constant `Σ_{λ∈σ(A)} dist(λ, σ(A₀))^p / ‖A − A₀‖_{S_p}^p` for
/// Hermitian `A₀`.
pub fn hansmann_ratio<T: Real>(a0: &CMatrix<T>, a: &CMatrix<T>, p: T) -> Result<T, OperatorError> {
    check_exponent(p)?;
    let n = a0.require_square()?;
    if a.rows() != n || a.cols() != n {
        return Err(OperatorError::Dimension(format!(
            "A0 is {n}x{n}, A is {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let defect = a0.hermitian_defect();
    if defect > T::lit(1e-12) * a0.max_abs().max(T::one()) {
        return Err(OperatorError::NotHermitian(defect.to_f64_lossy()));
    }
    let denom = schatten_norm(&(a - a0), p)?;
    if denom == T::zero() {
        return Err(OperatorError::ZeroPerturbation);
    }
    let reference: Vec<T> = linalg::eigenvalues(a0)?.into_iter().map(|z| z.re).collect();
    let numer: T = linalg::eigenvalues(a)?
        .into_iter()
        .map(|z| {
            reference
                .iter()
                .map(|&x| Complex::new(z.re - x, z.im).norm())
                .fold(T::infinity(), T::min)
                .powf(p)
        })
        .sum();
    Ok(numer / denom.powf(p))
}

/// Seeded random matrices for property checks.
pub mod sampling {
    use num_complex::Complex;
    use rand::Rng;

    use crate::linalg::CMatrix;
    use crate::scalar::Real;

    fn entry<T: Real, R: Rng>(rng: &mut R) -> Complex<T> {
        Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)))
    }

    /// Entries uniform in the unit square `[−1,1] + i[−1,1]`.
    pub fn complex_matrix<T: Real, R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
        CMatrix::from_fn(rows, cols, |_, _| entry(rng))
    }

    /// `(X + X*)/2` for a random `X`.
    pub fn hermitian<T: Real, R: Rng>(n: usize, rng: &mut R) -> CMatrix<T> {
        let x = complex_matrix::<T, R>(n, n, rng);
        (&x + &x.adjoint()).scale(Complex::new(T::lit(0.5), T::zero()))
    }

    /// Unitary matrix from modified Gram–Schmidt on a random matrix.
    pub fn unitary<T: Real, R: Rng>(n: usize, rng: &mut R) -> CMatrix<T> {
        let mut q = complex_matrix::<T, R>(n, n, rng);
        for j in 0..n {
            for i in 0..j {
                let (qi, qj) = q.col_pair_mut(i, j);
                let dot: Complex<T> = qi.iter().zip(qj.iter()).map(|(a, b)| a.conj() * b).sum();
                for (b, a) in qj.iter_mut().zip(qi.iter()) {
                    *b = *b - *a * dot;
                }
            }
            let col = q.col_mut(j);
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            for z in col {
                *z = *z / norm;
            }
        }
        q
    }

    /// `U diag(s) W*` with random unitaries `U`, `W`.
    pub fn with_singular_values<T: Real, R: Rng>(s: &[T], rng: &mut R) -> CMatrix<T> {
        let n = s.len();
        let u = unitary::<T, R>(n, rng);
        let w = unitary::<T, R>(n, rng);
        let d: Vec<Complex<T>> = s.iter().map(|&x| Complex::new(x, T::zero())).collect();
        u.scale_cols(&d).matmul(&w.adjoint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hill_models::{discretize, PeriodicPotential};
    use crate::linalg::Svd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn schatten_examples() {
        assert!(rel(schatten_norm(&CMatrix::<f64>::identity(3), 2.0).unwrap(), 3f64.sqrt()) < 1e-15);
        let d = CMatrix::from_diag(&[c(3.0, 0.0), c(4.0, 0.0)]);
        assert!(rel(schatten_norm(&d, 2.0).unwrap(), 5.0) < 1e-15);
        let u = [c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5)];
        let v = [c(-2.0, 0.0), c(1.0, 1.0)];
        let outer = CMatrix::from_fn(3, 2, |i, j| u[i] * v[j].conj());
        let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert!(rel(schatten_norm(&outer, p).unwrap(), nu * nv) < 1e-13, "p={p}");
        }
        assert!(schatten_norm(&d, 0.5).is_err());
        assert!(schatten_norm(&d, f64::INFINITY).is_err());
    }

    #[test]
    fn schatten_monotone_for_contractions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = sampling::complex_matrix::<f64, _>(6, 6, &mut rng);
            let m = m.scale(c(1.0 / operator_norm(&m).unwrap(), 0.0));
            let s = SingularSpectrum::new(&m).unwrap();
            let mut prev = f64::INFINITY;
            for p in [1.0, 1.25, 2.0, 3.0, 8.0] {
                let x = s.schatten(p).unwrap().powf(p);
                assert!(x <= prev * (1.0 + 1e-13));
                prev = x;
            }
        }
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (m, n) in [(5, 5), (8, 3), (3, 8)] {
            let a = sampling::complex_matrix::<f64, _>(m, n, &mut rng);
            let svd = Svd::new(&a).unwrap();
            let r = (&a - &svd.reconstruct()).norm_fro() / a.norm_fro();
            assert!(r <= 1e-12);
        }
    }

    #[test]
    fn scalar_resolvent_identity() {
        // h0 = 2, v = −1, z = i: both sides are 1/(1 − i)
        let h0 = CMatrix::from_diag(&[c(2.0, 0.0)]);
        let (v1, v2) = crate::hill_models::kato_factors(&[c(-1.0, 0.0)]);
        let chk = verify_resolvent_identity_parts(&h0, &v1, &v2, c(0.0, 1.0)).unwrap();
        assert!(chk.residual <= 1e-15);
        assert!(rel(chk.sigma_min_h, c(1.0, -1.0).norm()) < 1e-15);
        let h0 = CMatrix::from_diag(&[c(2.0, 0.0), c(5.0, 0.0)]);
        let zero = [c(0.0, 0.0); 2];
        let chk = verify_resolvent_identity_parts(&h0, &zero, &zero, c(1.0, 1.0)).unwrap();
        assert_eq!(chk.residual, 0.0);
    }

    #[test]
    fn random_resolvent_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h0 = sampling::hermitian::<f64, _>(64, &mut rng);
        let v: Vec<Complex<f64>> = (0..64)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let (v1, v2) = crate::hill_models::kato_factors(&v);
        let chk = verify_resolvent_identity_parts(&h0, &v1, &v2, c(-5.0, 0.0)).unwrap();
        assert!(chk.holds(), "{}", chk.residual);
    }

    #[test]
    fn near_spectrum_and_singular_middle() {
        let h0 = CMatrix::from_diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        let zero = [c(0.0, 0.0); 2];
        assert!(matches!(
            verify_resolvent_identity_parts(&h0, &zero, &zero, c(2.0, 0.0)),
            Err(OperatorError::NearSpectrum { side: Side::H0, .. })
        ));
        // v = −1 at the first site moves the eigenvalue 2 to 1
        let (v1, v2) = crate::hill_models::kato_factors(&[c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            verify_resolvent_identity_parts(&h0, &v1, &v2, c(1.0, 0.0)),
            Err(OperatorError::NearSpectrum { side: Side::H, .. })
        ));
        assert!(verify_resolvent_identity_parts(&h0, &v1[..1], &v2, c(0.0, 1.0)).is_err());
    }

    #[test]
    fn holder_examples() {
        let i4 = CMatrix::<f64>::identity(4);
        let chk = verify_schatten_holder(&i4, &i4, 2.0).unwrap();
        assert!(rel(chk.lhs, 2.0) < 1e-15 && rel(chk.rhs, 2.0) < 1e-15 && chk.holds());
        let a = CMatrix::from_diag(&[c(2.0, 0.0), c(0.0, 0.0)]);
        let b = CMatrix::from_diag(&[c(0.0, 0.0), c(3.0, 0.0)]);
        let chk = verify_schatten_holder(&a, &b, 1.0).unwrap();
        assert_eq!(chk.lhs, 0.0);
        // ‖A‖_{S_2} ‖B‖_{S_2} = 2 · 3
        assert!(rel(chk.rhs, 6.0) < 1e-15);
        assert!(verify_schatten_holder(&a, &CMatrix::zeros(3, 3), 1.0).is_err());
    }

    #[test]
    fn neumann_examples() {
        let t = CMatrix::<f64>::identity(3).scale(c(-0.5, 0.0));
        let chk = verify_neumann_bound(&t).unwrap();
        assert!(rel(chk.norm_inv, 2.0) < 1e-15 && chk.holds());
        let chk = verify_neumann_bound(&CMatrix::<f64>::zeros(3, 3)).unwrap();
        assert!(rel(chk.norm_inv, 1.0) < 1e-15);
        assert!(matches!(
            verify_neumann_bound(&CMatrix::<f64>::identity(2).scale(c(0.6, 0.0))),
            Err(OperatorError::PreconditionFailed { .. })
        ));
    }

    #[test]
    fn neumann_random_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let mut s: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..0.5)).collect();
            s[0] = 0.5;
            let t = sampling::with_singular_values(&s, &mut rng);
            let chk = verify_neumann_bound(&t).unwrap();
            assert!(chk.holds(), "{}", chk.norm_inv);
        }
    }

    #[test]
    fn hansmann_examples() {
        let a0 = CMatrix::from_diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let a = CMatrix::from_diag(&[c(0.0, 0.0), c(1.0, 1.0)]);
        assert!(rel(hansmann_ratio(&a0, &a, 2.0).unwrap(), 1.0) < 1e-14);
        let a0 = CMatrix::from_diag(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let a = a0.add_diagonal(c(0.1, 0.0));
        for p in [1.0, 2.0, 3.5] {
            assert!(rel(hansmann_ratio(&a0, &a, p).unwrap(), 1.0) < 1e-12);
        }
        assert!(matches!(
            hansmann_ratio(&a0, &a0, 2.0),
            Err(OperatorError::ZeroPerturbation)
        ));
        let nh = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(matches!(
            hansmann_ratio(&nh, &CMatrix::identity(2), 2.0),
            Err(OperatorError::NotHermitian(_))
        ));
    }

    fn free_op(amplitude: f64) -> DiscretizedOperator<f64> {
        let v0 = PeriodicPotential::free(1.0, 1.0).unwrap();
        discretize(
            &v0,
            |x: f64| c(amplitude * (-(x - 4.0) * (x - 4.0)).exp(), 0.5 * amplitude),
            64,
            8.0,
        )
        .unwrap()
    }

    #[test]
    fn kato_chain_examples() {
        let pack = ExponentPack::new(2.0, 1, 1.0).unwrap();
        let v0 = PeriodicPotential::free(1.0, 1.0).unwrap();
        let op = discretize(&v0, |_| c(0.0, 0.0), 64, 8.0).unwrap();
        let rep = kato_chain_report(&op, -10.0, &pack).unwrap();
        assert!(rep.items.iter().all(|i| i.verdict == Verdict::Within));
        assert_eq!(rep.items[0].quantity, 0.0);
        assert_eq!(rep.items[2].quantity, 0.0);

        let op = free_op(0.1);
        let probe = kato_chain_report(&op, -1e6, &pack).unwrap();
        let w0 = probe.threshold.omega0;
        let rep = kato_chain_report(&op, 2.0 * w0, &pack).unwrap();
        assert_eq!(rep.items[0].verdict, Verdict::Within);
        assert!(rep.items[0].quantity <= 0.5);
        let far = kato_chain_report(&op, 8.0 * w0, &pack).unwrap();
        assert!(far.items[0].quantity < rep.items[0].quantity);
        assert!(matches!(
            kato_chain_report(&op, 0.5 * w0, &pack),
            Err(OperatorError::OmegaAboveThreshold { .. })
        ));
        let json = serde_json::to_value(&rep.items[0]).unwrap();
        assert_eq!(json["verdict"], "within");
    }

    #[test]
    fn kato_chain_requires_positive_a1() {
        let pack = ExponentPack::new(2.0, 1, 1.0).unwrap();
        let v0 = PeriodicPotential::cosine(2.0, PI, 0.0).unwrap();
        let op = discretize(&v0, |_| c(0.0, 0.0), 32, PI).unwrap();
        assert!(matches!(
            kato_chain_report(&op, -100.0, &pack),
            Err(OperatorError::NonPositiveA1(_))
        ));
    }

    #[test]
    fn contour_encloses_spectra() {
        let op = free_op(1.0);
        let pts = gershgorin_contour(&[op.h0(), op.h()], 20);
        assert_eq!(pts.len(), 20);
        let checks = resolvent_contour_checks(&op, 20).unwrap();
        assert!(checks.iter().all(|c| c.holds()));
    }

    #[test]
    fn mathieu_contour_with_roundoff_level_difference() {
        // the difference of the two resolvents is pure rounding noise here, and
        // its singular values once exhausted a per-eigenvalue iteration cap
        let v0 = PeriodicPotential::cosine(2.0, PI, 1.5).unwrap();
        let op = discretize(
            &v0,
            |x: f64| c(-4.0, 2.0) * (-(x - 4.0 * PI).powi(2)).exp(),
            256,
            8.0 * PI,
        )
        .unwrap();
        let checks = resolvent_contour_checks(&op, 20).unwrap();
        assert!(checks.iter().all(|c| c.holds()));
    }
}
