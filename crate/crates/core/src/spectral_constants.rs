//! Closed-form constants of the Lieb–Thirring estimate and the one-dimensional
//! integrals they come from.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::band_geometry::BandSet;
use crate::quadrature::{integrate_to_infinity, QuadratureError, Tolerance};
use crate::scalar::Real;
use crate::special::{beta, gamma};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstantsError {
    #[error("dimension must be a positive integer, got {0}")]
    Dimension(u32),
    #[error("exponent p = {p} must exceed {bound} for d = {d}")]
    Exponent { p: f64, d: u32, bound: f64 },
    #[error("tau = {tau} must lie in (0, {upper})")]
    Tau { tau: f64, upper: f64 },
    #[error("integral diverges for alpha = {alpha}, p = {p}")]
    Divergent { alpha: f64, p: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("s0 = {s0} must be at least 1 + a1 = {min}")]
    ThresholdTooSmall { s0: f64, min: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Exponents `(p, d, τ)` with the derived `q = 1 − d/(2p)` and
/// `α = p(q+1) − 1 − τ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPack<T> {
    pub p: T,
    pub d: u32,
    pub q: T,
    pub tau: T,
    pub alpha: T,
}

impl<T: Real> ExponentPack<T> {
    pub fn new(p: T, d: u32, tau: T) -> Result<Self, ConstantsError> {
        check_hypothesis(p, d)?;
        let q = T::one() - half_dim::<T>(d) / p;
        let upper = (q + T::one()) * p - T::one();
        if !(tau > T::zero() && tau < upper) {
            return Err(ConstantsError::Tau {
                tau: tau.to_f64_lossy(),
                upper: upper.to_f64_lossy(),
            });
        }
        Ok(ExponentPack {
            p,
            d,
            q,
            tau,
            alpha: upper - tau,
        })
    }

    /// `d/2 + τ`, the decay exponent of the main weight.
    pub fn weight_exponent(&self) -> T {
        half_dim::<T>(self.d) + self.tau
    }
}

fn half_dim<T: Real>(d: u32) -> T {
    T::lit(f64::from(d) / 2.0)
}

fn check_dimension(d: u32) -> Result<(), ConstantsError> {
    if d == 0 {
        Err(ConstantsError::Dimension(d))
    } else {
        Ok(())
    }
}

/// `p > max(d/2, 1)`
fn check_hypothesis<T: Real>(p: T, d: u32) -> Result<(), ConstantsError> {
    check_dimension(d)?;
    let bound = half_dim::<T>(d).max(T::one());
    if !(p > bound) {
        return Err(ConstantsError::Exponent {
            p: p.to_f64_lossy(),
            d,
            bound: bound.to_f64_lossy(),
        });
    }
    Ok(())
}

fn check_above_half_dim<T: Real>(p: T, d: u32) -> Result<(), ConstantsError> {
    check_dimension(d)?;
    if !(p > half_dim::<T>(d)) {
        return Err(ConstantsError::Exponent {
            p: p.to_f64_lossy(),
            d,
            bound: f64::from(d) / 2.0,
        });
    }
    Ok(())
}

/// `∫_{ℝ^d} (|x|² + 1)^{−p} dx = π^{d/2} Γ(p − d/2) / Γ(p)`, for `p > d/2`.
pub fn c_integral<T: Real>(p: T, d: u32) -> Result<T, ConstantsError> {
    check_above_half_dim(p, d)?;
    let hd = half_dim::<T>(d);
    Ok(T::PI().powf(hd) * gamma(p - hd) / gamma(p))
}

/// `η(p,d) = {Γ(p − d/2) / (2^d π^{d/2} Γ(p))}^{1/(2p)}`.
///
/// Equivalently `η^{2p} = (2π)^{−d} · c_integral(p, d)`.
pub fn eta<T: Real>(p: T, d: u32) -> Result<T, ConstantsError> {
    check_above_half_dim(p, d)?;
    let hd = half_dim::<T>(d);
    let inner = gamma(p - hd) / (T::lit(2.0).powf(T::lit(f64::from(d))) * T::PI().powf(hd) * gamma(p));
    Ok(inner.powf(T::one() / (T::lit(2.0) * p)))
}

/// Threshold `ω₀ < 0` below which the Neumann series for the Kato middle
/// factor converges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOmega<T> {
    pub omega0: T,
    pub magnitude: T,
}

impl<T: Real> ThresholdOmega<T> {
    /// `s₀ = |ω₀|`
    pub fn s0(&self) -> T {
        self.magnitude
    }
}

/// `|ω₀| = 1 + a_1 + 2‖V₀‖_∞ + (4η²(p,d)‖V‖_p)^{1/q}`.
pub fn omega0<T: Real>(p: T, d: u32, a1: T, v0_sup: T, v_norm: T) -> Result<ThresholdOmega<T>, ConstantsError> {
    check_hypothesis(p, d)?;
    if !(a1 > T::zero()) {
        return Err(ConstantsError::Negative {
            name: "a1",
            value: a1.to_f64_lossy(),
        });
    }
    for (name, value) in [("v0_sup", v0_sup), ("v_norm", v_norm)] {
        if !(value >= T::zero()) {
            return Err(ConstantsError::Negative {
                name,
                value: value.to_f64_lossy(),
            });
        }
    }
    let q = T::one() - half_dim::<T>(d) / p;
    let e = eta(p, d)?;
    let perturbation = (T::lit(4.0) * e * e * v_norm).powf(T::one() / q);
    let magnitude = T::one() + a1 + T::lit(2.0) * v0_sup + perturbation;
    Ok(ThresholdOmega {
        omega0: -magnitude,
        magnitude,
    })
}

/// `∫_0^∞ t^α (1+t)^{−2p} dt = B(α+1, 2p−α−1)`.
pub fn weight_integral<T: Real>(alpha: T, p: T) -> Result<T, ConstantsError> {
    let tail = T::lit(2.0) * p - alpha - T::one();
    if !(alpha > -T::one() && tail > T::zero()) {
        return Err(ConstantsError::Divergent {
            alpha: alpha.to_f64_lossy(),
            p: p.to_f64_lossy(),
        });
    }
    Ok(beta(alpha + T::one(), tail))
}

/// `dist(z, I)^p / (s₀ + |z|)^{d/2+τ}`.
pub fn lt_weight<T: Real>(z: Complex<T>, bands: &BandSet<T>, pack: &ExponentPack<T>, s0: T) -> T {
    let dist = bands.dist(z);
    if dist == T::zero() {
        return T::zero();
    }
    dist.powf(pack.p) / (s0 + z.norm()).powf(pack.weight_exponent())
}

/// Both sides of the lower bound on the `s`-integral, evaluated independently.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SIntegralCheck<T> {
    pub lhs: T,
    pub lhs_error: T,
    pub rhs: T,
}

impl<T: Real> SIntegralCheck<T> {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

/// Compares
///
/// ```text
/// ∫_{s₀}^∞ s^α ds / ((s+|z|)^p (2s+|z|+a₁)^p)
///     ≥ 3^{−p} B(α+1, d/2+τ) / (|z|+s₀)^{d/2+τ}
/// ```
///
/// with the left side computed by adaptive quadrature.
pub fn s_integral_check<T: Real>(
    z_abs: T,
    a1: T,
    s0: T,
    pack: &ExponentPack<T>,
) -> Result<SIntegralCheck<T>, ConstantsError> {
    if !(s0 >= T::one() + a1) {
        return Err(ConstantsError::ThresholdTooSmall {
            s0: s0.to_f64_lossy(),
            min: (T::one() + a1).to_f64_lossy(),
        });
    }
    let p = pack.p;
    let alpha = pack.alpha;
    let two = T::lit(2.0);
    let q = integrate_to_infinity(
        |s: T| s.powf(alpha) / ((s + z_abs).powf(p) * (two * s + z_abs + a1).powf(p)),
        s0,
        Tolerance::default(),
    )?;
    let rhs = T::lit(3.0).powf(-p) * weight_integral(alpha, p)? / (z_abs + s0).powf(pack.weight_exponent());
    Ok(SIntegralCheck {
        lhs: q.value,
        lhs_error: q.error,
        rhs,
    })
}
