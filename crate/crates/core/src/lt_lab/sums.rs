use num_complex::Complex;
use serde::Serialize;

use crate::band_geometry::BandSet;
use crate::quadrature::{integrate_to_infinity, Tolerance};
use crate::scalar::Real;
use crate::spectral_constants::{lt_weight, weight_integral, ConstantsError, ExponentPack};

/// Relative tolerance of the per-eigenvalue consistency chain.
pub const CHAIN_TOL: f64 = 1e-8;

/// `Σ dist(z,I)^p / (s₀ + |z|)^{d/2+τ}`. Reports use `s₀ = |ω₀|` for the main
/// bound and `s₀ = 1` for the two `(1 + |z|)` forms.
pub fn lt_sum_thm1<T: Real>(eigs: &[Complex<T>], bands: &BandSet<T>, pack: &ExponentPack<T>, s0: T) -> T {
    eigs.iter().map(|&z| lt_weight(z, bands, pack, s0)).sum()
}

/// `dist(z,I)^p / (|z−ω|^p (|z−ω| + a₁ − ω)^p)`
pub fn prop1_weight<T: Real>(z: Complex<T>, bands: &BandSet<T>, p: T, omega: T, a1: T) -> T {
    let dist = bands.dist(z);
    if dist == T::zero() {
        return T::zero();
    }
    let r = (z - omega).norm();
    dist.powf(p) / (r.powf(p) * (r + a1 - omega).powf(p))
}

/// `Σ dist(z,I)^p / (|z−ω|^p (|z−ω| + a₁ − ω)^p)` for `ω ≤ ω₀`.
pub fn lt_sum_prop1<T: Real>(
    eigs: &[Complex<T>],
    bands: &BandSet<T>,
    pack: &ExponentPack<T>,
    omega: T,
    a1: T,
    omega0: T,
) -> Result<T, SumError> {
    if !(omega <= omega0) {
        return Err(SumError::OmegaAboveThreshold {
            omega: omega.to_f64_lossy(),
            omega0: omega0.to_f64_lossy(),
        });
    }
    Ok(eigs.iter().map(|&z| prop1_weight(z, bands, pack.p, omega, a1)).sum())
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SumError {
    #[error("omega = {omega} must not exceed omega0 = {omega0}")]
    OmegaAboveThreshold { omega: f64, omega0: f64 },
    #[error(transparent)]
    Constants(#[from] ConstantsError),
}

/// One eigenvalue's link in the chain
///
/// ```text
/// ∫_{s₀}^∞ s^α · w_prop(z, ω = −s) ds  ≥  3^{−p} B(α+1, d/2+τ) · w_main(z, s₀)
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainLink<T> {
    pub lhs: T,
    pub lhs_error: T,
    pub rhs: T,
    pub holds: bool,
}

pub fn consistency_link<T: Real>(
    z: Complex<T>,
    bands: &BandSet<T>,
    pack: &ExponentPack<T>,
    a1: T,
    s0: T,
) -> Result<ChainLink<T>, ConstantsError> {
    let alpha = pack.alpha;
    let p = pack.p;
    let q = integrate_to_infinity(
        |s: T| s.powf(alpha) * prop1_weight(z, bands, p, -s, a1),
        s0,
        Tolerance::default(),
    )?;
    let b = weight_integral(alpha, p)?;
    let rhs = T::lit(3.0).powf(-p) * b * lt_weight(z, bands, pack, s0);
    Ok(ChainLink {
        lhs: q.value,
        lhs_error: q.error,
        rhs,
        holds: q.value >= rhs * (T::one() - T::lit(CHAIN_TOL)),
    })
}
