//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Finite ranges are bisected globally on the interval with the largest error
//! estimate. Semi-infinite ranges `[a, ∞)` are mapped onto `[0, 1)` with
//! `s = a + u/(1-u)`; Gauss–Kronrod nodes never touch the endpoint `u = 1`.

use thiserror::Error;

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions (value {value:e}, error estimate {error:e})"
    )]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand produced a non-finite value at {at}")]
    NonFinite { at: f64 },
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut scaled = err.abs();
    if res_asc != T::zero() && scaled != T::zero() {
        let scale = (T::lit(200.0) * scaled / res_asc).powf(T::lit(1.5));
        scaled = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let eps50 = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / eps50 {
        scaled = scaled.max(eps50 * res_abs);
    }
    scaled
}

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Result<Segment<T>, QuadratureError> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let eval = |x: T| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite { at: x.to_f64_lossy() })
        }
    };

    let f_center = eval(center)?;
    let mut res_g = f_center * T::lit(WG[3]);
    let mut res_k = f_center * T::lit(WGK[7]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let x = half_len * T::lit(XGK[j]);
        let f1 = eval(center - x)?;
        let f2 = eval(center + x)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k += w * (f1 + f2);
        res_abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    let error = rescale_error((res_k - res_g) * half_len, res_abs * scale, res_asc * scale);
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(f: F, a: T, b: T, tol: Tolerance) -> Result<Quadrature<T>, QuadratureError>
where
    T: Real,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok(Quadrature {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    let mut segments = vec![gk15(&f, a, b)?];
    let mut evaluations = 15;
    let abs_tol = T::lit(tol.abs);
    let rel_tol = T::lit(tol.rel);
    loop {
        let value: T = segments.iter().map(|s| s.value).sum();
        let error: T = segments.iter().map(|s| s.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Quadrature {
                value,
                error,
                evaluations,
            });
        }
        if segments.len() >= tol.max_subdivisions {
            return Err(QuadratureError::NonConvergence {
                value: value.to_f64_lossy(),
                error: error.to_f64_lossy(),
                subdivisions: segments.len(),
            });
        }
        let (worst, _) =
            segments.iter().enumerate().fold(
                (0, T::neg_infinity()),
                |acc, (i, s)| {
                    if s.error > acc.1 {
                        (i, s.error)
                    } else {
                        acc
                    }
                },
            );
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval exhausted at machine resolution
            let value: T = segments.iter().map(|s| s.value).sum::<T>() + seg.value;
            let error: T = segments.iter().map(|s| s.error).sum::<T>() + seg.error;
            return Err(QuadratureError::NonConvergence {
                value: value.to_f64_lossy(),
                error: error.to_f64_lossy(),
                subdivisions: segments.len() + 1,
            });
        }
        segments.push(gk15(&f, seg.a, mid)?);
        segments.push(gk15(&f, mid, seg.b)?);
        evaluations += 30;
    }
}

/// Integrates `f` over `[a, ∞)` through the map `s = a + u/(1-u)`.
pub fn integrate_to_infinity<T, F>(f: F, a: T, tol: Tolerance) -> Result<Quadrature<T>, QuadratureError>
where
    T: Real,
    F: Fn(T) -> T,
{
    let mapped = |u: T| {
        let one_minus = T::one() - u;
        let s = a + u / one_minus;
        let v = f(s);
        if v == T::zero() {
            T::zero()
        } else {
            v / (one_minus * one_minus)
        }
    };
    integrate(mapped, T::zero(), T::one(), tol)
}

/// Integrates `f` over the whole real line, split at the origin.
pub fn integrate_real_line<T, F>(f: F, tol: Tolerance) -> Result<Quadrature<T>, QuadratureError>
where
    T: Real,
    F: Fn(T) -> T,
{
    let right = integrate_to_infinity(&f, T::zero(), tol)?;
    let left = integrate_to_infinity(|x: T| f(-x), T::zero(), tol)?;
    Ok(Quadrature {
        value: right.value + left.value,
        error: right.error + left.error,
        evaluations: right.evaluations + left.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x: f64| x.powi(5) - 3.0 * x * x, -1.0, 2.0, Tolerance::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((q.value - exact).abs() < 1e-13);
        assert_eq!(q.evaluations, 15);
    }

    #[test]
    fn oscillatory_integral() {
        let q = integrate(|x: f64| (20.0 * x).sin(), 0.0, PI, Tolerance::default()).unwrap();
        assert!(q.value.abs() < 1e-11);
        let q = integrate(|x: f64| x.sin(), 0.0, PI, Tolerance::default()).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_lorentzian() {
        let q = integrate_to_infinity(|x: f64| 1.0 / (1.0 + x * x), 0.0, Tolerance::default()).unwrap();
        assert!((q.value - PI / 2.0).abs() < 1e-11);
        let q = integrate_real_line(|x: f64| (-x * x).exp(), Tolerance::default()).unwrap();
        assert!((q.value - PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let q = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate(|_x: f64| f64::NAN, 0.0, 1.0, Tolerance::default()).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }));
    }

    #[test]
    fn divergent_integral_does_not_converge() {
        let tol = Tolerance {
            max_subdivisions: 200,
            ..Tolerance::default()
        };
        let err = integrate_to_infinity(|x: f64| 1.0 / (1.0 + x), 0.0, tol).unwrap_err();
        assert!(matches!(err, QuadratureError::NonConvergence { .. }));
    }
}
