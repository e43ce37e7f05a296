//! Numerical laboratory for Lieb–Thirring-type inequalities on complex
//! eigenvalues of Schrödinger operators `H = H₀ + V` whose unperturbed part has
//! an infinite-band spectrum.
//!
//! The numerical core is generic over the scalar type (`f32`/`f64`, see
//! [`Real`]); concrete aliases for `f64` and `f32` live at the crate root.
//! The experiment driver in [`lt_lab`] works in `f64`.

// `!(a < b)` is used on purpose so that NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod band_geometry;
pub mod hill_models;
pub mod linalg;
pub mod lt_lab;
pub mod operator_calculus;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod spectral_constants;

pub use scalar::Real;

pub type BandSet64 = band_geometry::BandSet<f64>;
pub type BandSet32 = band_geometry::BandSet<f32>;
pub type ExponentPack64 = spectral_constants::ExponentPack<f64>;
pub type ExponentPack32 = spectral_constants::ExponentPack<f32>;
pub type CMatrix64 = linalg::CMatrix<f64>;
pub type CMatrix32 = linalg::CMatrix<f32>;
