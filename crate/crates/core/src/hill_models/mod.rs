//! Concrete band-spectrum models: the one-dimensional Hill operator
//! `−y″ + V₀y` with periodic `V₀`, its band edges from the Floquet
//! discriminant, and finite-difference discretizations of `H₀ = −Δ + V₀`
//! and `H = H₀ + V` on a periodic box.

mod discretize;
mod floquet;
mod potential;
mod spectrum;

pub use discretize::{discretize, kato_factors, DiscretizedOperator};
pub use floquet::{
    band_edges, band_edges_with, discriminant, monodromy, BandScan, DiscriminantCurve, DiscriminantValue, HillBands,
    EDGE_TOL, GAP_MERGE, MIN_STEPS,
};
pub use potential::{PeriodicPotential, PotentialKind};
pub use spectrum::{
    discrete_spectrum_outside, discrete_spectrum_outside_with, eigenvalues, eigenvalues_with_limit, EigenCheck,
    BACKWARD_ERROR_BOUND, DEFAULT_DENSE_LIMIT,
};

use thiserror::Error;

use crate::band_geometry::GeometryError;
use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HillError {
    #[error("invalid potential: {0}")]
    Potential(String),
    #[error("at least {min} integration steps required, got {got}")]
    TooFewSteps { min: usize, got: usize },
    #[error("invalid energy range [{lo}, {hi}]")]
    EnergyRange { lo: f64, hi: f64 },
    #[error("energy range starts inside a band at {lo}; lower the range start below the spectrum")]
    RangeStartsInBand { lo: f64 },
    #[error("only {0} bands found in the energy range")]
    FewerBandsFound(usize),
    #[error("grid needs at least 16 points, got {0}")]
    GridTooSmall(usize),
    #[error("box length {length} is not a multiple of the period {period}")]
    NotPeriodMultiple { length: f64, period: f64 },
    #[error("matrix dimension {n} exceeds the dense limit {limit}")]
    DenseLimit { n: usize, limit: usize },
    #[error("eigensolver did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("eigenpair backward error {residual:e} exceeds {bound:e}")]
    BackwardError { residual: f64, bound: f64 },
    #[error("filter tolerance must be positive, got {0}")]
    FilterTolerance(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("i/o: {0}")]
    Io(String),
}
