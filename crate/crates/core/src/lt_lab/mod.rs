//! Experiment driver: config → band edges → discretization → eigenvalues →
//! σ_d candidates → Lieb–Thirring sums → canonical JSON report.

mod canonical;
mod config;
mod experiment;
mod sums;
mod sweep;

pub use canonical::{canonical_hash, to_canonical_json};
pub use config::{
    BandSpec, ConfigError, DiscretizationSpec, ExperimentConfig, ExponentSpec, FieldIssue, OutputSpec,
    PerturbationKind, PerturbationSpec, PotentialKindSpec, PotentialSpec,
};
pub use experiment::{
    band_rectangles_csv, build_model, compute_report, compute_spectrum, eigenvalue_cloud_csv, run_experiment,
    spectrum_csv, BandRecord, Candidate, Cluster, DiscretizationRecord, FilterRecord, LtReport, Model, ShiftRecord,
    SumRecord, CLUSTER_GAP, FILTER_FACTOR, VERSION,
};
pub use sums::{consistency_link, lt_sum_prop1, lt_sum_thm1, prop1_weight, ChainLink, SumError, CHAIN_TOL};
pub use sweep::{epsilon_sweep, log_log_slope, SweepReport, MONOTONE_SLACK};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LtError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("stage {stage} failed: {message}")]
    Stage { stage: &'static str, message: String },
    #[error("i/o: {0}")]
    Io(String),
}
