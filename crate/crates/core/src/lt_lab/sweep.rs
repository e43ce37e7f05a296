use rayon::prelude::*;
use serde::Serialize;

use super::canonical::{canonical_hash, to_canonical_json};
use super::config::{ConfigError, ExperimentConfig, FieldIssue};
use super::experiment::{compute_report, LtReport, VERSION};
use super::LtError;

/// Relative slack allowed when checking that the sum does not grow as `ε`
/// shrinks.
pub const MONOTONE_SLACK: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub version: String,
    pub config_hash: String,
    pub epsilons: Vec<f64>,
    pub reports: Vec<LtReport>,
    /// Least-squares slope of `log lt_sum_thm1` against `log ε` over the
    /// positive sums; null with fewer than two.
    pub slope: Option<f64>,
    pub slope_expected_min: f64,
    /// Soft expectation `slope ≥ p − 0.5`. Reported, never asserted.
    pub slope_meets_expectation: Option<bool>,
    /// `sum(ε_{i+1}) ≤ (1 + MONOTONE_SLACK)·sum(ε_i)` along the sweep.
    pub non_increasing: bool,
    pub empirical_constant_min: Option<f64>,
    pub empirical_constant_max: Option<f64>,
    pub chain_holds: bool,
}

impl SweepReport {
    pub fn to_canonical_json(&self) -> String {
        to_canonical_json(self).expect("sweep report serializes")
    }

    pub fn assertions_hold(&self) -> bool {
        self.chain_holds && self.non_increasing
    }
}

fn epsilon_issue(message: &str) -> LtError {
    LtError::Config(ConfigError {
        issues: vec![FieldIssue {
            field: "epsilons".into(),
            message: message.into(),
        }],
    })
}

/// Runs `cfg` once per `ε` (in parallel) and summarizes how the sums scale.
pub fn epsilon_sweep(cfg: &ExperimentConfig, epsilons: &[f64]) -> Result<SweepReport, LtError> {
    if epsilons.is_empty() {
        return Err(epsilon_issue("must not be empty"));
    }
    if epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(epsilon_issue("must be positive and finite"));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(epsilon_issue("must be strictly descending"));
    }
    cfg.validate()?;

    let reports = epsilons
        .par_iter()
        .map(|&e| compute_report(&cfg.with_epsilon(e)))
        .collect::<Result<Vec<_>, _>>()?;

    let sums: Vec<f64> = reports.iter().map(|r| r.lt_sum_thm1.value).collect();
    let slope = log_log_slope(epsilons, &sums);
    let expected = cfg.exponents.p - 0.5;
    let non_increasing = sums.windows(2).all(|w| w[1] <= (1.0 + MONOTONE_SLACK) * w[0]);
    let ratios: Vec<f64> = reports
        .iter()
        .filter_map(|r| r.lt_sum_thm1.empirical_constant)
        .collect();

    Ok(SweepReport {
        version: VERSION.to_string(),
        config_hash: canonical_hash(cfg).map_err(|e| LtError::Stage {
            stage: "config_hash",
            message: e.to_string(),
        })?,
        epsilons: epsilons.to_vec(),
        slope,
        slope_expected_min: expected,
        slope_meets_expectation: slope.map(|s| s >= expected),
        non_increasing,
        empirical_constant_min: ratios.iter().copied().reduce(f64::min),
        empirical_constant_max: ratios.iter().copied().reduce(f64::max),
        chain_holds: reports.iter().all(|r| r.chain_holds),
        reports,
    })
}

/// Slope of the least-squares line through `(log x, log y)` for `y > 0`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 0.5, 0.25];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(2.5)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(log_log_slope(&[1.0], &[2.0]), None);
        assert_eq!(log_log_slope(&xs, &[0.0, 0.0, 0.0]), None);
    }

    #[test]
    fn rejects_bad_epsilon_lists() {
        let cfg = ExperimentConfig::mathieu_default();
        for bad in [&[][..], &[1.0, 1.0], &[0.5, 1.0], &[1.0, -0.5]] {
            match epsilon_sweep(&cfg, bad) {
                Err(LtError::Config(e)) => assert_eq!(e.issues[0].field, "epsilons"),
                other => panic!("{other:?}"),
            }
        }
    }
}
