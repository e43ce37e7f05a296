use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hill_models::{BandScan, HillError, PeriodicPotential, DEFAULT_DENSE_LIMIT, MIN_STEPS};
use crate::spectral_constants::ExponentPack;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKindSpec {
    Free,
    Cosine,
    Table,
}

/// `V₀` as declared in a config file. `amplitude` applies to `cosine`;
/// `path` names a two-column CSV for `table`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKindSpec,
    #[serde(default)]
    pub amplitude: f64,
    pub period: f64,
    #[serde(default)]
    pub shift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    /// `ε·A·exp(−((x − center)/width)²)`
    Bump,
    /// `ε·A·w_j` on `cells` equal cells of `support`, with `w_j` uniform in
    /// `[−1,1] + i[−1,1]` drawn from the config seed; zero elsewhere.
    Random,
    /// `ε·A·(re + i·im)` interpolated from a CSV `x,re,im`; zero outside its range.
    Table,
}

/// The perturbation `V`. `amplitude` is a complex number written `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    pub amplitude: Complex<f64>,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSpec {
    pub n: usize,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSpec {
    pub p: f64,
    pub d: u32,
    pub tau: f64,
}

/// Band computation: `count` bands of `V₀` (before any shift) in `[e_min, e_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub e_min: f64,
    pub e_max: f64,
    pub count: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
}

fn default_steps() -> usize {
    BandScan::default().steps
}

fn default_scan_points() -> usize {
    BandScan::default().scan_points
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands_csv: Option<PathBuf>,
}

impl OutputSpec {
    fn is_empty(&self) -> bool {
        self.report.is_none() && self.eigenvalues_csv.is_none() && self.bands_csv.is_none()
    }
}

/// Declarative description of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: PotentialSpec,
    pub perturbation: PerturbationSpec,
    pub discretization: DiscretizationSpec,
    pub exponents: ExponentSpec,
    pub bands: BandSpec,
    /// Fixed filter tolerance; by default `5h²·max(1, E²/12)` at `E = Re λ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter_tol: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "OutputSpec::is_empty")]
    pub output: OutputSpec,
}

/// One rejected field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldIssue {
    pub field: String,
    pub message: String,
}

/// All problems found while validating a config.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigError {
    pub issues: Vec<FieldIssue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config:")?;
        for (i, issue) in self.issues.iter().enumerate() {
            let sep = if i == 0 { " " } else { "; " };
            write!(f, "{sep}[{}] {}", issue.field, issue.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

struct Issues(Vec<FieldIssue>);

impl Issues {
    fn check(&mut self, ok: bool, field: &str, message: impl Into<String>) {
        if !ok {
            self.0.push(FieldIssue {
                field: field.to_string(),
                message: message.into(),
            });
        }
    }
}

fn finite(x: f64) -> bool {
    x.is_finite()
}

impl PotentialSpec {
    pub fn build(&self) -> Result<PeriodicPotential<f64>, HillError> {
        match self.kind {
            PotentialKindSpec::Free => PeriodicPotential::free(self.period, self.shift),
            PotentialKindSpec::Cosine => PeriodicPotential::cosine(self.amplitude, self.period, self.shift),
            PotentialKindSpec::Table => match &self.path {
                Some(path) => PeriodicPotential::from_csv(path, self.period, self.shift),
                None => Err(HillError::Potential("table potential needs a path".into())),
            },
        }
    }
}

impl BandSpec {
    pub fn scan(&self) -> BandScan {
        BandScan {
            steps: self.steps,
            scan_points: self.scan_points,
        }
    }
}

impl ExperimentConfig {
    /// The Mathieu model `V₀ = 2cos 2x` on eight periods with a localized
    /// complex bump.
    pub fn mathieu_default() -> Self {
        let period = std::f64::consts::PI;
        ExperimentConfig {
            potential: PotentialSpec {
                kind: PotentialKindSpec::Cosine,
                amplitude: 2.0,
                period,
                shift: 0.0,
                path: None,
            },
            perturbation: PerturbationSpec {
                kind: PerturbationKind::Bump,
                amplitude: Complex::new(-4.0, 2.0),
                epsilon: 1.0,
                center: Some(4.0 * period),
                width: Some(1.0),
                support: None,
                cells: None,
                path: None,
            },
            discretization: DiscretizationSpec {
                n: 512,
                length: 8.0 * period,
            },
            exponents: ExponentSpec { p: 2.0, d: 1, tau: 1.0 },
            bands: BandSpec {
                e_min: -2.5,
                e_max: 20.0,
                count: 4,
                steps: default_steps(),
                scan_points: default_scan_points(),
            },
            filter_tol: None,
            seed: 7,
            output: OutputSpec::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError {
            issues: vec![FieldIssue {
                field: "<document>".into(),
                message: e.to_string(),
            }],
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            issues: vec![FieldIssue {
                field: "<file>".into(),
                message: format!("{}: {e}", path.display()),
            }],
        })?;
        Self::from_json(&text)
    }

    /// Same experiment with a different `ε`.
    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        let mut cfg = self.clone();
        cfg.perturbation.epsilon = epsilon;
        cfg
    }

    /// Checks every field that can be checked without running the pipeline.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut is = Issues(Vec::new());
        let pot = &self.potential;
        is.check(
            finite(pot.period) && pot.period > 0.0,
            "potential.period",
            "must be positive",
        );
        is.check(finite(pot.amplitude), "potential.amplitude", "must be finite");
        is.check(finite(pot.shift), "potential.shift", "must be finite");
        is.check(
            pot.kind != PotentialKindSpec::Table || pot.path.is_some(),
            "potential.path",
            "required for kind \"table\"",
        );

        let per = &self.perturbation;
        is.check(
            finite(per.amplitude.re) && finite(per.amplitude.im),
            "perturbation.amplitude",
            "must be finite",
        );
        is.check(
            finite(per.epsilon) && per.epsilon > 0.0,
            "perturbation.epsilon",
            "must be positive",
        );
        match per.kind {
            PerturbationKind::Bump => {
                is.check(
                    per.center.is_some_and(finite),
                    "perturbation.center",
                    "required (finite) for kind \"bump\"",
                );
                is.check(
                    per.width.is_some_and(|w| finite(w) && w > 0.0),
                    "perturbation.width",
                    "required and positive for kind \"bump\"",
                );
            }
            PerturbationKind::Random => {
                let len = self.discretization.length;
                is.check(
                    per.support
                        .is_some_and(|[a, b]| finite(a) && finite(b) && 0.0 <= a && a < b && b <= len),
                    "perturbation.support",
                    "required for kind \"random\", with 0 <= lo < hi <= discretization.length",
                );
                is.check(
                    per.cells.is_some_and(|c| c >= 1),
                    "perturbation.cells",
                    "required and at least 1 for kind \"random\"",
                );
            }
            PerturbationKind::Table => {
                is.check(per.path.is_some(), "perturbation.path", "required for kind \"table\"");
            }
        }

        let disc = &self.discretization;
        is.check(
            (16..=DEFAULT_DENSE_LIMIT).contains(&disc.n),
            "discretization.n",
            format!("must lie in [16, {DEFAULT_DENSE_LIMIT}]"),
        );
        if finite(pot.period) && pot.period > 0.0 {
            let cells = (disc.length / pot.period).round();
            is.check(
                finite(disc.length)
                    && cells >= 1.0
                    && (disc.length / pot.period - cells).abs() <= 1e-9 * cells.max(1.0),
                "discretization.length",
                "must be a positive multiple of potential.period",
            );
        }

        let ex = &self.exponents;
        is.check(ex.d == 1, "exponents.d", "experiments are one-dimensional; d must be 1");
        if ex.d == 1 {
            if let Err(e) = ExponentPack::new(ex.p, ex.d, ex.tau) {
                let field = match e {
                    crate::spectral_constants::ConstantsError::Tau { .. } => "exponents.tau",
                    _ => "exponents.p",
                };
                is.check(false, field, e.to_string());
            }
        }

        let b = &self.bands;
        is.check(
            finite(b.e_min) && finite(b.e_max) && b.e_min < b.e_max,
            "bands.e_min",
            "need finite e_min < e_max",
        );
        is.check(b.count >= 1, "bands.count", "at least one band is required");
        is.check(
            b.steps >= MIN_STEPS,
            "bands.steps",
            format!("must be at least {MIN_STEPS}"),
        );
        is.check(b.scan_points >= 16, "bands.scan_points", "must be at least 16");

        if let Some(t) = self.filter_tol {
            is.check(finite(t) && t > 0.0, "filter_tol", "must be positive");
        }
        if is.0.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { issues: is.0 })
        }
    }

    pub(crate) fn exponent_pack(&self) -> ExponentPack<f64> {
        ExponentPack::new(self.exponents.p, self.exponents.d, self.exponents.tau).expect("validated exponents")
    }

    pub(crate) fn band_scan(&self) -> BandScan {
        self.bands.scan()
    }

    pub(crate) fn build_potential(&self) -> Result<PeriodicPotential<f64>, HillError> {
        self.potential.build()
    }

    /// The perturbation as a function of `x`, including `ε`.
    pub(crate) fn build_perturbation(&self) -> Result<Perturbation, String> {
        let per = &self.perturbation;
        let scale = per.amplitude * per.epsilon;
        Ok(match per.kind {
            PerturbationKind::Bump => Perturbation::Bump {
                scale,
                center: per.center.expect("validated center"),
                width: per.width.expect("validated width"),
            },
            PerturbationKind::Random => {
                let [lo, hi] = per.support.expect("validated support");
                let cells = per.cells.expect("validated cells");
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let values = (0..cells)
                    .map(|_| scale * Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                Perturbation::Cells { lo, hi, values }
            }
            PerturbationKind::Table => {
                let path = per.path.as_deref().expect("validated path");
                let (xs, values) = read_complex_table(path)?;
                Perturbation::Table {
                    xs,
                    values: values.into_iter().map(|v| v * scale).collect(),
                }
            }
        })
    }
}

fn read_complex_table(path: &Path) -> Result<(Vec<f64>, Vec<Complex<f64>>), String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let parsed: Result<Vec<f64>, _> = record.iter().take(3).map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) if row.len() == 3 => {
                xs.push(row[0]);
                vs.push(Complex::new(row[1], row[2]));
            }
            _ if line == 0 => continue,
            _ => return Err(format!("{}: row {} is not `x,re,im`", path.display(), line + 1)),
        }
    }
    if xs.len() < 2 || xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(format!("{}: need at least two rows with increasing x", path.display()));
    }
    Ok((xs, vs))
}

/// Evaluable form of [`PerturbationSpec`].
#[derive(Clone, Debug)]
pub(crate) enum Perturbation {
    Bump {
        scale: Complex<f64>,
        center: f64,
        width: f64,
    },
    Cells {
        lo: f64,
        hi: f64,
        values: Vec<Complex<f64>>,
    },
    Table {
        xs: Vec<f64>,
        values: Vec<Complex<f64>>,
    },
}

impl Perturbation {
    pub(crate) fn eval(&self, x: f64) -> Complex<f64> {
        let zero = Complex::new(0.0, 0.0);
        match self {
            Perturbation::Bump { scale, center, width } => {
                let t = (x - center) / width;
                scale * (-t * t).exp()
            }
            Perturbation::Cells { lo, hi, values } => {
                if x < *lo || x >= *hi {
                    return zero;
                }
                let k = ((x - lo) / (hi - lo) * values.len() as f64) as usize;
                values[k.min(values.len() - 1)]
            }
            Perturbation::Table { xs, values } => {
                if x < xs[0] || x > xs[xs.len() - 1] {
                    return zero;
                }
                let k = xs.partition_point(|&xi| xi <= x).clamp(1, xs.len() - 1);
                let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
                values[k - 1] + (values[k] - values[k - 1]) * t
            }
        }
    }
}
