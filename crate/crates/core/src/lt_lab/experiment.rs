use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex;
use serde::Serialize;

use super::canonical::{canonical_hash, to_canonical_json};
use super::config::ExperimentConfig;
use super::sums::{consistency_link, lt_sum_prop1, lt_sum_thm1, prop1_weight, ChainLink};
use super::LtError;
use crate::band_geometry::BandSet;
use crate::hill_models::{
    band_edges_with, discrete_spectrum_outside_with, discretize, eigenvalues_with_limit, DiscretizedOperator,
    EigenCheck, HillBands, PeriodicPotential, DEFAULT_DENSE_LIMIT,
};
use crate::spectral_constants::{lt_weight, omega0, ExponentPack};

/// Crate version recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Eigenvalue pairs closer than this are listed as clusters.
pub const CLUSTER_GAP: f64 = 1e-6;
/// Multiplier on `h²` in the default filter tolerance.
pub const FILTER_FACTOR: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftRecord {
    /// Shift declared in the config.
    pub user: f64,
    /// Shift added so that `a₁ > 0`.
    pub auto: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandRecord {
    pub edges: BandSet<f64>,
    pub shift: ShiftRecord,
    pub truncated: bool,
    pub merged_gaps: usize,
    pub max_det_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscretizationRecord {
    pub n: usize,
    pub length: f64,
    pub mesh: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilterRecord {
    /// Eigenvalues with `Re λ ≥ window_re_max` are not classified.
    pub window_re_max: f64,
    /// `5h²`; the tolerance at `E = Re λ` is `5h²·max(1, E²/12)`.
    pub base_tol: f64,
    /// Fixed tolerance from the config, replacing the default when present.
    pub fixed_tol: Option<f64>,
}

/// A σ_d candidate with its weights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub z: Complex<f64>,
    pub dist: f64,
    /// `dist^p / (|ω₀| + |z|)^{d/2+τ}`
    pub weight_thm1: f64,
    /// `dist^p / (|z−ω₀|^p (|z−ω₀| + a₁ − ω₀)^p)`
    pub weight_prop1: f64,
    /// `dist^p / (1 + |z|)^{d/2+τ}`
    pub weight_cor: f64,
    pub chain: ChainLink<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub i: usize,
    pub j: usize,
    pub gap: f64,
}

/// A sum, the scale it is compared with, and their ratio (the empirical constant).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumRecord {
    pub value: f64,
    pub rhs_scale: f64,
    /// `value / rhs_scale`; absent when the scale vanishes.
    pub empirical_constant: Option<f64>,
}

impl SumRecord {
    fn new(value: f64, rhs_scale: f64) -> Self {
        SumRecord {
            value,
            rhs_scale,
            empirical_constant: (rhs_scale > 0.0).then(|| value / rhs_scale),
        }
    }
}

/// Result of one experiment. Serializes deterministically through
/// [`LtReport::to_canonical_json`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LtReport {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub epsilon: f64,
    pub bands: BandRecord,
    pub discretization: DiscretizationRecord,
    pub exponents: ExponentPack<f64>,
    /// Leftmost band edge `a₁`.
    pub a1: f64,
    /// `‖V₀ + c‖_∞`
    pub v0_sup: f64,
    /// Grid norm `(h Σ |V_j|^p)^{1/p}`.
    pub v_norm_p: f64,
    pub omega0: f64,
    pub filter: FilterRecord,
    pub eigenvalues: Vec<Complex<f64>>,
    pub eigen_check: EigenCheck<f64>,
    pub candidates: Vec<Candidate>,
    pub max_candidate_dist: Option<f64>,
    pub clusters: Vec<Cluster>,
    /// Against `‖V‖_p^p / |ω₀|^τ`.
    pub lt_sum_thm1: SumRecord,
    /// At `ω = ω₀`, against `‖V‖_p^p / |ω₀|^{(q+1)p}`.
    pub lt_sum_prop1: SumRecord,
    /// `Σ dist^p/(1+|z|)^{d/2+τ}` against `(1+|ω₀|)^{d/2} ‖V‖_p^p`.
    pub lt_sum_cor1: SumRecord,
    /// The same sum against `[(1+‖V₀‖_∞)(1+‖V‖_p)]^{d/2q} ‖V‖_p^p`.
    pub lt_sum_cor2: SumRecord,
    /// Whether every candidate's consistency link holds.
    pub chain_holds: bool,
}

impl LtReport {
    pub fn to_canonical_json(&self) -> String {
        to_canonical_json(self).expect("report serializes")
    }

    /// All asserted inequalities hold.
    pub fn assertions_hold(&self) -> bool {
        self.chain_holds
    }
}

/// The models an experiment runs on.
pub struct Model {
    pub potential: PeriodicPotential<f64>,
    pub hill: HillBands<f64>,
    pub op: DiscretizedOperator<f64>,
}

fn stage<E: std::fmt::Display>(name: &'static str) -> impl Fn(E) -> LtError {
    move |e| LtError::Stage {
        stage: name,
        message: e.to_string(),
    }
}

/// Band structure and discretization for a validated config.
pub fn build_model(cfg: &ExperimentConfig) -> Result<Model, LtError> {
    cfg.validate()?;
    let raw = cfg.build_potential().map_err(stage("potential"))?;
    let hill = band_edges_with(
        &raw,
        (cfg.bands.e_min, cfg.bands.e_max),
        cfg.bands.count,
        cfg.band_scan(),
    )
    .map_err(stage("band_edges"))?;
    let potential = raw.shifted(hill.auto_shift);
    let perturbation = cfg.build_perturbation().map_err(stage("perturbation"))?;
    let op = discretize(
        &potential,
        |x| perturbation.eval(x),
        cfg.discretization.n,
        cfg.discretization.length,
    )
    .map_err(stage("discretize"))?;
    Ok(Model { potential, hill, op })
}

/// Eigenvalues of the discretized `H`.
pub fn compute_spectrum(model: &Model) -> Result<(Vec<Complex<f64>>, EigenCheck<f64>), LtError> {
    eigenvalues_with_limit(model.op.h(), DEFAULT_DENSE_LIMIT).map_err(stage("eigenvalues"))
}

/// Runs the pipeline without writing any files.
pub fn compute_report(cfg: &ExperimentConfig) -> Result<LtReport, LtError> {
    let model = build_model(cfg)?;
    let (eigs, eigen_check) = compute_spectrum(&model)?;
    let pack = cfg.exponent_pack();
    let bands = &model.hill.bands;
    let op = &model.op;
    let h = op.mesh();
    let p = pack.p;
    let d = f64::from(pack.d);

    let k = bands.len();
    let window_re_max = if k >= 2 { bands.b(k - 1) } else { bands.b(1) };
    let base_tol = FILTER_FACTOR * h * h;
    let fixed = cfg.filter_tol;
    let windowed: Vec<Complex<f64>> = eigs.iter().copied().filter(|z| z.re < window_re_max).collect();
    let candidates = discrete_spectrum_outside_with(&windowed, bands, |z| {
        fixed.unwrap_or(base_tol * (z.re * z.re / 12.0).max(1.0))
    })
    .map_err(stage("filter"))?;

    let a1 = bands.a1();
    let v0_sup = model.potential.sup_norm();
    let v_norm = op.v_norm_p(p);
    let threshold = omega0(p, pack.d, a1, v0_sup, v_norm).map_err(stage("omega0"))?;
    let w0 = threshold.omega0;
    let s0 = threshold.magnitude;

    let mut details = Vec::with_capacity(candidates.len());
    for &z in &candidates {
        let chain = consistency_link(z, bands, &pack, a1, s0).map_err(stage("consistency_chain"))?;
        details.push(Candidate {
            z,
            dist: bands.dist(z),
            weight_thm1: lt_weight(z, bands, &pack, s0),
            weight_prop1: prop1_weight(z, bands, p, w0, a1),
            weight_cor: lt_weight(z, bands, &pack, 1.0),
            chain,
        });
    }
    let mut clusters = Vec::new();
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let gap = (candidates[i] - candidates[j]).norm();
            if gap < CLUSTER_GAP {
                clusters.push(Cluster { i, j, gap });
            }
        }
    }

    let v_pow = v_norm.powf(p);
    let thm1 = lt_sum_thm1(&candidates, bands, &pack, s0);
    let prop1 = lt_sum_prop1(&candidates, bands, &pack, w0, a1, w0).map_err(stage("lt_sum_prop1"))?;
    let cor = lt_sum_thm1(&candidates, bands, &pack, 1.0);
    let cor2_scale = ((1.0 + v0_sup) * (1.0 + v_norm)).powf(d / (2.0 * pack.q)) * v_pow;
    let chain_holds = details.iter().all(|c| c.chain.holds);
    let max_candidate_dist = details.iter().map(|c| c.dist).reduce(f64::max);

    Ok(LtReport {
        version: VERSION.to_string(),
        config_hash: canonical_hash(cfg).map_err(stage("config_hash"))?,
        seed: cfg.seed,
        epsilon: cfg.perturbation.epsilon,
        bands: BandRecord {
            edges: bands.clone(),
            shift: ShiftRecord {
                user: cfg.potential.shift,
                auto: model.hill.auto_shift,
                total: model.hill.shift,
            },
            truncated: model.hill.truncated,
            merged_gaps: model.hill.merged_gaps,
            max_det_defect: model.hill.max_det_defect,
        },
        discretization: DiscretizationRecord {
            n: op.n(),
            length: op.length(),
            mesh: h,
        },
        exponents: pack,
        a1,
        v0_sup,
        v_norm_p: v_norm,
        omega0: w0,
        filter: FilterRecord {
            window_re_max,
            base_tol,
            fixed_tol: fixed,
        },
        eigenvalues: eigs,
        eigen_check,
        candidates: details,
        max_candidate_dist,
        clusters,
        lt_sum_thm1: SumRecord::new(thm1, v_pow / s0.powf(pack.tau)),
        lt_sum_prop1: SumRecord::new(prop1, v_pow / s0.powf((pack.q + 1.0) * p)),
        lt_sum_cor1: SumRecord::new(cor, (1.0 + s0).powf(d / 2.0) * v_pow),
        lt_sum_cor2: SumRecord::new(cor, cor2_scale),
        chain_holds,
    })
}

/// Runs the pipeline and writes the outputs named in the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<LtReport, LtError> {
    let report = compute_report(cfg)?;
    if let Some(path) = &cfg.output.report {
        write_file(path, &report.to_canonical_json())?;
    }
    if let Some(path) = &cfg.output.eigenvalues_csv {
        write_file(path, &eigenvalue_cloud_csv(&report))?;
    }
    if let Some(path) = &cfg.output.bands_csv {
        write_file(path, &band_rectangles_csv(&report))?;
    }
    Ok(report)
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<(), LtError> {
    std::fs::write(path, text).map_err(|e| LtError::Io(format!("{}: {e}", path.display())))
}

/// `re,im` rows with 17 significant digits.
pub fn spectrum_csv(eigs: &[Complex<f64>]) -> String {
    let mut out = String::from("re,im\n");
    for z in eigs {
        writeln!(out, "{:.16e},{:.16e}", z.re, z.im).unwrap();
    }
    out
}

/// Eigenvalue cloud: every eigenvalue with its distance to the bands and
/// whether it was kept as a σ_d candidate.
pub fn eigenvalue_cloud_csv(report: &LtReport) -> String {
    let mut out = String::from("re,im,dist,candidate\n");
    let mut kept = report.candidates.iter().map(|c| c.z).peekable();
    for z in &report.eigenvalues {
        let is_candidate = kept.peek() == Some(z);
        if is_candidate {
            kept.next();
        }
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{}",
            z.re,
            z.im,
            report.bands.edges.dist(*z),
            u8::from(is_candidate)
        )
        .unwrap();
    }
    out
}

/// Band rectangles `k,a,b` (1-based `k`).
pub fn band_rectangles_csv(report: &LtReport) -> String {
    let mut out = String::from("k,a,b\n");
    for (k, [a, b]) in report.bands.edges.edges().iter().enumerate() {
        writeln!(out, "{},{:.16e},{:.16e}", k + 1, a, b).unwrap();
    }
    out
}
