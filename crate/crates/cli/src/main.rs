//! `ltlab`: band structures, distortion checks, spectra and Lieb–Thirring sums
//! from the command line.
//!
//! Exit status is 0 when every asserted inequality holds, 1 when one fails and
//! 2 on invalid input.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ltlab::band_geometry::{verify_distortion, BandSet, Rect};
use ltlab::hill_models::band_edges_with;
use ltlab::lt_lab::{
    epsilon_sweep, run_experiment, spectrum_csv, to_canonical_json, BandSpec, ExperimentConfig, PotentialKindSpec,
    PotentialSpec,
};
use ltlab::spectral_constants::{c_integral, eta, omega0, weight_integral, ExponentPack, ThresholdOmega};

#[derive(Parser)]
#[command(
    name = "ltlab",
    version,
    about = "Lieb–Thirring laboratory for periodic Schrödinger operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band edges of a periodic potential (JSON).
    Bands(BandsArgs),
    /// Sampled check of the distortion bounds for a band set (JSON).
    DistortionCheck(DistortionArgs),
    /// Eigenvalues of the discretized operator from a config (CSV).
    Spectrum(SpectrumArgs),
    /// Full experiment report from a config (JSON).
    Ltsum(LtsumArgs),
    /// Constants for an exponent triple (JSON).
    Constants(ConstantsArgs),
    /// Experiment repeated over a list of ε (JSON).
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Free,
    Cosine,
    Table,
}

#[derive(Args)]
struct BandsArgs {
    /// Take the potential and energy range from an experiment config; the
    /// potential flags below are then ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Kind::Cosine)]
    kind: Kind,
    /// `V₀ = amplitude·cos(2πx/period)` for kind cosine.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    amplitude: f64,
    #[arg(long, default_value_t = PI)]
    period: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    shift: f64,
    /// Two-column `x,V` CSV for kind table.
    #[arg(long)]
    path: Option<PathBuf>,
    #[arg(long, default_value_t = -2.5, allow_negative_numbers = true)]
    e_min: f64,
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    e_max: f64,
    #[arg(long, default_value_t = 4)]
    count: usize,
    #[arg(long, default_value_t = 2048)]
    steps: usize,
    #[arg(long, default_value_t = 4000)]
    scan_points: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DistortionArgs {
    /// Band edges as `a1,b1;a2,b2;…`.
    #[arg(long, conflicts_with = "bands_file")]
    bands: Option<String>,
    /// JSON file holding `[[a1,b1],…]` or the output of `ltlab bands`.
    #[arg(long)]
    bands_file: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    omega: f64,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    re_min: f64,
    #[arg(long, default_value_t = 7.5, allow_negative_numbers = true)]
    re_max: f64,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    im_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    im_max: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `perturbation.epsilon`.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LtsumArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `perturbation.epsilon`.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    tau: f64,
    /// With `--v0-sup` and `--v-norm`, also report `ω₀`.
    #[arg(long, requires_all = ["v0_sup", "v_norm"])]
    a1: Option<f64>,
    #[arg(long, requires = "a1")]
    v0_sup: Option<f64>,
    #[arg(long, requires = "a1")]
    v_norm: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Positive, strictly descending.
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.25,0.125")]
    epsilons: Vec<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Relative tolerance on `η^{2p}(2π)^d = c_integral`.
const IDENTITY_TOL: f64 = 1e-12;

#[derive(Serialize)]
struct ConstantsReport {
    p: f64,
    d: u32,
    tau: f64,
    q: f64,
    alpha: f64,
    eta: f64,
    c_integral: f64,
    /// `|η^{2p}(2π)^d − c_integral| / c_integral`
    identity_residual: f64,
    identity_holds: bool,
    /// `B(α+1, d/2+τ)`
    weight_integral: f64,
    omega0: Option<ThresholdOmega<f64>>,
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn load_config(path: &Path, epsilon: Option<f64>) -> Result<ExperimentConfig> {
    let cfg = ExperimentConfig::load(path)?;
    Ok(match epsilon {
        Some(e) => cfg.with_epsilon(e),
        None => cfg,
    })
}

fn parse_bands(text: &str) -> Result<BandSet<f64>> {
    let mut pairs = Vec::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b) = item
            .split_once(',')
            .with_context(|| format!("band {item:?} is not of the form a,b"))?;
        pairs.push((a.trim().parse()?, b.trim().parse()?));
    }
    Ok(BandSet::from_pairs(&pairs)?)
}

fn read_bands_file(path: &Path) -> Result<BandSet<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let edges = match value.get("bands") {
        Some(inner) => inner.clone(),
        None => value,
    };
    Ok(serde_json::from_value(edges)?)
}

fn bands(args: BandsArgs) -> Result<bool> {
    let (potential, spec) = match &args.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            (cfg.potential, cfg.bands)
        }
        None => (
            PotentialSpec {
                kind: match args.kind {
                    Kind::Free => PotentialKindSpec::Free,
                    Kind::Cosine => PotentialKindSpec::Cosine,
                    Kind::Table => PotentialKindSpec::Table,
                },
                amplitude: args.amplitude,
                period: args.period,
                shift: args.shift,
                path: args.path.clone(),
            },
            BandSpec {
                e_min: args.e_min,
                e_max: args.e_max,
                count: args.count,
                steps: args.steps,
                scan_points: args.scan_points,
            },
        ),
    };
    let v0 = potential.build()?;
    let hill = band_edges_with(&v0, (spec.e_min, spec.e_max), spec.count, spec.scan())?;
    emit(args.output.as_deref(), &to_canonical_json(&hill)?)?;
    Ok(true)
}

fn distortion_check(args: DistortionArgs) -> Result<bool> {
    let bands = match (&args.bands, &args.bands_file) {
        (Some(text), _) => parse_bands(text)?,
        (None, Some(path)) => read_bands_file(path)?,
        (None, None) => bail!("one of --bands or --bands-file is required"),
    };
    let region = Rect::new((args.re_min, args.re_max), (args.im_min, args.im_max));
    let report = verify_distortion(&bands, args.omega, region, args.samples, args.seed)?;
    emit(args.output.as_deref(), &to_canonical_json(&report)?)?;
    Ok(report.success)
}

fn spectrum(args: SpectrumArgs) -> Result<bool> {
    let cfg = load_config(&args.config, args.epsilon)?;
    let model = ltlab::lt_lab::build_model(&cfg)?;
    let (eigs, _) = ltlab::lt_lab::compute_spectrum(&model)?;
    emit(args.output.as_deref(), &spectrum_csv(&eigs))?;
    Ok(true)
}

fn ltsum(args: LtsumArgs) -> Result<bool> {
    let cfg = load_config(&args.config, args.epsilon)?;
    let report = run_experiment(&cfg)?;
    emit(args.output.as_deref(), &report.to_canonical_json())?;
    Ok(report.assertions_hold())
}

fn constants(args: ConstantsArgs) -> Result<bool> {
    let pack = ExponentPack::new(args.p, args.d, args.tau)?;
    let e = eta(args.p, args.d)?;
    let c = c_integral(args.p, args.d)?;
    let identity = e.powf(2.0 * args.p) * (2.0 * PI).powi(args.d as i32);
    let residual = (identity - c).abs() / c;
    let omega0 = match (args.a1, args.v0_sup, args.v_norm) {
        (Some(a1), Some(v0), Some(v)) => Some(omega0(args.p, args.d, a1, v0, v)?),
        _ => None,
    };
    let report = ConstantsReport {
        p: pack.p,
        d: pack.d,
        tau: pack.tau,
        q: pack.q,
        alpha: pack.alpha,
        eta: e,
        c_integral: c,
        identity_residual: residual,
        identity_holds: residual <= IDENTITY_TOL,
        weight_integral: weight_integral(pack.alpha, pack.p)?,
        omega0,
    };
    emit(args.output.as_deref(), &to_canonical_json(&report)?)?;
    Ok(report.identity_holds)
}

fn sweep(args: SweepArgs) -> Result<bool> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let report = epsilon_sweep(&cfg, &args.epsilons)?;
    emit(args.output.as_deref(), &report.to_canonical_json())?;
    Ok(report.assertions_hold())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bands(a) => bands(a),
        Command::DistortionCheck(a) => distortion_check(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Ltsum(a) => ltsum(a),
        Command::Constants(a) => constants(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("ltlab: an asserted inequality failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
